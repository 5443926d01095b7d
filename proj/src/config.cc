// Copyright 2026 The Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "gcfl/config.h"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <functional>
#include <set>
#include <sstream>

#include "gcfl/errors.h"

namespace gcfl {
namespace {

std::string Trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return "";
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

template <typename T>
T ParseNumber(const std::string& key, const std::string& text,
              const char* type_name) {
  const std::string s = Trim(text);
  T value{};
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (s.empty() || ec != std::errc() || ptr != s.data() + s.size()) {
    throw ConfigError(key + ": expected " + type_name + ", got '" + text + "'");
  }
  return value;
}

int ParseInt(const std::string& key, const std::string& v) {
  return ParseNumber<int>(key, v, "an integer");
}
double ParseReal(const std::string& key, const std::string& v) {
  return ParseNumber<double>(key, v, "a real number");
}
bool ParseBool(const std::string& key, const std::string& v) {
  const std::string s = Trim(v);
  if (s == "true" || s == "1") return true;
  if (s == "false" || s == "0") return false;
  throw ConfigError(key + ": expected true or false, got '" + v + "'");
}

std::string FormatReal(double x) {
  char buf[32];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, ptr);
}

std::string JoinReals(const std::vector<double>& xs) {
  std::string out;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (i) out += ", ";
    out += FormatReal(xs[i]);
  }
  return out;
}

struct Field {
  const char* key;
  std::function<void(ExperimentConfig&, const std::string&)> set;
  std::function<std::string(const ExperimentConfig&)> get;
};

#define GCFL_INT_FIELD(KEY, MEMBER)                                        \
  Field {                                                                  \
    KEY,                                                                   \
        [](ExperimentConfig& c, const std::string& v) {                    \
          c.MEMBER = ParseInt(KEY, v);                                     \
        },                                                                 \
        [](const ExperimentConfig& c) { return std::to_string(c.MEMBER); } \
  }
#define GCFL_REAL_FIELD(KEY, MEMBER)                                   \
  Field {                                                              \
    KEY,                                                               \
        [](ExperimentConfig& c, const std::string& v) {                \
          c.MEMBER = ParseReal(KEY, v);                                \
        },                                                             \
        [](const ExperimentConfig& c) { return FormatReal(c.MEMBER); } \
  }

// Order defines the canonical text layout; dotted keys must be grouped by
// section.
const std::vector<Field>& Fields() {
  static const std::vector<Field> fields = {
      Field{"seed",
            [](ExperimentConfig& c, const std::string& v) {
              c.seed = ParseNumber<std::uint64_t>("seed", v,
                                                  "a non-negative integer");
            },
            [](const ExperimentConfig& c) { return std::to_string(c.seed); }},
      Field{"algos",
            [](ExperimentConfig& c, const std::string& v) {
              c.algos.clear();
              for (const auto& name : SplitList(v)) {
                c.algos.push_back(ParseAlgo(name));
              }
            },
            [](const ExperimentConfig& c) {
              std::string out;
              for (std::size_t i = 0; i < c.algos.size(); ++i) {
                if (i) out += ", ";
                out += c.algos[i].Name();
              }
              return out;
            }},
      GCFL_INT_FIELD("num_clients", num_clients),
      GCFL_INT_FIELD("clients_per_round", clients_per_round),
      GCFL_INT_FIELD("rounds", rounds),
      GCFL_INT_FIELD("refresh_period", refresh_period),
      GCFL_REAL_FIELD("budget_fraction", budget_fraction),
      GCFL_INT_FIELD("local_epochs", local_epochs),
      GCFL_REAL_FIELD("local_lr", local_lr),
      GCFL_REAL_FIELD("global_lr", global_lr),
      GCFL_INT_FIELD("batch_size", batch_size),
      GCFL_REAL_FIELD("momentum", momentum),
      GCFL_REAL_FIELD("weight_decay", weight_decay),
      Field{"cosine_annealing",
            [](ExperimentConfig& c, const std::string& v) {
              c.cosine_annealing = ParseBool("cosine_annealing", v);
            },
            [](const ExperimentConfig& c) {
              return std::string(c.cosine_annealing ? "true" : "false");
            }},
      GCFL_REAL_FIELD("lambda", lambda),
      GCFL_INT_FIELD("per_iteration_picks", per_iteration_picks),
      GCFL_REAL_FIELD("residual_tolerance", residual_tolerance),
      GCFL_REAL_FIELD("dirichlet_alpha", dirichlet_alpha),
      GCFL_REAL_FIELD("val_frac", val_frac),
      GCFL_REAL_FIELD("test_frac", test_frac),
      GCFL_REAL_FIELD("fedprox_mu", fedprox_mu),
      GCFL_INT_FIELD("fine_tune_epochs", fine_tune_epochs),
      GCFL_REAL_FIELD("fine_tune_lr", fine_tune_lr),
      Field{"output_dir",
            [](ExperimentConfig& c, const std::string& v) {
              c.output_dir = Trim(v);
            },
            [](const ExperimentConfig& c) { return c.output_dir; }},
      Field{"dataset.kind",
            [](ExperimentConfig& c, const std::string& v) {
              const std::string kind = Trim(v);
              if (kind != "blobs" && kind != "csv") {
                throw ConfigError("dataset.kind: expected blobs or csv, got '" +
                                  v + "'");
              }
              c.dataset.kind = kind;
            },
            [](const ExperimentConfig& c) { return c.dataset.kind; }},
      GCFL_INT_FIELD("dataset.num_blobs", dataset.num_blobs),
      GCFL_INT_FIELD("dataset.dim", dataset.dim),
      GCFL_INT_FIELD("dataset.samples_per_blob", dataset.samples_per_blob),
      GCFL_REAL_FIELD("dataset.std_min", dataset.std_min),
      GCFL_REAL_FIELD("dataset.std_max", dataset.std_max),
      Field{
          "dataset.stds",
          [](ExperimentConfig& c, const std::string& v) {
            c.dataset.stds.clear();
            for (const auto& s : SplitList(v)) {
              c.dataset.stds.push_back(ParseReal("dataset.stds", s));
            }
          },
          [](const ExperimentConfig& c) { return JoinReals(c.dataset.stds); }},
      Field{"dataset.path",
            [](ExperimentConfig& c, const std::string& v) {
              c.dataset.path = Trim(v);
            },
            [](const ExperimentConfig& c) { return c.dataset.path; }},
      Field{"noise.kind",
            [](ExperimentConfig& c, const std::string& v) {
              c.noise.kind = ParseNoiseKind(Trim(v));
            },
            [](const ExperimentConfig& c) {
              return std::string(NoiseKindName(c.noise.kind));
            }},
      GCFL_REAL_FIELD("noise.ratio", noise.ratio),
      GCFL_REAL_FIELD("noise.severity", noise.severity),
      Field{"model.arch",
            [](ExperimentConfig& c, const std::string& v) {
              c.arch = ParseArch(Trim(v));
            },
            [](const ExperimentConfig& c) {
              return std::string(ArchName(c.arch));
            }},
      GCFL_INT_FIELD("model.hidden_dim", hidden_dim),
  };
  return fields;
}

#undef GCFL_INT_FIELD
#undef GCFL_REAL_FIELD

const Field& FindField(const std::string& key) {
  for (const Field& f : Fields()) {
    if (key == f.key) return f;
  }
  throw ConfigError("unknown config key '" + key + "'");
}

void Require(bool ok, const std::string& key, const std::string& constraint) {
  if (!ok) throw ConfigError(key + ": must satisfy " + constraint);
}

}  // namespace

std::vector<std::string> SplitList(const std::string& text) {
  std::vector<std::string> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = Trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

std::vector<double> DatasetSpec::ResolvedStds() const {
  if (!stds.empty()) return stds;
  return LinearSpread(std_min, std_max, num_blobs);
}

void ExperimentConfig::Validate() const {
  Require(num_clients >= 1, "num_clients", "num_clients >= 1");
  Require(clients_per_round >= 1 && clients_per_round <= num_clients,
          "clients_per_round", "1 <= clients_per_round <= num_clients");
  Require(rounds >= 0, "rounds", "rounds >= 0");
  Require(refresh_period >= 1, "refresh_period", "refresh_period >= 1");
  Require(budget_fraction > 0.0 && budget_fraction <= 1.0, "budget_fraction",
          "0 < budget_fraction <= 1");
  Require(local_epochs >= 0, "local_epochs", "local_epochs >= 0");
  Require(local_lr > 0.0, "local_lr", "local_lr > 0");
  Require(global_lr > 0.0, "global_lr", "global_lr > 0");
  Require(batch_size >= 1, "batch_size", "batch_size >= 1");
  Require(momentum >= 0.0 && momentum < 1.0, "momentum", "0 <= momentum < 1");
  Require(weight_decay >= 0.0, "weight_decay", "weight_decay >= 0");
  Require(lambda >= 0.0, "lambda", "lambda >= 0");
  Require(per_iteration_picks >= 1, "per_iteration_picks",
          "per_iteration_picks >= 1");
  Require(residual_tolerance >= 0.0, "residual_tolerance",
          "residual_tolerance >= 0");
  Require(dirichlet_alpha > 0.0, "dirichlet_alpha", "dirichlet_alpha > 0");
  Require(val_frac >= 0.0, "val_frac", "val_frac >= 0");
  Require(test_frac >= 0.0, "test_frac", "test_frac >= 0");
  Require(val_frac + test_frac < 1.0, "val_frac", "val_frac + test_frac < 1");
  Require(fedprox_mu >= 0.0, "fedprox_mu", "fedprox_mu >= 0");
  Require(fine_tune_epochs >= 0, "fine_tune_epochs", "fine_tune_epochs >= 0");
  Require(fine_tune_lr > 0.0, "fine_tune_lr", "fine_tune_lr > 0");
  Require(noise.ratio >= 0.0 && noise.ratio <= 1.0, "noise.ratio",
          "0 <= noise.ratio <= 1");
  Require(noise.severity >= 0.0, "noise.severity", "noise.severity >= 0");
  Require(arch != Arch::kOneHidden || hidden_dim >= 1, "model.hidden_dim",
          "hidden_dim >= 1 for one_hidden");
  Require(!algos.empty(), "algos", "at least one algorithm arm");
  std::set<std::string> names;
  for (const Algo& a : algos) {
    Require(names.insert(a.Name()).second, "algos", "distinct arms");
  }
  Require(!output_dir.empty(), "output_dir", "a non-empty path");
  if (dataset.kind == "blobs") {
    Require(dataset.num_blobs >= 1, "dataset.num_blobs", "num_blobs >= 1");
    Require(dataset.dim >= 1, "dataset.dim", "dim >= 1");
    Require(dataset.samples_per_blob >= 1, "dataset.samples_per_blob",
            "samples_per_blob >= 1");
    Require(
        dataset.stds.empty() ||
            dataset.stds.size() == static_cast<std::size_t>(dataset.num_blobs),
        "dataset.stds", "one entry per blob");
    Require(dataset.std_min >= 0.0 && dataset.std_min <= dataset.std_max,
            "dataset.std_min", "0 <= std_min <= std_max");
    for (double s : dataset.stds) {
      Require(s >= 0.0, "dataset.stds", "every std >= 0");
    }
  } else {
    Require(!dataset.path.empty(), "dataset.path",
            "a CSV path when dataset.kind = csv");
  }
}

SelectionConfig ExperimentConfig::Selection() const {
  return SelectionConfig{budget_fraction, lambda, per_iteration_picks,
                         residual_tolerance};
}

void SetConfigValue(ExperimentConfig& cfg, const std::string& key,
                    const std::string& value) {
  FindField(key).set(cfg, value);
}

ExperimentConfig ParseConfigText(
    const std::string& text,
    const std::vector<std::pair<std::string, std::string>>& overrides) {
  ExperimentConfig cfg;
  bool saw_clients_per_round = false;
  std::string section;
  std::stringstream in(text);
  std::string raw;
  int line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    const auto hash = raw.find('#');
    const std::string line =
        Trim(hash == std::string::npos ? raw : raw.substr(0, hash));
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') {
        throw ConfigError("line " + std::to_string(line_no) +
                          ": malformed section header '" + line + "'");
      }
      section = Trim(line.substr(1, line.size() - 2));
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("line " + std::to_string(line_no) +
                        ": expected key = value, got '" + line + "'");
    }
    std::string key = Trim(line.substr(0, eq));
    if (!section.empty()) key = section + "." + key;
    SetConfigValue(cfg, key, line.substr(eq + 1));
    saw_clients_per_round |= key == "clients_per_round";
  }
  for (const auto& [key, value] : overrides) {
    SetConfigValue(cfg, key, value);
    saw_clients_per_round |= key == "clients_per_round";
  }
  if (!saw_clients_per_round) cfg.clients_per_round = cfg.num_clients;
  cfg.Validate();
  return cfg;
}

ExperimentConfig ParseConfigFile(
    const std::string& path,
    const std::vector<std::pair<std::string, std::string>>& overrides) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open config '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return ParseConfigText(buf.str(), overrides);
}

std::string ToText(const ExperimentConfig& cfg) {
  std::string out;
  std::string section;
  for (const Field& f : Fields()) {
    const std::string key = f.key;
    const auto dot = key.find('.');
    const std::string sec = dot == std::string::npos ? "" : key.substr(0, dot);
    if (sec != section) {
      out += "\n[" + sec + "]\n";
      section = sec;
    }
    out += (dot == std::string::npos ? key : key.substr(dot + 1)) + " = " +
           f.get(cfg) + "\n";
  }
  return out;
}

void SweepSpec::Validate() const {
  static const std::set<std::string> kParams = {
      "noise.ratio", "budget_fraction", "dirichlet_alpha", "refresh_period",
      "num_clients"};
  if (!kParams.contains(param)) {
    throw ConfigError("sweep: unsupported parameter '" + param +
                      "' (expected noise.ratio, budget_fraction, "
                      "dirichlet_alpha, refresh_period or num_clients)");
  }
  if (values.empty()) throw ConfigError("sweep: values list is empty");
}

ExperimentConfig ApplySweepValue(const ExperimentConfig& cfg,
                                 const std::string& param,
                                 const std::string& value) {
  ExperimentConfig out = cfg;
  const bool full_participation = cfg.clients_per_round == cfg.num_clients;
  SetConfigValue(out, param, value);
  if (param == "num_clients" && full_participation) {
    out.clients_per_round = out.num_clients;
  }
  out.Validate();
  return out;
}

}  // namespace gcfl
