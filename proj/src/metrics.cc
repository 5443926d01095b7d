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

#include "gcfl/metrics.h"

#include <cinttypes>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "gcfl/errors.h"
#include "json.hpp"

namespace gcfl {
namespace {

std::string Sig9(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.9g", x);
  return buf;
}

nlohmann::json LedgerJson(const CostLedger& l) {
  return {{"per_sample_grad_evals", l.per_sample_grad_evals},
          {"sgd_sample_visits", l.sgd_sample_visits},
          {"params_broadcast", l.params_broadcast},
          {"grads_broadcast", l.grads_broadcast},
          {"update_uploads", l.update_uploads}};
}

}  // namespace

double EvaluateAccuracy(const ParamVector& params, const Dataset& test) {
  if (test.empty()) throw DomainError("accuracy: empty test set");
  const std::vector<int> pred = Predict(params, test.features);
  std::size_t correct = 0;
  for (std::size_t i = 0; i < pred.size(); ++i) {
    if (pred[i] == test.labels[i]) ++correct;
  }
  return static_cast<double>(correct) / static_cast<double>(test.size());
}

double CoresetComposition(const Coreset& coreset, const ClientChunk& chunk) {
  if (coreset.empty()) return 1.0;
  std::size_t clean = 0;
  for (std::size_t i : coreset.indices) {
    if (i >= chunk.clean_flags.size()) {
      throw DomainError("composition: coreset index out of range");
    }
    if (chunk.clean_flags[i]) ++clean;
  }
  return static_cast<double>(clean) / static_cast<double>(coreset.size());
}

void WriteRoundLog(const std::filesystem::path& path,
                   const std::vector<RoundMetrics>& rounds) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  out << kRoundLogHeader << '\n';
  for (const RoundMetrics& m : rounds) {
    out << m.round << ',' << Sig9(m.test_accuracy) << ','
        << Sig9(m.mean_train_loss) << ','
        << (m.coreset_clean_fraction ? Sig9(*m.coreset_clean_fraction) : "")
        << ',' << m.ledger.per_sample_grad_evals << ','
        << m.ledger.sgd_sample_visits << ',' << m.ledger.params_broadcast << ','
        << m.ledger.grads_broadcast << ',' << m.ledger.update_uploads << '\n';
  }
  if (!out) throw IoError("write failed for '" + path.string() + "'");
}

std::vector<RoundMetrics> ReadRoundLog(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path.string() + "'");
  std::string line;
  if (!std::getline(in, line) || line != kRoundLogHeader) {
    throw IoError("'" + path.string() + "': unexpected round-log header");
  }
  std::vector<RoundMetrics> rounds;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (!line.empty() && line.back() == ',') cells.emplace_back();
    if (cells.size() != 9) {
      throw IoError("'" + path.string() + "': malformed row '" + line + "'");
    }
    RoundMetrics m;
    try {
      m.round = std::stoi(cells[0]);
      m.test_accuracy = std::stod(cells[1]);
      m.mean_train_loss = std::stod(cells[2]);
      if (!cells[3].empty()) m.coreset_clean_fraction = std::stod(cells[3]);
      m.ledger.per_sample_grad_evals = std::stoull(cells[4]);
      m.ledger.sgd_sample_visits = std::stoull(cells[5]);
      m.ledger.params_broadcast = std::stoull(cells[6]);
      m.ledger.grads_broadcast = std::stoull(cells[7]);
      m.ledger.update_uploads = std::stoull(cells[8]);
    } catch (const std::exception&) {
      throw IoError("'" + path.string() + "': unparsable row '" + line + "'");
    }
    rounds.push_back(m);
  }
  return rounds;
}

std::string FingerprintHex(std::uint64_t fingerprint) {
  char buf[20];
  std::snprintf(buf, sizeof buf, "%016" PRIx64, fingerprint);
  return buf;
}

void WriteSummary(const std::filesystem::path& path,
                  const RunManifest& manifest,
                  const std::vector<ArmSummary>& arms) {
  nlohmann::json doc;
  doc["schema_version"] = kSummarySchemaVersion;
  doc["manifest"] = {
      {"config_text", manifest.config_text},
      {"library_version", manifest.library_version},
      {"seed", manifest.seed},
      {"dataset_fingerprint", FingerprintHex(manifest.dataset_fingerprint)}};
  nlohmann::json arm_list = nlohmann::json::array();
  for (const ArmSummary& a : arms) {
    nlohmann::json j = {{"name", a.name},
                        {"final_accuracy", a.final_accuracy},
                        {"final_train_loss", a.final_train_loss},
                        {"ledger", LedgerJson(a.ledger)}};
    j["mean_coreset_clean_fraction"] =
        a.mean_coreset_clean_fraction
            ? nlohmann::json(*a.mean_coreset_clean_fraction)
            : nlohmann::json(nullptr);
    j["cost_ratio"] =
        a.cost_ratio ? nlohmann::json(*a.cost_ratio) : nlohmann::json(nullptr);
    arm_list.push_back(std::move(j));
  }
  doc["arms"] = std::move(arm_list);

  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  out << doc.dump(2) << '\n';
  if (!out) throw IoError("write failed for '" + path.string() + "'");
}

}  // namespace gcfl
