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

#include "gcfl/experiment.h"

#include <fstream>
#include <future>

#include "gcfl/errors.h"
#include "json.hpp"

namespace gcfl {
namespace {

std::optional<double> MeanCleanFraction(const TrainingResult& r) {
  double sum = 0.0;
  int count = 0;
  for (const RoundMetrics& m : r.rounds) {
    if (m.coreset_clean_fraction) {
      sum += *m.coreset_clean_fraction;
      ++count;
    }
  }
  if (count == 0) return std::nullopt;
  return sum / count;
}

}  // namespace

ExperimentResult RunExperiment(const ExperimentConfig& cfg) {
  cfg.Validate();
  const FederatedData data = BuildFederatedData(cfg);

  ExperimentResult result;
  result.manifest.config_text = ToText(cfg);
  result.manifest.seed = cfg.seed;
  result.manifest.dataset_fingerprint = data.fingerprint;

  const CostLedger* fedavg_ledger = nullptr;
  for (const Algo& algo : cfg.algos) {
    result.arms.push_back(ArmResult{algo, RunTraining(cfg, algo, data)});
  }
  for (const ArmResult& arm : result.arms) {
    if (arm.algo == Algo{AlgoKind::kFedAvg})
      fedavg_ledger = &arm.training.ledger;
  }
  for (const ArmResult& arm : result.arms) {
    const TrainingResult& tr = arm.training;
    ArmSummary s;
    s.name = arm.algo.Name();
    if (!tr.rounds.empty()) {
      s.final_accuracy = tr.rounds.back().test_accuracy;
      s.final_train_loss = tr.rounds.back().mean_train_loss;
    }
    s.mean_coreset_clean_fraction = MeanCleanFraction(tr);
    s.ledger = tr.ledger;
    if (fedavg_ledger && fedavg_ledger->sgd_sample_visits > 0) {
      s.cost_ratio = ComputeCostRatio(tr.ledger, *fedavg_ledger);
    }
    result.summaries.push_back(std::move(s));
  }
  return result;
}

void WriteExperiment(const ExperimentResult& result,
                     const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) {
    throw IoError("cannot create '" + dir.string() + "': " + ec.message());
  }
  for (const ArmResult& arm : result.arms) {
    WriteRoundLog(dir / (arm.algo.Name() + ".csv"), arm.training.rounds);
  }
  WriteSummary(dir / "summary.json", result.manifest, result.summaries);
}

int Run(const ExperimentConfig& cfg, std::ostream& log) {
  try {
    const ExperimentResult result = RunExperiment(cfg);
    WriteExperiment(result, cfg.output_dir);
    for (const ArmSummary& s : result.summaries) {
      log << s.name << ": final accuracy " << s.final_accuracy;
      if (s.cost_ratio) log << ", cost ratio " << *s.cost_ratio;
      log << '\n';
    }
    return 0;
  } catch (const std::exception& e) {
    log << "error: " << e.what() << '\n';
    return 1;
  }
}

std::vector<SweepRecord> RunSweep(const ExperimentConfig& cfg,
                                  const SweepSpec& spec) {
  spec.Validate();
  const std::filesystem::path root = cfg.output_dir;
  std::vector<ExperimentConfig> points;
  for (const std::string& value : spec.values) {
    ExperimentConfig point = ApplySweepValue(cfg, spec.param, value);
    point.output_dir = (root / (spec.param + "=" + value)).string();
    points.push_back(std::move(point));
  }

  // Sweep points are independent runs.
  std::vector<std::future<ExperimentResult>> futures;
  for (const ExperimentConfig& point : points) {
    futures.push_back(std::async(std::launch::async, [&point] {
      ExperimentResult r = RunExperiment(point);
      WriteExperiment(r, point.output_dir);
      return r;
    }));
  }

  std::vector<SweepRecord> records;
  for (std::size_t i = 0; i < futures.size(); ++i) {
    const ExperimentResult r = futures[i].get();
    for (const ArmSummary& s : r.summaries) {
      records.push_back(SweepRecord{s.name, spec.values[i], s.final_accuracy,
                                    s.cost_ratio,
                                    s.mean_coreset_clean_fraction});
    }
  }

  nlohmann::json doc;
  doc["schema_version"] = kSummarySchemaVersion;
  doc["param"] = spec.param;
  doc["values"] = spec.values;
  nlohmann::json rows = nlohmann::json::array();
  for (const SweepRecord& rec : records) {
    auto opt = [](const std::optional<double>& v) {
      return v ? nlohmann::json(*v) : nlohmann::json(nullptr);
    };
    rows.push_back({{"arm", rec.arm},
                    {"value", rec.value},
                    {"final_accuracy", rec.final_accuracy},
                    {"cost_ratio", opt(rec.cost_ratio)},
                    {"mean_coreset_clean_fraction",
                     opt(rec.mean_coreset_clean_fraction)}});
  }
  doc["records"] = std::move(rows);
  std::filesystem::create_directories(root);
  const auto path = root / "sweep.json";
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  out << doc.dump(2) << '\n';
  return records;
}

int Sweep(const ExperimentConfig& cfg, const SweepSpec& spec,
          std::ostream& log) {
  try {
    for (const SweepRecord& rec : RunSweep(cfg, spec)) {
      log << spec.param << '=' << rec.value << ' ' << rec.arm
          << ": final accuracy " << rec.final_accuracy << '\n';
    }
    return 0;
  } catch (const std::exception& e) {
    log << "error: " << e.what() << '\n';
    return 1;
  }
}

}  // namespace gcfl
