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

// Multi-arm runs and parameter sweeps on top of the federation engine.

#ifndef GCFL_EXPERIMENT_H_
#define GCFL_EXPERIMENT_H_

#include <filesystem>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "gcfl/config.h"
#include "gcfl/federation.h"
#include "gcfl/metrics.h"

namespace gcfl {

struct ArmResult {
  Algo algo;
  TrainingResult training;
};

struct ExperimentResult {
  RunManifest manifest;
  std::vector<ArmResult> arms;
  std::vector<ArmSummary> summaries;
};

// Every arm sees the same data, partition and noise realization.
ExperimentResult RunExperiment(const ExperimentConfig& cfg);

// <dir>/<arm>.csv for each arm plus <dir>/summary.json.
void WriteExperiment(const ExperimentResult& result,
                     const std::filesystem::path& dir);

// Runs and writes to cfg.output_dir. Returns a process exit code and
// reports failures on `log`.
int Run(const ExperimentConfig& cfg, std::ostream& log);

struct SweepRecord {
  std::string arm;
  std::string value;
  double final_accuracy = 0.0;
  std::optional<double> cost_ratio;
  std::optional<double> mean_coreset_clean_fraction;
};

// One run per value under <cfg.output_dir>/<param>=<value>, then a combined
// <cfg.output_dir>/sweep.json.
std::vector<SweepRecord> RunSweep(const ExperimentConfig& cfg,
                                  const SweepSpec& spec);
int Sweep(const ExperimentConfig& cfg, const SweepSpec& spec,
          std::ostream& log);

}  // namespace gcfl

#endif  // GCFL_EXPERIMENT_H_
