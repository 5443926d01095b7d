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

// Evaluation and reporting: accuracy, coreset composition, per-round CSV
// logs and the JSON run summary.

#ifndef GCFL_METRICS_H_
#define GCFL_METRICS_H_

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "gcfl/coreset.h"
#include "gcfl/dataset.h"
#include "gcfl/ledger.h"
#include "gcfl/model.h"

namespace gcfl {

inline constexpr const char* kLibraryVersion = "0.3.0";
inline constexpr int kSummarySchemaVersion = 1;

struct RoundMetrics {
  int round = 0;
  double test_accuracy = 0.0;
  double mean_train_loss = 0.0;
  std::optional<double> coreset_clean_fraction;  // coreset algorithms only
  CostLedger ledger;                             // cumulative, after this round
};

// Fraction of argmax-correct predictions. Throws DomainError when empty.
double EvaluateAccuracy(const ParamVector& params, const Dataset& test);

// Fraction of selected indices whose clean flag is set; 1.0 for an empty
// coreset.
double CoresetComposition(const Coreset& coreset, const ClientChunk& chunk);

inline constexpr const char* kRoundLogHeader =
    "round,test_accuracy,mean_train_loss,coreset_clean_fraction,grad_evals,"
    "sgd_visits,params_bcast,grads_bcast,uploads";

// One row per round, reals with 9 significant digits, an empty cell for a
// missing clean fraction.
void WriteRoundLog(const std::filesystem::path& path,
                   const std::vector<RoundMetrics>& rounds);
std::vector<RoundMetrics> ReadRoundLog(const std::filesystem::path& path);

struct RunManifest {
  std::string config_text;  // canonical resolved config
  std::string library_version = kLibraryVersion;
  std::uint64_t seed = 0;
  std::uint64_t dataset_fingerprint = 0;
};

struct ArmSummary {
  std::string name;
  double final_accuracy = 0.0;
  double final_train_loss = 0.0;
  std::optional<double> mean_coreset_clean_fraction;
  CostLedger ledger;
  // Against the fedavg arm of the same run, when one exists.
  std::optional<double> cost_ratio;
};

void WriteSummary(const std::filesystem::path& path,
                  const RunManifest& manifest,
                  const std::vector<ArmSummary>& arms);

std::string FingerprintHex(std::uint64_t fingerprint);

}  // namespace gcfl

#endif  // GCFL_METRICS_H_
