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

// Experiment configuration: the resolved parameter set for one run, its
// text format and the sweep description.
//
// The text format is INI-like: `key = value` lines, `[section]` headers that
// prefix subsequent keys with `section.`, and `#` comments. Lists are
// comma-separated. Command-line overrides use the same dotted keys.

#ifndef GCFL_CONFIG_H_
#define GCFL_CONFIG_H_

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "gcfl/dataset.h"
#include "gcfl/federation_types.h"
#include "gcfl/model.h"

namespace gcfl {

struct DatasetSpec {
  std::string kind = "blobs";  // blobs | csv
  int num_blobs = 10;
  int dim = 10;
  int samples_per_blob = 500;
  double std_min = 1.0;
  double std_max = 8.0;
  std::vector<double> stds;  // overrides the std_min..std_max spread
  std::string path;          // csv only

  std::vector<double> ResolvedStds() const;
};

struct ExperimentConfig {
  DatasetSpec dataset;
  std::uint64_t seed = 0;
  int num_clients = 10;
  int clients_per_round = 10;
  int rounds = 100;
  int refresh_period = 10;
  double budget_fraction = 0.1;
  int local_epochs = 1;
  double local_lr = 0.01;
  double global_lr = 0.01;
  int batch_size = 32;
  double momentum = 0.0;
  double weight_decay = 0.0;
  bool cosine_annealing = false;
  double lambda = 0.5;
  int per_iteration_picks = 1;
  double residual_tolerance = 0.0;
  double dirichlet_alpha = 0.4;
  double val_frac = 0.1;
  double test_frac = 0.15;
  double fedprox_mu = 0.01;
  int fine_tune_epochs = 1;
  double fine_tune_lr = 0.01;
  NoiseSpec noise;
  Arch arch = Arch::kSoftmaxRegression;
  int hidden_dim = 32;
  std::vector<Algo> algos = {Algo{AlgoKind::kGcfl}};
  std::string output_dir = "out";

  // Throws ConfigError naming the offending key and constraint.
  void Validate() const;
  SelectionConfig Selection() const;
};

// Parses config text; unspecified keys keep their defaults, and
// clients_per_round defaults to num_clients. The result is validated.
// `overrides` are applied after the text, in order.
ExperimentConfig ParseConfigText(
    const std::string& text,
    const std::vector<std::pair<std::string, std::string>>& overrides = {});
ExperimentConfig ParseConfigFile(
    const std::string& path,
    const std::vector<std::pair<std::string, std::string>>& overrides = {});

// Applies one dotted key. Throws ConfigError for unknown keys and
// unparsable values; does not validate cross-key invariants.
void SetConfigValue(ExperimentConfig& cfg, const std::string& key,
                    const std::string& value);

// Canonical text; ParseConfigText(ToText(c)) reproduces c exactly.
std::string ToText(const ExperimentConfig& cfg);

struct SweepSpec {
  std::string param;  // noise.ratio | budget_fraction | dirichlet_alpha |
                      // refresh_period | num_clients
  std::vector<std::string> values;

  void Validate() const;
};

// Copy of `cfg` with the swept parameter set to `value`. Sweeping
// num_clients keeps full participation when cfg had it.
ExperimentConfig ApplySweepValue(const ExperimentConfig& cfg,
                                 const std::string& param,
                                 const std::string& value);

std::vector<std::string> SplitList(const std::string& text);

}  // namespace gcfl

#endif  // GCFL_CONFIG_H_
