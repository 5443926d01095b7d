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

// Coreset selection: gradient matching by orthogonal matching pursuit
// (plain and per class), plus the random and facility-location baselines.

#ifndef GCFL_CORESET_H_
#define GCFL_CORESET_H_

#include <cstdint>
#include <map>
#include <vector>

#include "gcfl/dataset.h"
#include "gcfl/model.h"

namespace gcfl {

struct ClassSelection {
  std::vector<std::size_t> indices;
  std::vector<double> weights;
};

struct Coreset {
  std::vector<std::size_t> indices;         // into the owning ClientChunk
  std::vector<double> weights;              // aligned with indices, >= 0
  std::map<int, ClassSelection> per_class;  // filled by label-wise selection

  std::size_t size() const { return indices.size(); }
  bool empty() const { return indices.empty(); }
};

struct SelectionConfig {
  double budget_fraction = 0.1;
  double lambda = 0.5;
  int per_iteration_picks = 1;
  double residual_tolerance = 0.0;

  void Validate() const;
};

// round(fraction * n), but never zero for a non-empty chunk.
std::size_t CoresetBudget(double fraction, std::size_t n);

// argmin_{w >= 0} lambda |w|^2 + |A w - target|^2 (Lawson-Hanson on the
// normal equations). Columns of A are the candidates.
Vector RidgeWeights(const Matrix& columns, const Vector& target, double lambda);

// Greedy gradient matching. `candidates` holds one candidate gradient per
// column. Each iteration adds the `per_iteration_picks` unselected columns
// closest (Euclidean) to the residual r = target - A_G w, ties to the lowest
// index, then re-solves w on the whole support with RidgeWeights. Stops at
// `budget` columns or once |r| <= tol. When `residual_trace` is given it
// receives |r| before the first pick and after every re-solve.
Coreset OmpSelect(const Matrix& candidates, const Vector& target,
                  std::size_t budget, double lambda, int per_iteration_picks,
                  double tol, std::vector<double>* residual_trace = nullptr);

// Splits `budget` across classes: floor(budget / k) each, the remainder one
// apiece to the largest classes (ties to the lower class id). Any share
// exceeding a class's size is capped and handed on to classes that still
// have room, largest first. `class_sizes` maps class -> available samples.
std::map<int, std::size_t> AllocateClassBudgets(
    std::size_t budget, const std::map<int, std::size_t>& class_sizes);

// One OMP instance per class shared by the chunk and the server rows. The
// candidates for class y are row y of each class-y sample's last-layer
// gradient; the target is server_rows[y].
Coreset LabelwiseOmpSelect(const ClientChunk& chunk, const ParamVector& params,
                           const LabelwiseRows& server_rows, std::size_t budget,
                           const SelectionConfig& cfg);

// Uniform without replacement, unit weights. Budget is clamped to n.
Coreset RandomSelect(const ClientChunk& chunk, std::size_t budget,
                     std::uint64_t seed);

// Greedy maximization of sum_v max_{s in S} (1 + cos(x_v, x_s)) / 2 over the
// chunk's raw features. Weights are cluster sizes. `gains`, when given,
// receives the marginal gain of every pick.
Coreset FacilityLocationSelect(const ClientChunk& chunk, std::size_t budget,
                               std::vector<double>* gains = nullptr);

// Shifted cosine similarity used by FacilityLocationSelect; zero rows have
// cosine 0 with everything.
Matrix ShiftedCosineSimilarity(const Matrix& features);

}  // namespace gcfl

#endif  // GCFL_CORESET_H_
