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

#include "gcfl/coreset.h"

#include <algorithm>
#include <numeric>
#include <utility>

#include "gcfl/errors.h"
#include "gcfl/random.h"

namespace gcfl {

void SelectionConfig::Validate() const {
  if (!(budget_fraction > 0.0 && budget_fraction <= 1.0)) {
    throw ConfigError("budget_fraction must lie in (0, 1]");
  }
  if (!(lambda >= 0.0)) throw ConfigError("lambda must be >= 0");
  if (per_iteration_picks < 1) {
    throw ConfigError("per_iteration_picks must be >= 1");
  }
  if (!(residual_tolerance >= 0.0)) {
    throw ConfigError("residual_tolerance must be >= 0");
  }
}

std::size_t CoresetBudget(double fraction, std::size_t n) {
  if (n == 0) return 0;
  return std::max<std::size_t>(1, FractionCount(fraction, n));
}

Vector RidgeWeights(const Matrix& columns, const Vector& target,
                    double lambda) {
  const Eigen::Index k = columns.cols();
  Matrix gram = columns.transpose() * columns;
  gram.diagonal().array() += lambda;
  const Vector rhs = columns.transpose() * target;

  // Lawson-Hanson active set, run on the normal equations. `passive` holds
  // the coordinates currently allowed to be positive.
  auto solve_passive = [&](const std::vector<Eigen::Index>& passive) {
    const auto p = static_cast<Eigen::Index>(passive.size());
    Matrix sub(p, p);
    Vector b(p);
    for (Eigen::Index a = 0; a < p; ++a) {
      b(a) = rhs(passive[a]);
      for (Eigen::Index c = 0; c < p; ++c) {
        sub(a, c) = gram(passive[a], passive[c]);
      }
    }
    // Duplicate candidates make the plain normal equations singular; take
    // the minimum-norm solution there.
    if (lambda > 0.0) return Vector(sub.llt().solve(b));
    return Vector(sub.completeOrthogonalDecomposition().solve(b));
  };

  Vector w = Vector::Zero(k);
  std::vector<bool> in_passive(k, false);
  const double scale = std::max(1.0, rhs.cwiseAbs().maxCoeff());
  for (Eigen::Index outer = 0; outer < 3 * k + 10; ++outer) {
    const Vector grad = rhs - gram * w;
    Eigen::Index enter = -1;
    double best = 1e-12 * scale;
    for (Eigen::Index i = 0; i < k; ++i) {
      if (!in_passive[i] && grad(i) > best) {
        best = grad(i);
        enter = i;
      }
    }
    if (enter < 0) break;
    in_passive[enter] = true;

    for (Eigen::Index inner = 0; inner <= k; ++inner) {
      std::vector<Eigen::Index> passive;
      for (Eigen::Index i = 0; i < k; ++i) {
        if (in_passive[i]) passive.push_back(i);
      }
      const Vector z = solve_passive(passive);
      if ((z.array() > 0.0).all()) {
        w.setZero();
        for (std::size_t a = 0; a < passive.size(); ++a) w(passive[a]) = z(a);
        break;
      }
      // Step from w towards z until the first coordinate hits zero.
      double alpha = 1.0;
      for (std::size_t a = 0; a < passive.size(); ++a) {
        if (z(a) <= 0.0) {
          const double wi = w(passive[a]);
          alpha = std::min(alpha, wi / (wi - z(a)));
        }
      }
      for (std::size_t a = 0; a < passive.size(); ++a) {
        const Eigen::Index i = passive[a];
        w(i) += alpha * (z(a) - w(i));
        if (w(i) <= 1e-15 * scale) {
          w(i) = 0.0;
          in_passive[i] = false;
        }
      }
    }
  }
  return w;
}

Coreset OmpSelect(const Matrix& candidates, const Vector& target,
                  std::size_t budget, double lambda, int per_iteration_picks,
                  double tol, std::vector<double>* residual_trace) {
  const auto n = static_cast<std::size_t>(candidates.cols());
  if (n == 0) throw DomainError("omp: empty candidate list");
  if (candidates.rows() != target.size()) {
    throw DomainError("omp: candidate length " +
                      std::to_string(candidates.rows()) + " != target length " +
                      std::to_string(target.size()));
  }
  if (budget < 1) throw ConfigError("omp: budget must be >= 1");
  if (per_iteration_picks < 1) {
    throw ConfigError("omp: per_iteration_picks must be >= 1");
  }
  if (!(lambda >= 0.0) || !(tol >= 0.0)) {
    throw ConfigError("omp: lambda and tol must be >= 0");
  }
  budget = std::min(budget, n);

  std::vector<std::size_t> support;
  std::vector<bool> taken(n, false);
  Vector weights;
  Vector residual = target;
  if (residual_trace) residual_trace->assign(1, residual.norm());

  std::vector<std::pair<double, std::size_t>> dist;
  dist.reserve(n);
  while (support.size() < budget && residual.norm() > tol) {
    dist.clear();
    for (std::size_t j = 0; j < n; ++j) {
      if (taken[j]) continue;
      dist.emplace_back(
          (candidates.col(static_cast<Eigen::Index>(j)) - residual)
              .squaredNorm(),
          j);
    }
    const std::size_t picks = std::min<std::size_t>(
        static_cast<std::size_t>(per_iteration_picks), budget - support.size());
    std::partial_sort(dist.begin(), dist.begin() + picks, dist.end());
    for (std::size_t p = 0; p < picks; ++p) {
      support.push_back(dist[p].second);
      taken[dist[p].second] = true;
    }

    Matrix columns(candidates.rows(),
                   static_cast<Eigen::Index>(support.size()));
    for (std::size_t s = 0; s < support.size(); ++s) {
      columns.col(static_cast<Eigen::Index>(s)) =
          candidates.col(static_cast<Eigen::Index>(support[s]));
    }
    weights = RidgeWeights(columns, target, lambda);
    residual = target - columns * weights;
    if (residual_trace) residual_trace->push_back(residual.norm());
  }

  Coreset out;
  out.indices = std::move(support);
  out.weights.assign(weights.data(), weights.data() + weights.size());
  return out;
}

std::map<int, std::size_t> AllocateClassBudgets(
    std::size_t budget, const std::map<int, std::size_t>& class_sizes) {
  std::map<int, std::size_t> alloc;
  if (class_sizes.empty()) return alloc;
  const std::size_t k = class_sizes.size();

  // Classes ordered largest first, ties to the lower id.
  std::vector<std::pair<int, std::size_t>> order(class_sizes.begin(),
                                                 class_sizes.end());
  std::stable_sort(
      order.begin(), order.end(),
      [](const auto& a, const auto& b) { return a.second > b.second; });

  for (const auto& [c, size] : class_sizes) alloc[c] = budget / k;
  std::size_t remainder = budget % k;
  for (std::size_t i = 0; i < remainder; ++i) ++alloc[order[i].first];

  std::size_t excess = 0;
  for (auto& [c, share] : alloc) {
    const std::size_t cap = class_sizes.at(c);
    if (share > cap) {
      excess += share - cap;
      share = cap;
    }
  }
  while (excess > 0) {
    bool placed = false;
    for (const auto& [c, size] : order) {
      if (excess == 0) break;
      if (alloc[c] < size) {
        ++alloc[c];
        --excess;
        placed = true;
      }
    }
    if (!placed) break;  // every class is full
  }
  return alloc;
}

Coreset LabelwiseOmpSelect(const ClientChunk& chunk, const ParamVector& params,
                           const LabelwiseRows& server_rows, std::size_t budget,
                           const SelectionConfig& cfg) {
  cfg.Validate();
  std::map<int, std::vector<std::size_t>> members;
  for (std::size_t i = 0; i < chunk.size(); ++i) {
    const int y = chunk.data.labels[i];
    if (server_rows.contains(y)) members[y].push_back(i);
  }
  if (members.empty()) {
    throw DomainError("labelwise omp: client " +
                      std::to_string(chunk.client_id) +
                      " shares no class with the server rows");
  }

  const auto grads = PerSampleLastLayerGrads(params, chunk.data);
  std::map<int, std::size_t> sizes;
  for (const auto& [c, idx] : members) sizes[c] = idx.size();
  const auto budgets = AllocateClassBudgets(budget, sizes);

  Coreset out;
  for (const auto& [c, idx] : members) {
    const std::size_t class_budget = budgets.at(c);
    if (class_budget == 0) continue;
    const Vector& target = server_rows.at(c);
    Matrix candidates(target.size(), static_cast<Eigen::Index>(idx.size()));
    for (std::size_t j = 0; j < idx.size(); ++j) {
      candidates.col(static_cast<Eigen::Index>(j)) =
          grads[idx[j]].rows.row(c).transpose();
    }
    const Coreset local =
        OmpSelect(candidates, target, class_budget, cfg.lambda,
                  cfg.per_iteration_picks, cfg.residual_tolerance);
    ClassSelection sel;
    for (std::size_t s = 0; s < local.size(); ++s) {
      sel.indices.push_back(idx[local.indices[s]]);
      sel.weights.push_back(local.weights[s]);
    }
    out.indices.insert(out.indices.end(), sel.indices.begin(),
                       sel.indices.end());
    out.weights.insert(out.weights.end(), sel.weights.begin(),
                       sel.weights.end());
    out.per_class.emplace(c, std::move(sel));
  }
  return out;
}

Coreset RandomSelect(const ClientChunk& chunk, std::size_t budget,
                     std::uint64_t seed) {
  const std::size_t n = chunk.size();
  budget = std::min(budget, n);
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  Rng rng(seed);
  std::shuffle(order.begin(), order.end(), rng);
  order.resize(budget);
  std::sort(order.begin(), order.end());
  Coreset out;
  out.indices = std::move(order);
  out.weights.assign(budget, 1.0);
  return out;
}

Matrix ShiftedCosineSimilarity(const Matrix& features) {
  Matrix unit = features;
  for (Eigen::Index i = 0; i < unit.rows(); ++i) {
    const double norm = unit.row(i).norm();
    if (norm > 0.0) unit.row(i) /= norm;
  }
  Matrix sim = unit * unit.transpose();
  return ((sim.array() + 1.0) * 0.5).matrix();
}

Coreset FacilityLocationSelect(const ClientChunk& chunk, std::size_t budget,
                               std::vector<double>* gains) {
  if (budget < 1) throw ConfigError("facility location: budget must be >= 1");
  if (gains) gains->clear();
  const std::size_t n = chunk.size();
  Coreset out;
  if (n == 0) return out;
  budget = std::min(budget, n);

  const Matrix sim = ShiftedCosineSimilarity(chunk.data.features);
  const auto nn = static_cast<Eigen::Index>(n);
  Vector coverage = Vector::Zero(nn);
  std::vector<bool> taken(n, false);
  while (out.indices.size() < budget) {
    double best_gain = -1.0;
    std::size_t best = 0;
    for (std::size_t c = 0; c < n; ++c) {
      if (taken[c]) continue;
      const double gain = (sim.col(static_cast<Eigen::Index>(c)) - coverage)
                              .cwiseMax(0.0)
                              .sum();
      if (gain > best_gain) {
        best_gain = gain;
        best = c;
      }
    }
    taken[best] = true;
    out.indices.push_back(best);
    coverage = coverage.cwiseMax(sim.col(static_cast<Eigen::Index>(best)));
    if (gains) gains->push_back(best_gain);
  }

  // Each ground-set point votes for its most similar representative.
  out.weights.assign(out.indices.size(), 0.0);
  for (Eigen::Index v = 0; v < nn; ++v) {
    std::size_t owner = 0;
    for (std::size_t s = 1; s < out.indices.size(); ++s) {
      const auto cand = static_cast<Eigen::Index>(out.indices[s]);
      const auto cur = static_cast<Eigen::Index>(out.indices[owner]);
      if (sim(v, cand) > sim(v, cur)) owner = s;
    }
    out.weights[owner] += 1.0;
  }
  return out;
}

}  // namespace gcfl
