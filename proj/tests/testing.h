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

// Fixtures shared by the unit tests and the acceptance binary.

#ifndef GCFL_TESTS_TESTING_H_
#define GCFL_TESTS_TESTING_H_

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <random>
#include <vector>

#include "gcfl/dataset.h"
#include "gcfl/federation.h"
#include "gcfl/model.h"

namespace gcfl::testing {

// n samples in R^d with labels cycling through 0..k-1.
inline Dataset RandomDataset(int n, int d, int k, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  Dataset ds;
  ds.num_classes = k;
  ds.features.resize(n, d);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < d; ++j) ds.features(i, j) = normal(rng);
    ds.labels.push_back(i % k);
  }
  return ds;
}

inline ClientChunk MakeChunk(Dataset ds, int client_id = 0) {
  ClientChunk chunk;
  chunk.clean_flags.assign(ds.size(), true);
  chunk.source_indices.resize(ds.size());
  std::iota(chunk.source_indices.begin(), chunk.source_indices.end(),
            std::size_t{0});
  chunk.data = std::move(ds);
  chunk.client_id = client_id;
  return chunk;
}

inline ParamVector RandomParams(const ModelSpec& spec, std::uint64_t seed,
                                double scale = 1.0) {
  ParamVector p(spec);
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, scale);
  for (Eigen::Index i = 0; i < p.values().size(); ++i) {
    p.values()[i] = normal(rng);
  }
  return p;
}

// Federated data with exactly `per_client` samples on every client, drawn
// from one blob dataset with unit spread. Closed-set noise at
// `noise_ratio` is applied per client.
inline FederatedData EvenFederatedData(int num_clients, int per_client,
                                       int classes, int dim, double noise_ratio,
                                       std::uint64_t seed) {
  const int holdout = 20 * classes;
  const int total = num_clients * per_client + 2 * holdout;
  const int per_blob = (total + classes - 1) / classes;
  std::vector<double> stds(classes, 1.0);
  Dataset pool = MakeBlobs(classes, dim, stds, per_blob, seed);
  std::vector<std::size_t> order(pool.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::shuffle(order.begin(), order.end(), std::mt19937_64(seed));

  auto take = [&](std::size_t from, std::size_t count) {
    return pool.Subset(
        std::span<const std::size_t>(order.data() + from, count));
  };
  FederatedData data;
  data.val = take(0, holdout);
  data.test = take(holdout, holdout);
  for (int c = 0; c < num_clients; ++c) {
    ClientChunk chunk =
        MakeChunk(take(2 * holdout + static_cast<std::size_t>(c) * per_client,
                       per_client),
                  c);
    data.chunks.push_back(
        InjectClosedSet(std::move(chunk), noise_ratio, seed * 1000 + c));
  }
  data.model = ModelSpec{Arch::kSoftmaxRegression, dim, 0, classes};
  return data;
}

}  // namespace gcfl::testing

#endif  // GCFL_TESTS_TESTING_H_
