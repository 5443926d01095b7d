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

// Synthetic datasets, non-IID partitioning and noise injection.
//
// Every function here is a pure function of its inputs and seed. Noise
// injectors record ground truth in ClientChunk::clean_flags so that later
// stages (the skyline arm, coreset composition metrics) can see which
// samples were corrupted.

#ifndef GCFL_DATASET_H_
#define GCFL_DATASET_H_

#include <Eigen/Dense>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

namespace gcfl {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

struct Dataset {
  Matrix features;  // n x d, one sample per row
  std::vector<int> labels;
  int num_classes = 0;

  std::size_t size() const { return labels.size(); }
  bool empty() const { return labels.empty(); }
  int dim() const { return static_cast<int>(features.cols()); }

  // Throws DomainError when labels/features disagree, a label is out of
  // range or a feature is non-finite. Empty datasets are allowed here;
  // operations that need samples check for that themselves.
  void Validate() const;

  Dataset Subset(std::span<const std::size_t> indices) const;
  // Per-class sample counts, length num_classes.
  std::vector<std::size_t> ClassCounts() const;
};

// Rows of `a` followed by rows of `b`. Both must agree on dim/num_classes
// unless one of them is empty.
Dataset Concat(const Dataset& a, const Dataset& b);

struct ClientChunk {
  Dataset data;
  std::vector<bool> clean_flags;  // true = untouched by any injector
  int client_id = 0;
  // Positions of this chunk's rows in the training split it was cut from.
  std::vector<std::size_t> source_indices;

  std::size_t size() const { return data.size(); }
  std::size_t NumNoisy() const;
};

enum class NoiseKind { kNone, kClosedSet, kOpenSet, kAttribute };

struct NoiseSpec {
  NoiseKind kind = NoiseKind::kNone;
  double ratio = 0.0;
  double severity = 0.0;  // attribute noise only

  void Validate() const;
};

const char* NoiseKindName(NoiseKind kind);
NoiseKind ParseNoiseKind(const std::string& name);

// `num_blobs` isotropic Gaussian blobs in R^dim. Centers are uniform in
// [-10, 10]^dim; blob j has standard deviation stds[j] and label j.
Dataset MakeBlobs(int num_blobs, int dim, std::span<const double> stds,
                  int samples_per_blob, std::uint64_t seed);

// `count` standard deviations evenly spaced over [lo, hi].
std::vector<double> LinearSpread(double lo, double hi, int count);

struct Split {
  Dataset train;
  Dataset val;
  Dataset test;
};

// Stratified per class: for a class with n_c samples, round(test_frac*n_c)
// go to test, round(val_frac*n_c) to val and the rest to train.
Split SplitTrainValTest(const Dataset& ds, double val_frac, double test_frac,
                        std::uint64_t seed);

// For each class, draws client proportions from Dirichlet(alpha, ..., alpha)
// and deals that class's (shuffled) samples out accordingly. Clients may
// end up empty; callers must tolerate zero-sized chunks.
std::vector<ClientChunk> DirichletPartition(const Dataset& ds, int num_clients,
                                            double alpha, std::uint64_t seed);

// Flips exactly round(ratio*n) labels to a uniformly chosen different class.
ClientChunk InjectClosedSet(ClientChunk chunk, double ratio,
                            std::uint64_t seed);

struct OpenSetResult {
  std::vector<ClientChunk> chunks;
  Dataset test;
  Dataset val;
  // Original class ids that survive, in the order of their new ids.
  std::vector<int> kept_classes;
};

// Marks ceil(ratio*|Y|) classes irrelevant. Training samples of those
// classes keep their features but are relabeled uniformly onto the
// surviving classes (and flagged noisy); test/val drop them. Surviving
// classes are renumbered to [0, |Y'|) everywhere.
OpenSetResult InjectOpenSet(std::vector<ClientChunk> chunks, Dataset test,
                            Dataset val, double ratio, std::uint64_t seed);

// Adds severity * N(0, 1) to every coordinate of round(ratio*n) samples.
ClientChunk InjectAttribute(ClientChunk chunk, double ratio, double severity,
                            std::uint64_t seed);

// CSV with header f0,...,f{d-1},label.
void SaveCsv(const Dataset& ds, const std::filesystem::path& path);
Dataset LoadCsv(const std::filesystem::path& path);

// FNV-1a over the raw feature bytes, labels and class count.
std::uint64_t Fingerprint(const Dataset& ds);

}  // namespace gcfl

#endif  // GCFL_DATASET_H_
