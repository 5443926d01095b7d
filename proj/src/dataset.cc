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

#include "gcfl/dataset.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>

#include "gcfl/errors.h"
#include "gcfl/random.h"

namespace gcfl {
namespace {

std::vector<std::size_t> Iota(std::size_t n) {
  std::vector<std::size_t> v(n);
  std::iota(v.begin(), v.end(), std::size_t{0});
  return v;
}

// Indices of each class, in ascending order.
std::vector<std::vector<std::size_t>> IndicesByClass(const Dataset& ds) {
  std::vector<std::vector<std::size_t>> by_class(ds.num_classes);
  for (std::size_t i = 0; i < ds.size(); ++i) {
    by_class[ds.labels[i]].push_back(i);
  }
  return by_class;
}

void CheckRatio(double ratio, const char* what) {
  if (!(ratio >= 0.0 && ratio <= 1.0)) {
    throw ConfigError(std::string(what) + ": ratio must lie in [0, 1], got " +
                      std::to_string(ratio));
  }
}

// Picks round(ratio*n) distinct positions uniformly, returned ascending.
std::vector<std::size_t> ChooseFraction(std::size_t n, double ratio, Rng& rng) {
  std::vector<std::size_t> order = Iota(n);
  std::shuffle(order.begin(), order.end(), rng);
  order.resize(FractionCount(ratio, n));
  std::sort(order.begin(), order.end());
  return order;
}

}  // namespace

void Dataset::Validate() const {
  if (num_classes <= 0) throw DomainError("dataset: num_classes must be > 0");
  if (static_cast<std::size_t>(features.rows()) != labels.size()) {
    throw DomainError("dataset: feature rows (" +
                      std::to_string(features.rows()) + ") != label count (" +
                      std::to_string(labels.size()) + ")");
  }
  for (int y : labels) {
    if (y < 0 || y >= num_classes) {
      throw DomainError("dataset: label " + std::to_string(y) +
                        " outside [0, " + std::to_string(num_classes) + ")");
    }
  }
  if (!features.allFinite()) {
    throw DomainError("dataset: non-finite feature value");
  }
}

Dataset Dataset::Subset(std::span<const std::size_t> indices) const {
  Dataset out;
  out.num_classes = num_classes;
  out.features.resize(static_cast<Eigen::Index>(indices.size()),
                      features.cols());
  out.labels.reserve(indices.size());
  for (std::size_t r = 0; r < indices.size(); ++r) {
    const std::size_t i = indices[r];
    if (i >= size()) throw DomainError("dataset: subset index out of range");
    out.features.row(static_cast<Eigen::Index>(r)) =
        features.row(static_cast<Eigen::Index>(i));
    out.labels.push_back(labels[i]);
  }
  return out;
}

std::vector<std::size_t> Dataset::ClassCounts() const {
  std::vector<std::size_t> counts(num_classes, 0);
  for (int y : labels) ++counts[y];
  return counts;
}

Dataset Concat(const Dataset& a, const Dataset& b) {
  if (a.empty() && a.features.cols() == 0) return b;
  if (b.empty() && b.features.cols() == 0) return a;
  if (a.features.cols() != b.features.cols() ||
      a.num_classes != b.num_classes) {
    throw DomainError("concat: datasets disagree on dim or num_classes");
  }
  Dataset out;
  out.num_classes = a.num_classes;
  out.features.resize(a.features.rows() + b.features.rows(), a.features.cols());
  out.features << a.features, b.features;
  out.labels = a.labels;
  out.labels.insert(out.labels.end(), b.labels.begin(), b.labels.end());
  return out;
}

std::size_t ClientChunk::NumNoisy() const {
  return static_cast<std::size_t>(
      std::count(clean_flags.begin(), clean_flags.end(), false));
}

void NoiseSpec::Validate() const {
  CheckRatio(ratio, "noise");
  if (!(severity >= 0.0)) throw ConfigError("noise: severity must be >= 0");
}

const char* NoiseKindName(NoiseKind kind) {
  switch (kind) {
    case NoiseKind::kNone:
      return "none";
    case NoiseKind::kClosedSet:
      return "closed_set";
    case NoiseKind::kOpenSet:
      return "open_set";
    case NoiseKind::kAttribute:
      return "attribute";
  }
  return "none";
}

NoiseKind ParseNoiseKind(const std::string& name) {
  if (name == "none") return NoiseKind::kNone;
  if (name == "closed_set") return NoiseKind::kClosedSet;
  if (name == "open_set") return NoiseKind::kOpenSet;
  if (name == "attribute") return NoiseKind::kAttribute;
  throw ConfigError("noise.kind: unknown value '" + name +
                    "' (expected none|closed_set|open_set|attribute)");
}

Dataset MakeBlobs(int num_blobs, int dim, std::span<const double> stds,
                  int samples_per_blob, std::uint64_t seed) {
  if (num_blobs < 1) throw ConfigError("make_blobs: num_blobs must be >= 1");
  if (dim < 1) throw ConfigError("make_blobs: dim must be >= 1");
  if (stds.empty()) throw ConfigError("make_blobs: stds must not be empty");
  if (stds.size() != static_cast<std::size_t>(num_blobs)) {
    throw ConfigError("make_blobs: stds length must equal num_blobs");
  }
  if (samples_per_blob < 1) {
    throw ConfigError("make_blobs: samples_per_blob must be >= 1");
  }
  for (double s : stds) {
    if (!(s >= 0.0) || !std::isfinite(s)) {
      throw ConfigError("make_blobs: stds must be finite and >= 0");
    }
  }

  Rng rng(seed);
  std::uniform_real_distribution<double> center_dist(-10.0, 10.0);
  std::normal_distribution<double> normal(0.0, 1.0);

  Matrix centers(num_blobs, dim);
  for (int j = 0; j < num_blobs; ++j) {
    for (int k = 0; k < dim; ++k) centers(j, k) = center_dist(rng);
  }

  Dataset ds;
  ds.num_classes = num_blobs;
  ds.features.resize(static_cast<Eigen::Index>(num_blobs) * samples_per_blob,
                     dim);
  ds.labels.reserve(ds.features.rows());
  Eigen::Index row = 0;
  for (int j = 0; j < num_blobs; ++j) {
    for (int s = 0; s < samples_per_blob; ++s, ++row) {
      for (int k = 0; k < dim; ++k) {
        ds.features(row, k) = centers(j, k) + stds[j] * normal(rng);
      }
      ds.labels.push_back(j);
    }
  }
  return ds;
}

std::vector<double> LinearSpread(double lo, double hi, int count) {
  if (count < 1) throw ConfigError("linear spread: count must be >= 1");
  std::vector<double> out(count, lo);
  if (count == 1) return out;
  for (int i = 0; i < count; ++i) {
    out[i] = lo + (hi - lo) * static_cast<double>(i) / (count - 1);
  }
  return out;
}

Split SplitTrainValTest(const Dataset& ds, double val_frac, double test_frac,
                        std::uint64_t seed) {
  if (!(val_frac >= 0.0) || !(test_frac >= 0.0) ||
      !(val_frac + test_frac < 1.0)) {
    throw ConfigError(
        "split: need val_frac >= 0, test_frac >= 0 and val_frac + test_frac "
        "< 1");
  }
  Rng rng(seed);
  std::vector<std::size_t> train_idx, val_idx, test_idx;
  for (auto& members : IndicesByClass(ds)) {
    std::shuffle(members.begin(), members.end(), rng);
    const std::size_t n_test = FractionCount(test_frac, members.size());
    const std::size_t n_val = std::min(FractionCount(val_frac, members.size()),
                                       members.size() - n_test);
    auto it = members.begin();
    test_idx.insert(test_idx.end(), it, it + n_test);
    it += n_test;
    val_idx.insert(val_idx.end(), it, it + n_val);
    it += n_val;
    train_idx.insert(train_idx.end(), it, members.end());
  }
  std::sort(train_idx.begin(), train_idx.end());
  std::sort(val_idx.begin(), val_idx.end());
  std::sort(test_idx.begin(), test_idx.end());
  return Split{ds.Subset(train_idx), ds.Subset(val_idx), ds.Subset(test_idx)};
}

std::vector<ClientChunk> DirichletPartition(const Dataset& ds, int num_clients,
                                            double alpha, std::uint64_t seed) {
  if (num_clients < 1) throw ConfigError("partition: num_clients must be >= 1");
  if (!(alpha > 0.0) || !std::isfinite(alpha)) {
    throw ConfigError("partition: dirichlet alpha must be > 0");
  }
  Rng rng(seed);
  std::gamma_distribution<double> gamma(alpha, 1.0);
  std::vector<std::vector<std::size_t>> assigned(num_clients);

  for (auto& members : IndicesByClass(ds)) {
    std::shuffle(members.begin(), members.end(), rng);
    std::vector<double> props(num_clients);
    double total = 0.0;
    for (double& p : props) {
      p = gamma(rng);
      total += p;
    }
    if (!(total > 0.0)) {
      // Every draw underflowed (tiny alpha): hand the class to one client.
      std::uniform_int_distribution<int> pick(0, num_clients - 1);
      std::fill(props.begin(), props.end(), 0.0);
      props[pick(rng)] = 1.0;
      total = 1.0;
    }
    const std::size_t n_c = members.size();
    double cumulative = 0.0;
    std::size_t start = 0;
    for (int k = 0; k < num_clients; ++k) {
      cumulative += props[k] / total;
      std::size_t end =
          (k + 1 == num_clients) ? n_c : FractionCount(cumulative, n_c);
      end = std::max(end, start);
      assigned[k].insert(assigned[k].end(), members.begin() + start,
                         members.begin() + end);
      start = end;
    }
  }

  std::vector<ClientChunk> chunks(num_clients);
  for (int k = 0; k < num_clients; ++k) {
    std::sort(assigned[k].begin(), assigned[k].end());
    chunks[k].data = ds.Subset(assigned[k]);
    chunks[k].clean_flags.assign(assigned[k].size(), true);
    chunks[k].client_id = k;
    chunks[k].source_indices = std::move(assigned[k]);
  }
  return chunks;
}

ClientChunk InjectClosedSet(ClientChunk chunk, double ratio,
                            std::uint64_t seed) {
  CheckRatio(ratio, "closed-set noise");
  if (ratio == 0.0) return chunk;
  if (chunk.data.num_classes < 2) {
    throw ConfigError("closed-set noise needs at least two classes");
  }
  Rng rng(seed);
  const int num_classes = chunk.data.num_classes;
  std::uniform_int_distribution<int> other(0, num_classes - 2);
  for (std::size_t i : ChooseFraction(chunk.size(), ratio, rng)) {
    const int original = chunk.data.labels[i];
    const int r = other(rng);
    chunk.data.labels[i] = r < original ? r : r + 1;
    chunk.clean_flags[i] = false;
  }
  return chunk;
}

OpenSetResult InjectOpenSet(std::vector<ClientChunk> chunks, Dataset test,
                            Dataset val, double ratio, std::uint64_t seed) {
  CheckRatio(ratio, "open-set noise");
  const int num_classes = test.num_classes;
  // Guard against ratio*|Y| landing a hair above an integer.
  const int num_removed = static_cast<int>(
      std::ceil(ratio * static_cast<double>(num_classes) - 1e-9));
  if (num_removed >= num_classes) {
    throw ConfigError("open-set noise: ratio " + std::to_string(ratio) +
                      " removes every class");
  }

  Rng rng(seed);
  std::vector<int> classes(num_classes);
  std::iota(classes.begin(), classes.end(), 0);
  std::shuffle(classes.begin(), classes.end(), rng);
  std::vector<bool> removed(num_classes, false);
  for (int k = 0; k < num_removed; ++k) removed[classes[k]] = true;

  OpenSetResult out;
  std::vector<int> new_id(num_classes, -1);
  for (int c = 0; c < num_classes; ++c) {
    if (!removed[c]) {
      new_id[c] = static_cast<int>(out.kept_classes.size());
      out.kept_classes.push_back(c);
    }
  }
  const int num_kept = static_cast<int>(out.kept_classes.size());
  std::uniform_int_distribution<int> kept_dist(0, num_kept - 1);

  for (auto& chunk : chunks) {
    for (std::size_t i = 0; i < chunk.size(); ++i) {
      int& y = chunk.data.labels[i];
      if (removed[y]) {
        y = kept_dist(rng);
        chunk.clean_flags[i] = false;
      } else {
        y = new_id[y];
      }
    }
    chunk.data.num_classes = num_kept;
  }

  auto filter = [&](const Dataset& ds) {
    std::vector<std::size_t> keep;
    for (std::size_t i = 0; i < ds.size(); ++i) {
      if (!removed[ds.labels[i]]) keep.push_back(i);
    }
    Dataset kept = ds.Subset(keep);
    for (int& y : kept.labels) y = new_id[y];
    kept.num_classes = num_kept;
    return kept;
  };
  out.test = filter(test);
  out.val = filter(val);
  out.chunks = std::move(chunks);
  return out;
}

ClientChunk InjectAttribute(ClientChunk chunk, double ratio, double severity,
                            std::uint64_t seed) {
  CheckRatio(ratio, "attribute noise");
  if (!(severity >= 0.0)) {
    throw ConfigError("attribute noise: severity must be >= 0");
  }
  Rng rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  for (std::size_t i : ChooseFraction(chunk.size(), ratio, rng)) {
    auto row = chunk.data.features.row(static_cast<Eigen::Index>(i));
    for (Eigen::Index k = 0; k < row.size(); ++k) {
      row(k) += severity * normal(rng);
    }
    chunk.clean_flags[i] = false;
  }
  return chunk;
}

void SaveCsv(const Dataset& ds, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  const Eigen::Index d = ds.features.cols();
  for (Eigen::Index k = 0; k < d; ++k) out << 'f' << k << ',';
  out << "label\n";
  out.precision(17);
  for (std::size_t i = 0; i < ds.size(); ++i) {
    for (Eigen::Index k = 0; k < d; ++k) {
      out << ds.features(static_cast<Eigen::Index>(i), k) << ',';
    }
    out << ds.labels[i] << '\n';
  }
  if (!out) throw IoError("write failed for '" + path.string() + "'");
}

Dataset LoadCsv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path.string() + "'");
  std::string line;
  if (!std::getline(in, line)) {
    throw IoError("'" + path.string() + "': missing header");
  }
  const auto num_cols =
      static_cast<std::size_t>(std::count(line.begin(), line.end(), ',')) + 1;
  if (num_cols < 2 || line.substr(line.rfind(',') + 1) != "label") {
    throw IoError("'" + path.string() +
                  "': header must be f0,...,f{d-1},label");
  }
  const std::size_t d = num_cols - 1;
  std::vector<double> values;
  std::vector<int> labels;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::stringstream row(line);
    std::string cell;
    std::size_t col = 0;
    try {
      while (std::getline(row, cell, ',')) {
        if (col < d) {
          values.push_back(std::stod(cell));
        } else if (col == d) {
          labels.push_back(std::stoi(cell));
        }
        ++col;
      }
    } catch (const std::exception&) {
      throw IoError("'" + path.string() + "' line " + std::to_string(line_no) +
                    ": unparsable cell '" + cell + "'");
    }
    if (col != num_cols) {
      throw IoError("'" + path.string() + "' line " + std::to_string(line_no) +
                    ": expected " + std::to_string(num_cols) + " cells");
    }
  }
  Dataset ds;
  ds.labels = std::move(labels);
  ds.features =
      Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic,
                                     Eigen::RowMajor>>(
          values.data(), static_cast<Eigen::Index>(ds.labels.size()),
          static_cast<Eigen::Index>(d));
  int max_label = -1;
  for (int y : ds.labels) max_label = std::max(max_label, y);
  ds.num_classes = max_label + 1;
  ds.Validate();
  return ds;
}

std::uint64_t Fingerprint(const Dataset& ds) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  auto feed = [&h](const void* data, std::size_t len) {
    const auto* bytes = static_cast<const unsigned char*>(data);
    for (std::size_t i = 0; i < len; ++i) {
      h ^= bytes[i];
      h *= 0x100000001b3ULL;
    }
  };
  const std::int64_t rows = ds.features.rows();
  const std::int64_t cols = ds.features.cols();
  feed(&rows, sizeof rows);
  feed(&cols, sizeof cols);
  feed(&ds.num_classes, sizeof ds.num_classes);
  feed(ds.features.data(), sizeof(double) * ds.features.size());
  feed(ds.labels.data(), sizeof(int) * ds.labels.size());
  return h;
}

}  // namespace gcfl
