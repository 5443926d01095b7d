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

#include "gcfl/model.h"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "gcfl/errors.h"
#include "gcfl/random.h"

namespace gcfl {
namespace {

// [m | 1]: appends the constant bias input.
Matrix WithBias(const Matrix& m) {
  Matrix out(m.rows(), m.cols() + 1);
  out.leftCols(m.cols()) = m;
  out.col(m.cols()).setOnes();
  return out;
}

void CheckDims(const ParamVector& params, const Matrix& features) {
  if (features.cols() != params.spec().input_dim) {
    throw DomainError("model: feature dim " + std::to_string(features.cols()) +
                      " != model input dim " +
                      std::to_string(params.spec().input_dim));
  }
}

void CheckDataset(const ParamVector& params, const Dataset& ds) {
  if (ds.empty()) throw DomainError("model: empty dataset");
  CheckDims(params, ds.features);
  if (ds.num_classes != params.spec().num_classes) {
    throw DomainError("model: dataset has " + std::to_string(ds.num_classes) +
                      " classes, model has " +
                      std::to_string(params.spec().num_classes));
  }
}

void SoftmaxRowsInPlace(Matrix& z) {
  for (Eigen::Index i = 0; i < z.rows(); ++i) {
    auto row = z.row(i);
    row.array() -= row.maxCoeff();
    row = row.array().exp().matrix();
    row /= row.sum();
  }
}

// Softmax probabilities minus one-hot targets.
Matrix OutputError(const ParamVector& params, const Dataset& ds,
                   const Matrix& hidden) {
  Matrix z = WithBias(hidden) * params.OutputLayer().transpose();
  SoftmaxRowsInPlace(z);
  for (std::size_t i = 0; i < ds.size(); ++i) {
    z(static_cast<Eigen::Index>(i), ds.labels[i]) -= 1.0;
  }
  return z;
}

}  // namespace

const char* ArchName(Arch arch) {
  return arch == Arch::kOneHidden ? "one_hidden" : "softmax_regression";
}

Arch ParseArch(const std::string& name) {
  if (name == "softmax_regression") return Arch::kSoftmaxRegression;
  if (name == "one_hidden") return Arch::kOneHidden;
  throw ConfigError("model.arch: unknown value '" + name +
                    "' (expected softmax_regression|one_hidden)");
}

void ModelSpec::Validate() const {
  if (input_dim <= 0) throw ConfigError("model: input_dim must be > 0");
  if (num_classes <= 0) throw ConfigError("model: num_classes must be > 0");
  if (arch == Arch::kOneHidden && hidden_dim <= 0) {
    throw ConfigError("model: hidden_dim must be > 0 for one_hidden");
  }
}

int ModelSpec::PenultimateDim() const {
  return arch == Arch::kOneHidden ? hidden_dim : input_dim;
}

ParamVector::ParamVector(const ModelSpec& spec) : spec_(spec) {
  spec_.Validate();
  std::size_t offset = 0;
  auto add = [&](std::string name, int rows, int cols) {
    layout_.push_back(LayerSlice{std::move(name), rows, cols, offset});
    offset += layout_.back().size();
  };
  if (spec_.arch == Arch::kOneHidden) {
    add("hidden", spec_.hidden_dim, spec_.input_dim + 1);
  }
  add("output", spec_.num_classes, spec_.PenultimateDim() + 1);
  values_ = Vector::Zero(static_cast<Eigen::Index>(offset));
}

ParamVector::LayerMap ParamVector::Layer(std::size_t i) {
  const LayerSlice& s = layout_.at(i);
  return LayerMap(values_.data() + s.offset, s.rows, s.cols);
}

ParamVector::ConstLayerMap ParamVector::Layer(std::size_t i) const {
  const LayerSlice& s = layout_.at(i);
  return ConstLayerMap(values_.data() + s.offset, s.rows, s.cols);
}

bool ParamVector::SameLayout(const ParamVector& other) const {
  return spec_ == other.spec_ && values_.size() == other.values_.size();
}

std::size_t BroadcastSize(const LabelwiseRows& rows) {
  std::size_t total = 0;
  for (const auto& [c, row] : rows)
    total += static_cast<std::size_t>(row.size());
  return total;
}

ParamVector InitParams(const ModelSpec& spec, std::uint64_t seed) {
  ParamVector params(spec);
  Rng rng(seed);
  for (std::size_t l = 0; l < params.layout().size(); ++l) {
    auto layer = params.Layer(l);
    const int fan_in = static_cast<int>(layer.cols()) - 1;
    const double bound = 1.0 / std::sqrt(static_cast<double>(fan_in));
    std::uniform_real_distribution<double> dist(-bound, bound);
    for (Eigen::Index r = 0; r < layer.rows(); ++r) {
      for (Eigen::Index c = 0; c < fan_in; ++c) layer(r, c) = dist(rng);
      layer(r, fan_in) = 0.0;
    }
  }
  return params;
}

Matrix Penultimate(const ParamVector& params, const Matrix& features) {
  CheckDims(params, features);
  if (params.spec().arch == Arch::kSoftmaxRegression) return features;
  Matrix a = WithBias(features) * params.Layer(0).transpose();
  return a.array().tanh().matrix();
}

Matrix Logits(const ParamVector& params, const Matrix& features) {
  return WithBias(Penultimate(params, features)) *
         params.OutputLayer().transpose();
}

Matrix Probabilities(const ParamVector& params, const Matrix& features) {
  Matrix z = Logits(params, features);
  SoftmaxRowsInPlace(z);
  return z;
}

std::vector<int> Predict(const ParamVector& params, const Matrix& features) {
  const Matrix z = Logits(params, features);
  std::vector<int> out(static_cast<std::size_t>(z.rows()));
  for (Eigen::Index i = 0; i < z.rows(); ++i) {
    int best = 0;
    for (Eigen::Index c = 1; c < z.cols(); ++c) {
      if (z(i, c) > z(i, best)) best = static_cast<int>(c);
    }
    out[static_cast<std::size_t>(i)] = best;
  }
  return out;
}

double Loss(const ParamVector& params, const Dataset& ds) {
  CheckDataset(params, ds);
  const Matrix z = Logits(params, ds.features);
  double total = 0.0;
  for (Eigen::Index i = 0; i < z.rows(); ++i) {
    const double m = z.row(i).maxCoeff();
    const double log_sum = m + std::log((z.row(i).array() - m).exp().sum());
    total += log_sum - z(i, ds.labels[static_cast<std::size_t>(i)]);
  }
  return total / static_cast<double>(ds.size());
}

Vector FullGradient(const ParamVector& params, const Dataset& ds) {
  CheckDataset(params, ds);
  const double n = static_cast<double>(ds.size());
  const Matrix hidden = Penultimate(params, ds.features);
  const Matrix delta = OutputError(params, ds, hidden) / n;

  ParamVector grad(params.spec());
  grad.OutputLayer() = delta.transpose() * WithBias(hidden);
  if (params.spec().arch == Arch::kOneHidden) {
    const int h = params.spec().hidden_dim;
    const Matrix back = (delta * params.OutputLayer().leftCols(h)).array() *
                        (1.0 - hidden.array().square());
    grad.Layer(0) = back.transpose() * WithBias(ds.features);
  }
  return grad.values();
}

std::vector<LastLayerGradient> PerSampleLastLayerGrads(
    const ParamVector& params, const Dataset& ds) {
  if (ds.empty()) return {};
  CheckDataset(params, ds);
  const Matrix hidden = WithBias(Penultimate(params, ds.features));
  const Matrix err =
      OutputError(params, ds, hidden.leftCols(hidden.cols() - 1));
  std::vector<LastLayerGradient> out(ds.size());
  for (std::size_t i = 0; i < ds.size(); ++i) {
    const auto r = static_cast<Eigen::Index>(i);
    out[i].rows = err.row(r).transpose() * hidden.row(r);
  }
  return out;
}

LastLayerGradient MeanLastLayerGrad(const ParamVector& params,
                                    const Dataset& ds) {
  if (ds.empty()) throw DomainError("mean gradient: empty dataset");
  const auto per_sample = PerSampleLastLayerGrads(params, ds);
  LastLayerGradient mean;
  mean.rows = RowMatrix::Zero(per_sample.front().rows.rows(),
                              per_sample.front().rows.cols());
  for (const auto& g : per_sample) mean.rows += g.rows;
  mean.rows /= static_cast<double>(per_sample.size());
  return mean;
}

LabelwiseRows LabelwiseValidationGrads(const ParamVector& params,
                                       const Dataset& val) {
  if (val.empty()) throw DomainError("labelwise gradients: empty dataset");
  std::map<int, std::vector<std::size_t>> members;
  for (std::size_t i = 0; i < val.size(); ++i) {
    members[val.labels[i]].push_back(i);
  }
  LabelwiseRows rows;
  for (const auto& [c, idx] : members) {
    rows.emplace(c, MeanLastLayerGrad(params, val.Subset(idx)).Row(c));
  }
  return rows;
}

void SgdOptions::Validate() const {
  if (epochs < 0) throw ConfigError("sgd: epochs must be >= 0");
  if (!(lr > 0.0)) throw ConfigError("sgd: lr must be > 0");
  if (batch_size < 1) throw ConfigError("sgd: batch_size must be >= 1");
  if (!(momentum >= 0.0 && momentum < 1.0)) {
    throw ConfigError("sgd: momentum must lie in [0, 1)");
  }
  if (!(weight_decay >= 0.0))
    throw ConfigError("sgd: weight_decay must be >= 0");
  if (prox && !(prox->mu >= 0.0))
    throw ConfigError("sgd: prox mu must be >= 0");
}

ParamVector SgdEpochs(ParamVector params, const Dataset& ds,
                      const SgdOptions& options, std::uint64_t seed) {
  options.Validate();
  if (options.epochs == 0) return params;
  if (ds.empty()) throw DomainError("sgd: empty dataset with epochs > 0");
  if (options.prox && !options.prox->anchor.SameLayout(params)) {
    throw DomainError("sgd: prox anchor layout differs from params");
  }

  Rng rng(seed);
  std::vector<std::size_t> order(ds.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  Vector velocity = Vector::Zero(params.values().size());
  const auto batch = static_cast<std::size_t>(options.batch_size);

  for (int epoch = 0; epoch < options.epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng);
    for (std::size_t start = 0; start < order.size(); start += batch) {
      const std::size_t end = std::min(order.size(), start + batch);
      const Dataset mb = ds.Subset(
          std::span<const std::size_t>(order.data() + start, end - start));
      Vector g = FullGradient(params, mb);
      if (options.weight_decay > 0.0) {
        g += options.weight_decay * params.values();
      }
      if (options.prox) {
        g += options.prox->mu *
             (params.values() - options.prox->anchor.values());
      }
      if (options.momentum > 0.0) {
        velocity = options.momentum * velocity + g;
        params.values() -= options.lr * velocity;
      } else {
        params.values() -= options.lr * g;
      }
    }
  }
  return params;
}

}  // namespace gcfl
