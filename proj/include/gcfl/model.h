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

// Small differentiable classifiers with last-layer gradient extraction.
//
// Parameters live in one flat vector. Each layer is stored as a row-major
// (outputs x (inputs + 1)) block whose last column is the bias, so the
// output layer's row for class c -- weights from the penultimate layer plus
// the bias of c -- is a contiguous run of h + 1 values.

#ifndef GCFL_MODEL_H_
#define GCFL_MODEL_H_

#include <Eigen/Dense>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "gcfl/dataset.h"

namespace gcfl {

using RowMatrix =
    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

enum class Arch { kSoftmaxRegression, kOneHidden };

const char* ArchName(Arch arch);
Arch ParseArch(const std::string& name);

struct ModelSpec {
  Arch arch = Arch::kSoftmaxRegression;
  int input_dim = 0;
  int hidden_dim = 0;  // ignored for softmax regression
  int num_classes = 0;

  void Validate() const;
  // Width h of the representation feeding the output layer.
  int PenultimateDim() const;

  bool operator==(const ModelSpec&) const = default;
};

struct LayerSlice {
  std::string name;
  int rows = 0;  // output units
  int cols = 0;  // input units + 1 (bias column)
  std::size_t offset = 0;

  std::size_t size() const { return static_cast<std::size_t>(rows) * cols; }
};

class ParamVector {
 public:
  using LayerMap = Eigen::Map<RowMatrix>;
  using ConstLayerMap = Eigen::Map<const RowMatrix>;

  ParamVector() = default;
  // All-zero parameters laid out for `spec`.
  explicit ParamVector(const ModelSpec& spec);

  const ModelSpec& spec() const { return spec_; }
  const std::vector<LayerSlice>& layout() const { return layout_; }
  // The output layer: num_classes rows of (h + 1) values.
  const LayerSlice& last_layer() const { return layout_.back(); }

  Vector& values() { return values_; }
  const Vector& values() const { return values_; }
  std::size_t size() const { return static_cast<std::size_t>(values_.size()); }

  LayerMap Layer(std::size_t i);
  ConstLayerMap Layer(std::size_t i) const;
  LayerMap OutputLayer() { return Layer(layout_.size() - 1); }
  ConstLayerMap OutputLayer() const { return Layer(layout_.size() - 1); }

  bool SameLayout(const ParamVector& other) const;

 private:
  ModelSpec spec_;
  std::vector<LayerSlice> layout_;
  Vector values_;
};

// Gradient of a loss with respect to the output layer only.
struct LastLayerGradient {
  RowMatrix rows;  // num_classes x (h + 1)

  int num_classes() const { return static_cast<int>(rows.rows()); }
  Vector Row(int c) const { return rows.row(c).transpose(); }
};

// Per-class output-layer rows: class y' -> row y' of the mean gradient over
// the samples of class y'. Classes with no samples are absent.
using LabelwiseRows = std::map<int, Vector>;

// Total number of values carried by a set of label-wise rows.
std::size_t BroadcastSize(const LabelwiseRows& rows);

// Uniform in +-1/sqrt(fan_in) for weights, zero biases.
ParamVector InitParams(const ModelSpec& spec, std::uint64_t seed);

// n x h penultimate activations (the raw inputs for softmax regression).
Matrix Penultimate(const ParamVector& params, const Matrix& features);
// n x num_classes logits and row-wise softmax probabilities.
Matrix Logits(const ParamVector& params, const Matrix& features);
Matrix Probabilities(const ParamVector& params, const Matrix& features);
// Row-wise argmax of the logits, ties broken towards the lowest class id.
std::vector<int> Predict(const ParamVector& params, const Matrix& features);

// Mean cross-entropy. Throws DomainError on an empty dataset.
double Loss(const ParamVector& params, const Dataset& ds);
// Gradient of Loss with respect to every parameter.
Vector FullGradient(const ParamVector& params, const Dataset& ds);

// For sample (x, y): row c = (softmax(z)_c - [c == y]) * [h(x); 1].
std::vector<LastLayerGradient> PerSampleLastLayerGrads(
    const ParamVector& params, const Dataset& ds);
// Average of the per-sample gradients, summed in sample order.
LastLayerGradient MeanLastLayerGrad(const ParamVector& params,
                                    const Dataset& ds);
LabelwiseRows LabelwiseValidationGrads(const ParamVector& params,
                                       const Dataset& val);

struct ProxTerm {
  double mu = 0.0;
  ParamVector anchor;
};

struct SgdOptions {
  int epochs = 1;
  double lr = 0.01;
  int batch_size = 32;
  double momentum = 0.0;
  double weight_decay = 0.0;
  std::optional<ProxTerm> prox;

  void Validate() const;
};

// Shuffled mini-batch SGD on mean cross-entropy
// (+ weight_decay/2 |theta|^2 + mu/2 |theta - anchor|^2).
ParamVector SgdEpochs(ParamVector params, const Dataset& ds,
                      const SgdOptions& options, std::uint64_t seed);

}  // namespace gcfl

#endif  // GCFL_MODEL_H_
