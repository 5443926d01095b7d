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

// Independent reference computations used to check the library.

#ifndef GCFL_TESTS_ORACLES_H_
#define GCFL_TESTS_ORACLES_H_

#include <algorithm>
#include <cmath>
#include <vector>

#include "gcfl/dataset.h"
#include "gcfl/model.h"

namespace gcfl::testing {

// Nonnegative ridge least squares by enumerating every candidate positive
// support, each solved by QR on the stacked system [A; sqrt(lambda) I].
inline Vector NonnegativeRidgeOracle(const Matrix& a, const Vector& t,
                                     double lambda) {
  const int k = static_cast<int>(a.cols());
  Vector best = Vector::Zero(k);
  double best_obj = t.squaredNorm();
  for (unsigned mask = 1; mask < (1u << k); ++mask) {
    std::vector<int> cols;
    for (int j = 0; j < k; ++j) {
      if (mask & (1u << j)) cols.push_back(j);
    }
    const int p = static_cast<int>(cols.size());
    Matrix stacked = Matrix::Zero(a.rows() + p, p);
    Vector rhs = Vector::Zero(a.rows() + p);
    rhs.head(a.rows()) = t;
    for (int c = 0; c < p; ++c) {
      stacked.col(c).head(a.rows()) = a.col(cols[c]);
      stacked(a.rows() + c, c) = std::sqrt(lambda);
    }
    Vector z = stacked.householderQr().solve(rhs);
    if (!(z.array() > 0.0).all()) continue;
    Vector w = Vector::Zero(k);
    for (int c = 0; c < p; ++c) w(cols[c]) = z(c);
    double obj = (t - a * w).squaredNorm() + lambda * w.squaredNorm();
    if (obj < best_obj) {
      best_obj = obj;
      best = w;
    }
  }
  return best;
}

inline Matrix Columns(const Matrix& a, const std::vector<std::size_t>& idx) {
  Matrix out(a.rows(), static_cast<Eigen::Index>(idx.size()));
  for (std::size_t s = 0; s < idx.size(); ++s) {
    out.col(static_cast<Eigen::Index>(s)) = a.col(idx[s]);
  }
  return out;
}

// Cross-entropy of one sample computed directly from the logits, with no
// shared code path beyond Logits().
inline double SampleLoss(const ParamVector& p, const Dataset& ds, int i) {
  Vector z = Logits(p, ds.features.row(i)).row(0).transpose();
  double m = z.maxCoeff();
  double lse = m + std::log((z.array() - m).exp().sum());
  return lse - z[ds.labels[i]];
}

// Central differences of SampleLoss over the output layer.
inline RowMatrix FiniteDifferenceLastLayer(ParamVector p, const Dataset& ds,
                                           int i, double step) {
  const LayerSlice& last = p.last_layer();
  RowMatrix g(last.rows, last.cols);
  for (int r = 0; r < last.rows; ++r) {
    for (int c = 0; c < last.cols; ++c) {
      double& v = p.values()[last.offset + r * last.cols + c];
      const double saved = v;
      v = saved + step;
      double up = SampleLoss(p, ds, i);
      v = saved - step;
      double down = SampleLoss(p, ds, i);
      v = saved;
      g(r, c) = (up - down) / (2 * step);
    }
  }
  return g;
}

// Largest entrywise discrepancy, relative to the largest gradient entry.
inline double RelativeError(const RowMatrix& analytic,
                            const RowMatrix& numeric) {
  double scale =
      std::max(analytic.cwiseAbs().maxCoeff(), numeric.cwiseAbs().maxCoeff());
  if (scale == 0.0) return 0.0;
  return (analytic - numeric).cwiseAbs().maxCoeff() / scale;
}

}  // namespace gcfl::testing

#endif  // GCFL_TESTS_ORACLES_H_
