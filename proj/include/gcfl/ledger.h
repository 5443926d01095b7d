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

#ifndef GCFL_LEDGER_H_
#define GCFL_LEDGER_H_

#include <cstdint>

namespace gcfl {

// Deterministic stand-ins for wall-clock compute and bytes on the wire.
// Every counter only ever grows during a run.
struct CostLedger {
  // Per-sample last-layer gradients computed for coreset selection.
  std::uint64_t per_sample_grad_evals = 0;
  // Samples visited by local SGD (epochs x training-set size).
  std::uint64_t sgd_sample_visits = 0;
  // Real values sent server -> clients: model parameters.
  std::uint64_t params_broadcast = 0;
  // Real values sent server -> clients: validation gradient rows.
  std::uint64_t grads_broadcast = 0;
  // Real values sent clients -> server.
  std::uint64_t update_uploads = 0;

  bool operator==(const CostLedger&) const = default;
};

// (gcfl SGD visits + gcfl selection gradient evaluations) divided by the
// reference run's SGD visits. Throws DomainError on a zero denominator.
double ComputeCostRatio(const CostLedger& candidate,
                        const CostLedger& reference);

}  // namespace gcfl

#endif  // GCFL_LEDGER_H_
