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

// Simulated federation: the server/client protocol for GCFL and the
// baselines, with cost accounting.
//
// Per round t: the server samples m of N clients and sends each of them a
// ServerBroadcast. At refresh rounds (t % K == 0) the broadcast of a GCFL
// run also carries the label-wise validation gradient rows, from which each
// client re-selects its coreset. Clients train locally on their selected
// samples and return delta = theta' - theta_t; the server applies
// theta + global_lr * mean(delta).

#ifndef GCFL_FEDERATION_H_
#define GCFL_FEDERATION_H_

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "gcfl/config.h"
#include "gcfl/coreset.h"
#include "gcfl/dataset.h"
#include "gcfl/federation_types.h"
#include "gcfl/ledger.h"
#include "gcfl/metrics.h"
#include "gcfl/model.h"

namespace gcfl {

// Everything the server sends to a client in one round. The validation set
// itself has no representation here: only the model and, at refresh rounds,
// averaged output-layer gradient rows.
struct ServerBroadcast {
  ParamVector params;
  std::optional<LabelwiseRows> validation_rows;

  std::size_t NumValues() const;
};

ServerBroadcast MakeBroadcast(const ServerState& server, bool with_rows);

struct LocalSgdKnobs {
  int batch_size = 32;
  double momentum = 0.0;
  double weight_decay = 0.0;
};

// Runs state.local_epochs of SGD from theta_t on the indexed samples and
// returns theta' - theta_t. With `prox_mu`, adds mu/2 |theta - theta_t|^2.
// Charges epochs * |train_indices| SGD visits.
ParamVector ClientUpdate(const ClientState& state, const ParamVector& theta_t,
                         std::span<const std::size_t> train_indices,
                         std::optional<double> prox_mu,
                         const LocalSgdKnobs& knobs, std::uint64_t seed,
                         CostLedger& ledger);

// Client-side re-selection for coreset arms. GCFL needs the broadcast's
// validation rows and charges one gradient evaluation per local sample.
// A client sharing no class with the server rows ends up with an empty
// coreset and sits the round out.
void RefreshCoreset(ClientState& client, const ServerBroadcast& broadcast,
                    const Algo& algo, const SelectionConfig& selection,
                    std::uint64_t seed, CostLedger& ledger);

// Indices a client trains on under `algo`.
std::vector<std::size_t> TrainingIndices(const ClientState& client,
                                         const Algo& algo);

// theta + global_lr * mean(deltas). The sum is taken in a canonical order
// so the result does not depend on the order of `deltas`.
ParamVector Aggregate(const ServerState& server,
                      std::span<const ParamVector> deltas);

ParamVector FineTuneOnServer(const ParamVector& params, const Dataset& val,
                             int epochs, double lr, int batch_size = 32,
                             std::uint64_t seed = 0);

struct CompositionRecord {
  int round = 0;
  int client_id = 0;
  std::size_t size = 0;
  double clean_fraction = 1.0;
};

struct RoundOutcome {
  std::vector<int> sampled;  // ascending client ids
  int selection_events = 0;
  int updates = 0;
  // Clean fraction over the union of coresets trained on this round.
  std::optional<double> coreset_clean_fraction;
  std::vector<CompositionRecord> compositions;  // refreshed clients only
};

// Executes round server.round and advances it. Clients are processed in
// ascending id order, each with its own seed stream.
RoundOutcome RunRound(ServerState& server, std::vector<ClientState>& clients,
                      const Algo& algo, const ExperimentConfig& cfg,
                      CostLedger& ledger);

// Data realization shared by every arm of a run.
struct FederatedData {
  std::vector<ClientChunk> chunks;
  Dataset val;
  Dataset test;
  ModelSpec model;
  std::vector<int> kept_classes;  // open-set noise only
  std::uint64_t fingerprint = 0;
};

FederatedData BuildFederatedData(const ExperimentConfig& cfg);

struct TrainingResult {
  std::vector<RoundMetrics> rounds;
  ParamVector initial_params;
  ParamVector final_params;
  CostLedger ledger;
  int selection_events = 0;
  std::vector<CompositionRecord> compositions;  // one per refresh per client
};

TrainingResult RunTraining(const ExperimentConfig& cfg, const Algo& algo,
                           const FederatedData& data);
// First arm of cfg.algos on freshly built data.
TrainingResult RunTraining(const ExperimentConfig& cfg);

}  // namespace gcfl

#endif  // GCFL_FEDERATION_H_
