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

#include "gcfl/federation.h"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

#include "gcfl/errors.h"
#include "gcfl/random.h"

namespace gcfl {

bool Algo::UsesCoreset() const {
  return kind == AlgoKind::kGcfl || kind == AlgoKind::kRandom ||
         kind == AlgoKind::kFacilityLocation;
}

std::string Algo::Name() const {
  std::string base;
  switch (kind) {
    case AlgoKind::kGcfl:
      base = "gcfl";
      break;
    case AlgoKind::kFedAvg:
      base = "fedavg";
      break;
    case AlgoKind::kFedProx:
      base = "fedprox";
      break;
    case AlgoKind::kSkyline:
      base = "skyline";
      break;
    case AlgoKind::kRandom:
      base = "random";
      break;
    case AlgoKind::kFacilityLocation:
      base = "facility_location";
      break;
  }
  return fine_tune ? base + "+ft" : base;
}

Algo ParseAlgo(const std::string& name) {
  Algo algo;
  std::string base = name;
  if (base.size() > 3 && base.ends_with("+ft")) {
    algo.fine_tune = true;
    base.resize(base.size() - 3);
  }
  if (base == "gcfl") {
    algo.kind = AlgoKind::kGcfl;
  } else if (base == "fedavg") {
    algo.kind = AlgoKind::kFedAvg;
  } else if (base == "fedprox") {
    algo.kind = AlgoKind::kFedProx;
  } else if (base == "skyline") {
    algo.kind = AlgoKind::kSkyline;
  } else if (base == "random") {
    algo.kind = AlgoKind::kRandom;
  } else if (base == "facility_location") {
    algo.kind = AlgoKind::kFacilityLocation;
  } else {
    throw ConfigError("algos: unknown arm '" + name +
                      "' (expected gcfl, fedavg, fedprox, skyline, random or "
                      "facility_location, optionally with +ft)");
  }
  return algo;
}

double ComputeCostRatio(const CostLedger& candidate,
                        const CostLedger& reference) {
  if (reference.sgd_sample_visits == 0) {
    throw DomainError("cost ratio: reference run has zero SGD visits");
  }
  return static_cast<double>(candidate.sgd_sample_visits +
                             candidate.per_sample_grad_evals) /
         static_cast<double>(reference.sgd_sample_visits);
}

std::size_t ServerBroadcast::NumValues() const {
  return params.size() +
         (validation_rows ? BroadcastSize(*validation_rows) : 0);
}

ServerBroadcast MakeBroadcast(const ServerState& server, bool with_rows) {
  ServerBroadcast b{server.params, std::nullopt};
  if (with_rows) {
    b.validation_rows = LabelwiseValidationGrads(server.params, server.val_set);
  }
  return b;
}

ParamVector ClientUpdate(const ClientState& state, const ParamVector& theta_t,
                         std::span<const std::size_t> train_indices,
                         std::optional<double> prox_mu,
                         const LocalSgdKnobs& knobs, std::uint64_t seed,
                         CostLedger& ledger) {
  if (train_indices.empty()) {
    throw DomainError("client update: empty training subset for client " +
                      std::to_string(state.chunk.client_id));
  }
  SgdOptions opts;
  opts.epochs = state.local_epochs;
  opts.lr = state.local_lr;
  opts.batch_size = knobs.batch_size;
  opts.momentum = knobs.momentum;
  opts.weight_decay = knobs.weight_decay;
  if (prox_mu) opts.prox = ProxTerm{*prox_mu, theta_t};

  const Dataset subset = state.chunk.data.Subset(train_indices);
  ParamVector delta = SgdEpochs(theta_t, subset, opts, seed);
  delta.values() -= theta_t.values();
  ledger.sgd_sample_visits +=
      static_cast<std::uint64_t>(state.local_epochs) * train_indices.size();
  return delta;
}

void RefreshCoreset(ClientState& client, const ServerBroadcast& broadcast,
                    const Algo& algo, const SelectionConfig& selection,
                    std::uint64_t seed, CostLedger& ledger) {
  const ClientChunk& chunk = client.chunk;
  const std::size_t budget =
      CoresetBudget(selection.budget_fraction, chunk.size());
  if (chunk.size() == 0) {
    client.coreset = Coreset{};
    return;
  }
  switch (algo.kind) {
    case AlgoKind::kGcfl: {
      if (!broadcast.validation_rows) {
        throw DomainError("gcfl refresh without validation rows");
      }
      const LabelwiseRows& rows = *broadcast.validation_rows;
      const bool shares_class =
          std::any_of(chunk.data.labels.begin(), chunk.data.labels.end(),
                      [&rows](int y) { return rows.contains(y); });
      if (!shares_class) {
        client.coreset = Coreset{};
        return;
      }
      ledger.per_sample_grad_evals += chunk.size();
      client.coreset =
          LabelwiseOmpSelect(chunk, broadcast.params, rows, budget, selection);
      return;
    }
    case AlgoKind::kRandom:
      client.coreset = RandomSelect(chunk, budget, seed);
      return;
    case AlgoKind::kFacilityLocation:
      client.coreset = FacilityLocationSelect(chunk, budget);
      return;
    default:
      throw DomainError("refresh requested for non-coreset arm " + algo.Name());
  }
}

std::vector<std::size_t> TrainingIndices(const ClientState& client,
                                         const Algo& algo) {
  const ClientChunk& chunk = client.chunk;
  std::vector<std::size_t> idx;
  switch (algo.kind) {
    case AlgoKind::kFedAvg:
    case AlgoKind::kFedProx:
      idx.resize(chunk.size());
      std::iota(idx.begin(), idx.end(), std::size_t{0});
      break;
    case AlgoKind::kSkyline:
      for (std::size_t i = 0; i < chunk.size(); ++i) {
        if (chunk.clean_flags[i]) idx.push_back(i);
      }
      break;
    default:
      if (client.coreset) idx = client.coreset->indices;
      break;
  }
  return idx;
}

ParamVector Aggregate(const ServerState& server,
                      std::span<const ParamVector> deltas) {
  if (deltas.empty()) throw DomainError("aggregate: no client updates");
  std::vector<const ParamVector*> order;
  order.reserve(deltas.size());
  for (const ParamVector& d : deltas) {
    if (!d.SameLayout(server.params)) {
      throw DomainError("aggregate: delta layout differs from server params");
    }
    order.push_back(&d);
  }
  std::sort(order.begin(), order.end(),
            [](const ParamVector* a, const ParamVector* b) {
              return std::lexicographical_compare(
                  a->values().begin(), a->values().end(), b->values().begin(),
                  b->values().end());
            });
  Vector sum = Vector::Zero(server.params.values().size());
  for (const ParamVector* d : order) sum += d->values();
  ParamVector next = server.params;
  next.values() +=
      server.global_lr * (sum / static_cast<double>(deltas.size()));
  return next;
}

ParamVector FineTuneOnServer(const ParamVector& params, const Dataset& val,
                             int epochs, double lr, int batch_size,
                             std::uint64_t seed) {
  if (val.empty()) throw DomainError("fine-tune: empty validation set");
  SgdOptions opts;
  opts.epochs = epochs;
  opts.lr = lr;
  opts.batch_size = batch_size;
  return SgdEpochs(params, val, opts, seed);
}

RoundOutcome RunRound(ServerState& server, std::vector<ClientState>& clients,
                      const Algo& algo, const ExperimentConfig& cfg,
                      CostLedger& ledger) {
  const int n = static_cast<int>(clients.size());
  const int m = cfg.clients_per_round;
  if (m < 1 || m > n) {
    throw ConfigError("clients_per_round: must satisfy 1 <= m <= N (m = " +
                      std::to_string(m) + ", N = " + std::to_string(n) + ")");
  }
  const int t = server.round;
  RoundOutcome outcome;

  std::vector<int> ids(n);
  std::iota(ids.begin(), ids.end(), 0);
  Rng sampler = MakeRng(cfg.seed, SeedStream::kClientSampling,
                        static_cast<std::uint64_t>(t));
  std::shuffle(ids.begin(), ids.end(), sampler);
  ids.resize(m);
  std::sort(ids.begin(), ids.end());
  outcome.sampled = ids;

  const bool refresh = algo.UsesCoreset() && t % cfg.refresh_period == 0;
  const ServerBroadcast broadcast =
      MakeBroadcast(server, refresh && algo.kind == AlgoKind::kGcfl);

  double local_lr = cfg.local_lr;
  if (cfg.cosine_annealing && cfg.rounds > 0) {
    local_lr *= 0.5 * (1.0 + std::cos(std::numbers::pi * t / cfg.rounds));
    local_lr = std::max(local_lr, 1e-12);
  }
  const LocalSgdKnobs knobs{cfg.batch_size, cfg.momentum, cfg.weight_decay};
  const std::optional<double> prox_mu =
      algo.kind == AlgoKind::kFedProx ? std::optional<double>(cfg.fedprox_mu)
                                      : std::nullopt;
  const SelectionConfig selection = cfg.Selection();

  std::vector<ParamVector> deltas;
  std::size_t selected_total = 0;
  std::size_t selected_clean = 0;
  for (int id : ids) {
    ClientState& client = clients[id];
    const auto uid = static_cast<std::uint64_t>(id);
    const auto ut = static_cast<std::uint64_t>(t);
    ledger.params_broadcast += broadcast.params.size();
    if (broadcast.validation_rows) {
      ledger.grads_broadcast += BroadcastSize(*broadcast.validation_rows);
    }
    if (refresh) {
      RefreshCoreset(
          client, broadcast, algo, selection,
          DeriveSeed(cfg.seed, SeedStream::kInitCoreset, uid, ut + 1), ledger);
      ++outcome.selection_events;
      outcome.compositions.push_back(
          CompositionRecord{t, id, client.coreset->size(),
                            CoresetComposition(*client.coreset, client.chunk)});
    }

    client.local_lr = local_lr;
    const std::vector<std::size_t> train = TrainingIndices(client, algo);
    if (train.empty()) continue;
    if (algo.UsesCoreset()) {
      selected_total += train.size();
      for (std::size_t i : train) selected_clean += client.chunk.clean_flags[i];
    }
    deltas.push_back(ClientUpdate(
        client, broadcast.params, train, prox_mu, knobs,
        DeriveSeed(cfg.seed, SeedStream::kClientRound, uid, ut), ledger));
    ledger.update_uploads += deltas.back().size();
  }

  outcome.updates = static_cast<int>(deltas.size());
  if (algo.UsesCoreset() && selected_total > 0) {
    outcome.coreset_clean_fraction = static_cast<double>(selected_clean) /
                                     static_cast<double>(selected_total);
  }
  if (!deltas.empty()) server.params = Aggregate(server, deltas);
  if (algo.fine_tune && cfg.fine_tune_epochs > 0) {
    server.params =
        FineTuneOnServer(server.params, server.val_set, cfg.fine_tune_epochs,
                         cfg.fine_tune_lr, cfg.batch_size,
                         DeriveSeed(cfg.seed, SeedStream::kServer,
                                    static_cast<std::uint64_t>(t)));
  }
  ++server.round;
  return outcome;
}

FederatedData BuildFederatedData(const ExperimentConfig& cfg) {
  cfg.Validate();
  Dataset full;
  if (cfg.dataset.kind == "csv") {
    full = LoadCsv(cfg.dataset.path);
  } else {
    const std::vector<double> stds = cfg.dataset.ResolvedStds();
    full = MakeBlobs(cfg.dataset.num_blobs, cfg.dataset.dim, stds,
                     cfg.dataset.samples_per_blob,
                     DeriveSeed(cfg.seed, SeedStream::kDataset));
  }
  Split split = SplitTrainValTest(full, cfg.val_frac, cfg.test_frac,
                                  DeriveSeed(cfg.seed, SeedStream::kSplit));

  FederatedData data;
  data.chunks =
      DirichletPartition(split.train, cfg.num_clients, cfg.dirichlet_alpha,
                         DeriveSeed(cfg.seed, SeedStream::kPartition));
  data.val = std::move(split.val);
  data.test = std::move(split.test);

  const NoiseSpec& noise = cfg.noise;
  switch (noise.kind) {
    case NoiseKind::kNone:
      break;
    case NoiseKind::kClosedSet:
      for (auto& chunk : data.chunks) {
        const auto id = static_cast<std::uint64_t>(chunk.client_id);
        chunk = InjectClosedSet(std::move(chunk), noise.ratio,
                                DeriveSeed(cfg.seed, SeedStream::kNoise, id));
      }
      break;
    case NoiseKind::kAttribute:
      for (auto& chunk : data.chunks) {
        const auto id = static_cast<std::uint64_t>(chunk.client_id);
        chunk = InjectAttribute(std::move(chunk), noise.ratio, noise.severity,
                                DeriveSeed(cfg.seed, SeedStream::kNoise, id));
      }
      break;
    case NoiseKind::kOpenSet: {
      OpenSetResult r = InjectOpenSet(
          std::move(data.chunks), std::move(data.test), std::move(data.val),
          noise.ratio, DeriveSeed(cfg.seed, SeedStream::kNoise));
      data.chunks = std::move(r.chunks);
      data.test = std::move(r.test);
      data.val = std::move(r.val);
      data.kept_classes = std::move(r.kept_classes);
      break;
    }
  }

  data.model.arch = cfg.arch;
  data.model.input_dim = full.dim();
  data.model.hidden_dim = cfg.arch == Arch::kOneHidden ? cfg.hidden_dim : 0;
  data.model.num_classes = data.test.num_classes;
  data.model.Validate();

  std::uint64_t h = Fingerprint(data.val) ^ Mix64(Fingerprint(data.test));
  for (const auto& chunk : data.chunks) {
    h = Mix64(h ^ Fingerprint(chunk.data));
    for (bool clean : chunk.clean_flags) h = Mix64(h ^ (clean ? 1u : 2u));
  }
  data.fingerprint = h;
  return data;
}

TrainingResult RunTraining(const ExperimentConfig& cfg, const Algo& algo,
                           const FederatedData& data) {
  cfg.Validate();
  if (static_cast<int>(data.chunks.size()) != cfg.num_clients) {
    throw ConfigError("num_clients: data has " +
                      std::to_string(data.chunks.size()) + " chunks, config " +
                      std::to_string(cfg.num_clients));
  }
  if (algo.kind == AlgoKind::kGcfl && data.val.empty()) {
    throw ConfigError("val_frac: gcfl needs a non-empty server validation set");
  }
  if (cfg.rounds > 0 && data.test.empty()) {
    throw ConfigError("test_frac: evaluation needs a non-empty test set");
  }
  if (algo.fine_tune && data.val.empty()) {
    throw ConfigError("val_frac: fine-tuning needs a non-empty validation set");
  }

  ServerState server;
  server.params =
      InitParams(data.model, DeriveSeed(cfg.seed, SeedStream::kModelInit));
  server.val_set = data.val;
  server.global_lr = cfg.global_lr;

  std::vector<ClientState> clients;
  clients.reserve(data.chunks.size());
  for (const ClientChunk& chunk : data.chunks) {
    ClientState c;
    c.chunk = chunk;
    c.local_lr = cfg.local_lr;
    c.local_epochs = cfg.local_epochs;
    if (algo.UsesCoreset()) {
      c.coreset = RandomSelect(
          chunk, CoresetBudget(cfg.budget_fraction, chunk.size()),
          DeriveSeed(cfg.seed, SeedStream::kInitCoreset,
                     static_cast<std::uint64_t>(chunk.client_id), 0));
    }
    clients.push_back(std::move(c));
  }

  Dataset all_train;
  for (const ClientChunk& chunk : data.chunks) {
    all_train = Concat(all_train, chunk.data);
  }

  TrainingResult result;
  result.initial_params = server.params;
  for (int t = 0; t < cfg.rounds; ++t) {
    RoundOutcome outcome = RunRound(server, clients, algo, cfg, result.ledger);
    result.selection_events += outcome.selection_events;
    result.compositions.insert(result.compositions.end(),
                               outcome.compositions.begin(),
                               outcome.compositions.end());
    RoundMetrics m;
    m.round = t;
    m.test_accuracy = EvaluateAccuracy(server.params, data.test);
    m.mean_train_loss =
        all_train.empty() ? 0.0 : Loss(server.params, all_train);
    m.coreset_clean_fraction = outcome.coreset_clean_fraction;
    m.ledger = result.ledger;
    result.rounds.push_back(m);
  }
  result.final_params = server.params;
  return result;
}

TrainingResult RunTraining(const ExperimentConfig& cfg) {
  return RunTraining(cfg, cfg.algos.front(), BuildFederatedData(cfg));
}

}  // namespace gcfl
