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
#include <numeric>
#include <random>

#include "gcfl/errors.h"
#include "gtest/gtest.h"
#include "privacy_surface.h"
#include "testing.h"

namespace gcfl {
namespace {

ParamVector TwoValues(double a, double b) {
  ParamVector p(ModelSpec{Arch::kSoftmaxRegression, 1, 0, 1});
  p.values() << a, b;
  return p;
}

ExperimentConfig SmallConfig(int clients, int rounds, int refresh) {
  ExperimentConfig cfg;
  cfg.num_clients = clients;
  cfg.clients_per_round = clients;
  cfg.rounds = rounds;
  cfg.refresh_period = refresh;
  cfg.global_lr = 1.0;
  cfg.local_lr = 0.05;
  return cfg;
}

TEST(ClientUpdateTest, ZeroEpochsGivesZeroDelta) {
  ClientState c;
  c.chunk = testing::MakeChunk(testing::RandomDataset(12, 3, 2, 1));
  c.local_epochs = 0;
  ParamVector theta =
      testing::RandomParams({Arch::kSoftmaxRegression, 3, 0, 2}, 2);
  std::vector<std::size_t> idx = {0, 3, 5};
  CostLedger ledger;
  ParamVector d = ClientUpdate(c, theta, idx, std::nullopt, {}, 4, ledger);
  EXPECT_TRUE((d.values().array() == 0.0).all());
  EXPECT_EQ(ledger.sgd_sample_visits, 0u);
}

TEST(ClientUpdateTest, FullBatchEpochIsNegativeScaledGradient) {
  ClientState c;
  c.chunk = testing::MakeChunk(testing::RandomDataset(12, 3, 2, 1));
  c.local_lr = 0.2;
  ParamVector theta = testing::RandomParams({Arch::kOneHidden, 3, 4, 2}, 2);
  std::vector<std::size_t> idx = {1, 2, 7, 9};
  CostLedger ledger;
  ParamVector d =
      ClientUpdate(c, theta, idx, std::nullopt, {4, 0.0, 0.0}, 4, ledger);
  Vector expected = -0.2 * FullGradient(theta, c.chunk.data.Subset(idx));
  EXPECT_LT((d.values() - expected).cwiseAbs().maxCoeff(), 1e-14);
  EXPECT_EQ(ledger.sgd_sample_visits, 4u);
}

TEST(ClientUpdateTest, ProxIsInertAtTheAnchor) {
  ClientState c;
  c.chunk = testing::MakeChunk(testing::RandomDataset(12, 3, 2, 1));
  ParamVector theta =
      testing::RandomParams({Arch::kSoftmaxRegression, 3, 0, 2}, 2);
  std::vector<std::size_t> idx = {0, 1, 2, 3};
  CostLedger ledger;
  LocalSgdKnobs full{4, 0.0, 0.0};
  EXPECT_EQ(
      ClientUpdate(c, theta, idx, 0.5, full, 4, ledger).values(),
      ClientUpdate(c, theta, idx, std::nullopt, full, 4, ledger).values());
}

TEST(AggregateTest, ZeroDeltasKeepParams) {
  ServerState s;
  s.params = TwoValues(0.3, -2.0);
  std::vector<ParamVector> deltas(3, TwoValues(0.0, 0.0));
  EXPECT_EQ(Aggregate(s, deltas).values(), s.params.values());
}

TEST(AggregateTest, MeanOfDeltas) {
  ServerState s;
  s.params = TwoValues(1.0, 1.0);
  s.global_lr = 1.0;
  std::vector<ParamVector> deltas = {TwoValues(1.0, 0.0), TwoValues(0.0, 1.0)};
  ParamVector out = Aggregate(s, deltas);
  EXPECT_EQ(out.values()[0], 1.5);
  EXPECT_EQ(out.values()[1], 1.5);
}

TEST(AggregateTest, PermutationInvariantBitForBit) {
  std::mt19937_64 rng(3);
  ModelSpec spec{Arch::kOneHidden, 3, 4, 3};
  ServerState s;
  s.params = testing::RandomParams(spec, 1);
  s.global_lr = 0.7;
  std::vector<ParamVector> deltas;
  for (int i = 0; i < 6; ++i) {
    deltas.push_back(testing::RandomParams(spec, 10 + i, 1e3 * (i + 1)));
  }
  const Vector reference = Aggregate(s, deltas).values();
  std::vector<int> perm(deltas.size());
  std::iota(perm.begin(), perm.end(), 0);
  int checked = 0;
  do {
    std::vector<ParamVector> shuffled;
    for (int i : perm) shuffled.push_back(deltas[i]);
    ASSERT_TRUE(
        (Aggregate(s, shuffled).values().array() == reference.array()).all());
    ++checked;
  } while (std::next_permutation(perm.begin(), perm.end()));
  EXPECT_EQ(checked, 720);
}

TEST(AggregateTest, RejectsEmptyAndMismatched) {
  ServerState s;
  s.params = TwoValues(1.0, 1.0);
  EXPECT_THROW(Aggregate(s, std::vector<ParamVector>{}), DomainError);
  std::vector<ParamVector> bad = {
      ParamVector(ModelSpec{Arch::kSoftmaxRegression, 2, 0, 1})};
  EXPECT_THROW(Aggregate(s, bad), DomainError);
}

TEST(RunTrainingTest, SingleClientFedAvgIsCentralizedSgd) {
  FederatedData data = testing::EvenFederatedData(1, 60, 3, 4, 0.0, 5);
  ExperimentConfig cfg = SmallConfig(1, 10, 10);
  cfg.batch_size = 60;
  cfg.algos = {ParseAlgo("fedavg")};
  TrainingResult r = RunTraining(cfg, cfg.algos[0], data);
  ParamVector theta = r.initial_params;
  for (int t = 0; t < 10; ++t) {
    theta.values() -= cfg.local_lr * FullGradient(theta, data.chunks[0].data);
  }
  EXPECT_LE((r.final_params.values() - theta.values()).cwiseAbs().maxCoeff(),
            1e-12);
}

TEST(RunTrainingTest, RefreshCadenceFollowsK) {
  FederatedData data = testing::EvenFederatedData(4, 30, 3, 4, 0.4, 6);
  for (auto [rounds, k] : {std::pair{10, 1}, std::pair{10, 10}, std::pair{7, 3},
                           std::pair{1, 5}, std::pair{20, 7}}) {
    ExperimentConfig cfg = SmallConfig(4, rounds, k);
    TrainingResult r = RunTraining(cfg, Algo{AlgoKind::kGcfl}, data);
    const int per_client = 1 + (rounds - 1) / k;
    EXPECT_EQ(r.selection_events, 4 * per_client);
    EXPECT_EQ(r.ledger.per_sample_grad_evals,
              static_cast<std::uint64_t>(4 * 30 * per_client));
  }
}

TEST(RunTrainingTest, SkylineTrainsOnCleanSamplesOnly) {
  FederatedData data = testing::EvenFederatedData(3, 40, 4, 4, 0.4, 7);
  ClientState c;
  c.chunk = data.chunks[1];
  for (std::size_t i : TrainingIndices(c, Algo{AlgoKind::kSkyline})) {
    EXPECT_TRUE(c.chunk.clean_flags[i]);
  }
  ExperimentConfig cfg = SmallConfig(3, 5, 10);
  TrainingResult r = RunTraining(cfg, Algo{AlgoKind::kSkyline}, data);
  EXPECT_EQ(r.ledger.sgd_sample_visits, 5u * 3 * 24);
}

TEST(RunTrainingTest, ZeroRoundsReturnsInitialParams) {
  FederatedData data = testing::EvenFederatedData(2, 20, 3, 4, 0.0, 8);
  ExperimentConfig cfg = SmallConfig(2, 0, 10);
  TrainingResult r = RunTraining(cfg, Algo{AlgoKind::kGcfl}, data);
  EXPECT_TRUE(r.rounds.empty());
  EXPECT_EQ(r.final_params.values(), r.initial_params.values());
}

TEST(RunTrainingTest, DeterministicSeries) {
  ExperimentConfig cfg = SmallConfig(5, 6, 2);
  cfg.dataset.samples_per_blob = 60;
  cfg.noise = NoiseSpec{NoiseKind::kClosedSet, 0.4, 0.0};
  cfg.clients_per_round = 3;
  for (const char* arm : {"gcfl", "fedavg", "fedprox", "random",
                          "facility_location", "gcfl+ft"}) {
    cfg.algos = {ParseAlgo(arm)};
    TrainingResult a = RunTraining(cfg);
    TrainingResult b = RunTraining(cfg);
    ASSERT_EQ(a.rounds.size(), 6u);
    for (std::size_t t = 0; t < a.rounds.size(); ++t) {
      EXPECT_EQ(a.rounds[t].test_accuracy, b.rounds[t].test_accuracy) << arm;
      EXPECT_EQ(a.rounds[t].mean_train_loss, b.rounds[t].mean_train_loss);
      EXPECT_EQ(a.rounds[t].ledger, b.rounds[t].ledger);
    }
    EXPECT_EQ(a.final_params.values(), b.final_params.values()) << arm;
  }
}

TEST(RunTrainingTest, RejectsGcflWithoutValidationSet) {
  FederatedData data = testing::EvenFederatedData(2, 20, 3, 4, 0.0, 8);
  data.val = Dataset{};
  ExperimentConfig cfg = SmallConfig(2, 3, 10);
  EXPECT_THROW(RunTraining(cfg, Algo{AlgoKind::kGcfl}, data), ConfigError);
  EXPECT_NO_THROW(RunTraining(cfg, Algo{AlgoKind::kFedAvg}, data));
}

TEST(RunRoundTest, SamplesWithoutReplacement) {
  FederatedData data = testing::EvenFederatedData(6, 20, 3, 4, 0.0, 9);
  ExperimentConfig cfg = SmallConfig(6, 5, 10);
  cfg.clients_per_round = 4;
  ServerState server;
  server.params = InitParams(data.model, 1);
  server.val_set = data.val;
  std::vector<ClientState> clients;
  for (const auto& chunk : data.chunks) clients.push_back({chunk});
  CostLedger ledger;
  for (int t = 0; t < 5; ++t) {
    RoundOutcome o =
        RunRound(server, clients, Algo{AlgoKind::kFedAvg}, cfg, ledger);
    ASSERT_EQ(o.sampled.size(), 4u);
    EXPECT_TRUE(std::is_sorted(o.sampled.begin(), o.sampled.end()));
    EXPECT_EQ(std::adjacent_find(o.sampled.begin(), o.sampled.end()),
              o.sampled.end());
    EXPECT_EQ(server.round, t + 1);
  }
  EXPECT_EQ(ledger.params_broadcast, 5u * 4 * server.params.size());
  EXPECT_EQ(ledger.update_uploads, ledger.params_broadcast);
  EXPECT_EQ(ledger.grads_broadcast, 0u);
}

TEST(RunRoundTest, ClientWithoutSharedClassSitsOut) {
  FederatedData data = testing::EvenFederatedData(2, 20, 3, 4, 0.0, 9);
  std::vector<std::size_t> keep;
  for (std::size_t i = 0; i < data.val.size(); ++i) {
    if (data.val.labels[i] == 0) keep.push_back(i);
  }
  ServerState server;
  server.params = InitParams(data.model, 1);
  server.val_set = data.val.Subset(keep);
  std::vector<ClientState> clients(2);
  for (int c = 0; c < 2; ++c) clients[c].chunk = data.chunks[c];
  std::vector<std::size_t> no_zero;
  for (std::size_t i = 0; i < clients[1].chunk.size(); ++i) {
    if (clients[1].chunk.data.labels[i] != 0) no_zero.push_back(i);
  }
  clients[1].chunk.data = clients[1].chunk.data.Subset(no_zero);
  clients[1].chunk.clean_flags.assign(no_zero.size(), true);
  ExperimentConfig cfg = SmallConfig(2, 1, 1);
  CostLedger ledger;
  RoundOutcome o =
      RunRound(server, clients, Algo{AlgoKind::kGcfl}, cfg, ledger);
  EXPECT_EQ(o.updates, 1);
  EXPECT_TRUE(clients[1].coreset && clients[1].coreset->empty());
  EXPECT_EQ(ledger.per_sample_grad_evals, clients[0].chunk.size());
}

TEST(FineTuneTest, ZeroEpochsIsIdentity) {
  Dataset val = testing::RandomDataset(30, 4, 3, 2);
  ParamVector p = testing::RandomParams({Arch::kSoftmaxRegression, 4, 0, 3}, 1);
  EXPECT_EQ(FineTuneOnServer(p, val, 0, 0.1).values(), p.values());
}

TEST(FineTuneTest, ReducesValidationLoss) {
  Dataset val = testing::RandomDataset(30, 4, 3, 2);
  ParamVector p = testing::RandomParams({Arch::kSoftmaxRegression, 4, 0, 3}, 1);
  double previous = Loss(p, val);
  for (int epoch = 0; epoch < 50; ++epoch) {
    p = FineTuneOnServer(p, val, 1, 0.05, 30, epoch);
    double now = Loss(p, val);
    EXPECT_LE(now, previous);
    previous = now;
  }
}

TEST(CostRatioTest, TenPercentBudgetRefreshEveryTenRounds) {
  FederatedData data = testing::EvenFederatedData(5, 50, 5, 4, 0.4, 10);
  ExperimentConfig cfg = SmallConfig(5, 20, 10);
  TrainingResult gcfl = RunTraining(cfg, Algo{AlgoKind::kGcfl}, data);
  TrainingResult fedavg = RunTraining(cfg, Algo{AlgoKind::kFedAvg}, data);
  EXPECT_EQ(ComputeCostRatio(gcfl.ledger, fedavg.ledger), 0.2);
}

TEST(CostRatioTest, FullBudgetNeverRefreshedAfterStart) {
  FederatedData data = testing::EvenFederatedData(3, 30, 3, 4, 0.0, 11);
  ExperimentConfig cfg = SmallConfig(3, 8, 1000);
  cfg.budget_fraction = 1.0;
  TrainingResult gcfl = RunTraining(cfg, Algo{AlgoKind::kGcfl}, data);
  TrainingResult fedavg = RunTraining(cfg, Algo{AlgoKind::kFedAvg}, data);
  EXPECT_EQ(ComputeCostRatio(gcfl.ledger, fedavg.ledger), 9.0 / 8.0);
}

TEST(CostRatioTest, StrictlyDecreasingInK) {
  FederatedData data = testing::EvenFederatedData(3, 30, 3, 4, 0.4, 12);
  ExperimentConfig cfg = SmallConfig(3, 20, 1);
  TrainingResult fedavg = RunTraining(cfg, Algo{AlgoKind::kFedAvg}, data);
  double previous = std::numeric_limits<double>::infinity();
  for (int k : {1, 2, 5, 10, 20}) {
    cfg.refresh_period = k;
    double ratio = ComputeCostRatio(
        RunTraining(cfg, Algo{AlgoKind::kGcfl}, data).ledger, fedavg.ledger);
    EXPECT_LT(ratio, previous) << "K=" << k;
    previous = ratio;
  }
  EXPECT_THROW(ComputeCostRatio(CostLedger{}, CostLedger{}), DomainError);
}

TEST(CommunicationTest, LabelwiseRowsMatchPlainBroadcast) {
  FederatedData data = testing::EvenFederatedData(2, 40, 10, 10, 0.0, 13);
  ServerState server;
  server.params = InitParams(data.model, 2);
  server.val_set = data.val;
  ServerBroadcast b = MakeBroadcast(server, true);
  EXPECT_EQ(server.params.size(), 110u);
  EXPECT_EQ(BroadcastSize(*b.validation_rows),
            MeanLastLayerGrad(server.params, data.val).rows.size());
  EXPECT_EQ(b.NumValues(), 220u);
  EXPECT_EQ(MakeBroadcast(server, false).NumValues(), 110u);
}

TEST(PrivacyTest, BroadcastCarriesOnlyGradientRows) {
  FederatedData data = testing::EvenFederatedData(2, 40, 4, 3, 0.0, 14);
  ServerState server;
  server.params = InitParams(data.model, 2);
  server.val_set = data.val;
  EXPECT_TRUE(testing::BroadcastCarriesOnlyGradientRows(server));
}

}  // namespace
}  // namespace gcfl
