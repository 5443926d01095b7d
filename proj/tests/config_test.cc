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

#include "gcfl/config.h"

#include <filesystem>
#include <fstream>
#include <string>

#include "gcfl/errors.h"
#include "gtest/gtest.h"

namespace gcfl {
namespace {

std::string ErrorOf(const std::string& text) {
  try {
    ParseConfigText(text);
  } catch (const ConfigError& e) {
    return e.what();
  }
  return "";
}

TEST(ParseConfigTest, MinimalConfigTakesDefaults) {
  ExperimentConfig c =
      ParseConfigText("num_clients = 7\n[dataset]\nkind = blobs\n");
  EXPECT_EQ(c.num_clients, 7);
  EXPECT_EQ(c.clients_per_round, 7);
  EXPECT_EQ(c.rounds, 100);
  EXPECT_EQ(c.refresh_period, 10);
  EXPECT_EQ(c.budget_fraction, 0.1);
  EXPECT_EQ(c.local_epochs, 1);
  EXPECT_EQ(c.local_lr, 0.01);
  EXPECT_EQ(c.global_lr, 0.01);
  EXPECT_EQ(c.lambda, 0.5);
  EXPECT_EQ(c.dirichlet_alpha, 0.4);
  EXPECT_EQ(c.per_iteration_picks, 1);
  EXPECT_EQ(c.momentum, 0.0);
  EXPECT_FALSE(c.cosine_annealing);
  EXPECT_EQ(c.arch, Arch::kSoftmaxRegression);
  ASSERT_EQ(c.algos.size(), 1u);
  EXPECT_EQ(c.algos[0].kind, AlgoKind::kGcfl);
  EXPECT_NO_THROW(c.Validate());
}

TEST(ParseConfigTest, SectionsCommentsAndLists) {
  ExperimentConfig c = ParseConfigText(
      "# leading comment\n"
      "algos = fedavg, gcfl+ft ,skyline\n"
      "rounds = 3   # trailing\n"
      "[noise]\n"
      "kind = open_set\n"
      "ratio = 0.25\n"
      "[model]\n"
      "arch = one_hidden\n"
      "hidden_dim = 8\n");
  ASSERT_EQ(c.algos.size(), 3u);
  EXPECT_EQ(c.algos[1], (Algo{AlgoKind::kGcfl, true}));
  EXPECT_EQ(c.rounds, 3);
  EXPECT_EQ(c.noise.kind, NoiseKind::kOpenSet);
  EXPECT_EQ(c.noise.ratio, 0.25);
  EXPECT_EQ(c.arch, Arch::kOneHidden);
  EXPECT_EQ(c.hidden_dim, 8);
}

TEST(ParseConfigTest, MoreSampledThanAvailableIsRejected) {
  std::string msg = ErrorOf("num_clients = 3\nclients_per_round = 4\n");
  EXPECT_NE(msg.find("clients_per_round"), std::string::npos);
  EXPECT_NE(msg.find("num_clients"), std::string::npos);
}

TEST(ParseConfigTest, NamedConstraintViolations) {
  EXPECT_NE(ErrorOf("refresh_period = 0\n").find("refresh_period"),
            std::string::npos);
  EXPECT_NE(ErrorOf("budget_fraction = 0\n").find("budget_fraction"),
            std::string::npos);
  EXPECT_NE(ErrorOf("budget_fraction = 1.5\n").find("budget_fraction"),
            std::string::npos);
  EXPECT_NE(ErrorOf("rounds = -1\n").find("rounds"), std::string::npos);
  EXPECT_NE(ErrorOf("rounds = many\n").find("rounds"), std::string::npos);
  EXPECT_NE(ErrorOf("bogus = 1\n").find("bogus"), std::string::npos);
  EXPECT_NE(ErrorOf("algos = fedsgd\n").find("fedsgd"), std::string::npos);
  EXPECT_NE(ErrorOf("algos = gcfl, gcfl\n").find("algos"), std::string::npos);
  EXPECT_NE(ErrorOf("no equals sign\n").find("line 1"), std::string::npos);
}

TEST(ParseConfigTest, OverridesApplyAfterText) {
  ExperimentConfig c =
      ParseConfigText("rounds = 3\n[noise]\nratio = 0.1\n",
                      {{"rounds", "9"}, {"noise.ratio", "0.4"}});
  EXPECT_EQ(c.rounds, 9);
  EXPECT_EQ(c.noise.ratio, 0.4);
}

TEST(ParseConfigTest, CanonicalTextRoundTrips) {
  ExperimentConfig c = ParseConfigText(
      "seed = 42\nalgos = gcfl, fedprox, facility_location\n"
      "local_lr = 0.1\nglobal_lr = 0.3\nlambda = 0.123456789012345\n"
      "[dataset]\nstds = 1, 2.5, 3\nnum_blobs = 3\n"
      "[noise]\nkind = attribute\nratio = 0.3\nseverity = 2\n");
  std::string text = ToText(c);
  ExperimentConfig back = ParseConfigText(text);
  EXPECT_EQ(ToText(back), text);
  EXPECT_EQ(back.lambda, c.lambda);
  EXPECT_EQ(back.dataset.stds, c.dataset.stds);
  EXPECT_EQ(back.algos, c.algos);
}

TEST(ParseConfigTest, FileErrorsAreIoErrors) {
  EXPECT_THROW(ParseConfigFile("/nonexistent/x.ini"), IoError);
  auto path = std::filesystem::temp_directory_path() / "gcfl_config_test.ini";
  std::ofstream(path) << "rounds = 4\n";
  EXPECT_EQ(ParseConfigFile(path.string()).rounds, 4);
  std::filesystem::remove(path);
}

TEST(SweepSpecTest, Validation) {
  SweepSpec empty{"noise.ratio", {}};
  EXPECT_THROW(empty.Validate(), ConfigError);
  SweepSpec unknown{"seed", {"1"}};
  EXPECT_THROW(unknown.Validate(), ConfigError);
  SweepSpec ok{"refresh_period", {"1", "5"}};
  EXPECT_NO_THROW(ok.Validate());
}

TEST(SweepSpecTest, ApplyValue) {
  ExperimentConfig base;
  EXPECT_EQ(ApplySweepValue(base, "noise.ratio", "0.2").noise.ratio, 0.2);
  ExperimentConfig more = ApplySweepValue(base, "num_clients", "20");
  EXPECT_EQ(more.num_clients, 20);
  EXPECT_EQ(more.clients_per_round, 20);
  base.clients_per_round = 5;
  EXPECT_EQ(ApplySweepValue(base, "num_clients", "20").clients_per_round, 5);
  EXPECT_THROW(ApplySweepValue(base, "refresh_period", "0"), ConfigError);
}

TEST(SplitListTest, TrimsAndDropsEmpties) {
  EXPECT_EQ(SplitList(" a, b ,,c "), (std::vector<std::string>{"a", "b", "c"}));
  EXPECT_TRUE(SplitList("").empty());
}

}  // namespace
}  // namespace gcfl
