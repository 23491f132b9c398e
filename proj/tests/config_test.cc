// Copyright 2026 The pacdp Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "pacdp/config.h"

#include <string>

#include "absl/strings/str_replace.h"
#include "gtest/gtest.h"

namespace pacdp {
namespace {

constexpr char kMinimal[] = R"({
  "seed": 1,
  "output_dir": "out",
  "model": {"kind": "logistic-binary", "input_dim": 4},
  "dataset": {"source": "synthetic", "task": "logistic-planted",
              "examples": 400, "dim": 4, "test_fraction": 0.25, "skew": 0.5},
  "federation": {"clients": 8, "clients_per_round": 4, "rounds": 5,
                 "local_steps": 1, "batch_size": 8, "learning_rate": 0.1},
  "privacy": {"budgets": [{"epsilon": 1.0, "proportion": 0.75},
                          {"epsilon": 4.0, "proportion": 0.25}]},
  "policy": {"kind": "fixed", "clip": 1.0}
})";

std::string Edit(const std::string& from, const std::string& to) {
  return absl::StrReplaceAll(kMinimal, {{from, to}});
}

TEST(ParseRunConfigTest, MinimalFillsDefaults) {
  auto c = ParseRunConfig(kMinimal);
  ASSERT_TRUE(c.ok()) << c.status();
  EXPECT_DOUBLE_EQ(c->decay_start_fraction, 0.6);
  EXPECT_DOUBLE_EQ(c->lambda_min, 0.1);
  EXPECT_DOUBLE_EQ(c->accountant.delta, 1e-5);
  EXPECT_EQ(c->accountant.alpha_grid.size(), 63u);
  EXPECT_EQ(c->accountant.alpha_grid.front(), 2);
  EXPECT_EQ(c->accountant.alpha_grid.back(), 64);
  EXPECT_EQ(c->threads, 1u);
  EXPECT_FALSE(c->literal_aggregation);
  EXPECT_FALSE(c->grid.has_value());
  EXPECT_EQ(c->clients, 8u);
  EXPECT_EQ(c->policy.kind, "fixed");
}

TEST(ParseRunConfigTest, KGreaterThanNNamesBothFields) {
  auto c = ParseRunConfig(Edit("\"clients_per_round\": 4",
                               "\"clients_per_round\": 9"));
  ASSERT_FALSE(c.ok());
  std::string msg(c.status().message());
  EXPECT_NE(msg.find("federation.clients_per_round"), std::string::npos);
  EXPECT_NE(msg.find("federation.clients "), std::string::npos) << msg;
}

TEST(ParseRunConfigTest, DuplicateKeyIsAnError) {
  auto c = ParseRunConfig(Edit("\"seed\": 1,", "\"seed\": 1, \"seed\": 2,"));
  ASSERT_FALSE(c.ok());
  EXPECT_NE(c.status().message().find("duplicate"), std::string::npos)
      << c.status();
}

TEST(ParseRunConfigTest, UnknownKeyIsAnError) {
  auto c = ParseRunConfig(Edit("\"rounds\": 5", "\"rounds\": 5, \"round\": 5"));
  ASSERT_FALSE(c.ok());
  EXPECT_NE(c.status().message().find("federation.round"), std::string::npos);
}

TEST(ParseRunConfigTest, ReportsAllViolations) {
  std::string text = Edit("\"learning_rate\": 0.1", "\"learning_rate\": -1");
  text = absl::StrReplaceAll(text, {{"\"skew\": 0.5", "\"skew\": 2"},
                                    {"\"output_dir\": \"out\",", ""}});
  auto c = ParseRunConfig(text);
  ASSERT_FALSE(c.ok());
  std::string msg(c.status().message());
  EXPECT_NE(msg.find("learning_rate"), std::string::npos) << msg;
  EXPECT_NE(msg.find("dataset.skew"), std::string::npos) << msg;
  EXPECT_NE(msg.find("output_dir"), std::string::npos) << msg;
}

TEST(ParseRunConfigTest, BudgetChecks) {
  EXPECT_FALSE(ParseRunConfig(Edit("\"proportion\": 0.25", "\"proportion\": 0.5"))
                   .ok());
  EXPECT_FALSE(
      ParseRunConfig(Edit("\"epsilon\": 1.0", "\"epsilon\": 0.1")).ok());
}

TEST(ParseRunConfigTest, MalformedJson) {
  EXPECT_FALSE(ParseRunConfig("{\"seed\": ").ok());
  EXPECT_FALSE(ParseRunConfig("[]").ok());
  EXPECT_FALSE(LoadRunConfig("/nonexistent/config.json").ok());
}

TEST(ParseRunConfigTest, DimensionMismatch) {
  EXPECT_FALSE(ParseRunConfig(Edit("\"dim\": 4", "\"dim\": 5")).ok());
}

TEST(AssignBudgetsTest, Proportions) {
  std::vector<BudgetGroup> groups{{1.0, 0.6}, {3.0, 0.3}, {10.0, 0.1}};
  std::vector<double> b = AssignBudgets(groups, 20);
  ASSERT_EQ(b.size(), 20u);
  int n1 = 0, n3 = 0, n10 = 0;
  for (double e : b) {
    n1 += e == 1.0;
    n3 += e == 3.0;
    n10 += e == 10.0;
  }
  EXPECT_EQ(n1, 12);
  EXPECT_EQ(n3, 6);
  EXPECT_EQ(n10, 2);
}

}  // namespace
}  // namespace pacdp
