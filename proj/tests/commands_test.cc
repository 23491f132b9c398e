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

#include "pacdp/commands.h"

#include <cmath>
#include <filesystem>
#include <string>
#include <vector>

#include "absl/strings/numbers.h"
#include "absl/strings/str_cat.h"
#include "absl/strings/str_split.h"
#include "gtest/gtest.h"
#include "json.hpp"

namespace pacdp {
namespace {

namespace fs = std::filesystem;

constexpr char kConfig[] = R"({
  "seed": 5,
  "output_dir": "unused",
  "model": {"kind": "logistic-binary", "input_dim": 4},
  "dataset": {"source": "synthetic", "task": "logistic-planted",
              "examples": 600, "dim": 4, "test_fraction": 0.2, "skew": 0.5},
  "federation": {"clients": 6, "clients_per_round": 3, "rounds": 8,
                 "local_steps": 1, "batch_size": 16, "learning_rate": 0.5},
  "privacy": {"budgets": [{"epsilon": 2.0, "proportion": 0.5},
                          {"epsilon": 8.0, "proportion": 0.5}]},
  "policy": {"kind": "pacdp", "clip": 1.0},
  "grid": {"epsilons": [1.0, 3.0, 9.0], "clips": [0.1, 1.0, 5.0],
           "clients": 4, "clients_per_round": 2, "rounds": 6,
           "local_steps": 1, "batch_size": 16, "learning_rate": 0.5,
           "skew": 0.5, "seeds_per_cell": 2,
           "proxy": {"task": "logistic-planted", "examples": 400, "seed": 9}}
})";

class CommandsTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           absl::StrCat("pacdp_commands_",
                        ::testing::UnitTest::GetInstance()
                            ->current_test_info()
                            ->name());
    fs::remove_all(dir_);
    auto config = ParseRunConfig(kConfig);
    ASSERT_TRUE(config.ok()) << config.status();
    config->output_dir = dir_.string();
    config_ = *config;
  }
  void TearDown() override { fs::remove_all(dir_); }

  std::string Path(const char* name) const { return (dir_ / name).string(); }

  fs::path dir_;
  RunConfig config_;
};

TEST_F(CommandsTest, FitWritesRoundTrippableFile) {
  auto fit = CmdFit(config_);
  ASSERT_TRUE(fit.ok()) << fit.status();
  auto text = ReadFile(fit->fit_path);
  ASSERT_TRUE(text.ok());
  auto parsed = ParseFitResult(*text);
  ASSERT_TRUE(parsed.ok());
  EXPECT_EQ(*parsed, fit->fit);
  std::string matrix = *ReadFile(fit->matrix_path);
  EXPECT_EQ(matrix.substr(0, matrix.find('\n')), "epsilon,C=0.1,C=1,C=5");

  auto again = CmdFit(config_);
  ASSERT_TRUE(again.ok());
  EXPECT_EQ(*ReadFile(again->matrix_path), matrix);
  EXPECT_EQ(*ReadFile(again->fit_path), *text);
}

TEST_F(CommandsTest, TrainNeedsFitForPacDp) {
  auto out = CmdTrain(config_, std::nullopt);
  ASSERT_FALSE(out.ok());
  EXPECT_NE(out.status().message().find("fit"), std::string::npos);
}

TEST_F(CommandsTest, SummaryMatchesAccount) {
  ASSERT_TRUE(CmdFit(config_).ok());
  auto train = CmdTrain(config_, std::nullopt);
  ASSERT_TRUE(train.ok()) << train.status();

  std::string history = *ReadFile(train->history_path);
  EXPECT_EQ(history.substr(0, history.find('\n')),
            "round,loss,accuracy,mean_clip,messages,floats");
  auto rows = ParseHistoryCsv(history);
  ASSERT_TRUE(rows.ok());
  ASSERT_EQ(rows->size(), 8u);
  for (const HistoryRow& r : *rows) {
    EXPECT_EQ(r.messages, 3u);
    EXPECT_EQ(r.floats, 15u);
  }

  auto table = CmdAccount(train->ledger_path, config_.accountant);
  ASSERT_TRUE(table.ok()) << table.status();
  auto summary = nlohmann::json::parse(*ReadFile(train->summary_path));
  const auto& clients = summary["privacy"]["clients"];
  std::vector<std::string> lines = absl::StrSplit(*table, '\n');
  // Header, then one line per client that participated.
  size_t matched = 0;
  for (size_t i = 1; i < lines.size(); ++i) {
    std::vector<std::string> cells = absl::StrSplit(lines[i], ',');
    int64_t id;
    double eps;
    if (cells.size() != 3 || !absl::SimpleAtoi(cells[0], &id)) continue;
    ASSERT_TRUE(absl::SimpleAtod(cells[1], &eps));
    EXPECT_EQ(clients[id]["epsilon"].get<double>(), eps);
    ++matched;
  }
  EXPECT_GT(matched, 0u);
  EXPECT_EQ(summary["policy"], "pacdp");
}

TEST_F(CommandsTest, FixedPolicyOverride) {
  CommandOverrides o;
  o.policy = "fixed";
  o.clip = 1.0;
  auto config = ApplyOverrides(config_, o);
  ASSERT_TRUE(config.ok());
  auto train = CmdTrain(*config, std::nullopt);
  ASSERT_TRUE(train.ok()) << train.status();
  for (const RoundRecord& r : train->result.history) {
    EXPECT_EQ(r.MeanClip(), 1.0);
  }
  o.clip = -1.0;
  EXPECT_FALSE(ApplyOverrides(config_, o).ok());
}

TEST_F(CommandsTest, AccountSingleRoundLedger) {
  fs::create_directories(dir_);
  ASSERT_TRUE(WriteFile(Path("ledger.csv"),
                        "client_id,round,z,steps\n0,0,1,1\n1,0,1,1\n")
                  .ok());
  AccountantConfig accountant;
  auto table = CmdAccount(Path("ledger.csv"), accountant);
  ASSERT_TRUE(table.ok());
  std::vector<std::string> lines = absl::StrSplit(*table, '\n');
  ASSERT_GE(lines.size(), 3u);
  for (int i = 1; i <= 2; ++i) {
    std::vector<std::string> cells = absl::StrSplit(lines[i], ',');
    double eps;
    ASSERT_TRUE(absl::SimpleAtod(cells[1], &eps));
    EXPECT_NEAR(eps, 5.3026, 1e-4);
    EXPECT_EQ(cells[2], "6");
  }
  EXPECT_EQ(lines[3].substr(0, 4), "min,");

  AccountantConfig tight;
  tight.delta = 1e-8;
  auto tighter = CmdAccount(Path("ledger.csv"), tight);
  std::vector<std::string> tl = absl::StrSplit(*tighter, '\n');
  double loose_eps, tight_eps;
  ASSERT_TRUE(absl::SimpleAtod(
      std::vector<std::string>(absl::StrSplit(lines[1], ','))[1], &loose_eps));
  ASSERT_TRUE(absl::SimpleAtod(
      std::vector<std::string>(absl::StrSplit(tl[1], ','))[1], &tight_eps));
  EXPECT_GT(tight_eps, loose_eps);
}

TEST_F(CommandsTest, AccountEmptyLedger) {
  fs::create_directories(dir_);
  ASSERT_TRUE(WriteFile(Path("ledger.csv"), "client_id,round,z,steps\n").ok());
  bool empty = false;
  auto table = CmdAccount(Path("ledger.csv"), AccountantConfig{}, &empty);
  ASSERT_TRUE(table.ok());
  EXPECT_TRUE(empty);
  EXPECT_EQ(*table, "client_id,epsilon,alpha\n");
}

TEST_F(CommandsTest, ReportIsIdempotentAndSamplesFit) {
  CommandOverrides o;
  o.policy = "fixed";
  o.clip = 1.0;
  auto config = ApplyOverrides(config_, o);
  ASSERT_TRUE(CmdTrain(*config, std::nullopt).ok());

  FitResult fit;
  fit.alpha = -5.5235;
  fit.beta = 12.0719;
  fit.gamma = 1.4004;
  fit.clamp_floor = 0.1;
  for (int i = 0; i < 6; ++i) {
    double e = 0.5 + 0.198 * i;  // spans [0.5, 1.49]
    fit.support.push_back({e, EvaluatePolynomial(fit, e)});
  }
  ASSERT_TRUE(WriteFile(Path(kFitFile), FormatFitResult(fit)).ok());

  auto first = CmdReport(dir_.string());
  ASSERT_TRUE(first.ok()) << first.status();
  std::string report = *ReadFile(*first);
  std::string curve = *ReadFile(Path(kFitCurveFile));
  auto again = CmdReport(dir_.string());
  ASSERT_TRUE(again.ok());
  EXPECT_EQ(*ReadFile(*again), report);
  EXPECT_EQ(*ReadFile(Path(kFitCurveFile)), curve);

  auto doc = nlohmann::json::parse(report);
  const auto& samples = doc["fit"]["curve"];
  ASSERT_EQ(samples.size(), 100u);
  EXPECT_DOUBLE_EQ(samples[0]["epsilon"].get<double>(), 0.5);
  EXPECT_NEAR(samples[0]["clip"].get<double>(), 6.0555, 1e-4);
  EXPECT_EQ(doc["accuracy_curve"].size(), 8u);
}

TEST_F(CommandsTest, ReportMissingHistoryNamesPath) {
  auto out = CmdReport(dir_.string());
  ASSERT_FALSE(out.ok());
  EXPECT_NE(out.status().message().find(Path(kHistoryFile)),
            std::string::npos);
}

TEST(RoundSignificantTest, NineDigits) {
  EXPECT_EQ(RoundSignificant(1.0 / 3.0), 0.333333333);
  EXPECT_EQ(RoundSignificant(123456789123.0), 123456789000.0);
  EXPECT_TRUE(std::isnan(RoundSignificant(NAN)));
}

}  // namespace
}  // namespace pacdp
