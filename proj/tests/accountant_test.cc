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

#include "pacdp/accountant.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "gtest/gtest.h"
#include "pacdp/random.h"

namespace pacdp {
namespace {

// Independent oracle: scan every integer order and keep the smallest bound.
DpGuarantee BruteForce(const std::vector<LedgerEntry>& entries, double delta,
                       int lo = 2, int hi = 64) {
  DpGuarantee best{std::numeric_limits<double>::infinity(), 0};
  for (int a = lo; a <= hi; ++a) {
    double rdp = 0.0;
    for (const LedgerEntry& e : entries) {
      rdp += e.steps * a / (2.0 * e.noise_multiplier * e.noise_multiplier);
    }
    double eps = rdp + std::log(1.0 / delta) / (a - 1);
    if (eps < best.epsilon) best = {eps, a};
  }
  return best;
}

ParticipationLedger RandomLedger(RandomStream& rng, int64_t id) {
  ParticipationLedger ledger(id);
  int64_t round = 0;
  size_t n = rng.UniformIndex(40);
  for (size_t i = 0; i < n; ++i) {
    round += static_cast<int64_t>(rng.UniformIndex(3));
    double z = 0.3 + 20.0 * rng.Uniform();
    int64_t steps = 1 + static_cast<int64_t>(rng.UniformIndex(3));
    EXPECT_TRUE(ledger.Append({round, z, steps}).ok());
  }
  return ledger;
}

TEST(LedgerTest, RejectsDecreasingRoundsAndBadEntries) {
  ParticipationLedger ledger(3);
  EXPECT_TRUE(ledger.Append({2, 1.0, 1}).ok());
  EXPECT_TRUE(ledger.Append({2, 1.0, 1}).ok());
  EXPECT_FALSE(ledger.Append({1, 1.0, 1}).ok());
  EXPECT_FALSE(ledger.Append({3, 0.0, 1}).ok());
  EXPECT_FALSE(ledger.Append({3, 1.0, 0}).ok());
  EXPECT_EQ(ledger.total_steps(), 2);
}

TEST(RdpTest, PerRoundFormula) {
  EXPECT_DOUBLE_EQ(*RdpPerRound(2.0, 4), 4.0 / 8.0);
  EXPECT_FALSE(RdpPerRound(0.0, 4).ok());
  EXPECT_FALSE(RdpPerRound(1.0, 1).ok());
}

TEST(RdpTest, ComposeAddsSteps) {
  ParticipationLedger ledger(0);
  ASSERT_TRUE(ledger.Append({0, 1.0, 2}).ok());
  ASSERT_TRUE(ledger.Append({1, 2.0, 1}).ok());
  EXPECT_DOUBLE_EQ(*ComposeRdp(ledger, 3), 2 * 1.5 + 3.0 / 8.0);
}

TEST(RdpToDpTest, SingleRoundKnownValue) {
  ParticipationLedger ledger(0);
  ASSERT_TRUE(ledger.Append({0, 1.0, 1}).ok());
  auto g = RdpToDp(ledger, AccountantConfig{});
  ASSERT_TRUE(g.ok());
  DpGuarantee oracle = BruteForce(ledger.entries(), 1e-5);
  EXPECT_EQ(g->alpha, 6);
  EXPECT_EQ(oracle.alpha, 6);
  EXPECT_NEAR(g->epsilon, oracle.epsilon, 1e-12);
  EXPECT_NEAR(g->epsilon, 5.3026, 1e-4);
}

TEST(RdpToDpTest, MatchesBruteForceOnRandomLedgers) {
  RandomStream rng = RandomStream::For(4, StreamDomain::kTestHarness);
  AccountantConfig config;
  for (int i = 0; i < 100; ++i) {
    ParticipationLedger ledger = RandomLedger(rng, i);
    DpGuarantee got = *RdpToDp(ledger, config);
    DpGuarantee want = BruteForce(ledger.entries(), config.delta);
    ASSERT_EQ(got.alpha, want.alpha) << i;
    ASSERT_NEAR(got.epsilon, want.epsilon, 1e-12 * want.epsilon) << i;
  }
}

TEST(RdpToDpTest, EmptyLedgerIsConversionTermOnly) {
  auto g = RdpToDp(ParticipationLedger(0), AccountantConfig{});
  ASSERT_TRUE(g.ok());
  EXPECT_EQ(g->alpha, 64);
  EXPECT_NEAR(g->epsilon, std::log(1e5) / 63, 1e-15);
}

TEST(RdpToDpTest, MonotoneInLedgerAndDelta) {
  ParticipationLedger ledger(0);
  double prev = RdpToDp(ledger, {}).value().epsilon;
  for (int t = 0; t < 20; ++t) {
    ASSERT_TRUE(ledger.Append({t, 3.0, 1}).ok());
    double eps = RdpToDp(ledger, {}).value().epsilon;
    EXPECT_GT(eps, prev);
    prev = eps;
  }
  AccountantConfig loose, tight;
  tight.delta = 1e-8;
  EXPECT_GT(RdpToDp(ledger, tight)->epsilon, RdpToDp(ledger, loose)->epsilon);
}

TEST(AccountantConfigTest, Validation) {
  AccountantConfig c;
  EXPECT_TRUE(c.Validate().ok());
  EXPECT_EQ(c.alpha_grid.front(), 2);
  EXPECT_EQ(c.alpha_grid.back(), 64);
  EXPECT_EQ(c.alpha_grid.size(), 63u);
  c.delta = 0.0;
  EXPECT_FALSE(c.Validate().ok());
  c.delta = 1e-5;
  c.alpha_grid = {1, 2};
  EXPECT_FALSE(c.Validate().ok());
  c.alpha_grid = {};
  EXPECT_FALSE(c.Validate().ok());
}

TEST(BasicCompositionTest, SumsAndIsLooserThanRdp) {
  std::vector<double> eps{0.5, 0.25, 1.0};
  BasicComposition b = ComposeBasic(eps, 1e-6);
  EXPECT_DOUBLE_EQ(b.epsilon, 1.75);
  EXPECT_DOUBLE_EQ(b.delta, 3e-6);

  // T releases at z = 5: per-release classical epsilon at delta/T, summed,
  // against the RDP bound at total delta.
  const int rounds = 50;
  const double z = 5.0, delta = 1e-5;
  ParticipationLedger ledger(0);
  std::vector<double> per_round;
  for (int t = 0; t < rounds; ++t) {
    ASSERT_TRUE(ledger.Append({t, z, 1}).ok());
    per_round.push_back(
        std::sqrt(2.0 * std::log(1.25 / (delta / rounds))) / z);
  }
  AccountantConfig config;
  EXPECT_GE(ComposeBasic(per_round, delta / rounds).epsilon,
            RdpToDp(ledger, config)->epsilon);
}

TEST(CalibrationTest, RoundTripsWithinTolerance) {
  AccountantConfig config;
  for (double target : {0.5, 1.0, 2.0, 4.0, 8.0}) {
    for (double rounds : {1.0, 7.5, 50.0}) {
      auto z = CalibrateConstantNoiseMultiplier(target, rounds, 2, config);
      ASSERT_TRUE(z.ok()) << z.status();
      double eps = EpsilonForUniformLedger(*z, rounds * 2, config)->epsilon;
      EXPECT_LE(eps, target);
      EXPECT_GE(eps, 0.999 * target);
    }
  }
}

TEST(CalibrationTest, BelowFloorIsInfeasible) {
  AccountantConfig config;
  const double floor = std::log(1.0 / config.delta) / 63.0;
  auto z = CalibrateConstantNoiseMultiplier(0.9 * floor, 10, 1, config);
  EXPECT_EQ(z.status().code(), absl::StatusCode::kFailedPrecondition);
  EXPECT_TRUE(CalibrateConstantNoiseMultiplier(1.05 * floor, 10, 1, config).ok());
}

TEST(FinalReportTest, SummaryStatistics) {
  std::vector<ParticipationLedger> ledgers;
  for (int id = 0; id < 3; ++id) {
    ParticipationLedger l(id);
    for (int t = 0; t <= id; ++t) EXPECT_TRUE(l.Append({t, 2.0, 1}).ok());
    ledgers.push_back(l);
  }
  AccountantConfig config;
  auto report = FinalReport(ledgers, config);
  ASSERT_TRUE(report.ok());
  ASSERT_EQ(report->clients.size(), 3u);
  for (int i = 0; i < 3; ++i) {
    double want = BruteForce(ledgers[i].entries(), config.delta).epsilon;
    EXPECT_NEAR(report->clients[i].epsilon, want, 1e-12 * want);
  }
  EXPECT_EQ(report->min_epsilon, report->clients[0].epsilon);
  EXPECT_EQ(report->median_epsilon, report->clients[1].epsilon);
  EXPECT_EQ(report->max_epsilon, report->clients[2].epsilon);

  auto one = FinalReport(std::span(ledgers).first(1), config);
  EXPECT_EQ(one->min_epsilon, one->max_epsilon);
  EXPECT_EQ(one->median_epsilon, one->max_epsilon);
}

TEST(LedgerIoTest, RoundTrip) {
  RandomStream rng = RandomStream::For(6, StreamDomain::kTestHarness);
  std::vector<ParticipationLedger> ledgers;
  for (int id = 0; id < 5; ++id) {
    ParticipationLedger l = RandomLedger(rng, id);
    if (!l.empty()) ledgers.push_back(l);
  }
  std::string text = FormatLedgers(ledgers);
  EXPECT_EQ(text.substr(0, text.find('\n')), "client_id,round,z,steps");
  auto parsed = ParseLedgers(text);
  ASSERT_TRUE(parsed.ok()) << parsed.status();
  EXPECT_EQ(FormatLedgers(*parsed), text);
  ASSERT_EQ(parsed->size(), ledgers.size());
  for (size_t i = 0; i < ledgers.size(); ++i) {
    EXPECT_EQ((*parsed)[i].total_steps(), ledgers[i].total_steps());
  }
}

TEST(LedgerIoTest, RejectsMalformedRows) {
  EXPECT_FALSE(ParseLedgers("client_id,round,z,steps\n0,1,abc,1\n").ok());
  EXPECT_FALSE(ParseLedgers("client_id,round,z,steps\n0,1,1.0\n").ok());
  EXPECT_TRUE(ParseLedgers("client_id,round,z,steps\n")->empty());
}

}  // namespace
}  // namespace pacdp
