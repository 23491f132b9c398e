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

#include "pacdp/random.h"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <set>
#include <vector>

#include "gtest/gtest.h"

namespace pacdp {
namespace {

using Block = std::array<uint32_t, 4>;

// Known-answer vectors for Philox4x32 with 10 rounds.
TEST(Philox4x32Test, ZeroCounterZeroKey) {
  EXPECT_EQ(Philox4x32({0, 0, 0, 0}, {0, 0}),
            (Block{0x6627e8d5, 0xe169c58d, 0xbc57ac4c, 0x9b00dbd8}));
}

TEST(Philox4x32Test, AllOnes) {
  EXPECT_EQ(Philox4x32({0xffffffff, 0xffffffff, 0xffffffff, 0xffffffff},
                       {0xffffffff, 0xffffffff}),
            (Block{0x408f276d, 0x41c83b0e, 0xa20bc7c6, 0x6d5451fd}));
}

TEST(Philox4x32Test, PiDigits) {
  EXPECT_EQ(Philox4x32({0x243f6a88, 0x85a308d3, 0x13198a2e, 0x03707344},
                       {0xa4093822, 0x299f31d0}),
            (Block{0xd16cfe09, 0x94fdcceb, 0x5001e420, 0x24126ea1}));
}

TEST(DeriveStreamIdTest, DistinguishesPathsAndOrder) {
  std::set<uint64_t> ids;
  for (uint64_t a = 0; a < 20; ++a) {
    for (uint64_t b = 0; b < 20; ++b) ids.insert(DeriveStreamId({a, b}));
  }
  EXPECT_EQ(ids.size(), 400u);
  EXPECT_NE(DeriveStreamId({1, 2}), DeriveStreamId({2, 1}));
  EXPECT_NE(DeriveStreamId({1}), DeriveStreamId({1, 0}));
}

TEST(RandomStreamTest, SameKeySameSequence) {
  RandomStream a = RandomStream::For(42, StreamDomain::kNoise, {3, 7, 1});
  RandomStream b = RandomStream::For(42, StreamDomain::kNoise, {3, 7, 1});
  for (int i = 0; i < 1000; ++i) ASSERT_EQ(a.NextU64(), b.NextU64());
}

TEST(RandomStreamTest, DifferentDomainsDiffer) {
  RandomStream a = RandomStream::For(42, StreamDomain::kNoise, {3});
  RandomStream b = RandomStream::For(42, StreamDomain::kMinibatch, {3});
  int equal = 0;
  for (int i = 0; i < 100; ++i) equal += a.NextU32() == b.NextU32();
  EXPECT_LT(equal, 3);
}

TEST(RandomStreamTest, UniformInOpenInterval) {
  RandomStream s(1, 2);
  double sum = 0.0;
  const int n = 100000;
  for (int i = 0; i < n; ++i) {
    double u = s.Uniform();
    ASSERT_GT(u, 0.0);
    ASSERT_LT(u, 1.0);
    sum += u;
  }
  EXPECT_NEAR(sum / n, 0.5, 0.005);
}

TEST(RandomStreamTest, UniformIndexIsUnbiased) {
  RandomStream s(5, 9);
  std::vector<int> counts(7, 0);
  const int n = 70000;
  for (int i = 0; i < n; ++i) ++counts[s.UniformIndex(7)];
  for (int c : counts) EXPECT_NEAR(c, n / 7.0, 5 * std::sqrt(n / 7.0));
}

TEST(RandomStreamTest, NormalMoments) {
  RandomStream s(3, 4);
  const int n = 200000;
  double m1 = 0, m2 = 0, m4 = 0;
  for (int i = 0; i < n; ++i) {
    double x = s.Normal();
    m1 += x;
    m2 += x * x;
    m4 += x * x * x * x;
  }
  m1 /= n;
  m2 /= n;
  m4 /= n;
  EXPECT_NEAR(m1, 0.0, 0.01);
  EXPECT_NEAR(m2, 1.0, 0.01);
  EXPECT_NEAR(m4, 3.0, 0.06);
}

TEST(RandomStreamTest, GammaMeanAndVariance) {
  RandomStream s(8, 8);
  for (double shape : {0.1, 0.5, 1.0, 4.0}) {
    const int n = 100000;
    double m1 = 0, m2 = 0;
    for (int i = 0; i < n; ++i) {
      double x = s.Gamma(shape);
      ASSERT_GE(x, 0.0);
      m1 += x;
      m2 += x * x;
    }
    m1 /= n;
    double var = m2 / n - m1 * m1;
    EXPECT_NEAR(m1, shape, 0.03 * shape + 0.003) << shape;
    EXPECT_NEAR(var, shape, 0.08 * shape + 0.003) << shape;
  }
}

TEST(RandomStreamTest, SampleWithoutReplacementIsDistinctSubset) {
  RandomStream s(11, 0);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<size_t> pick = s.SampleWithoutReplacement(20, 7);
    ASSERT_EQ(pick.size(), 7u);
    std::set<size_t> distinct(pick.begin(), pick.end());
    ASSERT_EQ(distinct.size(), 7u);
    ASSERT_LT(*distinct.rbegin(), 20u);
  }
  std::vector<size_t> all = s.SampleWithoutReplacement(5, 5);
  std::sort(all.begin(), all.end());
  EXPECT_EQ(all, (std::vector<size_t>{0, 1, 2, 3, 4}));
}

TEST(RandomStreamTest, ShuffleIsPermutation) {
  RandomStream s(2, 2);
  std::vector<int> v(50);
  for (int i = 0; i < 50; ++i) v[i] = i;
  std::vector<int> w = v;
  s.Shuffle(std::span<int>(w));
  EXPECT_NE(v, w);
  std::sort(w.begin(), w.end());
  EXPECT_EQ(v, w);
}

}  // namespace
}  // namespace pacdp
