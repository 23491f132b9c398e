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

#include <cmath>
#include <numbers>
#include <numeric>

namespace pacdp {
namespace {

constexpr uint32_t kPhiloxM0 = 0xD2511F53u;
constexpr uint32_t kPhiloxM1 = 0xCD9E8D57u;
constexpr uint32_t kPhiloxW0 = 0x9E3779B9u;
constexpr uint32_t kPhiloxW1 = 0xBB67AE85u;

inline void MulHiLo(uint32_t a, uint32_t b, uint32_t& hi, uint32_t& lo) {
  uint64_t product = static_cast<uint64_t>(a) * b;
  hi = static_cast<uint32_t>(product >> 32);
  lo = static_cast<uint32_t>(product);
}

inline uint64_t SplitMix64(uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

}  // namespace

std::array<uint32_t, 4> Philox4x32(std::array<uint32_t, 4> counter,
                                   std::array<uint32_t, 2> key) {
  for (int round = 0; round < 10; ++round) {
    if (round > 0) {
      key[0] += kPhiloxW0;
      key[1] += kPhiloxW1;
    }
    uint32_t hi0, lo0, hi1, lo1;
    MulHiLo(kPhiloxM0, counter[0], hi0, lo0);
    MulHiLo(kPhiloxM1, counter[2], hi1, lo1);
    counter = {hi1 ^ counter[1] ^ key[0], lo1, hi0 ^ counter[3] ^ key[1],
               lo0};
  }
  return counter;
}

uint64_t DeriveStreamId(std::initializer_list<uint64_t> path) {
  uint64_t h = 0x6A09E667F3BCC908ull;
  for (uint64_t v : path) {
    h = SplitMix64(h ^ SplitMix64(v));
  }
  return h;
}

RandomStream::RandomStream(uint64_t seed, uint64_t stream_id)
    : key_{static_cast<uint32_t>(seed), static_cast<uint32_t>(seed >> 32)},
      stream_id_(stream_id) {}

RandomStream RandomStream::For(uint64_t seed, StreamDomain domain,
                               std::initializer_list<uint64_t> path) {
  uint64_t h = DeriveStreamId({static_cast<uint64_t>(domain)});
  for (uint64_t v : path) {
    h = DeriveStreamId({h, v});
  }
  return RandomStream(seed, h);
}

void RandomStream::Refill() {
  std::array<uint32_t, 4> counter = {
      static_cast<uint32_t>(block_), static_cast<uint32_t>(block_ >> 32),
      static_cast<uint32_t>(stream_id_),
      static_cast<uint32_t>(stream_id_ >> 32)};
  buffer_ = Philox4x32(counter, key_);
  ++block_;
  buffered_ = 4;
}

uint32_t RandomStream::NextU32() {
  if (buffered_ == 0) Refill();
  return buffer_[4 - buffered_--];
}

uint64_t RandomStream::NextU64() {
  uint64_t hi = NextU32();
  uint64_t lo = NextU32();
  return (hi << 32) | lo;
}

double RandomStream::Uniform() {
  // 53 random bits, offset by half an ulp so 0 is never returned.
  return (static_cast<double>(NextU64() >> 11) + 0.5) * 0x1.0p-53;
}

uint64_t RandomStream::UniformIndex(uint64_t n) {
  // Rejection sampling on the largest multiple of n.
  const uint64_t limit = UINT64_MAX - UINT64_MAX % n;
  uint64_t x;
  do {
    x = NextU64();
  } while (x >= limit);
  return x % n;
}

double RandomStream::Normal() {
  if (has_spare_normal_) {
    has_spare_normal_ = false;
    return spare_normal_;
  }
  double u1 = Uniform();
  double u2 = Uniform();
  double r = std::sqrt(-2.0 * std::log(u1));
  double theta = 2.0 * std::numbers::pi * u2;
  spare_normal_ = r * std::sin(theta);
  has_spare_normal_ = true;
  return r * std::cos(theta);
}

double RandomStream::Gamma(double shape) {
  if (shape < 1.0) {
    double u = Uniform();
    return Gamma(shape + 1.0) * std::pow(u, 1.0 / shape);
  }
  const double d = shape - 1.0 / 3.0;
  const double c = 1.0 / std::sqrt(9.0 * d);
  while (true) {
    double x, v;
    do {
      x = Normal();
      v = 1.0 + c * x;
    } while (v <= 0.0);
    v = v * v * v;
    double u = Uniform();
    if (u < 1.0 - 0.0331 * x * x * x * x) return d * v;
    if (std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) return d * v;
  }
}

std::vector<size_t> RandomStream::SampleWithoutReplacement(size_t n,
                                                           size_t k) {
  std::vector<size_t> pool(n);
  std::iota(pool.begin(), pool.end(), size_t{0});
  if (k > n) k = n;
  for (size_t i = 0; i < k; ++i) {
    size_t j = i + static_cast<size_t>(UniformIndex(n - i));
    std::swap(pool[i], pool[j]);
  }
  pool.resize(k);
  return pool;
}

}  // namespace pacdp
