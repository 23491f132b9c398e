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

#ifndef PACDP_RANDOM_H_
#define PACDP_RANDOM_H_

#include <array>
#include <cstdint>
#include <initializer_list>
#include <span>
#include <vector>

namespace pacdp {

// Philox4x32-10 block function (Salmon et al., SC'11). Exposed for
// known-answer tests.
std::array<uint32_t, 4> Philox4x32(std::array<uint32_t, 4> counter,
                                   std::array<uint32_t, 2> key);

// Hashes a path of integers into a 64-bit stream identifier. Distinct paths
// give independent streams under the same seed.
uint64_t DeriveStreamId(std::initializer_list<uint64_t> path);

// Tags for the first element of a stream path so that no two subsystems
// ever share a stream.
enum class StreamDomain : uint64_t {
  kModelInit = 1,
  kSyntheticData = 2,
  kPartition = 3,
  kClientSampling = 4,
  kMinibatch = 5,
  kNoise = 6,
  kGridCell = 7,
  kTestHarness = 8,
};

// Counter-based random stream. The state is (seed, stream id, block index),
// so a stream keyed by e.g. (client, round, step) yields the same values no
// matter which thread evaluates it or in what order.
class RandomStream {
 public:
  RandomStream(uint64_t seed, uint64_t stream_id);

  // Convenience: stream keyed by a domain tag plus an arbitrary path.
  static RandomStream For(uint64_t seed, StreamDomain domain,
                          std::initializer_list<uint64_t> path = {});

  uint32_t NextU32();
  uint64_t NextU64();

  // Uniform on the open interval (0, 1).
  double Uniform();
  // Uniform integer in [0, n). `n` must be positive.
  uint64_t UniformIndex(uint64_t n);
  // Standard normal via Box-Muller.
  double Normal();
  // Gamma(shape, 1) via Marsaglia-Tsang. `shape` must be positive.
  double Gamma(double shape);

  // Fisher-Yates shuffle driven by this stream.
  template <typename T>
  void Shuffle(std::span<T> values) {
    for (size_t i = values.size(); i > 1; --i) {
      size_t j = static_cast<size_t>(UniformIndex(i));
      std::swap(values[i - 1], values[j]);
    }
  }

  // `k` distinct indices drawn uniformly from [0, n), in draw order.
  std::vector<size_t> SampleWithoutReplacement(size_t n, size_t k);

 private:
  void Refill();

  std::array<uint32_t, 2> key_;
  uint64_t stream_id_;
  uint64_t block_ = 0;
  std::array<uint32_t, 4> buffer_{};
  int buffered_ = 0;
  bool has_spare_normal_ = false;
  double spare_normal_ = 0.0;
};

}  // namespace pacdp

#endif  // PACDP_RANDOM_H_
