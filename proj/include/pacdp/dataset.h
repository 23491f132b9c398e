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

#ifndef PACDP_DATASET_H_
#define PACDP_DATASET_H_

#include <cstdint>
#include <string>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "absl/strings/string_view.h"

namespace pacdp {

struct Example {
  std::vector<double> features;
  // Class index for classification tasks, real target for regression.
  double label = 0.0;

  friend bool operator==(const Example&, const Example&) = default;
};

struct LocalDataset {
  std::vector<Example> examples;
  size_t dim = 0;

  size_t size() const { return examples.size(); }
  bool empty() const { return examples.empty(); }

  friend bool operator==(const LocalDataset&, const LocalDataset&) = default;
};

// Non-empty, and every example has `dim` finite features.
absl::Status ValidateDataset(const LocalDataset& data);

enum class SyntheticTask {
  // Two balanced Gaussian classes with means at +/- m(1,...,1)/sqrt(p).
  kGaussBlobs,
  // Standard normal features; labels ~ Bernoulli(sigmoid(w*.x)) for a
  // planted w* (see PlantedLogisticParams).
  kLogisticPlanted,
  // Standard normal per-example shifts for the quadratic model; label 0.
  kQuadratic,
};

absl::string_view SyntheticTaskName(SyntheticTask task);
absl::StatusOr<SyntheticTask> ParseSyntheticTask(absl::string_view name);

absl::StatusOr<LocalDataset> GenerateSynthetic(SyntheticTask task, size_t n,
                                               size_t dim, uint64_t seed);

// Logistic-binary parameters (weights then bias) of the model planted by
// GenerateSynthetic(kLogisticPlanted, _, dim, seed).
std::vector<double> PlantedLogisticParams(size_t dim, uint64_t seed);

// Splits `data` into `num_clients` label-skewed shards. Per class, the share
// of client i is (1 - skew)/N + skew * g_i, with g ~ Dirichlet(0.1). skew = 0
// is an even split of every class; skew = 1 concentrates each class on few
// clients. Every shard is non-empty and the multiset of examples is
// preserved; each shard keeps the input order.
absl::StatusOr<std::vector<LocalDataset>> PartitionNonIid(
    const LocalDataset& data, size_t num_clients, double skew, uint64_t seed);

// Deterministic shuffle-then-split; the test part gets
// round(test_fraction * n) examples, at least one and leaving at least one.
struct TrainTestSplit {
  LocalDataset train;
  LocalDataset test;
};
absl::StatusOr<TrainTestSplit> SplitTrainTest(const LocalDataset& data,
                                              double test_fraction,
                                              uint64_t seed);

// Header row, numeric feature columns, final integer label column.
absl::StatusOr<LocalDataset> LoadCsvDataset(const std::string& path);

}  // namespace pacdp

#endif  // PACDP_DATASET_H_
