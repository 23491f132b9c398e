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

#ifndef PACDP_CONFIG_H_
#define PACDP_CONFIG_H_

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "absl/status/statusor.h"
#include "pacdp/accountant.h"
#include "pacdp/dataset.h"
#include "pacdp/model.h"

namespace pacdp {

struct DatasetRecipe {
  // "synthetic" or "csv".
  std::string source = "synthetic";
  SyntheticTask task = SyntheticTask::kLogisticPlanted;
  size_t examples = 0;
  size_t dim = 0;
  std::string csv_path;
  double test_fraction = 0.2;
  double skew = 0.0;
};

struct BudgetGroup {
  double epsilon = 0.0;
  double proportion = 0.0;
};

struct PolicySettings {
  // "pacdp", "fixed" or "quantile".
  std::string kind = "pacdp";
  double clip = 0.0;
  double quantile = 0.5;
  double quantile_lr = 0.2;
};

struct GridSettings {
  std::vector<double> epsilons;
  std::vector<double> clips;
  size_t clients = 0;
  size_t clients_per_round = 0;
  int64_t rounds = 0;
  int64_t local_steps = 1;
  size_t batch_size = 0;
  double learning_rate = 0.0;
  double skew = 0.0;
  size_t seeds_per_cell = 3;
  bool monotone = false;
  SyntheticTask proxy_task = SyntheticTask::kLogisticPlanted;
  size_t proxy_examples = 0;
  uint64_t proxy_seed = 0;
};

struct RunConfig {
  uint64_t seed = 0;
  std::string output_dir;
  DatasetRecipe dataset;
  ModelSpec model;
  size_t clients = 0;
  size_t clients_per_round = 0;
  int64_t rounds = 0;
  int64_t local_steps = 1;
  size_t batch_size = 0;
  double learning_rate = 0.0;
  bool literal_aggregation = false;
  size_t threads = 1;
  AccountantConfig accountant;
  std::vector<BudgetGroup> budgets;
  double decay_start_fraction = 0.6;
  double lambda_min = 0.1;
  PolicySettings policy;
  std::optional<GridSettings> grid;
};

// Parses and validates a JSON run config. Unknown keys, duplicate keys,
// missing required fields and out-of-range values are all collected; the
// error message lists every violation on its own line, each prefixed by its
// dotted path.
absl::StatusOr<RunConfig> ParseRunConfig(const std::string& text);
absl::StatusOr<RunConfig> LoadRunConfig(const std::string& path);

// Re-checks cross-field invariants, e.g. after command-line overrides.
absl::Status ValidateRunConfig(const RunConfig& config);

// Client budgets from the proportions: cumulative rounding over N clients,
// groups assigned in order to clients 0..N-1.
std::vector<double> AssignBudgets(std::span<const BudgetGroup> groups,
                                  size_t num_clients);

}  // namespace pacdp

#endif  // PACDP_CONFIG_H_
