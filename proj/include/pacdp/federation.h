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

#ifndef PACDP_FEDERATION_H_
#define PACDP_FEDERATION_H_

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "absl/status/statusor.h"
#include "pacdp/accountant.h"
#include "pacdp/dataset.h"
#include "pacdp/mechanism.h"
#include "pacdp/model.h"
#include "pacdp/param_vector.h"
#include "pacdp/policy.h"
#include "pacdp/random.h"

namespace pacdp {

struct ClientProfile {
  int64_t id = 0;
  LocalDataset dataset;
  // Target (epsilon, delta) budget over the whole run.
  double epsilon = 1.0;
  // Constant noise multiplier; 0 means "calibrate from epsilon".
  double noise_multiplier = 0.0;
  // p_i = |D_i| / sum_j |D_j|.
  double weight = 0.0;
};

struct FederationConfig {
  size_t num_clients = 0;
  size_t clients_per_round = 0;
  int64_t rounds = 0;
  // Noised local SGD steps per round; each one is a ledgered release.
  int64_t local_steps = 1;
  size_t batch_size = 1;
  double learning_rate = 0.1;
  ModelSpec model;
  ClippingPolicy policy = FixedClipPolicy{};
  AccountantConfig accountant;
  uint64_t seed = 0;
  // Aggregate with the raw weights sum_{i in S_t} p_i w_i instead of
  // renormalizing them over the sampled subset.
  bool literal_aggregation = false;
  // Worker threads for client updates; results do not depend on it.
  size_t threads = 1;

  absl::Status Validate() const;
};

struct RoundRecord {
  int64_t round = 0;
  std::vector<int64_t> sampled;
  // Clip bound used by each sampled client, aligned with `sampled`.
  std::vector<double> clip_bounds;
  double loss = 0.0;
  // NaN for regression models.
  double accuracy = 0.0;
  double update_norm = 0.0;
  size_t messages = 0;
  size_t payload_floats = 0;
  size_t failed_clients = 0;
  // Every sampled client failed; the global model was carried over.
  bool carried_over = false;

  double MeanClip() const;
};

// Uniform subset of size k from [0, n), sorted ascending.
absl::StatusOr<std::vector<size_t>> SampleClients(size_t n, size_t k,
                                                  RandomStream& stream);

struct LocalUpdateResult {
  ParamVector params;
  std::vector<LedgerEntry> ledger_delta;
  // Per-example gradient norms at or below the bound, out of `norms_seen`.
  // Only these counts leave the client; they drive the quantile baseline.
  size_t norms_below = 0;
  size_t norms_seen = 0;
};

// E local DP-SGD steps from `global`: per step, a minibatch of
// min(B, |D_i|) examples without replacement, per-example clipping at
// `clip`, averaging and Gaussian noise of std z*C/b, then w -= eta * g_hat.
// Random streams are keyed by (seed, client id, round, step). A non-finite
// iterate is reported as an error (client failure).
absl::StatusOr<LocalUpdateResult> LocalUpdate(const Model& model,
                                              const ClientProfile& client,
                                              const ParamVector& global,
                                              ClipBound clip, int64_t round,
                                              const FederationConfig& config);

struct WeightedParams {
  double weight = 0.0;
  ParamVector params;
};

// sum_i (w_i / sum_j w_j) v_i.
absl::StatusOr<ParamVector> Aggregate(std::span<const WeightedParams> updates);
// sum_i w_i v_i with the weights taken as given.
absl::StatusOr<ParamVector> AggregateLiteral(
    std::span<const WeightedParams> updates);

// Builds client profiles with ids 0..N-1 and size-proportional weights.
absl::StatusOr<std::vector<ClientProfile>> MakeClients(
    std::vector<LocalDataset> datasets, std::span<const double> epsilons);

// Fills in every zero noise multiplier by calibrating the client's epsilon
// over the expected participation T*K/N rounds of E steps each.
absl::Status CalibrateClients(std::span<ClientProfile> clients,
                              const FederationConfig& config);

struct TrainingResult {
  ParamVector params;
  std::vector<RoundRecord> history;
  std::vector<ParticipationLedger> ledgers;
  // Noise multipliers actually used, by client id.
  std::vector<double> noise_multipliers;
};

// Runs T rounds of sample -> local update -> aggregate. Loss is the weighted
// objective sum_i p_i F_i(w) over all clients; accuracy is measured on
// `eval` when given, else as the weighted client accuracy.
absl::StatusOr<TrainingResult> RunTraining(const FederationConfig& config,
                                           std::vector<ClientProfile> clients,
                                           const LocalDataset* eval = nullptr);

struct CommunicationReport {
  size_t total_messages = 0;
  size_t total_floats = 0;
  double messages_per_round = 0.0;
  double floats_per_round = 0.0;
};

CommunicationReport SummarizeCommunication(
    std::span<const RoundRecord> history);

}  // namespace pacdp

#endif  // PACDP_FEDERATION_H_
