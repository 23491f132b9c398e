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

#ifndef PACDP_ACCOUNTANT_H_
#define PACDP_ACCOUNTANT_H_

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "absl/status/statusor.h"
#include "absl/strings/string_view.h"

namespace pacdp {

// One or more Gaussian-mechanism invocations by a client in a round.
struct LedgerEntry {
  int64_t round = 0;
  double noise_multiplier = 0.0;
  int64_t steps = 1;

  friend bool operator==(const LedgerEntry&, const LedgerEntry&) = default;
};

// Every noised release a client made during a run, in round order. Several
// entries may share a round when a client takes multiple local steps.
class ParticipationLedger {
 public:
  ParticipationLedger() = default;
  explicit ParticipationLedger(int64_t client_id) : client_id_(client_id) {}

  // Rejects z <= 0, steps < 1 and rounds earlier than the last entry.
  absl::Status Append(const LedgerEntry& entry);

  int64_t client_id() const { return client_id_; }
  const std::vector<LedgerEntry>& entries() const { return entries_; }
  bool empty() const { return entries_.empty(); }
  int64_t total_steps() const;

  friend bool operator==(const ParticipationLedger&,
                         const ParticipationLedger&) = default;

 private:
  int64_t client_id_ = 0;
  std::vector<LedgerEntry> entries_;
};

std::vector<int> DefaultAlphaGrid();  // {2, 3, ..., 64}

struct AccountantConfig {
  std::vector<int> alpha_grid = DefaultAlphaGrid();
  double delta = 1e-5;

  absl::Status Validate() const;
};

// Renyi divergence bound alpha / (2 z^2) of one Gaussian release.
absl::StatusOr<double> RdpPerRound(double noise_multiplier, int alpha);

// Sum of per-release RDP over the ledger, weighting each entry by its steps.
absl::StatusOr<double> ComposeRdp(const ParticipationLedger& ledger,
                                  int alpha);

struct DpGuarantee {
  double epsilon = 0.0;
  int alpha = 0;
};

// eps = min over the grid of rho(alpha) + ln(1/delta) / (alpha - 1); ties go
// to the smaller order. An empty ledger yields the penalty term alone,
// ln(1/delta) / (alpha_max - 1), at the largest order.
absl::StatusOr<DpGuarantee> RdpToDp(const ParticipationLedger& ledger,
                                    const AccountantConfig& config);

struct BasicComposition {
  double epsilon = 0.0;
  double delta = 0.0;
};
BasicComposition ComposeBasic(std::span<const double> per_round_epsilons,
                              double delta_per_round);

// ln(1/delta) / (alpha_max - 1): the conversion term alone at the largest
// order. No ledger, however noisy, accounts below it. Requires a valid config.
double EpsilonFloor(const AccountantConfig& config);

// Smallest constant noise multiplier such that a ledger of
// `expected_rounds * steps_per_round` releases accounts to at most
// `target_epsilon`. `expected_rounds` may be fractional (e.g. T*K/N).
// Fails when the target lies at or below the grid's floor
// ln(1/delta) / (alpha_max - 1), which no finite z reaches.
absl::StatusOr<double> CalibrateConstantNoiseMultiplier(
    double target_epsilon, double expected_rounds, int64_t steps_per_round,
    const AccountantConfig& config);

// Accounted epsilon of `releases` Gaussian releases with the same z.
absl::StatusOr<DpGuarantee> EpsilonForUniformLedger(
    double noise_multiplier, double releases, const AccountantConfig& config);

struct ClientEpsilon {
  int64_t client_id = 0;
  double epsilon = 0.0;
  int alpha = 0;
};

struct PrivacyReport {
  std::vector<ClientEpsilon> clients;
  double min_epsilon = 0.0;
  // Lower middle element for even counts.
  double median_epsilon = 0.0;
  double max_epsilon = 0.0;
};

absl::StatusOr<PrivacyReport> FinalReport(
    std::span<const ParticipationLedger> ledgers,
    const AccountantConfig& config);

// Line-delimited export: a "client_id,round,z,steps" header, then one line
// per entry with z printed to 9 significant digits.
std::string FormatLedgers(std::span<const ParticipationLedger> ledgers);
// Inverse of FormatLedgers. Entries of one client may be interleaved with
// other clients' but must be in round order. Blank input is an empty list.
absl::StatusOr<std::vector<ParticipationLedger>> ParseLedgers(
    absl::string_view text);

}  // namespace pacdp

#endif  // PACDP_ACCOUNTANT_H_
