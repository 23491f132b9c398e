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
#include <map>

#include "absl/strings/numbers.h"
#include "absl/strings/str_cat.h"
#include "absl/strings/str_format.h"
#include "absl/strings/str_split.h"
#include "absl/strings/strip.h"
#include "pacdp/status_macros.h"

namespace pacdp {
namespace {

constexpr double kCalibrationRelTol = 1e-10;
constexpr int kMaxBracketSteps = 200;

// min over the grid of (total_rdp_per_alpha_unit * alpha + log_inv_delta /
// (alpha - 1)) where total RDP is linear in alpha for Gaussian releases.
DpGuarantee MinimizeOverGrid(double rdp_slope, const AccountantConfig& config) {
  const double log_inv_delta = std::log(1.0 / config.delta);
  DpGuarantee best{std::numeric_limits<double>::infinity(), 0};
  for (int alpha : config.alpha_grid) {
    double eps = rdp_slope * alpha + log_inv_delta / (alpha - 1);
    if (eps < best.epsilon) best = {eps, alpha};
  }
  return best;
}

}  // namespace

absl::Status ParticipationLedger::Append(const LedgerEntry& entry) {
  if (!(entry.noise_multiplier > 0.0) ||
      !std::isfinite(entry.noise_multiplier)) {
    return absl::InvalidArgumentError(absl::StrCat(
        "ledger noise multiplier must be positive, got ",
        entry.noise_multiplier));
  }
  if (entry.steps < 1) {
    return absl::InvalidArgumentError("ledger entry must record >= 1 step");
  }
  if (!entries_.empty() && entry.round < entries_.back().round) {
    return absl::InvalidArgumentError(
        absl::StrCat("ledger round ", entry.round, " precedes round ",
                     entries_.back().round, " of client ", client_id_));
  }
  entries_.push_back(entry);
  return absl::OkStatus();
}

int64_t ParticipationLedger::total_steps() const {
  int64_t total = 0;
  for (const LedgerEntry& e : entries_) total += e.steps;
  return total;
}

std::vector<int> DefaultAlphaGrid() {
  std::vector<int> grid;
  for (int alpha = 2; alpha <= 64; ++alpha) grid.push_back(alpha);
  return grid;
}

absl::Status AccountantConfig::Validate() const {
  if (alpha_grid.empty()) {
    return absl::InvalidArgumentError("alpha grid is empty");
  }
  for (int alpha : alpha_grid) {
    if (alpha <= 1) {
      return absl::InvalidArgumentError(
          absl::StrCat("RDP order ", alpha, " must exceed 1"));
    }
  }
  if (!(delta > 0.0 && delta < 1.0)) {
    return absl::InvalidArgumentError(
        absl::StrCat("delta must lie in (0, 1), got ", delta));
  }
  return absl::OkStatus();
}

absl::StatusOr<double> RdpPerRound(double noise_multiplier, int alpha) {
  if (!(noise_multiplier > 0.0)) {
    return absl::InvalidArgumentError("noise multiplier must be positive");
  }
  if (alpha <= 1) return absl::InvalidArgumentError("alpha must exceed 1");
  return alpha / (2.0 * noise_multiplier * noise_multiplier);
}

absl::StatusOr<double> ComposeRdp(const ParticipationLedger& ledger,
                                  int alpha) {
  if (alpha <= 1) return absl::InvalidArgumentError("alpha must exceed 1");
  double total = 0.0;
  for (const LedgerEntry& e : ledger.entries()) {
    PACDP_ASSIGN_OR_RETURN(double rho, RdpPerRound(e.noise_multiplier, alpha));
    total += rho * static_cast<double>(e.steps);
  }
  return total;
}

absl::StatusOr<DpGuarantee> RdpToDp(const ParticipationLedger& ledger,
                                    const AccountantConfig& config) {
  PACDP_RETURN_IF_ERROR(config.Validate());
  const double log_inv_delta = std::log(1.0 / config.delta);
  DpGuarantee best{std::numeric_limits<double>::infinity(), 0};
  for (int alpha : config.alpha_grid) {
    PACDP_ASSIGN_OR_RETURN(double rho, ComposeRdp(ledger, alpha));
    double eps = rho + log_inv_delta / (alpha - 1);
    if (eps < best.epsilon || (eps == best.epsilon && alpha < best.alpha)) {
      best = {eps, alpha};
    }
  }
  return best;
}

BasicComposition ComposeBasic(std::span<const double> per_round_epsilons,
                              double delta_per_round) {
  BasicComposition out;
  for (double eps : per_round_epsilons) out.epsilon += eps;
  out.delta = static_cast<double>(per_round_epsilons.size()) * delta_per_round;
  return out;
}

absl::StatusOr<DpGuarantee> EpsilonForUniformLedger(
    double noise_multiplier, double releases, const AccountantConfig& config) {
  PACDP_RETURN_IF_ERROR(config.Validate());
  if (!(noise_multiplier > 0.0)) {
    return absl::InvalidArgumentError("noise multiplier must be positive");
  }
  if (!(releases >= 0.0)) {
    return absl::InvalidArgumentError("release count must be non-negative");
  }
  std::vector<int> grid = config.alpha_grid;
  std::sort(grid.begin(), grid.end());
  AccountantConfig sorted{grid, config.delta};
  return MinimizeOverGrid(
      releases / (2.0 * noise_multiplier * noise_multiplier), sorted);
}

double EpsilonFloor(const AccountantConfig& config) {
  const int alpha_max =
      *std::max_element(config.alpha_grid.begin(), config.alpha_grid.end());
  return std::log(1.0 / config.delta) / (alpha_max - 1);
}

absl::StatusOr<double> CalibrateConstantNoiseMultiplier(
    double target_epsilon, double expected_rounds, int64_t steps_per_round,
    const AccountantConfig& config) {
  PACDP_RETURN_IF_ERROR(config.Validate());
  if (!(target_epsilon > 0.0) || !std::isfinite(target_epsilon)) {
    return absl::InvalidArgumentError(
        absl::StrCat("target epsilon must be positive, got ", target_epsilon));
  }
  if (!(expected_rounds > 0.0) || steps_per_round < 1) {
    return absl::InvalidArgumentError(
        "calibration needs a positive expected participation count");
  }
  const double releases =
      expected_rounds * static_cast<double>(steps_per_round);
  const int alpha_max =
      *std::max_element(config.alpha_grid.begin(), config.alpha_grid.end());
  const double floor_eps = EpsilonFloor(config);
  if (target_epsilon <= floor_eps) {
    return absl::FailedPreconditionError(absl::StrFormat(
        "target epsilon %.9g is at or below the accountant floor %.9g "
        "(ln(1/delta)/(alpha_max-1) with delta=%g, alpha_max=%d); no finite "
        "noise multiplier reaches it",
        target_epsilon, floor_eps, config.delta, alpha_max));
  }

  auto eps_at = [&](double z) {
    return EpsilonForUniformLedger(z, releases, config)->epsilon;
  };
  double lo = 1.0, hi = 1.0;
  int steps = 0;
  while (eps_at(hi) > target_epsilon) {
    hi *= 2.0;
    if (++steps > kMaxBracketSteps) {
      return absl::InternalError(absl::StrFormat(
          "no noise multiplier up to %g reaches epsilon %.9g (eps(z)=%.9g)",
          hi, target_epsilon, eps_at(hi)));
    }
  }
  steps = 0;
  while (eps_at(lo) <= target_epsilon) {
    lo *= 0.5;
    if (++steps > kMaxBracketSteps) {
      return absl::InternalError(absl::StrFormat(
          "epsilon stays below %.9g for z down to %g; bracket failed",
          target_epsilon, lo));
    }
  }
  // Invariant: eps(lo) > target >= eps(hi).
  while ((hi - lo) > kCalibrationRelTol * hi) {
    double mid = 0.5 * (lo + hi);
    if (eps_at(mid) > target_epsilon) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return hi;
}

absl::StatusOr<PrivacyReport> FinalReport(
    std::span<const ParticipationLedger> ledgers,
    const AccountantConfig& config) {
  PACDP_RETURN_IF_ERROR(config.Validate());
  PrivacyReport report;
  std::vector<double> eps;
  for (const ParticipationLedger& ledger : ledgers) {
    PACDP_ASSIGN_OR_RETURN(DpGuarantee g, RdpToDp(ledger, config));
    report.clients.push_back({ledger.client_id(), g.epsilon, g.alpha});
    eps.push_back(g.epsilon);
  }
  if (!eps.empty()) {
    std::sort(eps.begin(), eps.end());
    report.min_epsilon = eps.front();
    report.max_epsilon = eps.back();
    report.median_epsilon = eps[(eps.size() - 1) / 2];
  }
  return report;
}

std::string FormatLedgers(std::span<const ParticipationLedger> ledgers) {
  std::string out = "client_id,round,z,steps\n";
  for (const ParticipationLedger& ledger : ledgers) {
    for (const LedgerEntry& e : ledger.entries()) {
      absl::StrAppendFormat(&out, "%d,%d,%.9g,%d\n", ledger.client_id(),
                            e.round, e.noise_multiplier, e.steps);
    }
  }
  return out;
}

absl::StatusOr<std::vector<ParticipationLedger>> ParseLedgers(
    absl::string_view text) {
  std::map<int64_t, ParticipationLedger> by_client;
  size_t line_no = 0;
  bool seen_header = false;
  for (absl::string_view raw : absl::StrSplit(text, '\n')) {
    ++line_no;
    absl::string_view line = absl::StripAsciiWhitespace(raw);
    if (line.empty()) continue;
    if (!seen_header) {
      seen_header = true;
      if (line != "client_id,round,z,steps") {
        return absl::InvalidArgumentError(absl::StrCat(
            "ledger line 1: expected header client_id,round,z,steps, got '",
            line, "'"));
      }
      continue;
    }
    std::vector<absl::string_view> cells = absl::StrSplit(line, ',');
    LedgerEntry entry;
    int64_t client = 0;
    if (cells.size() != 4 || !absl::SimpleAtoi(cells[0], &client) ||
        !absl::SimpleAtoi(cells[1], &entry.round) ||
        !absl::SimpleAtod(cells[2], &entry.noise_multiplier) ||
        !absl::SimpleAtoi(cells[3], &entry.steps)) {
      return absl::InvalidArgumentError(
          absl::StrCat("ledger line ", line_no, ": malformed record '", line,
                       "'"));
    }
    auto it = by_client.try_emplace(client, ParticipationLedger(client)).first;
    if (auto status = it->second.Append(entry); !status.ok()) {
      return absl::InvalidArgumentError(
          absl::StrCat("ledger line ", line_no, ": ", status.message()));
    }
  }
  std::vector<ParticipationLedger> out;
  out.reserve(by_client.size());
  for (auto& [id, ledger] : by_client) out.push_back(std::move(ledger));
  return out;
}

}  // namespace pacdp
