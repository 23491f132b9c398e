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

#ifndef PACDP_POLICY_H_
#define PACDP_POLICY_H_

#include <cstdint>
#include <span>
#include <variant>

#include "absl/status/statusor.h"
#include "absl/strings/string_view.h"
#include "pacdp/curve_fit.h"
#include "pacdp/mechanism.h"
#include "pacdp/schedule.h"

namespace pacdp {

// C_i^t = F(eps_i) * lambda(t).
struct PacDpPolicy {
  FitResult fit;
  ScheduleParams schedule;
};

// One global bound for every client and round.
struct FixedClipPolicy {
  double clip = 1.0;
};

// Online quantile tracking: after each round,
// C <- C * exp(-lr * (fraction of per-example norms <= C - q)).
struct QuantilePolicy {
  double target_quantile = 0.5;
  double clip = 1.0;
  double learning_rate = 0.2;
};

using ClippingPolicy =
    std::variant<FixedClipPolicy, PacDpPolicy, QuantilePolicy>;

absl::string_view PolicyName(const ClippingPolicy& policy);
absl::Status ValidatePolicy(const ClippingPolicy& policy);

// Bound a client with budget `epsilon` uses in `round`.
absl::StatusOr<ClipBound> PolicyClipBound(const ClippingPolicy& policy,
                                          double epsilon, int64_t round);

// Quantile update from observed per-example norms. An empty list leaves the
// state unchanged.
QuantilePolicy QuantilePolicyUpdate(const QuantilePolicy& state,
                                    std::span<const double> norms);
// Same update given the count of norms at or below the current bound.
QuantilePolicy QuantilePolicyUpdate(const QuantilePolicy& state,
                                    size_t below, size_t total);

}  // namespace pacdp

#endif  // PACDP_POLICY_H_
