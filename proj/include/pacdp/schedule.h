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

#ifndef PACDP_SCHEDULE_H_
#define PACDP_SCHEDULE_H_

#include <cstdint>
#include <string>

#include "absl/status/statusor.h"
#include "pacdp/curve_fit.h"
#include "pacdp/mechanism.h"

namespace pacdp {

// Shared round-wise scaling of the clip bound: 1 during a plateau of
// floor(decay_start_fraction * T) rounds, then a half-cosine decay towards
// lambda_min. The last round sits above lambda_min; the decay is not
// re-normalized to reach it.
class ScheduleParams {
 public:
  static constexpr double kDefaultDecayStartFraction = 0.6;
  static constexpr double kDefaultLambdaMin = 0.1;

  // Requires T >= 1, decay_start_fraction in [0, 1) (0 gives a pure decay
  // from round 0) and lambda_min in (0, 1].
  static absl::StatusOr<ScheduleParams> Create(
      int64_t total_rounds,
      double decay_start_fraction = kDefaultDecayStartFraction,
      double lambda_min = kDefaultLambdaMin);

  int64_t total_rounds() const { return total_rounds_; }
  double decay_start_fraction() const { return decay_start_fraction_; }
  double lambda_min() const { return lambda_min_; }
  // T_s = floor(r_s * T).
  int64_t decay_start() const { return decay_start_; }

 private:
  ScheduleParams(int64_t total_rounds, double decay_start_fraction,
                 double lambda_min, int64_t decay_start)
      : total_rounds_(total_rounds),
        decay_start_fraction_(decay_start_fraction),
        lambda_min_(lambda_min),
        decay_start_(decay_start) {}

  int64_t total_rounds_;
  double decay_start_fraction_;
  double lambda_min_;
  int64_t decay_start_;
};

// lambda(t) for 0 <= t <= T - 1.
absl::StatusOr<double> ScheduleFactor(int64_t round,
                                      const ScheduleParams& params);

// C_i^t = F(eps_i) * lambda(t). Takes no client data by construction.
absl::StatusOr<ClipBound> ScheduledClipBound(double epsilon, int64_t round,
                                             const FitResult& fit,
                                             const ScheduleParams& params);

// "round,lambda" CSV over every round.
std::string ScheduleTableCsv(const ScheduleParams& params);

}  // namespace pacdp

#endif  // PACDP_SCHEDULE_H_
