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

#include "pacdp/schedule.h"

#include <cmath>
#include <numbers>

#include "absl/strings/str_cat.h"
#include "absl/strings/str_format.h"
#include "pacdp/status_macros.h"

namespace pacdp {
namespace {

// Guards floor(r_s * T) against products like 0.29 * 100 = 28.999...
constexpr double kFloorSlack = 1e-9;

}  // namespace

absl::StatusOr<ScheduleParams> ScheduleParams::Create(
    int64_t total_rounds, double decay_start_fraction, double lambda_min) {
  if (total_rounds < 1) {
    return absl::InvalidArgumentError(
        absl::StrCat("schedule needs T >= 1, got ", total_rounds));
  }
  if (!(decay_start_fraction >= 0.0 && decay_start_fraction < 1.0)) {
    return absl::InvalidArgumentError(absl::StrCat(
        "decay start fraction r_s must lie in [0, 1), got ",
        decay_start_fraction));
  }
  if (!(lambda_min > 0.0 && lambda_min <= 1.0)) {
    return absl::InvalidArgumentError(
        absl::StrCat("lambda_min must lie in (0, 1], got ", lambda_min));
  }
  const int64_t decay_start = static_cast<int64_t>(std::floor(
      decay_start_fraction * static_cast<double>(total_rounds) + kFloorSlack));
  if (decay_start > total_rounds - 1) {
    return absl::InvalidArgumentError(absl::StrCat(
        "floor(r_s * T) = ", decay_start, " leaves no decay round for T = ",
        total_rounds));
  }
  return ScheduleParams(total_rounds, decay_start_fraction, lambda_min,
                        decay_start);
}

absl::StatusOr<double> ScheduleFactor(int64_t round,
                                      const ScheduleParams& params) {
  if (round < 0 || round >= params.total_rounds()) {
    return absl::OutOfRangeError(
        absl::StrCat("round ", round, " outside [0, ",
                     params.total_rounds() - 1, "]"));
  }
  const int64_t start = params.decay_start();
  if (round < start) return 1.0;
  const double progress = static_cast<double>(round - start) /
                          static_cast<double>(params.total_rounds() - start);
  const double lambda_min = params.lambda_min();
  return lambda_min + (1.0 - lambda_min) *
                          (1.0 + std::cos(std::numbers::pi * progress)) / 2.0;
}

absl::StatusOr<ClipBound> ScheduledClipBound(double epsilon, int64_t round,
                                             const FitResult& fit,
                                             const ScheduleParams& params) {
  PACDP_ASSIGN_OR_RETURN(double lambda, ScheduleFactor(round, params));
  const double base = EvaluateF(fit, epsilon);
  if (!(base > 0.0) || !std::isfinite(base)) {
    return absl::FailedPreconditionError(absl::StrCat(
        "fitted threshold F(", epsilon, ") = ", base,
        " is not positive; check the fit's clamp_floor"));
  }
  return ClipBound::Create(base * lambda);
}

std::string ScheduleTableCsv(const ScheduleParams& params) {
  std::string out = "round,lambda\n";
  for (int64_t t = 0; t < params.total_rounds(); ++t) {
    absl::StrAppendFormat(&out, "%d,%.9g\n", t, *ScheduleFactor(t, params));
  }
  return out;
}

}  // namespace pacdp
