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

#ifndef PACDP_CURVE_FIT_H_
#define PACDP_CURVE_FIT_H_

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "absl/status/statusor.h"

namespace pacdp {

// One (privacy budget, best clipping threshold) observation.
struct SupportPoint {
  double epsilon = 0.0;
  double clip = 0.0;

  friend bool operator==(const SupportPoint&, const SupportPoint&) = default;
};

enum class FunctionClass { kQuadratic };

// Running-maximum envelope of the fitted curve over [eps_lo, eps_hi]. When
// enabled, evaluations at eps >= eps_lo return the maximum of the raw curve
// over [eps_lo, eps].
struct MonotoneEnvelope {
  bool enabled = false;
  double eps_lo = 0.0;
  double eps_hi = 0.0;

  friend bool operator==(const MonotoneEnvelope&,
                         const MonotoneEnvelope&) = default;
};

// Budget-to-threshold mapping F(eps) = alpha eps^2 + beta eps + gamma.
struct FitResult {
  FunctionClass function_class = FunctionClass::kQuadratic;
  double alpha = 0.0;
  double beta = 0.0;
  double gamma = 0.0;
  double r2 = 0.0;
  std::vector<SupportPoint> support;
  // Lower clamp applied by EvaluateF; always positive.
  double clamp_floor = 0.0;
  MonotoneEnvelope monotone;
  // Free-form provenance (grid, seeds, filtering outcome).
  std::map<std::string, std::string> provenance;

  friend bool operator==(const FitResult&, const FitResult&) = default;
};

// Accuracy matrix over an (eps x clip) grid; rows are budgets.
struct PerformanceMatrix {
  std::vector<double> epsilons;
  std::vector<double> clips;
  std::vector<std::vector<double>> accuracy;
  // Cells whose simulation diverged; their accuracy is the chance level.
  std::vector<std::vector<bool>> failed;
  std::vector<uint64_t> seeds;

  absl::Status Validate() const;
};

// Per row, the clip with the highest accuracy; ties go to the smaller clip.
std::vector<SupportPoint> SelectOptimal(const PerformanceMatrix& matrix);

// Quantile with linear interpolation between order statistics, position
// q * (n - 1) (the inclusive convention). `values` must be non-empty.
double InterpolatedQuantile(std::vector<double> values, double q);

struct IqrFilterResult {
  std::vector<SupportPoint> kept;
  std::vector<SupportPoint> dropped;
  // Set when filtering would have left fewer than three points; `kept` is
  // then the unfiltered input.
  bool skipped = false;
};

// Drops points whose clip lies outside [Q1 - 1.5 IQR, Q3 + 1.5 IQR].
IqrFilterResult IqrFilter(std::span<const SupportPoint> points);

// Least-squares quadratic through the points. Needs three distinct budgets.
// `clamp_floor` <= 0 selects the smallest clip among the points.
absl::StatusOr<FitResult> FitQuadratic(std::span<const SupportPoint> points,
                                       double clamp_floor = 0.0);

// Raw polynomial value, ignoring clamp and envelope.
double EvaluatePolynomial(const FitResult& fit, double epsilon);
// F(eps): envelope (if enabled), then max(value, clamp_floor).
double EvaluateF(const FitResult& fit, double epsilon);

// Enables the running-max envelope when the quadratic decreases anywhere on
// [eps_lo, eps_hi]; returns `fit` unchanged otherwise.
absl::StatusOr<FitResult> MonotoneProject(const FitResult& fit, double eps_lo,
                                          double eps_hi);

std::string FunctionClassName(FunctionClass function_class);

// JSON file form of a FitResult. Numbers use shortest round-trip formatting
// so that ParseFitResult(FormatFitResult(x)) == x.
std::string FormatFitResult(const FitResult& fit);
absl::StatusOr<FitResult> ParseFitResult(const std::string& text);

}  // namespace pacdp

#endif  // PACDP_CURVE_FIT_H_
