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

#include "pacdp/mechanism.h"

#include <cmath>
#include <numbers>

#include "absl/strings/str_cat.h"
#include "pacdp/status_macros.h"

namespace pacdp {
namespace {

absl::Status CheckDelta(double delta) {
  if (!(delta > 0.0 && delta < 1.0 / std::numbers::e)) {
    return absl::InvalidArgumentError(
        absl::StrCat("delta must lie in (0, 1/e), got ", delta));
  }
  return absl::OkStatus();
}

// Scale factor min(1, C/||g||), with 1 for the zero vector.
double ClipScale(std::span<const double> g, double clip) {
  double norm = L2Norm(g);
  return norm > clip ? clip / norm : 1.0;
}

}  // namespace

absl::StatusOr<ClipBound> ClipBound::Create(double value) {
  if (!(value > 0.0) || !std::isfinite(value)) {
    return absl::InvalidArgumentError(
        absl::StrCat("clip bound must be positive and finite, got ", value));
  }
  return ClipBound(value);
}

absl::Status NoiseSpec::Validate() const {
  if (!(noise_multiplier > 0.0) || !std::isfinite(noise_multiplier)) {
    return absl::InvalidArgumentError(absl::StrCat(
        "noise multiplier must be positive and finite, got ",
        noise_multiplier));
  }
  if (batch_size == 0) {
    return absl::InvalidArgumentError("batch size must be at least 1");
  }
  return absl::OkStatus();
}

absl::StatusOr<ParamVector> ClipPerExample(std::span<const double> gradient,
                                           ClipBound clip) {
  if (!AllFinite(gradient)) {
    return absl::InvalidArgumentError("cannot clip a non-finite gradient");
  }
  ParamVector out(std::vector<double>(gradient.begin(), gradient.end()));
  const double scale = ClipScale(gradient, clip.value());
  if (scale != 1.0) {
    for (double& v : out) v *= scale;
  }
  return out;
}

absl::StatusOr<ParamVector> AverageClipped(
    std::span<const ParamVector> gradients, ClipBound clip) {
  if (gradients.empty()) {
    return absl::OutOfRangeError("cannot average an empty minibatch");
  }
  const size_t dim = gradients.front().size();
  ParamVector mean(dim);
  for (const ParamVector& g : gradients) {
    if (g.size() != dim) {
      return absl::InvalidArgumentError(
          "minibatch gradients have inconsistent dimension");
    }
    if (!AllFinite(g.span())) {
      return absl::InvalidArgumentError("cannot clip a non-finite gradient");
    }
    Axpy(ClipScale(g.span(), clip.value()), g.span(), mean.span());
  }
  const double inv_b = 1.0 / static_cast<double>(gradients.size());
  for (double& v : mean) v *= inv_b;
  return mean;
}

absl::StatusOr<ParamVector> GaussianPerturb(const ParamVector& mean_gradient,
                                            const NoiseSpec& spec,
                                            RandomStream& stream) {
  PACDP_RETURN_IF_ERROR(spec.Validate());
  const double stddev = spec.noise_multiplier * Sensitivity(spec);
  ParamVector out = mean_gradient;
  for (double& v : out) v += stddev * stream.Normal();
  if (!AllFinite(out.span())) {
    return absl::InternalError("perturbed gradient is not finite");
  }
  return out;
}

double Sensitivity(const NoiseSpec& spec) {
  return spec.clip.value() / static_cast<double>(spec.batch_size);
}

absl::StatusOr<double> NoiseMultiplierForEpsilon(double epsilon,
                                                 double delta) {
  if (!(epsilon > 0.0) || !std::isfinite(epsilon)) {
    return absl::InvalidArgumentError(
        absl::StrCat("epsilon must be positive and finite, got ", epsilon));
  }
  PACDP_RETURN_IF_ERROR(CheckDelta(delta));
  return std::sqrt(2.0 * std::log(1.25 / delta)) / epsilon;
}

absl::StatusOr<double> EpsilonForNoiseMultiplier(double noise_multiplier,
                                                 double delta) {
  if (!(noise_multiplier > 0.0) || !std::isfinite(noise_multiplier)) {
    return absl::InvalidArgumentError(absl::StrCat(
        "noise multiplier must be positive and finite, got ",
        noise_multiplier));
  }
  PACDP_RETURN_IF_ERROR(CheckDelta(delta));
  return std::sqrt(2.0 * std::log(1.25 / delta)) / noise_multiplier;
}

}  // namespace pacdp
