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

#ifndef PACDP_MECHANISM_H_
#define PACDP_MECHANISM_H_

#include <span>
#include <vector>

#include "absl/status/statusor.h"
#include "pacdp/param_vector.h"
#include "pacdp/random.h"

namespace pacdp {

// Per-example l2 clipping threshold. Always positive and finite.
class ClipBound {
 public:
  static absl::StatusOr<ClipBound> Create(double value);
  double value() const { return value_; }

 private:
  explicit ClipBound(double value) : value_(value) {}
  double value_;
};

// Gaussian perturbation of a minibatch mean of clipped gradients. The noise
// standard deviation is z * C / B.
struct NoiseSpec {
  double noise_multiplier;
  size_t batch_size;
  ClipBound clip;

  absl::Status Validate() const;
};

// g * min(1, C / ||g||); the zero vector is returned unchanged.
absl::StatusOr<ParamVector> ClipPerExample(std::span<const double> gradient,
                                           ClipBound clip);

// Mean of the clipped per-example gradients.
absl::StatusOr<ParamVector> AverageClipped(
    std::span<const ParamVector> gradients, ClipBound clip);

// gbar + N(0, (zC/B)^2 I), drawn coordinate by coordinate from `stream`.
absl::StatusOr<ParamVector> GaussianPerturb(const ParamVector& mean_gradient,
                                            const NoiseSpec& spec,
                                            RandomStream& stream);

// l2 sensitivity of the clipped minibatch mean, taken as C / B.
//
// Under replace-one adjacency the mean of clipped vectors can move by up to
// 2C/B (two vectors of norm C pointing in opposite directions). The
// calibration here follows the C/B convention, which is exact for
// add/remove-style differences of a single clipped contribution.
double Sensitivity(const NoiseSpec& spec);

// Classical Gaussian mechanism calibration, sqrt(2 ln(1.25/delta)) / eps.
// Requires eps > 0 and 0 < delta < 1/e.
absl::StatusOr<double> NoiseMultiplierForEpsilon(double epsilon, double delta);
// Inverse of NoiseMultiplierForEpsilon.
absl::StatusOr<double> EpsilonForNoiseMultiplier(double noise_multiplier,
                                                 double delta);

}  // namespace pacdp

#endif  // PACDP_MECHANISM_H_
