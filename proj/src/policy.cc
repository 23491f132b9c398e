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

#include "pacdp/policy.h"

#include <cmath>

#include "absl/strings/str_cat.h"

namespace pacdp {
namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

}  // namespace

absl::string_view PolicyName(const ClippingPolicy& policy) {
  return std::visit(
      Overloaded{[](const PacDpPolicy&) { return absl::string_view("pacdp"); },
                 [](const FixedClipPolicy&) {
                   return absl::string_view("fixed");
                 },
                 [](const QuantilePolicy&) {
                   return absl::string_view("quantile");
                 }},
      policy);
}

absl::Status ValidatePolicy(const ClippingPolicy& policy) {
  return std::visit(
      Overloaded{
          [](const PacDpPolicy& p) -> absl::Status {
            if (!(p.fit.clamp_floor > 0.0)) {
              return absl::InvalidArgumentError(
                  "pacdp policy: fit clamp_floor must be positive");
            }
            return absl::OkStatus();
          },
          [](const FixedClipPolicy& p) -> absl::Status {
            return ClipBound::Create(p.clip).status();
          },
          [](const QuantilePolicy& p) -> absl::Status {
            if (!(p.target_quantile > 0.0 && p.target_quantile < 1.0)) {
              return absl::InvalidArgumentError(
                  "quantile policy: target quantile must lie in (0, 1)");
            }
            if (!(p.learning_rate > 0.0)) {
              return absl::InvalidArgumentError(
                  "quantile policy: learning rate must be positive");
            }
            return ClipBound::Create(p.clip).status();
          }},
      policy);
}

absl::StatusOr<ClipBound> PolicyClipBound(const ClippingPolicy& policy,
                                          double epsilon, int64_t round) {
  return std::visit(
      Overloaded{[&](const PacDpPolicy& p) {
                   return ScheduledClipBound(epsilon, round, p.fit,
                                             p.schedule);
                 },
                 [](const FixedClipPolicy& p) {
                   return ClipBound::Create(p.clip);
                 },
                 [](const QuantilePolicy& p) {
                   return ClipBound::Create(p.clip);
                 }},
      policy);
}

QuantilePolicy QuantilePolicyUpdate(const QuantilePolicy& state,
                                    std::span<const double> norms) {
  size_t below = 0;
  for (double n : norms) {
    if (n <= state.clip) ++below;
  }
  return QuantilePolicyUpdate(state, below, norms.size());
}

QuantilePolicy QuantilePolicyUpdate(const QuantilePolicy& state,
                                    size_t below, size_t total) {
  if (total == 0) return state;
  QuantilePolicy next = state;
  const double fraction =
      static_cast<double>(below) / static_cast<double>(total);
  next.clip = state.clip *
              std::exp(-state.learning_rate * (fraction - state.target_quantile));
  return next;
}

}  // namespace pacdp
