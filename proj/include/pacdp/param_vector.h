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

#ifndef PACDP_PARAM_VECTOR_H_
#define PACDP_PARAM_VECTOR_H_

#include <cstddef>
#include <initializer_list>
#include <span>
#include <utility>
#include <vector>

namespace pacdp {

// Flat model parameter or gradient vector.
class ParamVector {
 public:
  ParamVector() = default;
  explicit ParamVector(size_t size, double fill = 0.0) : values_(size, fill) {}
  explicit ParamVector(std::vector<double> values)
      : values_(std::move(values)) {}
  ParamVector(std::initializer_list<double> values) : values_(values) {}

  size_t size() const { return values_.size(); }
  bool empty() const { return values_.empty(); }
  double& operator[](size_t i) { return values_[i]; }
  double operator[](size_t i) const { return values_[i]; }

  std::span<double> span() { return values_; }
  std::span<const double> span() const { return values_; }
  const std::vector<double>& values() const { return values_; }
  std::vector<double>& mutable_values() { return values_; }

  auto begin() { return values_.begin(); }
  auto end() { return values_.end(); }
  auto begin() const { return values_.begin(); }
  auto end() const { return values_.end(); }

  friend bool operator==(const ParamVector&, const ParamVector&) = default;

 private:
  std::vector<double> values_;
};

double L2Norm(std::span<const double> v);
double Dot(std::span<const double> a, std::span<const double> b);
bool AllFinite(std::span<const double> v);
// y += a * x.
void Axpy(double a, std::span<const double> x, std::span<double> y);
// ||a - b||_2.
double L2Distance(std::span<const double> a, std::span<const double> b);

}  // namespace pacdp

#endif  // PACDP_PARAM_VECTOR_H_
