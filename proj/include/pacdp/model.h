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

#ifndef PACDP_MODEL_H_
#define PACDP_MODEL_H_

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "absl/status/statusor.h"
#include "absl/strings/string_view.h"
#include "pacdp/dataset.h"
#include "pacdp/param_vector.h"

namespace pacdp {

enum class ModelKind {
  kLinearRegression,
  kLogisticBinary,
  kSoftmaxLinear,
  kMlp1Hidden,
  // f(w; x) = 1/2 w'Aw - (b + x)'w. Strongly convex when A is positive
  // definite; used for convergence experiments.
  kQuadratic,
};

absl::string_view ModelKindName(ModelKind kind);
absl::StatusOr<ModelKind> ParseModelKind(absl::string_view name);
bool IsClassifier(ModelKind kind);

struct ModelSpec {
  ModelKind kind = ModelKind::kLogisticBinary;
  size_t input_dim = 0;
  // Number of output classes. Fixed at 2 for logistic-binary; unused by the
  // regression kinds.
  size_t classes = 2;
  // Hidden width of the mlp-1hidden kind.
  size_t hidden = 0;
  // Quadratic kind only: symmetric d x d matrix (row-major) and vector b.
  std::vector<double> quadratic_a;
  std::vector<double> quadratic_b;

  static ModelSpec Quadratic(std::vector<double> a, std::vector<double> b);
};

// Validated model. All methods after Create() assume shape-consistent
// inputs; the free functions below perform the checks.
class Model {
 public:
  static absl::StatusOr<Model> Create(ModelSpec spec);

  const ModelSpec& spec() const { return spec_; }
  size_t num_params() const { return num_params_; }

  // Entries i.i.d. uniform on [-kInitScale, kInitScale].
  ParamVector Init(uint64_t seed) const;
  absl::Status CheckParams(const ParamVector& params) const;
  absl::Status CheckExample(const Example& x) const;

  double Loss(std::span<const double> params, const Example& x) const;
  // Writes the per-example gradient into `out` (size num_params()).
  void Gradient(std::span<const double> params, const Example& x,
                std::span<double> out) const;
  // Predicted class; ties go to the lowest class index.
  int Predict(std::span<const double> params, const Example& x) const;

  static constexpr double kInitScale = 0.05;

 private:
  Model(ModelSpec spec, size_t num_params)
      : spec_(std::move(spec)), num_params_(num_params) {}

  // Output logits for the softmax and mlp kinds; `hidden` receives the tanh
  // activations for the mlp kind.
  void Logits(std::span<const double> params, const Example& x,
              std::vector<double>& logits, std::vector<double>& hidden) const;

  ModelSpec spec_;
  size_t num_params_;
};

absl::StatusOr<size_t> ParameterCount(const ModelSpec& spec);
absl::StatusOr<ParamVector> InitModel(const ModelSpec& spec, uint64_t seed);
absl::StatusOr<ParamVector> PerExampleGradient(const ModelSpec& spec,
                                               const ParamVector& params,
                                               const Example& x);
absl::StatusOr<double> PerExampleLoss(const ModelSpec& spec,
                                      const ParamVector& params,
                                      const Example& x);
// Mean per-example loss over the dataset.
absl::StatusOr<double> DatasetLoss(const ModelSpec& spec,
                                   const ParamVector& params,
                                   const LocalDataset& data);
// Fraction of correctly classified examples; classification kinds only.
absl::StatusOr<double> Accuracy(const ModelSpec& spec,
                                const ParamVector& params,
                                const LocalDataset& data);

// Unchecked variants for hot loops over a validated model.
double MeanLoss(const Model& model, std::span<const double> params,
                const LocalDataset& data);
double MeanAccuracy(const Model& model, std::span<const double> params,
                    const LocalDataset& data);

}  // namespace pacdp

#endif  // PACDP_MODEL_H_
