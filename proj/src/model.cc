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

#include "pacdp/model.h"

#include <algorithm>
#include <cmath>
#include <limits>

#include "absl/strings/str_cat.h"
#include "pacdp/random.h"
#include "pacdp/status_macros.h"

namespace pacdp {
namespace {

double Sigmoid(double s) {
  if (s >= 0) return 1.0 / (1.0 + std::exp(-s));
  double e = std::exp(s);
  return e / (1.0 + e);
}

// log(1 + e^s) without overflow.
double Softplus(double s) {
  if (s > 0) return s + std::log1p(std::exp(-s));
  return std::log1p(std::exp(s));
}

// Linear score w.x + b where the bias is the last of `dim + 1` weights.
double AffineScore(std::span<const double> weights,
                   std::span<const double> x) {
  double s = weights[x.size()];
  for (size_t j = 0; j < x.size(); ++j) s += weights[j] * x[j];
  return s;
}

// In place: logits -> softmax probabilities; returns log-sum-exp.
double SoftmaxInPlace(std::vector<double>& logits) {
  double m = *std::max_element(logits.begin(), logits.end());
  double sum = 0.0;
  for (double& v : logits) {
    v = std::exp(v - m);
    sum += v;
  }
  for (double& v : logits) v /= sum;
  return m + std::log(sum);
}

int ArgMaxLowest(std::span<const double> values) {
  int best = 0;
  for (size_t c = 1; c < values.size(); ++c) {
    if (values[c] > values[best]) best = static_cast<int>(c);
  }
  return best;
}

}  // namespace

absl::string_view ModelKindName(ModelKind kind) {
  switch (kind) {
    case ModelKind::kLinearRegression:
      return "linear-regression";
    case ModelKind::kLogisticBinary:
      return "logistic-binary";
    case ModelKind::kSoftmaxLinear:
      return "softmax-linear";
    case ModelKind::kMlp1Hidden:
      return "mlp-1hidden";
    case ModelKind::kQuadratic:
      return "quadratic";
  }
  return "unknown";
}

absl::StatusOr<ModelKind> ParseModelKind(absl::string_view name) {
  for (ModelKind kind :
       {ModelKind::kLinearRegression, ModelKind::kLogisticBinary,
        ModelKind::kSoftmaxLinear, ModelKind::kMlp1Hidden,
        ModelKind::kQuadratic}) {
    if (ModelKindName(kind) == name) return kind;
  }
  return absl::InvalidArgumentError(absl::StrCat(
      "unknown model kind '", name,
      "' (expected linear-regression, logistic-binary, softmax-linear, "
      "mlp-1hidden or quadratic)"));
}

bool IsClassifier(ModelKind kind) {
  return kind == ModelKind::kLogisticBinary ||
         kind == ModelKind::kSoftmaxLinear || kind == ModelKind::kMlp1Hidden;
}

ModelSpec ModelSpec::Quadratic(std::vector<double> a, std::vector<double> b) {
  ModelSpec spec;
  spec.kind = ModelKind::kQuadratic;
  spec.input_dim = b.size();
  spec.classes = 0;
  spec.quadratic_a = std::move(a);
  spec.quadratic_b = std::move(b);
  return spec;
}

absl::StatusOr<size_t> ParameterCount(const ModelSpec& spec) {
  const size_t p = spec.input_dim;
  if (p == 0) return absl::InvalidArgumentError("input_dim must be positive");
  switch (spec.kind) {
    case ModelKind::kLinearRegression:
      return p + 1;
    case ModelKind::kLogisticBinary:
      if (spec.classes != 2) {
        return absl::InvalidArgumentError(
            "logistic-binary requires classes = 2");
      }
      return p + 1;
    case ModelKind::kSoftmaxLinear:
      if (spec.classes < 2) {
        return absl::InvalidArgumentError(
            "softmax-linear requires classes >= 2");
      }
      return spec.classes * (p + 1);
    case ModelKind::kMlp1Hidden:
      if (spec.classes < 2 || spec.hidden == 0) {
        return absl::InvalidArgumentError(
            "mlp-1hidden requires classes >= 2 and hidden >= 1");
      }
      return p * spec.hidden + spec.hidden + spec.hidden * spec.classes +
             spec.classes;
    case ModelKind::kQuadratic: {
      const size_t d = spec.quadratic_b.size();
      if (d != p || spec.quadratic_a.size() != d * d) {
        return absl::InvalidArgumentError(absl::StrCat(
            "quadratic model needs b of length input_dim=", p,
            " and A of size ", p, "x", p));
      }
      for (size_t i = 0; i < d; ++i) {
        for (size_t j = 0; j < i; ++j) {
          if (spec.quadratic_a[i * d + j] != spec.quadratic_a[j * d + i]) {
            return absl::InvalidArgumentError(
                "quadratic model matrix A must be symmetric");
          }
        }
      }
      if (!AllFinite(spec.quadratic_a) || !AllFinite(spec.quadratic_b)) {
        return absl::InvalidArgumentError("quadratic model has non-finite A/b");
      }
      return d;
    }
  }
  return absl::InvalidArgumentError("unknown model kind");
}

absl::StatusOr<Model> Model::Create(ModelSpec spec) {
  PACDP_ASSIGN_OR_RETURN(size_t count, ParameterCount(spec));
  return Model(std::move(spec), count);
}

ParamVector Model::Init(uint64_t seed) const {
  RandomStream stream = RandomStream::For(seed, StreamDomain::kModelInit);
  ParamVector params(num_params_);
  for (double& v : params) v = kInitScale * (2.0 * stream.Uniform() - 1.0);
  return params;
}

absl::Status Model::CheckParams(const ParamVector& params) const {
  if (params.size() != num_params_) {
    return absl::InvalidArgumentError(
        absl::StrCat("parameter vector has length ", params.size(),
                     ", model expects ", num_params_));
  }
  if (!AllFinite(params.span())) {
    return absl::InvalidArgumentError("parameter vector is not finite");
  }
  return absl::OkStatus();
}

absl::Status Model::CheckExample(const Example& x) const {
  if (x.features.size() != spec_.input_dim) {
    return absl::InvalidArgumentError(
        absl::StrCat("example has ", x.features.size(),
                     " features, model expects ", spec_.input_dim));
  }
  if (IsClassifier(spec_.kind)) {
    double c = x.label;
    if (c < 0 || c != std::floor(c) ||
        c >= static_cast<double>(spec_.classes)) {
      return absl::InvalidArgumentError(absl::StrCat(
          "label ", c, " is not a class index below ", spec_.classes));
    }
  }
  return absl::OkStatus();
}

void Model::Logits(std::span<const double> params, const Example& x,
                   std::vector<double>& logits,
                   std::vector<double>& hidden) const {
  const size_t p = spec_.input_dim;
  const size_t k = spec_.classes;
  logits.assign(k, 0.0);
  if (spec_.kind == ModelKind::kSoftmaxLinear) {
    for (size_t c = 0; c < k; ++c) {
      logits[c] = AffineScore(params.subspan(c * (p + 1), p + 1), x.features);
    }
    return;
  }
  // mlp-1hidden layout: W1 (h x p), b1 (h), W2 (k x h), b2 (k).
  const size_t h = spec_.hidden;
  const double* w1 = params.data();
  const double* b1 = w1 + h * p;
  const double* w2 = b1 + h;
  const double* b2 = w2 + k * h;
  hidden.assign(h, 0.0);
  for (size_t u = 0; u < h; ++u) {
    double s = b1[u];
    for (size_t j = 0; j < p; ++j) s += w1[u * p + j] * x.features[j];
    hidden[u] = std::tanh(s);
  }
  for (size_t c = 0; c < k; ++c) {
    double s = b2[c];
    for (size_t u = 0; u < h; ++u) s += w2[c * h + u] * hidden[u];
    logits[c] = s;
  }
}

double Model::Loss(std::span<const double> params, const Example& x) const {
  switch (spec_.kind) {
    case ModelKind::kLinearRegression: {
      double r = AffineScore(params, x.features) - x.label;
      return 0.5 * r * r;
    }
    case ModelKind::kLogisticBinary: {
      double s = AffineScore(params, x.features);
      return Softplus(s) - x.label * s;
    }
    case ModelKind::kSoftmaxLinear:
    case ModelKind::kMlp1Hidden: {
      std::vector<double> logits, hidden;
      Logits(params, x, logits, hidden);
      double target = logits[static_cast<size_t>(x.label)];
      double lse = SoftmaxInPlace(logits);
      return lse - target;
    }
    case ModelKind::kQuadratic: {
      const size_t d = num_params_;
      const auto& a = spec_.quadratic_a;
      double quad = 0.0, lin = 0.0;
      for (size_t i = 0; i < d; ++i) {
        double row = 0.0;
        for (size_t j = 0; j < d; ++j) row += a[i * d + j] * params[j];
        quad += params[i] * row;
        lin += (spec_.quadratic_b[i] + x.features[i]) * params[i];
      }
      return 0.5 * quad - lin;
    }
  }
  return std::numeric_limits<double>::quiet_NaN();
}

void Model::Gradient(std::span<const double> params, const Example& x,
                     std::span<double> out) const {
  const size_t p = spec_.input_dim;
  switch (spec_.kind) {
    case ModelKind::kLinearRegression:
    case ModelKind::kLogisticBinary: {
      double s = AffineScore(params, x.features);
      double r = spec_.kind == ModelKind::kLinearRegression
                     ? s - x.label
                     : Sigmoid(s) - x.label;
      for (size_t j = 0; j < p; ++j) out[j] = r * x.features[j];
      out[p] = r;
      return;
    }
    case ModelKind::kSoftmaxLinear: {
      std::vector<double> probs, hidden;
      Logits(params, x, probs, hidden);
      SoftmaxInPlace(probs);
      probs[static_cast<size_t>(x.label)] -= 1.0;
      for (size_t c = 0; c < spec_.classes; ++c) {
        double* row = out.data() + c * (p + 1);
        for (size_t j = 0; j < p; ++j) row[j] = probs[c] * x.features[j];
        row[p] = probs[c];
      }
      return;
    }
    case ModelKind::kMlp1Hidden: {
      const size_t h = spec_.hidden;
      const size_t k = spec_.classes;
      std::vector<double> probs, hidden;
      Logits(params, x, probs, hidden);
      SoftmaxInPlace(probs);
      probs[static_cast<size_t>(x.label)] -= 1.0;
      const double* w2 = params.data() + h * p + h;
      double* g_w1 = out.data();
      double* g_b1 = g_w1 + h * p;
      double* g_w2 = g_b1 + h;
      double* g_b2 = g_w2 + k * h;
      for (size_t c = 0; c < k; ++c) {
        for (size_t u = 0; u < h; ++u) g_w2[c * h + u] = probs[c] * hidden[u];
        g_b2[c] = probs[c];
      }
      for (size_t u = 0; u < h; ++u) {
        double back = 0.0;
        for (size_t c = 0; c < k; ++c) back += w2[c * h + u] * probs[c];
        double dz = back * (1.0 - hidden[u] * hidden[u]);
        for (size_t j = 0; j < p; ++j) g_w1[u * p + j] = dz * x.features[j];
        g_b1[u] = dz;
      }
      return;
    }
    case ModelKind::kQuadratic: {
      const size_t d = num_params_;
      const auto& a = spec_.quadratic_a;
      for (size_t i = 0; i < d; ++i) {
        double row = 0.0;
        for (size_t j = 0; j < d; ++j) row += a[i * d + j] * params[j];
        out[i] = row - spec_.quadratic_b[i] - x.features[i];
      }
      return;
    }
  }
}

int Model::Predict(std::span<const double> params, const Example& x) const {
  switch (spec_.kind) {
    case ModelKind::kLogisticBinary:
      // Exact tie (score 0) resolves to class 0.
      return AffineScore(params, x.features) > 0.0 ? 1 : 0;
    case ModelKind::kSoftmaxLinear:
    case ModelKind::kMlp1Hidden: {
      std::vector<double> logits, hidden;
      Logits(params, x, logits, hidden);
      return ArgMaxLowest(logits);
    }
    default:
      return -1;
  }
}

absl::StatusOr<ParamVector> InitModel(const ModelSpec& spec, uint64_t seed) {
  PACDP_ASSIGN_OR_RETURN(Model model, Model::Create(spec));
  return model.Init(seed);
}

absl::StatusOr<ParamVector> PerExampleGradient(const ModelSpec& spec,
                                               const ParamVector& params,
                                               const Example& x) {
  PACDP_ASSIGN_OR_RETURN(Model model, Model::Create(spec));
  PACDP_RETURN_IF_ERROR(model.CheckParams(params));
  PACDP_RETURN_IF_ERROR(model.CheckExample(x));
  ParamVector grad(model.num_params());
  model.Gradient(params.span(), x, grad.span());
  return grad;
}

absl::StatusOr<double> PerExampleLoss(const ModelSpec& spec,
                                      const ParamVector& params,
                                      const Example& x) {
  PACDP_ASSIGN_OR_RETURN(Model model, Model::Create(spec));
  PACDP_RETURN_IF_ERROR(model.CheckParams(params));
  PACDP_RETURN_IF_ERROR(model.CheckExample(x));
  return model.Loss(params.span(), x);
}

absl::StatusOr<double> DatasetLoss(const ModelSpec& spec,
                                   const ParamVector& params,
                                   const LocalDataset& data) {
  if (data.empty()) {
    return absl::OutOfRangeError("loss of an empty dataset is undefined");
  }
  PACDP_ASSIGN_OR_RETURN(Model model, Model::Create(spec));
  PACDP_RETURN_IF_ERROR(model.CheckParams(params));
  for (const Example& x : data.examples) {
    PACDP_RETURN_IF_ERROR(model.CheckExample(x));
  }
  return MeanLoss(model, params.span(), data);
}

absl::StatusOr<double> Accuracy(const ModelSpec& spec,
                                const ParamVector& params,
                                const LocalDataset& data) {
  if (!IsClassifier(spec.kind)) {
    return absl::UnimplementedError(absl::StrCat(
        "accuracy is undefined for the ", ModelKindName(spec.kind), " model"));
  }
  if (data.empty()) {
    return absl::OutOfRangeError("accuracy of an empty dataset is undefined");
  }
  PACDP_ASSIGN_OR_RETURN(Model model, Model::Create(spec));
  PACDP_RETURN_IF_ERROR(model.CheckParams(params));
  for (const Example& x : data.examples) {
    PACDP_RETURN_IF_ERROR(model.CheckExample(x));
  }
  return MeanAccuracy(model, params.span(), data);
}

double MeanLoss(const Model& model, std::span<const double> params,
                const LocalDataset& data) {
  double sum = 0.0;
  for (const Example& x : data.examples) sum += model.Loss(params, x);
  return sum / static_cast<double>(data.size());
}

double MeanAccuracy(const Model& model, std::span<const double> params,
                    const LocalDataset& data) {
  if (!IsClassifier(model.spec().kind) || data.empty()) {
    return std::numeric_limits<double>::quiet_NaN();
  }
  size_t correct = 0;
  for (const Example& x : data.examples) {
    if (model.Predict(params, x) == static_cast<int>(x.label)) ++correct;
  }
  return static_cast<double>(correct) / static_cast<double>(data.size());
}

}  // namespace pacdp
