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

#include "pacdp/curve_fit.h"

#include <algorithm>
#include <cmath>

#include "Eigen/Dense"
#include "absl/strings/str_cat.h"
#include "absl/strings/str_format.h"
#include "json.hpp"

namespace pacdp {
namespace {

using nlohmann::json;

constexpr double kIqrWhisker = 1.5;
constexpr size_t kMinFitPoints = 3;
// Condition number of the scaled design matrix above which the fit is
// rejected.
constexpr double kMaxCondition = 1e12;

double Quadratic(double alpha, double beta, double gamma, double x) {
  return (alpha * x + beta) * x + gamma;
}

}  // namespace

absl::Status PerformanceMatrix::Validate() const {
  if (accuracy.size() != epsilons.size()) {
    return absl::InvalidArgumentError("matrix row count != number of budgets");
  }
  for (const auto& row : accuracy) {
    if (row.size() != clips.size()) {
      return absl::InvalidArgumentError(
          "matrix column count != number of clips");
    }
    for (double a : row) {
      if (!(a >= 0.0 && a <= 1.0)) {
        return absl::InvalidArgumentError(
            absl::StrCat("accuracy ", a, " outside [0, 1]"));
      }
    }
  }
  return absl::OkStatus();
}

std::vector<SupportPoint> SelectOptimal(const PerformanceMatrix& matrix) {
  std::vector<SupportPoint> out;
  out.reserve(matrix.epsilons.size());
  for (size_t i = 0; i < matrix.epsilons.size(); ++i) {
    const auto& row = matrix.accuracy[i];
    size_t best = 0;
    for (size_t j = 1; j < row.size(); ++j) {
      if (row[j] > row[best] ||
          (row[j] == row[best] && matrix.clips[j] < matrix.clips[best])) {
        best = j;
      }
    }
    out.push_back({matrix.epsilons[i], matrix.clips[best]});
  }
  return out;
}

double InterpolatedQuantile(std::vector<double> values, double q) {
  std::sort(values.begin(), values.end());
  const double pos = q * static_cast<double>(values.size() - 1);
  const size_t below = static_cast<size_t>(std::floor(pos));
  const size_t above = std::min(below + 1, values.size() - 1);
  const double frac = pos - static_cast<double>(below);
  return values[below] + frac * (values[above] - values[below]);
}

IqrFilterResult IqrFilter(std::span<const SupportPoint> points) {
  IqrFilterResult result;
  if (points.empty()) return result;
  std::vector<double> clips;
  for (const SupportPoint& p : points) clips.push_back(p.clip);
  const double q1 = InterpolatedQuantile(clips, 0.25);
  const double q3 = InterpolatedQuantile(clips, 0.75);
  const double iqr = q3 - q1;
  const double lo = q1 - kIqrWhisker * iqr;
  const double hi = q3 + kIqrWhisker * iqr;
  for (const SupportPoint& p : points) {
    if (p.clip < lo || p.clip > hi) {
      result.dropped.push_back(p);
    } else {
      result.kept.push_back(p);
    }
  }
  if (result.kept.size() < kMinFitPoints && !result.dropped.empty()) {
    result.kept.assign(points.begin(), points.end());
    result.dropped.clear();
    result.skipped = true;
  }
  return result;
}

absl::StatusOr<FitResult> FitQuadratic(std::span<const SupportPoint> points,
                                       double clamp_floor) {
  std::vector<double> eps;
  for (const SupportPoint& p : points) {
    if (!std::isfinite(p.epsilon) || !std::isfinite(p.clip)) {
      return absl::InvalidArgumentError("support point is not finite");
    }
    eps.push_back(p.epsilon);
  }
  std::sort(eps.begin(), eps.end());
  const size_t distinct =
      std::unique(eps.begin(), eps.end()) - eps.begin();
  if (distinct < kMinFitPoints) {
    return absl::InvalidArgumentError(absl::StrCat(
        "quadratic fit needs at least 3 distinct budgets, got ", distinct));
  }

  // Columns are scaled to unit max-abs so the condition number reflects the
  // geometry of the budgets rather than their units.
  const Eigen::Index n = static_cast<Eigen::Index>(points.size());
  Eigen::MatrixXd design(n, 3);
  Eigen::VectorXd target(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double e = points[i].epsilon;
    design(i, 0) = e * e;
    design(i, 1) = e;
    design(i, 2) = 1.0;
    target(i) = points[i].clip;
  }
  Eigen::Vector3d scale = design.cwiseAbs().colwise().maxCoeff().transpose();
  for (int c = 0; c < 3; ++c) {
    if (scale(c) == 0.0) scale(c) = 1.0;
  }
  Eigen::MatrixXd scaled = design * scale.cwiseInverse().asDiagonal();
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(scaled);
  const auto& sv = svd.singularValues();
  const double condition =
      sv(2) > 0.0 ? sv(0) / sv(2) : std::numeric_limits<double>::infinity();
  if (!(condition <= kMaxCondition)) {
    return absl::FailedPreconditionError(absl::StrFormat(
        "quadratic fit design is singular (condition number %g, singular "
        "values %g, %g, %g)",
        condition, sv(0), sv(1), sv(2)));
  }
  Eigen::Vector3d coef = scaled.colPivHouseholderQr().solve(target);
  coef = coef.cwiseQuotient(scale);

  FitResult fit;
  fit.alpha = coef(0);
  fit.beta = coef(1);
  fit.gamma = coef(2);
  fit.support.assign(points.begin(), points.end());

  double mean = target.mean();
  double ss_res = 0.0, ss_tot = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    double r = target(i) - Quadratic(fit.alpha, fit.beta, fit.gamma,
                                     points[i].epsilon);
    ss_res += r * r;
    ss_tot += (target(i) - mean) * (target(i) - mean);
  }
  // A constant target is reproduced exactly; report a perfect fit then.
  fit.r2 = ss_tot > 0.0 ? 1.0 - ss_res / ss_tot : 1.0;

  if (clamp_floor <= 0.0) {
    clamp_floor = std::numeric_limits<double>::infinity();
    for (const SupportPoint& p : points) {
      if (p.clip > 0.0) clamp_floor = std::min(clamp_floor, p.clip);
    }
    if (!std::isfinite(clamp_floor)) {
      return absl::InvalidArgumentError(
          "no positive clip among the support points to use as clamp floor");
    }
  }
  fit.clamp_floor = clamp_floor;
  return fit;
}

double EvaluatePolynomial(const FitResult& fit, double epsilon) {
  return Quadratic(fit.alpha, fit.beta, fit.gamma, epsilon);
}

double EvaluateF(const FitResult& fit, double epsilon) {
  double value = EvaluatePolynomial(fit, epsilon);
  if (fit.monotone.enabled && epsilon >= fit.monotone.eps_lo) {
    const double lo = fit.monotone.eps_lo;
    value = std::max(value, EvaluatePolynomial(fit, lo));
    if (fit.alpha < 0.0) {
      const double vertex = -fit.beta / (2.0 * fit.alpha);
      if (vertex > lo && vertex < epsilon) {
        value = std::max(value, EvaluatePolynomial(fit, vertex));
      }
    }
  }
  return std::max(value, fit.clamp_floor);
}

absl::StatusOr<FitResult> MonotoneProject(const FitResult& fit, double eps_lo,
                                          double eps_hi) {
  if (!(eps_lo < eps_hi)) {
    return absl::InvalidArgumentError("monotone range must have lo < hi");
  }
  FitResult out = fit;
  // The derivative is linear, so checking both ends covers the range.
  const double slope_lo = 2.0 * fit.alpha * eps_lo + fit.beta;
  const double slope_hi = 2.0 * fit.alpha * eps_hi + fit.beta;
  if (slope_lo >= 0.0 && slope_hi >= 0.0) return out;
  out.monotone = {true, eps_lo, eps_hi};
  return out;
}

std::string FunctionClassName(FunctionClass function_class) {
  switch (function_class) {
    case FunctionClass::kQuadratic:
      return "quadratic";
  }
  return "unknown";
}

std::string FormatFitResult(const FitResult& fit) {
  json support = json::array();
  for (const SupportPoint& p : fit.support) {
    support.push_back({{"epsilon", p.epsilon}, {"clip", p.clip}});
  }
  json doc = {
      {"function_class", FunctionClassName(fit.function_class)},
      {"alpha", fit.alpha},
      {"beta", fit.beta},
      {"gamma", fit.gamma},
      {"r2", fit.r2},
      {"clamp_floor", fit.clamp_floor},
      {"support", support},
      {"monotone",
       {{"enabled", fit.monotone.enabled},
        {"eps_lo", fit.monotone.eps_lo},
        {"eps_hi", fit.monotone.eps_hi}}},
      {"provenance", fit.provenance},
  };
  return doc.dump(2) + "\n";
}

absl::StatusOr<FitResult> ParseFitResult(const std::string& text) {
  json doc = json::parse(text, nullptr, /*allow_exceptions=*/false);
  if (doc.is_discarded() || !doc.is_object()) {
    return absl::InvalidArgumentError("fit file is not a JSON object");
  }
  FitResult fit;
  try {
    if (doc.at("function_class").get<std::string>() != "quadratic") {
      return absl::InvalidArgumentError(
          "fit file: only the quadratic function class is supported");
    }
    fit.alpha = doc.at("alpha").get<double>();
    fit.beta = doc.at("beta").get<double>();
    fit.gamma = doc.at("gamma").get<double>();
    fit.r2 = doc.at("r2").get<double>();
    fit.clamp_floor = doc.at("clamp_floor").get<double>();
    for (const json& p : doc.at("support")) {
      fit.support.push_back(
          {p.at("epsilon").get<double>(), p.at("clip").get<double>()});
    }
    const json& mono = doc.at("monotone");
    fit.monotone = {mono.at("enabled").get<bool>(),
                    mono.at("eps_lo").get<double>(),
                    mono.at("eps_hi").get<double>()};
    if (doc.contains("provenance")) {
      fit.provenance =
          doc.at("provenance").get<std::map<std::string, std::string>>();
    }
  } catch (const json::exception& e) {
    return absl::InvalidArgumentError(
        absl::StrCat("fit file: ", e.what()));
  }
  if (!(fit.clamp_floor > 0.0)) {
    return absl::InvalidArgumentError("fit file: clamp_floor must be positive");
  }
  if (fit.support.empty()) {
    return absl::InvalidArgumentError("fit file: support is empty");
  }
  return fit;
}

}  // namespace pacdp
