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

#include <cmath>
#include <vector>

#include "gtest/gtest.h"
#include "pacdp/dataset.h"
#include "pacdp/param_vector.h"
#include "pacdp/random.h"

namespace pacdp {
namespace {

TEST(ParamVectorTest, NormsAndAxpy) {
  ParamVector a{3.0, 4.0};
  ParamVector b{1.0, -1.0};
  EXPECT_DOUBLE_EQ(L2Norm(a.span()), 5.0);
  EXPECT_DOUBLE_EQ(Dot(a.span(), b.span()), -1.0);
  Axpy(2.0, b.span(), a.span());
  EXPECT_EQ(a, (ParamVector{5.0, 2.0}));
  EXPECT_DOUBLE_EQ(L2Distance(a.span(), b.span()), 5.0);
  a[0] = std::nan("");
  EXPECT_FALSE(AllFinite(a.span()));
}

TEST(ModelTest, ParameterCounts) {
  ModelSpec mlp{ModelKind::kMlp1Hidden, 4, 2, 3, {}, {}};
  EXPECT_EQ(*ParameterCount(mlp), 23u);  // 3*4 + 3 + 2*3 + 2
  ModelSpec logistic{ModelKind::kLogisticBinary, 10, 2, 0, {}, {}};
  EXPECT_EQ(*ParameterCount(logistic), 11u);
  ModelSpec softmax{ModelKind::kSoftmaxLinear, 5, 3, 0, {}, {}};
  EXPECT_EQ(*ParameterCount(softmax), 18u);
  ModelSpec linear{ModelKind::kLinearRegression, 5, 2, 0, {}, {}};
  EXPECT_EQ(*ParameterCount(linear), 6u);
}

TEST(ModelTest, InvalidSpecsRejected) {
  EXPECT_FALSE(ParameterCount({ModelKind::kMlp1Hidden, 4, 2, 0, {}, {}}).ok());
  EXPECT_FALSE(
      ParameterCount({ModelKind::kSoftmaxLinear, 4, 1, 0, {}, {}}).ok());
  EXPECT_FALSE(ParameterCount(ModelSpec::Quadratic({1, 2, 3, 1}, {0, 0})).ok());
}

TEST(ModelTest, LogisticLossAtZeroIsLog2) {
  ModelSpec spec{ModelKind::kLogisticBinary, 3, 2, 0, {}, {}};
  ParamVector w(4, 0.0);
  for (double label : {0.0, 1.0}) {
    Example x{{0.3, -1.2, 2.0}, label};
    EXPECT_NEAR(*PerExampleLoss(spec, w, x), std::log(2.0), 1e-15);
  }
}

TEST(ModelTest, RejectsWrongShapes) {
  ModelSpec spec{ModelKind::kLogisticBinary, 3, 2, 0, {}, {}};
  EXPECT_FALSE(PerExampleGradient(spec, ParamVector(3), {{1, 2, 3}, 0}).ok());
  EXPECT_FALSE(PerExampleGradient(spec, ParamVector(4), {{1, 2}, 0}).ok());
  EXPECT_FALSE(PerExampleGradient(spec, ParamVector(4), {{1, 2, 3}, 2}).ok());
  LocalDataset empty{{}, 3};
  EXPECT_FALSE(DatasetLoss(spec, ParamVector(4), empty).ok());
}

TEST(ModelTest, AccuracyRequiresClassifier) {
  ModelSpec spec{ModelKind::kLinearRegression, 1, 2, 0, {}, {}};
  LocalDataset data{{{{1.0}, 0.5}}, 1};
  EXPECT_FALSE(Accuracy(spec, ParamVector(2), data).ok());
}

// Central-difference check of the analytic gradient on random instances.
void CheckGradients(const ModelSpec& spec, uint64_t seed) {
  absl::StatusOr<Model> model = Model::Create(spec);
  ASSERT_TRUE(model.ok()) << model.status();
  RandomStream rng = RandomStream::For(seed, StreamDomain::kTestHarness);
  const size_t d = model->num_params();
  const double h = 1e-6;
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<double> w(d);
    for (double& v : w) v = rng.Normal();
    Example x;
    x.features.resize(spec.input_dim);
    for (double& v : x.features) v = rng.Normal();
    switch (spec.kind) {
      case ModelKind::kLinearRegression:
        x.label = rng.Normal();
        break;
      case ModelKind::kQuadratic:
        x.label = 0.0;
        break;
      default:
        x.label = static_cast<double>(rng.UniformIndex(spec.classes));
    }
    std::vector<double> g(d);
    model->Gradient(w, x, g);
    for (size_t j = 0; j < d; ++j) {
      std::vector<double> wp = w, wm = w;
      wp[j] += h;
      wm[j] -= h;
      double fd = (model->Loss(wp, x) - model->Loss(wm, x)) / (2 * h);
      double scale = std::max(1.0, std::abs(g[j]));
      ASSERT_NEAR(g[j], fd, 1e-5 * scale)
          << ModelKindName(spec.kind) << " trial " << trial << " coord " << j;
    }
  }
}

TEST(ModelGradientTest, LinearRegression) {
  CheckGradients({ModelKind::kLinearRegression, 5, 2, 0, {}, {}}, 1);
}
TEST(ModelGradientTest, LogisticBinary) {
  CheckGradients({ModelKind::kLogisticBinary, 5, 2, 0, {}, {}}, 2);
}
TEST(ModelGradientTest, SoftmaxLinear) {
  CheckGradients({ModelKind::kSoftmaxLinear, 4, 3, 0, {}, {}}, 3);
}
TEST(ModelGradientTest, Mlp) {
  CheckGradients({ModelKind::kMlp1Hidden, 4, 3, 5, {}, {}}, 4);
}
TEST(ModelGradientTest, Quadratic) {
  CheckGradients(ModelSpec::Quadratic({2.0, 0.5, 0.5, 1.0}, {1.0, -1.0}), 5);
}

TEST(ModelTest, QuadraticMinimumMatchesClosedForm) {
  // A = [[2, .5], [.5, 1]], b = [1, -1]; minimizer solves A w = b.
  ModelSpec spec = ModelSpec::Quadratic({2.0, 0.5, 0.5, 1.0}, {1.0, -1.0});
  const double det = 2.0 * 1.0 - 0.25;
  ParamVector w{(1.0 * 1.0 - 0.5 * -1.0) / det, (2.0 * -1.0 - 0.5 * 1.0) / det};
  absl::StatusOr<ParamVector> g = PerExampleGradient(spec, w, {{0.0, 0.0}, 0});
  ASSERT_TRUE(g.ok());
  EXPECT_NEAR(L2Norm(g->span()), 0.0, 1e-14);
}

TEST(ModelTest, PredictTiesGoToLowestClass) {
  ModelSpec spec{ModelKind::kSoftmaxLinear, 1, 3, 0, {}, {}};
  absl::StatusOr<Model> model = Model::Create(spec);
  ASSERT_TRUE(model.ok());
  std::vector<double> w(6, 0.0);
  EXPECT_EQ(model->Predict(w, {{1.0}, 0}), 0);
  ModelSpec logistic{ModelKind::kLogisticBinary, 1, 2, 0, {}, {}};
  absl::StatusOr<Model> lm = Model::Create(logistic);
  std::vector<double> z(2, 0.0);
  EXPECT_EQ(lm->Predict(z, {{1.0}, 1}), 0);
}

TEST(ModelTest, InitIsDeterministicAndSmall) {
  ModelSpec spec{ModelKind::kMlp1Hidden, 4, 2, 3, {}, {}};
  absl::StatusOr<ParamVector> a = InitModel(spec, 9);
  absl::StatusOr<ParamVector> b = InitModel(spec, 9);
  ASSERT_TRUE(a.ok());
  EXPECT_EQ(*a, *b);
  for (double v : *a) EXPECT_LE(std::abs(v), Model::kInitScale);
}

}  // namespace
}  // namespace pacdp
