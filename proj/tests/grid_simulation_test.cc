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

#include "pacdp/grid_simulation.h"

#include <string>

#include "absl/strings/str_split.h"
#include "gtest/gtest.h"
#include "pacdp/dataset.h"

namespace pacdp {
namespace {

GridSpec SmallGrid() {
  GridSpec grid;
  grid.epsilons = {1.0, 3.0, 9.0};
  grid.clips = {0.1, 1.0, 10.0};
  grid.sim.clients = 4;
  grid.sim.clients_per_round = 2;
  grid.sim.rounds = 8;
  grid.sim.batch_size = 16;
  grid.sim.learning_rate = 0.5;
  grid.sim.model = {ModelKind::kLogisticBinary, 5, 2, 0, {}, {}};
  grid.sim.seeds_per_cell = 2;
  grid.sim.seed = 3;
  return grid;
}

TEST(GridSpecTest, Validation) {
  GridSpec grid = SmallGrid();
  EXPECT_TRUE(grid.Validate().ok());
  grid.epsilons = {3.0, 1.0};
  EXPECT_FALSE(grid.Validate().ok());
  grid = SmallGrid();
  grid.clips = {};
  EXPECT_FALSE(grid.Validate().ok());
  grid = SmallGrid();
  grid.sim.seeds_per_cell = 0;
  EXPECT_FALSE(grid.Validate().ok());
  grid = SmallGrid();
  grid.epsilons = {0.05, 1.0, 2.0};  // below the accountant floor
  EXPECT_FALSE(grid.Validate().ok());
}

TEST(SimulateGridTest, ShapeRangeAndDeterminism) {
  auto proxy = GenerateSynthetic(SyntheticTask::kLogisticPlanted, 600, 5, 1);
  GridSpec grid = SmallGrid();
  auto a = SimulateGrid(*proxy, grid);
  auto b = SimulateGrid(*proxy, grid);
  ASSERT_TRUE(a.ok()) << a.status();
  ASSERT_TRUE(a->Validate().ok());
  ASSERT_EQ(a->accuracy.size(), 3u);
  for (const auto& row : a->accuracy) {
    ASSERT_EQ(row.size(), 3u);
    for (double v : row) {
      EXPECT_GE(v, 0.0);
      EXPECT_LE(v, 1.0);
    }
  }
  EXPECT_EQ(a->seeds.size(), 2u);
  EXPECT_EQ(FormatPerformanceMatrixCsv(*a), FormatPerformanceMatrixCsv(*b));
}

TEST(SimulateGridTest, MoreBudgetHelpsAtModerateClip) {
  auto proxy = GenerateSynthetic(SyntheticTask::kLogisticPlanted, 1200, 5, 2);
  GridSpec grid = SmallGrid();
  grid.epsilons = {0.5, 5.0, 50.0};
  grid.clips = {1.0, 3.0};
  grid.sim.rounds = 20;
  grid.sim.seeds_per_cell = 3;
  auto m = SimulateGrid(*proxy, grid);
  ASSERT_TRUE(m.ok());
  EXPECT_GT(m->accuracy[2][0], m->accuracy[0][0]);
}

TEST(LearnClipMappingTest, ProducesFitWithProvenance) {
  auto proxy = GenerateSynthetic(SyntheticTask::kLogisticPlanted, 600, 5, 1);
  GridSpec grid = SmallGrid();
  CurveFitOptions options;
  options.monotone = true;
  auto out = LearnClipMapping(*proxy, grid, options);
  ASSERT_TRUE(out.ok()) << out.status();
  EXPECT_EQ(out->selected.size(), 3u);
  EXPECT_EQ(out->filtered.kept.size() + out->filtered.dropped.size(), 3u);
  EXPECT_EQ(out->fit.support, out->filtered.kept);
  EXPECT_FALSE(out->fit.provenance.empty());
  for (double e : grid.epsilons) EXPECT_GT(EvaluateF(out->fit, e), 0.0);
}

TEST(MatrixCsvTest, Layout) {
  PerformanceMatrix m;
  m.epsilons = {0.5, 2.0};
  m.clips = {0.1, 1.0};
  m.accuracy = {{0.25, 0.5}, {0.75, 1.0 / 3.0}};
  m.failed = {{false, false}, {false, false}};
  EXPECT_EQ(FormatPerformanceMatrixCsv(m),
            "epsilon,C=0.1,C=1\n0.5,0.25,0.5\n2,0.75,0.333333333\n");
}

}  // namespace
}  // namespace pacdp
