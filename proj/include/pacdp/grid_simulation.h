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

#ifndef PACDP_GRID_SIMULATION_H_
#define PACDP_GRID_SIMULATION_H_

#include <cstdint>
#include <string>
#include <vector>

#include "absl/status/statusor.h"
#include "pacdp/accountant.h"
#include "pacdp/curve_fit.h"
#include "pacdp/dataset.h"
#include "pacdp/model.h"

namespace pacdp {

// Federation run on the proxy task used for every grid cell.
struct SimulationConfig {
  size_t clients = 4;
  size_t clients_per_round = 4;
  int64_t rounds = 10;
  int64_t local_steps = 1;
  size_t batch_size = 16;
  double learning_rate = 0.1;
  ModelSpec model;
  double skew = 0.0;
  double test_fraction = 0.2;
  size_t seeds_per_cell = 3;
  uint64_t seed = 0;
  AccountantConfig accountant;
};

struct GridSpec {
  std::vector<double> epsilons;
  std::vector<double> clips;
  SimulationConfig sim;

  // At least 3 budgets and 2 clips, all positive and strictly increasing.
  absl::Status Validate() const;
};

// Runs the federation engine with a fixed clip per cell and every client
// holding the row's budget. The proxy is split into train/test once; the
// cell accuracy is the mean final test accuracy over the replicates.
// Replicate r uses the same seed in every cell, so cells of a row differ
// only in their clip. A diverged cell records the chance level 1/classes and
// is flagged in `failed`.
absl::StatusOr<PerformanceMatrix> SimulateGrid(const LocalDataset& proxy,
                                               const GridSpec& grid);

struct CurveFitOptions {
  bool monotone = false;
  // <= 0 selects the smallest clip of the grid.
  double clamp_floor = 0.0;
};

struct CurveFitOutcome {
  PerformanceMatrix matrix;
  std::vector<SupportPoint> selected;
  IqrFilterResult filtered;
  FitResult fit;
};

// simulate -> select -> IQR filter -> least squares (-> monotone envelope
// over the budget range).
absl::StatusOr<CurveFitOutcome> LearnClipMapping(const LocalDataset& proxy,
                                                 const GridSpec& grid,
                                                 const CurveFitOptions& options);

// Rows are budgets, columns clips: header "epsilon,C=<c1>,C=<c2>,...".
std::string FormatPerformanceMatrixCsv(const PerformanceMatrix& matrix);

}  // namespace pacdp

#endif  // PACDP_GRID_SIMULATION_H_
