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

#include <cmath>

#include "absl/strings/str_cat.h"
#include "absl/strings/str_format.h"
#include "absl/strings/str_join.h"
#include "pacdp/federation.h"
#include "pacdp/random.h"
#include "pacdp/status_macros.h"

namespace pacdp {
namespace {

absl::Status CheckIncreasingPositive(const std::vector<double>& values,
                                     const char* name) {
  for (size_t i = 0; i < values.size(); ++i) {
    if (!(values[i] > 0.0) || !std::isfinite(values[i])) {
      return absl::InvalidArgumentError(
          absl::StrCat("grid ", name, " must be positive"));
    }
    if (i > 0 && !(values[i] > values[i - 1])) {
      return absl::InvalidArgumentError(
          absl::StrCat("grid ", name, " must be strictly increasing"));
    }
  }
  return absl::OkStatus();
}

}  // namespace

absl::Status GridSpec::Validate() const {
  if (epsilons.size() < 3) {
    return absl::InvalidArgumentError(
        "grid needs at least 3 budgets for a quadratic fit");
  }
  if (clips.size() < 2) {
    return absl::InvalidArgumentError("grid needs at least 2 clip values");
  }
  PACDP_RETURN_IF_ERROR(CheckIncreasingPositive(epsilons, "budgets"));
  PACDP_RETURN_IF_ERROR(CheckIncreasingPositive(clips, "clips"));
  if (sim.seeds_per_cell < 1) {
    return absl::InvalidArgumentError("seeds_per_cell must be at least 1");
  }
  PACDP_RETURN_IF_ERROR(sim.accountant.Validate());
  if (const double floor = EpsilonFloor(sim.accountant);
      !(epsilons.front() > floor)) {
    return absl::InvalidArgumentError(absl::StrFormat(
        "grid budget %g is at or below the accountant floor %.9g",
        epsilons.front(), floor));
  }
  return absl::OkStatus();
}

absl::StatusOr<PerformanceMatrix> SimulateGrid(const LocalDataset& proxy,
                                               const GridSpec& grid) {
  PACDP_RETURN_IF_ERROR(ValidateDataset(proxy));
  PACDP_RETURN_IF_ERROR(grid.Validate());
  if (!IsClassifier(grid.sim.model.kind)) {
    return absl::InvalidArgumentError(
        "grid simulation scores accuracy and needs a classification model");
  }
  const SimulationConfig& sim = grid.sim;
  PACDP_ASSIGN_OR_RETURN(TrainTestSplit split,
                         SplitTrainTest(proxy, sim.test_fraction, sim.seed));
  PACDP_ASSIGN_OR_RETURN(
      std::vector<LocalDataset> shards,
      PartitionNonIid(split.train, sim.clients, sim.skew, sim.seed));

  PerformanceMatrix matrix;
  matrix.epsilons = grid.epsilons;
  matrix.clips = grid.clips;
  for (size_t r = 0; r < sim.seeds_per_cell; ++r) {
    matrix.seeds.push_back(DeriveStreamId(
        {sim.seed, static_cast<uint64_t>(StreamDomain::kGridCell), r}));
  }
  const double chance = 1.0 / static_cast<double>(sim.model.classes);

  for (double eps : grid.epsilons) {
    std::vector<double> row;
    std::vector<bool> row_failed;
    for (double clip : grid.clips) {
      FederationConfig config;
      config.num_clients = sim.clients;
      config.clients_per_round = sim.clients_per_round;
      config.rounds = sim.rounds;
      config.local_steps = sim.local_steps;
      config.batch_size = sim.batch_size;
      config.learning_rate = sim.learning_rate;
      config.model = sim.model;
      config.policy = FixedClipPolicy{clip};
      config.accountant = sim.accountant;

      double sum = 0.0;
      bool failed = false;
      for (uint64_t seed : matrix.seeds) {
        config.seed = seed;
        std::vector<double> budgets(sim.clients, eps);
        PACDP_ASSIGN_OR_RETURN(std::vector<ClientProfile> clients,
                               MakeClients(shards, budgets));
        PACDP_ASSIGN_OR_RETURN(
            TrainingResult run,
            RunTraining(config, std::move(clients), &split.test));
        double accuracy = run.history.empty() ? chance
                                              : run.history.back().accuracy;
        bool diverged = !AllFinite(run.params.span()) ||
                        (!run.history.empty() &&
                         !std::isfinite(run.history.back().loss));
        for (const RoundRecord& rec : run.history) {
          diverged = diverged || rec.carried_over;
        }
        if (diverged || !std::isfinite(accuracy)) {
          failed = true;
          accuracy = chance;
        }
        sum += accuracy;
      }
      row.push_back(sum / static_cast<double>(matrix.seeds.size()));
      row_failed.push_back(failed);
    }
    matrix.accuracy.push_back(std::move(row));
    matrix.failed.push_back(std::move(row_failed));
  }
  return matrix;
}

absl::StatusOr<CurveFitOutcome> LearnClipMapping(
    const LocalDataset& proxy, const GridSpec& grid,
    const CurveFitOptions& options) {
  CurveFitOutcome out;
  PACDP_ASSIGN_OR_RETURN(out.matrix, SimulateGrid(proxy, grid));
  out.selected = SelectOptimal(out.matrix);
  out.filtered = IqrFilter(out.selected);
  const double floor =
      options.clamp_floor > 0.0 ? options.clamp_floor : grid.clips.front();
  PACDP_ASSIGN_OR_RETURN(out.fit, FitQuadratic(out.filtered.kept, floor));
  if (options.monotone) {
    PACDP_ASSIGN_OR_RETURN(
        out.fit, MonotoneProject(out.fit, grid.epsilons.front(),
                                 grid.epsilons.back()));
  }
  size_t failed_cells = 0;
  for (const auto& row : out.matrix.failed) {
    for (bool f : row) failed_cells += f ? 1 : 0;
  }
  auto& prov = out.fit.provenance;
  prov["grid_epsilons"] = absl::StrJoin(
      grid.epsilons, ";", [](std::string* s, double v) {
        absl::StrAppendFormat(s, "%.9g", v);
      });
  prov["grid_clips"] = absl::StrJoin(
      grid.clips, ";", [](std::string* s, double v) {
        absl::StrAppendFormat(s, "%.9g", v);
      });
  prov["seeds_per_cell"] = absl::StrCat(grid.sim.seeds_per_cell);
  prov["master_seed"] = absl::StrCat(grid.sim.seed);
  prov["iqr_dropped"] = absl::StrCat(out.filtered.dropped.size());
  prov["iqr_skipped"] = out.filtered.skipped ? "true" : "false";
  prov["failed_cells"] = absl::StrCat(failed_cells);
  return out;
}

std::string FormatPerformanceMatrixCsv(const PerformanceMatrix& matrix) {
  std::string out = "epsilon";
  for (double c : matrix.clips) absl::StrAppendFormat(&out, ",C=%.9g", c);
  out += "\n";
  for (size_t i = 0; i < matrix.epsilons.size(); ++i) {
    absl::StrAppendFormat(&out, "%.9g", matrix.epsilons[i]);
    for (double a : matrix.accuracy[i]) absl::StrAppendFormat(&out, ",%.9g", a);
    out += "\n";
  }
  return out;
}

}  // namespace pacdp
