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

#ifndef PACDP_COMMANDS_H_
#define PACDP_COMMANDS_H_

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "absl/status/statusor.h"
#include "pacdp/accountant.h"
#include "pacdp/config.h"
#include "pacdp/curve_fit.h"
#include "pacdp/federation.h"

namespace pacdp {

// File names inside the output directory.
inline constexpr char kMatrixFile[] = "matrix.csv";
inline constexpr char kFitFile[] = "fit.json";
inline constexpr char kHistoryFile[] = "history.csv";
inline constexpr char kLedgerFile[] = "ledger.csv";
inline constexpr char kSummaryFile[] = "summary.json";
inline constexpr char kReportFile[] = "report.json";
inline constexpr char kAccuracyCurveFile[] = "accuracy_curve.csv";
inline constexpr char kFitCurveFile[] = "fit_curve.csv";

// Number of evenly spaced budgets in the report's fitted-curve samples.
inline constexpr int kCurveSamples = 100;

struct CommandOverrides {
  std::optional<uint64_t> seed;
  std::optional<std::string> output_dir;
  std::optional<std::string> policy;
  std::optional<double> clip;
  std::optional<double> delta;
};

// Applies command-line overrides and re-validates.
absl::StatusOr<RunConfig> ApplyOverrides(RunConfig config,
                                         const CommandOverrides& overrides);

// Client data, budgets and engine config derived from a run config.
struct FederationSetup {
  FederationConfig config;
  std::vector<ClientProfile> clients;
  LocalDataset test;
};
// `fit` is required for the pacdp policy and ignored otherwise.
absl::StatusOr<FederationSetup> BuildFederation(
    const RunConfig& config, const std::optional<FitResult>& fit);

struct FitArtifacts {
  std::string matrix_path;
  std::string fit_path;
  FitResult fit;
  PerformanceMatrix matrix;
};
// Offline phase: grid simulation on the proxy task, selection, filtering
// and fitting. Writes matrix.csv and fit.json into the output directory.
absl::StatusOr<FitArtifacts> CmdFit(const RunConfig& config);

struct TrainArtifacts {
  std::string history_path;
  std::string ledger_path;
  std::string summary_path;
  TrainingResult result;
  PrivacyReport privacy;
};
// Online phase. For the pacdp policy the fit is read from `fit_path`, or
// from <output_dir>/fit.json when absent. Writes history.csv, ledger.csv and
// summary.json. The privacy summary is computed from the ledger export as
// written, so it always agrees with `account` on that file.
absl::StatusOr<TrainArtifacts> CmdTrain(
    const RunConfig& config, const std::optional<std::string>& fit_path);

// Per-client epsilon table for a ledger export: "client_id,epsilon,alpha"
// rows followed by min/median/max rows. `empty` is set when the ledger has
// no entries.
absl::StatusOr<std::string> CmdAccount(const std::string& ledger_path,
                                       const AccountantConfig& accountant,
                                       bool* empty = nullptr);

// Consolidates a train (and optional fit) output directory into
// report.json, accuracy_curve.csv and fit_curve.csv. Returns the report
// path.
absl::StatusOr<std::string> CmdReport(const std::string& bundle_dir);

struct HistoryRow {
  int64_t round = 0;
  double loss = 0.0;
  double accuracy = 0.0;
  double mean_clip = 0.0;
  size_t messages = 0;
  size_t floats = 0;
};
std::string FormatHistoryCsv(std::span<const RoundRecord> history);
absl::StatusOr<std::vector<HistoryRow>> ParseHistoryCsv(
    const std::string& text);

// `x` rounded to 9 significant digits.
double RoundSignificant(double x);

absl::StatusOr<std::string> ReadFile(const std::string& path);
absl::Status WriteFile(const std::string& path, const std::string& contents);

}  // namespace pacdp

#endif  // PACDP_COMMANDS_H_
