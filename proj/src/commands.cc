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

#include "pacdp/commands.h"

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "absl/strings/numbers.h"
#include "absl/strings/str_cat.h"
#include "absl/strings/str_format.h"
#include "absl/strings/str_split.h"
#include "absl/strings/strip.h"
#include "json.hpp"
#include "pacdp/grid_simulation.h"
#include "pacdp/schedule.h"
#include "pacdp/status_macros.h"

namespace pacdp {
namespace {

using nlohmann::json;
using ordered_json = nlohmann::ordered_json;

std::string PathIn(const std::string& dir, const char* name) {
  return (std::filesystem::path(dir) / name).string();
}

absl::Status EnsureDirectory(const std::string& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) {
    return absl::PermissionDeniedError(
        absl::StrCat("cannot create output directory ", dir, ": ",
                     ec.message()));
  }
  return absl::OkStatus();
}

// Paths inside the bundle are stored relative to it, so identical runs into
// different directories produce identical summaries.
std::string RelativeTo(const std::string& path, const std::string& dir) {
  std::filesystem::path rel =
      std::filesystem::path(path).lexically_relative(dir);
  if (rel.empty() || *rel.begin() == "..") return path;
  return rel.string();
}

// JSON number at 9 significant digits, or null when not finite.
ordered_json Num(double x) {
  if (!std::isfinite(x)) return nullptr;
  return RoundSignificant(x);
}

absl::StatusOr<LocalDataset> LoadDataset(const RunConfig& config) {
  const DatasetRecipe& d = config.dataset;
  if (d.source == "csv") return LoadCsvDataset(d.csv_path);
  return GenerateSynthetic(d.task, d.examples, d.dim, config.seed);
}

}  // namespace

double RoundSignificant(double x) {
  if (!std::isfinite(x)) return x;
  return std::strtod(absl::StrFormat("%.9g", x).c_str(), nullptr);
}

absl::StatusOr<std::string> ReadFile(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return absl::NotFoundError(absl::StrCat("cannot open ", path));
  std::stringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

absl::Status WriteFile(const std::string& path, const std::string& contents) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) return absl::PermissionDeniedError(absl::StrCat("cannot write ", path));
  out << contents;
  if (!out) return absl::DataLossError(absl::StrCat("short write to ", path));
  return absl::OkStatus();
}

absl::StatusOr<RunConfig> ApplyOverrides(RunConfig config,
                                         const CommandOverrides& overrides) {
  if (overrides.seed) config.seed = *overrides.seed;
  if (overrides.output_dir) config.output_dir = *overrides.output_dir;
  if (overrides.policy) config.policy.kind = *overrides.policy;
  if (overrides.clip) config.policy.clip = *overrides.clip;
  if (overrides.delta) config.accountant.delta = *overrides.delta;
  PACDP_RETURN_IF_ERROR(ValidateRunConfig(config));
  return config;
}

absl::StatusOr<FederationSetup> BuildFederation(
    const RunConfig& config, const std::optional<FitResult>& fit) {
  FederationSetup setup;
  FederationConfig& fc = setup.config;
  fc.num_clients = config.clients;
  fc.clients_per_round = config.clients_per_round;
  fc.rounds = config.rounds;
  fc.local_steps = config.local_steps;
  fc.batch_size = config.batch_size;
  fc.learning_rate = config.learning_rate;
  fc.model = config.model;
  fc.accountant = config.accountant;
  fc.seed = config.seed;
  fc.literal_aggregation = config.literal_aggregation;
  fc.threads = config.threads;

  const PolicySettings& p = config.policy;
  if (p.kind == "pacdp") {
    if (!fit) {
      return absl::FailedPreconditionError(
          "the pacdp policy needs a fit file (run `fit` first or pass --fit)");
    }
    PACDP_ASSIGN_OR_RETURN(
        ScheduleParams schedule,
        ScheduleParams::Create(config.rounds, config.decay_start_fraction,
                               config.lambda_min));
    fc.policy = PacDpPolicy{*fit, schedule};
  } else if (p.kind == "fixed") {
    fc.policy = FixedClipPolicy{p.clip};
  } else {
    fc.policy = QuantilePolicy{p.quantile, p.clip, p.quantile_lr};
  }

  PACDP_ASSIGN_OR_RETURN(LocalDataset data, LoadDataset(config));
  if (data.dim != config.model.input_dim) {
    return absl::InvalidArgumentError(
        absl::StrCat("dataset has ", data.dim, " features but the model expects ",
                     config.model.input_dim));
  }
  PACDP_ASSIGN_OR_RETURN(
      TrainTestSplit split,
      SplitTrainTest(data, config.dataset.test_fraction, config.seed));
  PACDP_ASSIGN_OR_RETURN(std::vector<LocalDataset> shards,
                         PartitionNonIid(split.train, config.clients,
                                         config.dataset.skew, config.seed));
  std::vector<double> budgets = AssignBudgets(config.budgets, config.clients);
  PACDP_ASSIGN_OR_RETURN(setup.clients,
                         MakeClients(std::move(shards), budgets));
  setup.test = std::move(split.test);
  return setup;
}

absl::StatusOr<FitArtifacts> CmdFit(const RunConfig& config) {
  if (!config.grid) {
    return absl::InvalidArgumentError("config has no grid section to fit");
  }
  const GridSettings& g = *config.grid;
  PACDP_ASSIGN_OR_RETURN(
      LocalDataset proxy,
      GenerateSynthetic(g.proxy_task, g.proxy_examples, config.model.input_dim,
                        g.proxy_seed));
  GridSpec grid;
  grid.epsilons = g.epsilons;
  grid.clips = g.clips;
  SimulationConfig& sim = grid.sim;
  sim.clients = g.clients;
  sim.clients_per_round = g.clients_per_round;
  sim.rounds = g.rounds;
  sim.local_steps = g.local_steps;
  sim.batch_size = g.batch_size;
  sim.learning_rate = g.learning_rate;
  sim.model = config.model;
  sim.skew = g.skew;
  sim.test_fraction = config.dataset.test_fraction;
  sim.seeds_per_cell = g.seeds_per_cell;
  sim.seed = config.seed;
  sim.accountant = config.accountant;

  CurveFitOptions options;
  options.monotone = g.monotone;
  PACDP_ASSIGN_OR_RETURN(CurveFitOutcome outcome,
                         LearnClipMapping(proxy, grid, options));

  PACDP_RETURN_IF_ERROR(EnsureDirectory(config.output_dir));
  FitArtifacts out;
  out.matrix_path = PathIn(config.output_dir, kMatrixFile);
  out.fit_path = PathIn(config.output_dir, kFitFile);
  PACDP_RETURN_IF_ERROR(WriteFile(out.matrix_path,
                                  FormatPerformanceMatrixCsv(outcome.matrix)));
  PACDP_RETURN_IF_ERROR(WriteFile(out.fit_path, FormatFitResult(outcome.fit)));
  out.fit = std::move(outcome.fit);
  out.matrix = std::move(outcome.matrix);
  return out;
}

std::string FormatHistoryCsv(std::span<const RoundRecord> history) {
  std::string out = "round,loss,accuracy,mean_clip,messages,floats\n";
  for (const RoundRecord& r : history) {
    absl::StrAppendFormat(&out, "%d,%.9g,%.9g,%.9g,%d,%d\n", r.round, r.loss,
                          r.accuracy, r.MeanClip(), r.messages,
                          r.payload_floats);
  }
  return out;
}

absl::StatusOr<std::vector<HistoryRow>> ParseHistoryCsv(
    const std::string& text) {
  std::vector<HistoryRow> rows;
  size_t line_no = 0;
  for (absl::string_view raw : absl::StrSplit(text, '\n')) {
    ++line_no;
    absl::string_view line = absl::StripAsciiWhitespace(raw);
    if (line.empty()) continue;
    if (line_no == 1) {
      if (line != "round,loss,accuracy,mean_clip,messages,floats") {
        return absl::InvalidArgumentError("history: unexpected header");
      }
      continue;
    }
    std::vector<absl::string_view> cells = absl::StrSplit(line, ',');
    HistoryRow row;
    if (cells.size() != 6 || !absl::SimpleAtoi(cells[0], &row.round) ||
        !absl::SimpleAtod(cells[1], &row.loss) ||
        !absl::SimpleAtod(cells[2], &row.accuracy) ||
        !absl::SimpleAtod(cells[3], &row.mean_clip) ||
        !absl::SimpleAtoi(cells[4], &row.messages) ||
        !absl::SimpleAtoi(cells[5], &row.floats)) {
      return absl::InvalidArgumentError(
          absl::StrCat("history line ", line_no, ": malformed row"));
    }
    rows.push_back(row);
  }
  return rows;
}

absl::StatusOr<TrainArtifacts> CmdTrain(
    const RunConfig& config, const std::optional<std::string>& fit_path) {
  std::optional<FitResult> fit;
  std::string fit_file;
  if (config.policy.kind == "pacdp") {
    fit_file = fit_path.value_or(PathIn(config.output_dir, kFitFile));
    auto text = ReadFile(fit_file);
    if (!text.ok()) {
      return absl::NotFoundError(absl::StrCat(
          "pacdp policy needs a fit file; ", text.status().message(),
          " (run `fit` first or pass --fit)"));
    }
    PACDP_ASSIGN_OR_RETURN(fit, ParseFitResult(*text));
  }
  PACDP_ASSIGN_OR_RETURN(FederationSetup setup, BuildFederation(config, fit));
  std::vector<ClientProfile> clients = setup.clients;
  PACDP_ASSIGN_OR_RETURN(
      TrainingResult result,
      RunTraining(setup.config, std::move(clients), &setup.test));

  PACDP_RETURN_IF_ERROR(EnsureDirectory(config.output_dir));
  TrainArtifacts out;
  out.history_path = PathIn(config.output_dir, kHistoryFile);
  out.ledger_path = PathIn(config.output_dir, kLedgerFile);
  out.summary_path = PathIn(config.output_dir, kSummaryFile);
  const std::string ledger_text = FormatLedgers(result.ledgers);
  PACDP_RETURN_IF_ERROR(
      WriteFile(out.history_path, FormatHistoryCsv(result.history)));
  PACDP_RETURN_IF_ERROR(WriteFile(out.ledger_path, ledger_text));

  // Account from the export so the summary matches `account` exactly.
  PACDP_ASSIGN_OR_RETURN(std::vector<ParticipationLedger> exported,
                         ParseLedgers(ledger_text));
  std::vector<ParticipationLedger> ledgers;
  for (const ClientProfile& c : setup.clients) {
    ParticipationLedger ledger(c.id);
    for (const ParticipationLedger& e : exported) {
      if (e.client_id() == c.id) ledger = e;
    }
    ledgers.push_back(std::move(ledger));
  }
  PACDP_ASSIGN_OR_RETURN(out.privacy, FinalReport(ledgers, config.accountant));

  ordered_json per_client = ordered_json::array();
  for (size_t i = 0; i < setup.clients.size(); ++i) {
    const ClientEpsilon& e = out.privacy.clients[i];
    per_client.push_back({{"client_id", e.client_id},
                          {"target_epsilon", Num(setup.clients[i].epsilon)},
                          {"noise_multiplier",
                           Num(result.noise_multipliers[i])},
                          {"examples", setup.clients[i].dataset.size()},
                          {"releases", ledgers[i].total_steps()},
                          {"epsilon", Num(e.epsilon)},
                          {"alpha", e.alpha}});
  }
  CommunicationReport comm = SummarizeCommunication(result.history);
  const RoundRecord* last =
      result.history.empty() ? nullptr : &result.history.back();
  ordered_json summary = {
      {"policy", config.policy.kind},
      {"seed", config.seed},
      {"rounds", config.rounds},
      {"model_params", result.params.size()},
      {"final_loss", last ? Num(last->loss) : ordered_json(nullptr)},
      {"final_accuracy", last ? Num(last->accuracy) : ordered_json(nullptr)},
      {"privacy",
       {{"delta", config.accountant.delta},
        {"min_epsilon", Num(out.privacy.min_epsilon)},
        {"median_epsilon", Num(out.privacy.median_epsilon)},
        {"max_epsilon", Num(out.privacy.max_epsilon)},
        {"clients", per_client}}},
      {"communication",
       {{"total_messages", comm.total_messages},
        {"total_floats", comm.total_floats},
        {"messages_per_round", Num(comm.messages_per_round)},
        {"floats_per_round", Num(comm.floats_per_round)}}},
      {"files",
       {{"history", kHistoryFile},
        {"ledger", kLedgerFile},
        {"fit", fit ? ordered_json(RelativeTo(fit_file, config.output_dir))
                    : ordered_json(nullptr)}}},
  };
  PACDP_RETURN_IF_ERROR(WriteFile(out.summary_path, summary.dump(2) + "\n"));
  out.result = std::move(result);
  return out;
}

absl::StatusOr<std::string> CmdAccount(const std::string& ledger_path,
                                       const AccountantConfig& accountant,
                                       bool* empty) {
  PACDP_ASSIGN_OR_RETURN(std::string text, ReadFile(ledger_path));
  auto ledgers = ParseLedgers(text);
  if (!ledgers.ok()) {
    return absl::InvalidArgumentError(
        absl::StrCat(ledger_path, ": ", ledgers.status().message()));
  }
  if (empty != nullptr) *empty = ledgers->empty();
  PACDP_ASSIGN_OR_RETURN(PrivacyReport report,
                         FinalReport(*ledgers, accountant));
  std::string out = "client_id,epsilon,alpha\n";
  for (const ClientEpsilon& c : report.clients) {
    absl::StrAppendFormat(&out, "%d,%.9g,%d\n", c.client_id, c.epsilon,
                          c.alpha);
  }
  if (!report.clients.empty()) {
    absl::StrAppendFormat(&out, "min,%.9g,\nmedian,%.9g,\nmax,%.9g,\n",
                          report.min_epsilon, report.median_epsilon,
                          report.max_epsilon);
  }
  return out;
}

absl::StatusOr<std::string> CmdReport(const std::string& bundle_dir) {
  const std::string history_path = PathIn(bundle_dir, kHistoryFile);
  const std::string summary_path = PathIn(bundle_dir, kSummaryFile);
  auto history_text = ReadFile(history_path);
  if (!history_text.ok()) {
    return absl::NotFoundError(absl::StrCat(
        "missing history file ", history_path, " (run `train` with --out ",
        bundle_dir, " first)"));
  }
  PACDP_ASSIGN_OR_RETURN(std::vector<HistoryRow> rows,
                         ParseHistoryCsv(*history_text));
  auto summary_text = ReadFile(summary_path);
  if (!summary_text.ok()) {
    return absl::NotFoundError(
        absl::StrCat("missing summary file ", summary_path));
  }
  ordered_json summary =
      ordered_json::parse(*summary_text, nullptr, /*allow_exceptions=*/false);
  if (summary.is_discarded()) {
    return absl::InvalidArgumentError(
        absl::StrCat(summary_path, ": not valid JSON"));
  }

  ordered_json curve = ordered_json::array();
  std::string accuracy_csv = "round,accuracy,loss,mean_clip\n";
  for (const HistoryRow& r : rows) {
    curve.push_back({{"round", r.round},
                     {"accuracy", Num(r.accuracy)},
                     {"loss", Num(r.loss)},
                     {"mean_clip", Num(r.mean_clip)}});
    absl::StrAppendFormat(&accuracy_csv, "%d,%.9g,%.9g,%.9g\n", r.round,
                          r.accuracy, r.loss, r.mean_clip);
  }

  ordered_json fit_json = nullptr;
  std::string fit_csv = "epsilon,clip\n";
  const std::string fit_path = PathIn(bundle_dir, kFitFile);
  if (std::filesystem::exists(fit_path)) {
    PACDP_ASSIGN_OR_RETURN(std::string text, ReadFile(fit_path));
    PACDP_ASSIGN_OR_RETURN(FitResult fit, ParseFitResult(text));
    double lo = fit.support.front().epsilon, hi = lo;
    ordered_json support = ordered_json::array();
    for (const SupportPoint& p : fit.support) {
      lo = std::min(lo, p.epsilon);
      hi = std::max(hi, p.epsilon);
      support.push_back({{"epsilon", Num(p.epsilon)}, {"clip", Num(p.clip)}});
    }
    ordered_json samples = ordered_json::array();
    for (int k = 0; k < kCurveSamples; ++k) {
      double eps = lo + (hi - lo) * k / (kCurveSamples - 1);
      double clip = EvaluateF(fit, eps);
      samples.push_back({{"epsilon", Num(eps)}, {"clip", Num(clip)}});
      absl::StrAppendFormat(&fit_csv, "%.9g,%.9g\n", eps, clip);
    }
    fit_json = {{"alpha", Num(fit.alpha)},
                {"beta", Num(fit.beta)},
                {"gamma", Num(fit.gamma)},
                {"r2", Num(fit.r2)},
                {"clamp_floor", Num(fit.clamp_floor)},
                {"monotone", fit.monotone.enabled},
                {"support", support},
                {"curve", samples}};
  }

  ordered_json report = {{"accuracy_curve", curve},
                         {"fit", fit_json},
                         {"summary", summary}};
  const std::string report_path = PathIn(bundle_dir, kReportFile);
  PACDP_RETURN_IF_ERROR(WriteFile(report_path, report.dump(2) + "\n"));
  PACDP_RETURN_IF_ERROR(
      WriteFile(PathIn(bundle_dir, kAccuracyCurveFile), accuracy_csv));
  PACDP_RETURN_IF_ERROR(WriteFile(PathIn(bundle_dir, kFitCurveFile), fit_csv));
  return report_path;
}

}  // namespace pacdp
