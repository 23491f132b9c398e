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

// Command-line driver: fit, train, account, report, schedule-dump.

#include <cstdint>
#include <cstdio>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "pacdp/commands.h"
#include "pacdp/config.h"
#include "pacdp/schedule.h"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitRuntime = 3;

int Fail(int code, const absl::Status& status) {
  std::cerr << "error: " << status.message() << "\n";
  return code;
}

struct Flags {
  std::string config_path;
  std::optional<uint64_t> seed;
  std::optional<std::string> out;
  std::optional<std::string> policy;
  std::optional<double> clip;
  std::optional<double> delta;
  std::optional<std::string> fit_path;
  std::string ledger_path;
  std::string bundle_dir;
  std::optional<int64_t> rounds;
  std::optional<double> r_s;
  std::optional<double> lambda_min;
};

void AddOverrideFlags(CLI::App* cmd, Flags* f) {
  cmd->add_option("--config", f->config_path, "run config (JSON)")->required();
  cmd->add_option("--seed", f->seed, "master seed");
  cmd->add_option("--out", f->out, "output directory");
  cmd->add_option("--policy", f->policy, "clipping policy")
      ->check(CLI::IsMember({"pacdp", "fixed", "quantile"}));
  cmd->add_option("--clip", f->clip, "clip bound for the fixed policy");
  cmd->add_option("--delta", f->delta, "target delta");
}

// Loads the config and applies flag overrides. Any failure is a config error.
absl::StatusOr<pacdp::RunConfig> LoadConfig(const Flags& f) {
  absl::StatusOr<pacdp::RunConfig> config = pacdp::LoadRunConfig(f.config_path);
  if (!config.ok()) return config.status();
  pacdp::CommandOverrides overrides;
  overrides.seed = f.seed;
  overrides.output_dir = f.out;
  overrides.policy = f.policy;
  overrides.clip = f.clip;
  overrides.delta = f.delta;
  return pacdp::ApplyOverrides(*std::move(config), overrides);
}

int RunFit(const Flags& f) {
  auto config = LoadConfig(f);
  if (!config.ok()) return Fail(kExitConfig, config.status());
  auto out = pacdp::CmdFit(*config);
  if (!out.ok()) {
    return Fail(absl::IsInvalidArgument(out.status()) ? kExitConfig
                                                      : kExitRuntime,
                out.status());
  }
  std::printf("fit: alpha=%.9g beta=%.9g gamma=%.9g r2=%.9g\n", out->fit.alpha,
              out->fit.beta, out->fit.gamma, out->fit.r2);
  std::printf("wrote %s\nwrote %s\n", out->matrix_path.c_str(),
              out->fit_path.c_str());
  return kExitOk;
}

int RunTrain(const Flags& f) {
  auto config = LoadConfig(f);
  if (!config.ok()) return Fail(kExitConfig, config.status());
  auto out = pacdp::CmdTrain(*config, f.fit_path);
  if (!out.ok()) {
    return Fail(absl::IsInvalidArgument(out.status()) ? kExitConfig
                                                      : kExitRuntime,
                out.status());
  }
  const auto& history = out->result.history;
  if (!history.empty()) {
    std::printf("final loss=%.9g accuracy=%.9g\n", history.back().loss,
                history.back().accuracy);
  }
  std::printf("epsilon min=%.9g median=%.9g max=%.9g\n",
              out->privacy.min_epsilon, out->privacy.median_epsilon,
              out->privacy.max_epsilon);
  std::printf("wrote %s\nwrote %s\nwrote %s\n", out->history_path.c_str(),
              out->ledger_path.c_str(), out->summary_path.c_str());
  return kExitOk;
}

int RunAccount(const Flags& f) {
  pacdp::AccountantConfig accountant;
  if (f.delta) accountant.delta = *f.delta;
  if (absl::Status s = accountant.Validate(); !s.ok()) {
    return Fail(kExitConfig, s);
  }
  bool empty = false;
  auto table = pacdp::CmdAccount(f.ledger_path, accountant, &empty);
  if (!table.ok()) return Fail(kExitRuntime, table.status());
  if (empty) std::cerr << "warning: ledger " << f.ledger_path << " is empty\n";
  std::cout << *table;
  return kExitOk;
}

int RunReport(const Flags& f) {
  auto path = pacdp::CmdReport(f.bundle_dir);
  if (!path.ok()) return Fail(kExitRuntime, path.status());
  std::printf("wrote %s\n", path->c_str());
  return kExitOk;
}

int RunScheduleDump(const Flags& f) {
  int64_t rounds = 0;
  double r_s = 0.6, lambda_min = 0.1;
  if (!f.config_path.empty()) {
    auto config = LoadConfig(f);
    if (!config.ok()) return Fail(kExitConfig, config.status());
    rounds = config->rounds;
    r_s = config->decay_start_fraction;
    lambda_min = config->lambda_min;
  }
  if (f.rounds) rounds = *f.rounds;
  if (f.r_s) r_s = *f.r_s;
  if (f.lambda_min) lambda_min = *f.lambda_min;
  auto params = pacdp::ScheduleParams::Create(rounds, r_s, lambda_min);
  if (!params.ok()) return Fail(kExitConfig, params.status());
  std::cout << pacdp::ScheduleTableCsv(*params);
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Personalized adaptive-clipping DP federated learning"};
  app.require_subcommand(1);
  Flags f;

  CLI::App* fit = app.add_subcommand("fit", "simulate the grid and fit C(eps)");
  AddOverrideFlags(fit, &f);

  CLI::App* train = app.add_subcommand("train", "run federated training");
  AddOverrideFlags(train, &f);
  train->add_option("--fit", f.fit_path, "fit file (default: <out>/fit.json)");

  CLI::App* account =
      app.add_subcommand("account", "per-client epsilon from a ledger");
  account->add_option("--ledger", f.ledger_path, "ledger CSV")->required();
  account->add_option("--delta", f.delta, "target delta");

  CLI::App* report =
      app.add_subcommand("report", "consolidate a run directory for plotting");
  report->add_option("--out", f.bundle_dir, "run directory")->required();

  CLI::App* dump =
      app.add_subcommand("schedule-dump", "print the clip schedule as CSV");
  dump->add_option("--config", f.config_path, "run config (JSON)");
  dump->add_option("--rounds", f.rounds, "total rounds");
  dump->add_option("--r-s", f.r_s, "decay start fraction");
  dump->add_option("--lambda-min", f.lambda_min, "schedule floor");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }

  if (fit->parsed()) return RunFit(f);
  if (train->parsed()) return RunTrain(f);
  if (account->parsed()) return RunAccount(f);
  if (report->parsed()) return RunReport(f);
  return RunScheduleDump(f);
}
