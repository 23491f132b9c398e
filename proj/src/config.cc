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

#include "pacdp/config.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "absl/strings/match.h"
#include "absl/strings/str_cat.h"
#include "absl/strings/str_join.h"
#include "json.hpp"
#include "pacdp/schedule.h"
#include "pacdp/status_macros.h"

namespace pacdp {
namespace {

using nlohmann::json;

std::string Join(const std::string& path, const std::string& key) {
  return path.empty() ? key : absl::StrCat(path, ".", key);
}

// Strict accessor over one JSON object: every key must be read exactly once
// by Required/Optional/Section, everything else is reported as unknown.
class Reader {
 public:
  Reader(const json* object, std::string path, std::vector<std::string>* errors)
      : object_(object), path_(std::move(path)), errors_(errors) {}

  template <typename T>
  void Required(const std::string& key, T* out) {
    if (!Has(key)) {
      Error(key, "is required");
      return;
    }
    Read(key, out);
  }

  template <typename T>
  void Optional(const std::string& key, T* out) {
    if (Has(key)) Read(key, out);
  }

  // Nested object; nullopt when absent or not an object (the latter is
  // reported).
  std::optional<Reader> Section(const std::string& key, bool required) {
    if (!Has(key)) {
      if (required) Error(key, "section is required");
      return std::nullopt;
    }
    seen_.insert(key);
    const json& value = object_->at(key);
    if (!value.is_object()) {
      Error(key, "must be an object");
      return std::nullopt;
    }
    return Reader(&value, Join(path_, key), errors_);
  }

  const json* Raw(const std::string& key) {
    if (!Has(key)) return nullptr;
    seen_.insert(key);
    return &object_->at(key);
  }

  bool Has(const std::string& key) const { return object_->contains(key); }

  void Error(const std::string& key, const std::string& message) {
    errors_->push_back(absl::StrCat(Join(path_, key), ": ", message));
  }

  void Finish() {
    for (const auto& item : object_->items()) {
      if (!seen_.count(item.key())) Error(item.key(), "unknown key");
    }
  }

  const std::string& path() const { return path_; }
  std::vector<std::string>* errors() const { return errors_; }

 private:
  void Read(const std::string& key, double* out) {
    seen_.insert(key);
    const json& v = object_->at(key);
    if (!v.is_number()) return Error(key, "must be a number");
    *out = v.get<double>();
    if (!std::isfinite(*out)) Error(key, "must be finite");
  }
  void Read(const std::string& key, bool* out) {
    seen_.insert(key);
    const json& v = object_->at(key);
    if (!v.is_boolean()) return Error(key, "must be true or false");
    *out = v.get<bool>();
  }
  void Read(const std::string& key, std::string* out) {
    seen_.insert(key);
    const json& v = object_->at(key);
    if (!v.is_string()) return Error(key, "must be a string");
    *out = v.get<std::string>();
  }
  template <typename Int>
    requires std::is_integral_v<Int>
  void Read(const std::string& key, Int* out) {
    seen_.insert(key);
    const json& v = object_->at(key);
    if (!v.is_number_integer()) return Error(key, "must be an integer");
    if (std::is_unsigned_v<Int> && v.is_number_integer() &&
        !v.is_number_unsigned()) {
      return Error(key, "must be non-negative");
    }
    *out = v.get<Int>();
  }
  void Read(const std::string& key, std::vector<double>* out) {
    seen_.insert(key);
    const json& v = object_->at(key);
    if (!v.is_array()) return Error(key, "must be an array of numbers");
    out->clear();
    for (const json& e : v) {
      if (!e.is_number()) return Error(key, "must be an array of numbers");
      out->push_back(e.get<double>());
    }
  }
  void Read(const std::string& key, std::vector<int>* out) {
    seen_.insert(key);
    const json& v = object_->at(key);
    if (!v.is_array()) return Error(key, "must be an array of integers");
    out->clear();
    for (const json& e : v) {
      if (!e.is_number_integer()) {
        return Error(key, "must be an array of integers");
      }
      out->push_back(e.get<int>());
    }
  }

  const json* object_;
  std::string path_;
  std::vector<std::string>* errors_;
  std::set<std::string> seen_;
};

// Parses JSON, reporting duplicate keys instead of letting the last one win.
json ParseStrict(const std::string& text, std::vector<std::string>* errors) {
  struct Frame {
    std::set<std::string> keys;
    std::string path;
    std::string current_key;
  };
  std::vector<Frame> frames;
  json::parser_callback_t callback = [&](int, json::parse_event_t event,
                                         json& parsed) {
    switch (event) {
      case json::parse_event_t::object_start: {
        std::string path;
        if (!frames.empty()) {
          path = Join(frames.back().path, frames.back().current_key);
        }
        frames.push_back({{}, path, ""});
        break;
      }
      case json::parse_event_t::key: {
        std::string key = parsed.get<std::string>();
        if (!frames.back().keys.insert(key).second) {
          errors->push_back(absl::StrCat(Join(frames.back().path, key),
                                         ": duplicate key"));
        }
        frames.back().current_key = key;
        break;
      }
      case json::parse_event_t::object_end:
        frames.pop_back();
        break;
      default:
        break;
    }
    return true;
  };
  try {
    return json::parse(text, callback);
  } catch (const json::parse_error& e) {
    errors->push_back(absl::StrCat("config is not valid JSON: ", e.what()));
    return json();
  }
}

void ReadDataset(Reader& r, RunConfig& config) {
  DatasetRecipe& d = config.dataset;
  r.Required("source", &d.source);
  if (d.source == "synthetic") {
    std::string task;
    r.Required("task", &task);
    if (!task.empty()) {
      auto parsed = ParseSyntheticTask(task);
      if (parsed.ok()) {
        d.task = *parsed;
      } else {
        r.Error("task", std::string(parsed.status().message()));
      }
    }
    r.Required("examples", &d.examples);
    r.Required("dim", &d.dim);
  } else if (d.source == "csv") {
    r.Required("csv_path", &d.csv_path);
  } else if (!d.source.empty()) {
    r.Error("source", "must be \"synthetic\" or \"csv\"");
  }
  r.Required("test_fraction", &d.test_fraction);
  r.Required("skew", &d.skew);
  r.Finish();
}

void ReadModel(Reader& r, RunConfig& config) {
  std::string kind;
  r.Required("kind", &kind);
  auto parsed = ParseModelKind(kind);
  if (!parsed.ok()) {
    if (!kind.empty()) r.Error("kind", std::string(parsed.status().message()));
    r.Finish();
    return;
  }
  ModelSpec& m = config.model;
  m.kind = *parsed;
  if (m.kind == ModelKind::kQuadratic) {
    const json* a = r.Raw("quadratic_a");
    r.Required("quadratic_b", &m.quadratic_b);
    if (a == nullptr) {
      r.Error("quadratic_a", "is required");
    } else {
      for (const json& row : *a) {
        if (!row.is_array()) {
          r.Error("quadratic_a", "must be an array of rows");
          break;
        }
        for (const json& v : row) {
          if (!v.is_number()) {
            r.Error("quadratic_a", "entries must be numbers");
            break;
          }
          m.quadratic_a.push_back(v.get<double>());
        }
      }
    }
    m.input_dim = m.quadratic_b.size();
    m.classes = 0;
  } else {
    r.Required("input_dim", &m.input_dim);
    if (m.kind == ModelKind::kSoftmaxLinear || m.kind == ModelKind::kMlp1Hidden) {
      r.Required("classes", &m.classes);
    }
    if (m.kind == ModelKind::kMlp1Hidden) r.Required("hidden", &m.hidden);
  }
  r.Finish();
  if (auto count = ParameterCount(m); !count.ok()) {
    r.Error("kind", std::string(count.status().message()));
  }
}

void ReadFederation(Reader& r, RunConfig& config) {
  r.Required("clients", &config.clients);
  r.Required("clients_per_round", &config.clients_per_round);
  r.Required("rounds", &config.rounds);
  r.Required("local_steps", &config.local_steps);
  r.Required("batch_size", &config.batch_size);
  r.Required("learning_rate", &config.learning_rate);
  r.Optional("literal_aggregation", &config.literal_aggregation);
  r.Optional("threads", &config.threads);
  r.Finish();
}

void ReadPrivacy(Reader& r, RunConfig& config) {
  r.Optional("delta", &config.accountant.delta);
  r.Optional("alpha_grid", &config.accountant.alpha_grid);
  const json* budgets = r.Raw("budgets");
  if (budgets == nullptr) {
    r.Error("budgets", "is required");
  } else if (!budgets->is_array() || budgets->empty()) {
    r.Error("budgets", "must be a non-empty array");
  } else {
    for (size_t i = 0; i < budgets->size(); ++i) {
      const json& item = (*budgets)[i];
      std::string path = absl::StrCat(Join(r.path(), "budgets"), "[", i, "]");
      if (!item.is_object()) {
        r.Error(absl::StrCat("budgets[", i, "]"), "must be an object");
        continue;
      }
      Reader b(&item, path, r.errors());
      BudgetGroup group;
      b.Required("epsilon", &group.epsilon);
      b.Required("proportion", &group.proportion);
      b.Finish();
      config.budgets.push_back(group);
    }
  }
  r.Finish();
}

void ReadSchedule(Reader& r, RunConfig& config) {
  r.Optional("r_s", &config.decay_start_fraction);
  r.Optional("lambda_min", &config.lambda_min);
  r.Finish();
}

void ReadPolicy(Reader& r, RunConfig& config) {
  PolicySettings& p = config.policy;
  r.Required("kind", &p.kind);
  if (p.kind == "fixed") {
    r.Required("clip", &p.clip);
  } else if (p.kind == "quantile") {
    r.Required("clip", &p.clip);
    r.Required("quantile", &p.quantile);
    r.Required("quantile_lr", &p.quantile_lr);
  } else if (p.kind != "pacdp" && !p.kind.empty()) {
    r.Error("kind", "must be pacdp, fixed or quantile");
  }
  // Settings for the other kinds may stay in the file so that --policy can
  // switch between them.
  r.Optional("clip", &p.clip);
  r.Optional("quantile", &p.quantile);
  r.Optional("quantile_lr", &p.quantile_lr);
  r.Finish();
}

void ReadGrid(Reader& r, RunConfig& config) {
  GridSettings g;
  r.Required("epsilons", &g.epsilons);
  r.Required("clips", &g.clips);
  r.Required("clients", &g.clients);
  r.Required("clients_per_round", &g.clients_per_round);
  r.Required("rounds", &g.rounds);
  r.Required("local_steps", &g.local_steps);
  r.Required("batch_size", &g.batch_size);
  r.Required("learning_rate", &g.learning_rate);
  r.Required("skew", &g.skew);
  r.Optional("seeds_per_cell", &g.seeds_per_cell);
  r.Optional("monotone", &g.monotone);
  if (auto proxy = r.Section("proxy", /*required=*/true)) {
    std::string task;
    proxy->Required("task", &task);
    if (!task.empty()) {
      auto parsed = ParseSyntheticTask(task);
      if (parsed.ok()) {
        g.proxy_task = *parsed;
      } else {
        proxy->Error("task", std::string(parsed.status().message()));
      }
    }
    proxy->Required("examples", &g.proxy_examples);
    proxy->Required("seed", &g.proxy_seed);
    proxy->Finish();
  }
  r.Finish();
  config.grid = std::move(g);
}

void CheckStrictlyIncreasingPositive(const std::vector<double>& values,
                                     const std::string& path,
                                     std::vector<std::string>& errors) {
  for (size_t i = 0; i < values.size(); ++i) {
    if (!(values[i] > 0.0)) {
      errors.push_back(absl::StrCat(path, ": values must be positive"));
      return;
    }
    if (i > 0 && !(values[i] > values[i - 1])) {
      errors.push_back(
          absl::StrCat(path, ": values must be strictly increasing"));
      return;
    }
  }
}

void ValidateInto(const RunConfig& c, std::vector<std::string>& errors) {
  auto fail = [&](const std::string& message) { errors.push_back(message); };
  if (c.output_dir.empty()) fail("output_dir: must not be empty");
  if (c.clients < 1) fail("federation.clients: must be at least 1");
  if (c.clients_per_round < 1) {
    fail("federation.clients_per_round: must be at least 1");
  }
  if (c.clients_per_round > c.clients) {
    fail(absl::StrCat("federation.clients_per_round (K=", c.clients_per_round,
                      ") must not exceed federation.clients (N=", c.clients,
                      ")"));
  }
  if (c.rounds < 1) fail("federation.rounds: must be at least 1");
  if (c.local_steps < 1) fail("federation.local_steps: must be at least 1");
  if (c.batch_size < 1) fail("federation.batch_size: must be at least 1");
  if (!(c.learning_rate > 0.0)) {
    fail("federation.learning_rate: must be positive");
  }
  if (c.threads < 1) fail("federation.threads: must be at least 1");

  const DatasetRecipe& d = c.dataset;
  if (!(d.test_fraction > 0.0 && d.test_fraction < 1.0)) {
    fail("dataset.test_fraction: must lie in (0, 1)");
  }
  if (!(d.skew >= 0.0 && d.skew <= 1.0)) fail("dataset.skew: must lie in [0, 1]");
  if (d.source == "synthetic") {
    if (d.dim != c.model.input_dim) {
      fail(absl::StrCat("dataset.dim (", d.dim,
                        ") must equal the model input dimension (",
                        c.model.input_dim, ")"));
    }
    const double train = std::floor(static_cast<double>(d.examples) *
                                    (1.0 - d.test_fraction));
    if (train < static_cast<double>(c.clients)) {
      fail(absl::StrCat("dataset.examples (", d.examples,
                        ") leaves fewer training examples than "
                        "federation.clients (",
                        c.clients, ")"));
    }
    if (IsClassifier(c.model.kind) && d.task == SyntheticTask::kQuadratic) {
      fail("dataset.task: quadratic data needs the quadratic model");
    }
    if (c.model.kind == ModelKind::kQuadratic &&
        d.task != SyntheticTask::kQuadratic) {
      fail("dataset.task: the quadratic model needs quadratic data");
    }
  }

  if (auto status = c.accountant.Validate(); !status.ok()) {
    fail(absl::StrCat("privacy: ", status.message()));
  } else if (!(c.accountant.delta < 1.0 / std::exp(1.0))) {
    fail("privacy.delta: must be below 1/e");
  }
  double floor_eps = 0.0;
  if (c.accountant.Validate().ok()) floor_eps = EpsilonFloor(c.accountant);
  double proportion_sum = 0.0;
  for (size_t i = 0; i < c.budgets.size(); ++i) {
    const BudgetGroup& b = c.budgets[i];
    if (!(b.epsilon > floor_eps)) {
      fail(absl::StrCat("privacy.budgets[", i, "].epsilon: ", b.epsilon,
                        " must exceed the accountant floor ", floor_eps,
                        " = ln(1/delta)/(alpha_max-1)"));
    }
    if (!(b.proportion > 0.0)) {
      fail(absl::StrCat("privacy.budgets[", i, "].proportion: must be positive"));
    }
    proportion_sum += b.proportion;
  }
  if (!c.budgets.empty() && std::abs(proportion_sum - 1.0) > 1e-9) {
    fail(absl::StrCat("privacy.budgets: proportions sum to ", proportion_sum,
                      ", expected 1"));
  }

  if (auto s = ScheduleParams::Create(c.rounds > 0 ? c.rounds : 1,
                                      c.decay_start_fraction, c.lambda_min);
      !s.ok()) {
    fail(absl::StrCat("schedule: ", s.status().message()));
  }

  const PolicySettings& p = c.policy;
  if (p.kind == "fixed" || p.kind == "quantile") {
    if (!(p.clip > 0.0)) fail("policy.clip: must be positive");
  }
  if (p.kind == "quantile") {
    if (!(p.quantile > 0.0 && p.quantile < 1.0)) {
      fail("policy.quantile: must lie in (0, 1)");
    }
    if (!(p.quantile_lr > 0.0)) fail("policy.quantile_lr: must be positive");
  }
  if (p.kind != "pacdp" && p.kind != "fixed" && p.kind != "quantile") {
    fail("policy.kind: must be pacdp, fixed or quantile");
  }

  if (c.grid) {
    const GridSettings& g = *c.grid;
    if (g.epsilons.size() < 3) fail("grid.epsilons: need at least 3 budgets");
    if (g.clips.size() < 2) fail("grid.clips: need at least 2 clip values");
    CheckStrictlyIncreasingPositive(g.epsilons, "grid.epsilons", errors);
    CheckStrictlyIncreasingPositive(g.clips, "grid.clips", errors);
    for (double e : g.epsilons) {
      if (e > 0.0 && !(e > floor_eps)) {
        fail(absl::StrCat("grid.epsilons: ", e,
                          " must exceed the accountant floor ", floor_eps));
        break;
      }
    }
    if (g.clients < 1) fail("grid.clients: must be at least 1");
    if (g.clients_per_round < 1 || g.clients_per_round > g.clients) {
      fail(absl::StrCat("grid.clients_per_round (K=", g.clients_per_round,
                        ") must lie in [1, grid.clients (N=", g.clients,
                        ")]"));
    }
    if (g.rounds < 1) fail("grid.rounds: must be at least 1");
    if (g.local_steps < 1) fail("grid.local_steps: must be at least 1");
    if (g.batch_size < 1) fail("grid.batch_size: must be at least 1");
    if (!(g.learning_rate > 0.0)) fail("grid.learning_rate: must be positive");
    if (!(g.skew >= 0.0 && g.skew <= 1.0)) fail("grid.skew: must lie in [0, 1]");
    if (g.seeds_per_cell < 1) fail("grid.seeds_per_cell: must be at least 1");
    if (!IsClassifier(c.model.kind)) {
      fail("grid: curve fitting scores accuracy and needs a classifier model");
    }
    if (g.proxy_task == SyntheticTask::kQuadratic) {
      fail("grid.proxy.task: must be a classification task");
    }
    const double train = std::floor(static_cast<double>(g.proxy_examples) *
                                    (1.0 - d.test_fraction));
    if (train < static_cast<double>(g.clients)) {
      fail(absl::StrCat("grid.proxy.examples (", g.proxy_examples,
                        ") leaves fewer training examples than grid.clients (",
                        g.clients, ")"));
    }
  }
}

// The dotted field path an error message starts with.
std::string LeadingPath(absl::string_view message) {
  const size_t end = message.find_first_of(": (");
  return std::string(message.substr(0, end));
}

absl::Status ErrorsToStatus(const std::vector<std::string>& errors) {
  if (errors.empty()) return absl::OkStatus();
  return absl::InvalidArgumentError(absl::StrCat(
      "invalid config (", errors.size(), " problem",
      errors.size() == 1 ? "" : "s", "):\n  ", absl::StrJoin(errors, "\n  ")));
}

}  // namespace

absl::StatusOr<RunConfig> ParseRunConfig(const std::string& text) {
  std::vector<std::string> errors;
  json doc = ParseStrict(text, &errors);
  if (!errors.empty() && doc.is_null()) return ErrorsToStatus(errors);
  if (!doc.is_object()) {
    errors.push_back("config: top level must be an object");
    return ErrorsToStatus(errors);
  }
  RunConfig config;
  Reader root(&doc, "", &errors);
  root.Required("seed", &config.seed);
  root.Required("output_dir", &config.output_dir);
  if (auto r = root.Section("model", true)) ReadModel(*r, config);
  if (auto r = root.Section("dataset", true)) ReadDataset(*r, config);
  if (auto r = root.Section("federation", true)) ReadFederation(*r, config);
  if (auto r = root.Section("privacy", true)) ReadPrivacy(*r, config);
  if (auto r = root.Section("schedule", false)) ReadSchedule(*r, config);
  if (auto r = root.Section("policy", true)) ReadPolicy(*r, config);
  if (auto r = root.Section("grid", false)) ReadGrid(*r, config);
  root.Finish();
  // Value checks run even after structural errors so that one pass reports
  // everything, but fields that already failed to read are not re-reported.
  std::vector<std::string> checks;
  ValidateInto(config, checks);
  const std::vector<std::string> structural = errors;
  for (const std::string& check : checks) {
    const std::string path = LeadingPath(check);
    bool duplicate = false;
    for (const std::string& e : structural) {
      const std::string other = LeadingPath(e);
      if (absl::StartsWith(path, other) || absl::StartsWith(other, path)) {
        duplicate = true;
        break;
      }
    }
    if (!duplicate) errors.push_back(check);
  }
  PACDP_RETURN_IF_ERROR(ErrorsToStatus(errors));
  return config;
}

absl::StatusOr<RunConfig> LoadRunConfig(const std::string& path) {
  std::ifstream in(path);
  if (!in) return absl::NotFoundError(absl::StrCat("cannot open config ", path));
  std::stringstream buffer;
  buffer << in.rdbuf();
  auto config = ParseRunConfig(buffer.str());
  if (!config.ok()) {
    return absl::Status(config.status().code(),
                        absl::StrCat(path, ": ", config.status().message()));
  }
  return config;
}

absl::Status ValidateRunConfig(const RunConfig& config) {
  std::vector<std::string> errors;
  ValidateInto(config, errors);
  return ErrorsToStatus(errors);
}

std::vector<double> AssignBudgets(std::span<const BudgetGroup> groups,
                                  size_t num_clients) {
  std::vector<double> out;
  out.reserve(num_clients);
  double cumulative = 0.0;
  size_t assigned = 0;
  for (size_t g = 0; g < groups.size(); ++g) {
    cumulative += groups[g].proportion;
    size_t end = g + 1 == groups.size()
                     ? num_clients
                     : std::min(num_clients,
                                static_cast<size_t>(std::llround(
                                    cumulative *
                                    static_cast<double>(num_clients))));
    for (; assigned < end; ++assigned) out.push_back(groups[g].epsilon);
  }
  return out;
}

}  // namespace pacdp
