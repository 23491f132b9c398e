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

#include "pacdp/federation.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <thread>

#include "absl/strings/str_cat.h"
#include "pacdp/status_macros.h"

namespace pacdp {

absl::Status FederationConfig::Validate() const {
  if (num_clients == 0) {
    return absl::InvalidArgumentError("num_clients must be at least 1");
  }
  if (clients_per_round < 1 || clients_per_round > num_clients) {
    return absl::InvalidArgumentError(absl::StrCat(
        "clients_per_round (", clients_per_round,
        ") must lie in [1, num_clients = ", num_clients, "]"));
  }
  if (rounds < 0) return absl::InvalidArgumentError("rounds must be >= 0");
  if (local_steps < 1) {
    return absl::InvalidArgumentError("local_steps must be at least 1");
  }
  if (batch_size < 1) {
    return absl::InvalidArgumentError("batch_size must be at least 1");
  }
  if (!(learning_rate > 0.0) || !std::isfinite(learning_rate)) {
    return absl::InvalidArgumentError("learning_rate must be positive");
  }
  if (threads < 1) return absl::InvalidArgumentError("threads must be >= 1");
  PACDP_RETURN_IF_ERROR(ParameterCount(model).status());
  PACDP_RETURN_IF_ERROR(ValidatePolicy(policy));
  PACDP_RETURN_IF_ERROR(accountant.Validate());
  return absl::OkStatus();
}

double RoundRecord::MeanClip() const {
  if (clip_bounds.empty()) return 0.0;
  double sum = 0.0;
  for (double c : clip_bounds) sum += c;
  return sum / static_cast<double>(clip_bounds.size());
}

absl::StatusOr<std::vector<size_t>> SampleClients(size_t n, size_t k,
                                                  RandomStream& stream) {
  if (k < 1 || k > n) {
    return absl::InvalidArgumentError(
        absl::StrCat("cannot sample ", k, " of ", n, " clients"));
  }
  std::vector<size_t> chosen = stream.SampleWithoutReplacement(n, k);
  std::sort(chosen.begin(), chosen.end());
  return chosen;
}

absl::StatusOr<LocalUpdateResult> LocalUpdate(const Model& model,
                                              const ClientProfile& client,
                                              const ParamVector& global,
                                              ClipBound clip, int64_t round,
                                              const FederationConfig& config) {
  if (client.dataset.empty()) {
    return absl::FailedPreconditionError(
        absl::StrCat("client ", client.id, " has no data"));
  }
  if (!(client.noise_multiplier > 0.0)) {
    return absl::FailedPreconditionError(absl::StrCat(
        "client ", client.id, " has no calibrated noise multiplier"));
  }
  const size_t dim = model.num_params();
  const size_t batch = std::min(config.batch_size, client.dataset.size());
  const uint64_t id = static_cast<uint64_t>(client.id);
  const uint64_t t = static_cast<uint64_t>(round);
  const NoiseSpec noise{client.noise_multiplier, batch, clip};
  const double stddev = client.noise_multiplier * Sensitivity(noise);
  const double c = clip.value();

  LocalUpdateResult result;
  result.params = global;
  std::vector<double> grad(dim), sum(dim);
  for (int64_t step = 0; step < config.local_steps; ++step) {
    const uint64_t s = static_cast<uint64_t>(step);
    RandomStream batch_stream =
        RandomStream::For(config.seed, StreamDomain::kMinibatch, {id, t, s});
    RandomStream noise_stream =
        RandomStream::For(config.seed, StreamDomain::kNoise, {id, t, s});
    std::fill(sum.begin(), sum.end(), 0.0);
    for (size_t idx :
         batch_stream.SampleWithoutReplacement(client.dataset.size(), batch)) {
      model.Gradient(result.params.span(), client.dataset.examples[idx], grad);
      const double norm = L2Norm(grad);
      if (!std::isfinite(norm)) {
        return absl::InternalError(absl::StrCat(
            "client ", client.id, " round ", round, ": non-finite gradient"));
      }
      ++result.norms_seen;
      double scale = 1.0;
      if (norm <= c) {
        ++result.norms_below;
      } else {
        scale = c / norm;
      }
      Axpy(scale, grad, sum);
    }
    // g_hat = mean + N(0, (zC/b)^2); w -= eta * g_hat.
    const double inv_b = 1.0 / static_cast<double>(batch);
    for (size_t j = 0; j < dim; ++j) {
      const double noisy = sum[j] * inv_b + stddev * noise_stream.Normal();
      result.params[j] -= config.learning_rate * noisy;
    }
    if (!AllFinite(result.params.span())) {
      return absl::InternalError(absl::StrCat(
          "client ", client.id, " round ", round, ": local model diverged"));
    }
    result.ledger_delta.push_back({round, client.noise_multiplier, 1});
  }
  return result;
}

absl::StatusOr<ParamVector> AggregateLiteral(
    std::span<const WeightedParams> updates) {
  if (updates.empty()) {
    return absl::InvalidArgumentError("nothing to aggregate");
  }
  const size_t dim = updates.front().params.size();
  ParamVector out(dim);
  for (const WeightedParams& u : updates) {
    if (u.params.size() != dim) {
      return absl::InvalidArgumentError(
          "aggregated vectors have inconsistent dimension");
    }
    if (!(u.weight >= 0.0)) {
      return absl::InvalidArgumentError("aggregation weight is negative");
    }
    Axpy(u.weight, u.params.span(), out.span());
  }
  return out;
}

absl::StatusOr<ParamVector> Aggregate(std::span<const WeightedParams> updates) {
  double total = 0.0;
  for (const WeightedParams& u : updates) total += u.weight;
  if (!updates.empty() && !(total > 0.0)) {
    return absl::InvalidArgumentError("aggregation weights sum to zero");
  }
  std::vector<WeightedParams> normalized(updates.begin(), updates.end());
  for (WeightedParams& u : normalized) u.weight /= total;
  return AggregateLiteral(normalized);
}

absl::StatusOr<std::vector<ClientProfile>> MakeClients(
    std::vector<LocalDataset> datasets, std::span<const double> epsilons) {
  if (datasets.size() != epsilons.size()) {
    return absl::InvalidArgumentError(
        absl::StrCat(datasets.size(), " datasets but ", epsilons.size(),
                     " privacy budgets"));
  }
  size_t total = 0;
  for (const LocalDataset& d : datasets) {
    PACDP_RETURN_IF_ERROR(ValidateDataset(d));
    total += d.size();
  }
  std::vector<ClientProfile> clients(datasets.size());
  for (size_t i = 0; i < datasets.size(); ++i) {
    clients[i].id = static_cast<int64_t>(i);
    clients[i].weight = static_cast<double>(datasets[i].size()) /
                        static_cast<double>(total);
    clients[i].dataset = std::move(datasets[i]);
    clients[i].epsilon = epsilons[i];
  }
  return clients;
}

absl::Status CalibrateClients(std::span<ClientProfile> clients,
                              const FederationConfig& config) {
  const double expected_rounds =
      static_cast<double>(config.rounds) *
      static_cast<double>(config.clients_per_round) /
      static_cast<double>(config.num_clients);
  for (ClientProfile& client : clients) {
    if (client.noise_multiplier > 0.0) continue;
    if (expected_rounds <= 0.0) {
      // No releases are expected; any positive multiplier is valid.
      client.noise_multiplier = 1.0;
      continue;
    }
    auto z = CalibrateConstantNoiseMultiplier(
        client.epsilon, expected_rounds, config.local_steps,
        config.accountant);
    if (!z.ok()) {
      return absl::Status(z.status().code(),
                          absl::StrCat("client ", client.id, ": ",
                                       z.status().message()));
    }
    client.noise_multiplier = *z;
  }
  return absl::OkStatus();
}

namespace {

struct Evaluation {
  double loss;
  double accuracy;
};

Evaluation Evaluate(const Model& model, const ParamVector& params,
                    std::span<const ClientProfile> clients,
                    const LocalDataset* eval) {
  Evaluation out{0.0, 0.0};
  double weight_sum = 0.0;
  for (const ClientProfile& c : clients) weight_sum += c.weight;
  for (const ClientProfile& c : clients) {
    out.loss += c.weight / weight_sum * MeanLoss(model, params.span(), c.dataset);
  }
  if (!IsClassifier(model.spec().kind)) {
    out.accuracy = std::numeric_limits<double>::quiet_NaN();
  } else if (eval != nullptr) {
    out.accuracy = MeanAccuracy(model, params.span(), *eval);
  } else {
    for (const ClientProfile& c : clients) {
      out.accuracy +=
          c.weight / weight_sum * MeanAccuracy(model, params.span(), c.dataset);
    }
  }
  return out;
}

}  // namespace

absl::StatusOr<TrainingResult> RunTraining(const FederationConfig& config,
                                           std::vector<ClientProfile> clients,
                                           const LocalDataset* eval) {
  PACDP_RETURN_IF_ERROR(config.Validate());
  if (clients.size() != config.num_clients) {
    return absl::InvalidArgumentError(
        absl::StrCat("config declares ", config.num_clients, " clients but ",
                     clients.size(), " were supplied"));
  }
  PACDP_ASSIGN_OR_RETURN(Model model, Model::Create(config.model));
  for (size_t i = 0; i < clients.size(); ++i) {
    if (clients[i].id != static_cast<int64_t>(i)) {
      return absl::InvalidArgumentError("client ids must be 0..N-1 in order");
    }
    if (clients[i].dataset.empty()) {
      return absl::InvalidArgumentError(
          absl::StrCat("client ", i, " has an empty dataset"));
    }
    for (const Example& x : clients[i].dataset.examples) {
      PACDP_RETURN_IF_ERROR(model.CheckExample(x));
    }
  }
  if (eval != nullptr) {
    for (const Example& x : eval->examples) {
      PACDP_RETURN_IF_ERROR(model.CheckExample(x));
    }
  }
  PACDP_RETURN_IF_ERROR(CalibrateClients(std::span<ClientProfile>(clients),
                                         config));

  TrainingResult result;
  result.params = model.Init(config.seed);
  for (const ClientProfile& c : clients) {
    result.ledgers.emplace_back(c.id);
    result.noise_multipliers.push_back(c.noise_multiplier);
  }
  ClippingPolicy policy = config.policy;
  const size_t dim = model.num_params();

  for (int64_t t = 0; t < config.rounds; ++t) {
    RoundRecord record;
    record.round = t;
    RandomStream sampler = RandomStream::For(
        config.seed, StreamDomain::kClientSampling, {static_cast<uint64_t>(t)});
    PACDP_ASSIGN_OR_RETURN(
        std::vector<size_t> sampled,
        SampleClients(config.num_clients, config.clients_per_round, sampler));

    std::vector<ClipBound> bounds;
    for (size_t i : sampled) {
      PACDP_ASSIGN_OR_RETURN(ClipBound bound,
                             PolicyClipBound(policy, clients[i].epsilon, t));
      bounds.push_back(bound);
      record.sampled.push_back(clients[i].id);
      record.clip_bounds.push_back(bound.value());
    }

    std::vector<std::optional<absl::StatusOr<LocalUpdateResult>>> slots(
        sampled.size());
    auto work = [&](size_t slot) {
      slots[slot] = LocalUpdate(model, clients[sampled[slot]], result.params,
                                bounds[slot], t, config);
    };
    const size_t workers = std::min(config.threads, sampled.size());
    if (workers <= 1) {
      for (size_t s = 0; s < sampled.size(); ++s) work(s);
    } else {
      std::vector<std::thread> pool;
      for (size_t w = 0; w < workers; ++w) {
        pool.emplace_back([&, w] {
          for (size_t s = w; s < sampled.size(); s += workers) work(s);
        });
      }
      for (std::thread& th : pool) th.join();
    }

    // Merge in sampled order so the outcome is independent of scheduling.
    std::vector<WeightedParams> uploads;
    size_t below = 0, seen = 0;
    for (size_t s = 0; s < sampled.size(); ++s) {
      absl::StatusOr<LocalUpdateResult>& outcome = *slots[s];
      if (!outcome.ok()) {
        ++record.failed_clients;
        continue;
      }
      ClientProfile& client = clients[sampled[s]];
      for (const LedgerEntry& e : outcome->ledger_delta) {
        PACDP_RETURN_IF_ERROR(result.ledgers[client.id].Append(e));
      }
      below += outcome->norms_below;
      seen += outcome->norms_seen;
      uploads.push_back({client.weight, std::move(outcome->params)});
    }
    record.messages = sampled.size();
    record.payload_floats = sampled.size() * dim;

    ParamVector previous = result.params;
    if (uploads.empty()) {
      record.carried_over = true;
    } else if (config.literal_aggregation) {
      PACDP_ASSIGN_OR_RETURN(result.params, AggregateLiteral(uploads));
    } else {
      PACDP_ASSIGN_OR_RETURN(result.params, Aggregate(uploads));
    }
    if (auto* quantile = std::get_if<QuantilePolicy>(&policy)) {
      *quantile = QuantilePolicyUpdate(*quantile, below, seen);
    }
    record.update_norm = L2Distance(previous.span(), result.params.span());
    Evaluation ev = Evaluate(model, result.params, clients, eval);
    record.loss = ev.loss;
    record.accuracy = ev.accuracy;
    result.history.push_back(std::move(record));
  }
  return result;
}

CommunicationReport SummarizeCommunication(
    std::span<const RoundRecord> history) {
  CommunicationReport report;
  for (const RoundRecord& r : history) {
    report.total_messages += r.messages;
    report.total_floats += r.payload_floats;
  }
  if (!history.empty()) {
    const double rounds = static_cast<double>(history.size());
    report.messages_per_round =
        static_cast<double>(report.total_messages) / rounds;
    report.floats_per_round = static_cast<double>(report.total_floats) / rounds;
  }
  return report;
}

}  // namespace pacdp
