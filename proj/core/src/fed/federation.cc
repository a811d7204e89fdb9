// Copyright 2026 The PSR-Lab Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "psrlab/fed/federation.h"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <numeric>
#include <string>

#include "psrlab/attack/poison.h"
#include "psrlab/data/split.h"
#include "psrlab/nn/classifier.h"
#include "psrlab/nn/loss.h"
#include "psrlab/nn/optimizer.h"
#include "psrlab/util/error.h"
#include "psrlab/util/parallel.h"
#include "psrlab/util/rng.h"

namespace psrlab::fed {
namespace {

// Stream tags for DeriveSeed paths.
constexpr std::uint64_t kShuffleStream = 1;
constexpr std::uint64_t kSampleStream = 2;
constexpr std::uint64_t kNoiseStream = 3;
constexpr std::uint64_t kAttackStream = 4;

void CheckLoss(double loss) {
  Require(std::isfinite(loss), ErrorCode::kNonFinite,
          "local training diverged: non-finite loss");
}

std::vector<std::size_t> Shuffled(std::size_t n, std::uint64_t seed) {
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  Rng rng(seed);
  for (std::size_t i = n; i > 1; --i) std::swap(order[i - 1], order[rng.Index(i)]);
  return order;
}

// Replaces the first `count` rows of `x` with adversarial versions crafted
// against the current model, keeping the true labels.
void MixAdversarial(const nn::Model& model, const attack::AttackConfig& base,
                    std::uint64_t seed, std::span<const std::size_t> origin,
                    std::span<const std::size_t> labels, std::size_t count,
                    int workers, nn::Tensor& x) {
  if (count == 0) return;
  attack::AttackConfig cfg = base;
  cfg.seed = seed;
  const nn::Classifier classifier(model);
  const nn::Tensor head = x.Slice(0, count);
  attack::AdversarialBatch adv =
      attack::RunAttack(classifier, head, labels.first(count), cfg,
                        origin.first(count), workers);
  if (cfg.method == attack::Method::kFab) attack::ProjectToBudget(head, cfg.eps, adv.x_adv);
  std::copy(adv.x_adv.data().begin(), adv.x_adv.data().end(), x.data().begin());
}

double TrainStandardEpoch(const data::DataSet& data, nn::Model& model,
                          nn::SgdOptimizer& opt, const LocalTrainSpec& spec,
                          int epoch, LocalTrainResult& result) {
  const std::size_t b = spec.optimizer.batch_size;
  const std::vector<std::size_t> order =
      Shuffled(data.size(), DeriveSeed(spec.seed, {kShuffleStream, std::uint64_t(epoch)}));
  double loss_sum = 0.0;
  std::size_t batches = 0;
  for (std::size_t begin = 0; begin < order.size(); begin += b) {
    const std::span<const std::size_t> idx(order.data() + begin,
                                           std::min(b, order.size() - begin));
    nn::Tensor x = data.Images(idx);
    const nn::Labels y = data.Labels(idx);
    if (UsesAdversarial(spec.mode)) {
      const auto count = static_cast<std::size_t>(
          std::llround(spec.adv_train_fraction * static_cast<double>(idx.size())));
      MixAdversarial(model, *spec.adversarial,
                     DeriveSeed(spec.seed, {kAttackStream, std::uint64_t(epoch), batches}),
                     idx, y, count, spec.workers, x);
      result.adversarial_per_batch.push_back(count);
    }
    nn::ParameterGradient g = nn::ComputeParameterGradient(model, x, y);
    CheckLoss(g.loss);
    opt.Step(model.params(), g.grads);
    loss_sum += g.loss;
    ++batches;
    ++result.steps;
  }
  return batches == 0 ? 0.0 : loss_sum / static_cast<double>(batches);
}

double TrainDpEpoch(const data::DataSet& data, nn::Model& model, nn::SgdOptimizer& opt,
                    const LocalTrainSpec& spec, int epoch, LocalTrainResult& result) {
  const dp::PrivacySpec& privacy = *spec.dp;
  const double q = privacy.sampling_rate;
  const auto steps = static_cast<std::size_t>(std::max(1.0, std::round(1.0 / q)));
  const double expected_batch = q * static_cast<double>(data.size());
  const std::size_t dim = model.params().TotalElements();
  double loss_sum = 0.0;
  std::size_t counted = 0;
  for (std::size_t step = 0; step < steps; ++step) {
    Rng sample_rng(DeriveSeed(spec.seed, {kSampleStream, std::uint64_t(epoch), step}));
    const std::vector<std::size_t> idx = dp::PoissonSampleBatch(data.size(), q, sample_rng);
    nn::Tensor x = idx.empty() ? nn::Tensor() : data.Images(idx);
    const nn::Labels y = data.Labels(idx);
    if (UsesAdversarial(spec.mode) && !idx.empty()) {
      const auto count = static_cast<std::size_t>(
          std::llround(spec.adv_train_fraction * static_cast<double>(idx.size())));
      MixAdversarial(model, *spec.adversarial,
                     DeriveSeed(spec.seed, {kAttackStream, std::uint64_t(epoch), step}),
                     idx, y, count, spec.workers, x);
      result.adversarial_per_batch.push_back(count);
    }
    std::vector<std::vector<float>> per_sample(idx.size());
    std::vector<double> losses(idx.size());
    ParallelFor(idx.size(), spec.workers, [&](std::size_t i) {
      const nn::ParameterGradient g =
          nn::ComputeParameterGradient(model, x.Slice(i, i + 1), std::span(&y[i], 1));
      losses[i] = g.loss;
      per_sample[i] = nn::FlattenGradients(g.grads);
    });
    for (double l : losses) {
      CheckLoss(l);
      loss_sum += l;
    }
    counted += losses.size();
    dp::ClipPerSample(per_sample, privacy.clip_norm);
    for (const std::vector<float>& g : per_sample) {
      double sq = 0.0;
      for (float v : g) sq += static_cast<double>(v) * v;
      result.max_clipped_norm = std::max(result.max_clipped_norm, std::sqrt(sq));
    }
    Require(result.max_clipped_norm <= privacy.clip_norm * (1.0 + 1e-6),
            ErrorCode::kFailedPrecondition, "clipped gradient exceeds the clip norm");
    Rng noise_rng(DeriveSeed(spec.seed, {kNoiseStream, std::uint64_t(epoch), step}));
    const std::vector<float> noisy =
        dp::NoisyAggregate(per_sample, dim, privacy.noise_multiplier,
                           privacy.clip_norm, expected_batch, noise_rng);
    nn::Gradients grads = nn::ZerosLike(model.params());
    nn::UnflattenInto(noisy, grads);
    opt.Step(model.params(), grads);
    ++result.noisy_steps;
    ++result.steps;
  }
  return counted == 0 ? 0.0 : loss_sum / static_cast<double>(counted);
}

}  // namespace

std::string_view TrainModeName(TrainMode mode) {
  switch (mode) {
    case TrainMode::kStandard: return "standard";
    case TrainMode::kDp: return "dp";
    case TrainMode::kAdversarial: return "adversarial";
    case TrainMode::kDpAdversarial: return "dp+adversarial";
  }
  return "standard";
}

TrainMode ParseTrainMode(std::string_view text) {
  std::string lower(text);
  for (char& c : lower) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  for (TrainMode m : {TrainMode::kStandard, TrainMode::kDp, TrainMode::kAdversarial,
                      TrainMode::kDpAdversarial}) {
    if (lower == TrainModeName(m)) return m;
  }
  Fail(ErrorCode::kInvalidArgument, "unknown training mode '" + std::string(text) + "'");
}

bool UsesDp(TrainMode mode) {
  return mode == TrainMode::kDp || mode == TrainMode::kDpAdversarial;
}

bool UsesAdversarial(TrainMode mode) {
  return mode == TrainMode::kAdversarial || mode == TrainMode::kDpAdversarial;
}

LocalTrainResult LocalTrain(const data::DataSet& data, const nn::Model& snapshot,
                            const LocalTrainSpec& spec) {
  Require(spec.epochs >= 0, ErrorCode::kInvalidArgument, "epochs must be >= 0");
  Require(spec.optimizer.batch_size > 0, ErrorCode::kInvalidArgument,
          "batch size must be > 0");
  Require(UsesDp(spec.mode) == spec.dp.has_value(), ErrorCode::kInvalidArgument,
          "a privacy spec is required exactly when the mode includes dp");
  Require(!UsesAdversarial(spec.mode) || spec.adversarial.has_value(),
          ErrorCode::kInvalidArgument, "adversarial mode needs an attack config");
  Require(spec.adv_train_fraction >= 0.0 && spec.adv_train_fraction <= 1.0,
          ErrorCode::kInvalidArgument, "adversarial fraction must lie in [0, 1]");
  Require(!data.empty() || spec.epochs == 0, ErrorCode::kInvalidArgument,
          "client data is empty");
  if (spec.dp) spec.dp->Validate(data.size());
  if (spec.adversarial) spec.adversarial->Validate();

  nn::Model model = snapshot;
  nn::SgdOptimizer opt(spec.optimizer.learning_rate, spec.optimizer.momentum);
  LocalTrainResult result;
  double loss_sum = 0.0;
  for (int epoch = 0; epoch < spec.epochs; ++epoch) {
    loss_sum += UsesDp(spec.mode) ? TrainDpEpoch(data, model, opt, spec, epoch, result)
                                  : TrainStandardEpoch(data, model, opt, spec, epoch, result);
  }
  result.mean_loss = spec.epochs == 0 ? 0.0 : loss_sum / spec.epochs;
  result.params = model.params();
  return result;
}

nn::ParameterStore FedAvg(std::span<const nn::ParameterStore> weights,
                          std::span<const std::size_t> client_sizes) {
  Require(!weights.empty() && weights.size() == client_sizes.size(),
          ErrorCode::kInvalidArgument, "need one size per weight set");
  const double total = std::accumulate(client_sizes.begin(), client_sizes.end(), 0.0);
  Require(total > 0.0, ErrorCode::kInvalidArgument, "total client size is 0");
  const nn::ParameterStore& first = weights.front();
  for (const nn::ParameterStore& w : weights) {
    Require(w.size() == first.size(), ErrorCode::kShapeMismatch,
            "clients disagree on the parameter count");
    for (std::size_t i = 0; i < w.size(); ++i) {
      Require(w.name(i) == first.name(i) && w.at(i).shape() == first.at(i).shape(),
              ErrorCode::kShapeMismatch, "parameter '" + w.name(i) + "' is not congruent");
    }
  }
  nn::ParameterStore out = first;
  for (std::size_t i = 0; i < out.size(); ++i) {
    std::span<float> dst = out.at(i).data();
    for (std::size_t e = 0; e < dst.size(); ++e) {
      double acc = 0.0;
      for (std::size_t c = 0; c < weights.size(); ++c) {
        acc += static_cast<double>(client_sizes[c]) * weights[c].at(i).data()[e];
      }
      dst[e] = static_cast<float>(acc / total);
    }
  }
  return out;
}

data::DataSet PoisonClientData(const data::DataSet& client_data,
                               const nn::Model& generator,
                               const attack::AttackConfig& cfg, double fraction,
                               int workers) {
  if (fraction == 0.0) return client_data;
  return attack::CraftAdversarialSet(nn::Classifier(generator), client_data, cfg,
                                     fraction, workers)
      .data;
}

TrainMode FederationConfig::ModeFor(std::size_t client) const {
  return modes.size() == 1 ? modes.front() : modes.at(client);
}

void FederationConfig::Validate() const {
  Require(n_clients >= 1, ErrorCode::kInvalidArgument, "need at least one client");
  Require(rounds >= 0 && local_epochs >= 0, ErrorCode::kInvalidArgument,
          "rounds and local epochs must be >= 0");
  Require(modes.size() == 1 || modes.size() == n_clients, ErrorCode::kInvalidArgument,
          "give one training mode or one per client");
  Require(!adversary_id || *adversary_id < n_clients, ErrorCode::kInvalidArgument,
          "adversary id out of range");
  Require(poison_fraction >= 0.0 && poison_fraction <= 0.4, ErrorCode::kInvalidArgument,
          "poison fraction must lie in [0, 0.4]");
  Require(poison_fraction == 0.0 || adversary_id.has_value(), ErrorCode::kInvalidArgument,
          "poisoning requires an adversary id");
  Require(adv_train_fraction >= 0.0 && adv_train_fraction <= 1.0,
          ErrorCode::kInvalidArgument, "adversarial fraction must lie in [0, 1]");
  Require(optimizer.batch_size > 0, ErrorCode::kInvalidArgument, "batch size must be > 0");
  bool any_dp = false;
  for (std::size_t c = 0; c < n_clients; ++c) any_dp |= UsesDp(ModeFor(c));
  Require(!any_dp || dp.has_value(), ErrorCode::kInvalidArgument,
          "dp training mode needs a dp section");
}

FederationResult RunFederation(const FederationConfig& cfg, const nn::Model& initial,
                               const data::DataSet& train, const data::DataSet& eval) {
  cfg.Validate();
  std::vector<data::DataSet> shards;
  if (cfg.n_clients == 1) {
    shards.push_back(train);
  } else {
    shards = data::PartitionClients(train, cfg.n_clients, DeriveSeed(cfg.seed, {0xfed}));
  }
  const data::DataSet& eval_set = eval.empty() ? train : eval;

  FederationResult result{initial, {}, std::vector<ClientState>(cfg.n_clients), 0.0};
  std::vector<LocalTrainSpec> specs(cfg.n_clients);
  for (std::size_t c = 0; c < cfg.n_clients; ++c) {
    ClientState& state = result.clients[c];
    state.shard_size = shards[c].size();
    LocalTrainSpec& spec = specs[c];
    spec.mode = cfg.ModeFor(c);
    spec.epochs = cfg.local_epochs;
    spec.optimizer = cfg.optimizer;
    spec.adv_train_fraction = cfg.adv_train_fraction;
    spec.workers = cfg.workers;
    if (UsesAdversarial(spec.mode)) spec.adversarial = cfg.adversarial_attack;
    if (!UsesDp(spec.mode)) continue;
    dp::PrivacySpec privacy = *cfg.dp;
    if (privacy.sampling_rate <= 0.0) {
      privacy.sampling_rate = std::min(
          1.0, static_cast<double>(cfg.optimizer.batch_size) / state.shard_size);
    }
    const auto steps_per_epoch = static_cast<std::uint64_t>(
        std::max(1.0, std::round(1.0 / privacy.sampling_rate)));
    const std::uint64_t total_steps =
        steps_per_epoch * static_cast<std::uint64_t>(cfg.rounds) * cfg.local_epochs;
    if (privacy.target_epsilon) {
      privacy.noise_multiplier = dp::CalibrateSigma(
          *privacy.target_epsilon, privacy.delta, privacy.sampling_rate, total_steps);
    }
    state.noise_multiplier = privacy.noise_multiplier;
    state.accountant.emplace(privacy.sampling_rate, privacy.noise_multiplier);
    spec.dp = privacy;
  }

  std::vector<nn::Model> adversary_snapshot;
  if (cfg.adversary_id) adversary_snapshot.push_back(initial);
  std::optional<data::DataSet> fixed_poison;

  for (int round = 0; round < cfg.rounds; ++round) {
    std::vector<LocalTrainResult> local(cfg.n_clients);
    for (std::size_t c = 0; c < cfg.n_clients; ++c) {
      LocalTrainSpec spec = specs[c];
      spec.seed = DeriveSeed(cfg.seed, {c, std::uint64_t(round)});
      const bool poisoner = cfg.adversary_id && *cfg.adversary_id == c;
      try {
        if (poisoner && cfg.poison_fraction > 0.0) {
          attack::AttackConfig poison = cfg.poison_attack;
          poison.seed = DeriveSeed(spec.seed, {kAttackStream, 0x9015});
          if (cfg.regenerate_poison || !fixed_poison) {
            fixed_poison = PoisonClientData(shards[c], adversary_snapshot.front(), poison,
                                            cfg.poison_fraction, cfg.workers);
          }
          local[c] = LocalTrain(*fixed_poison, result.model, spec);
        } else {
          local[c] = LocalTrain(shards[c], result.model, spec);
        }
      } catch (const Error& e) {
        throw Error(e.code(), "client " + std::to_string(c) + ", round " +
                                  std::to_string(round) + ": " + e.what());
      }
      ClientState& state = result.clients[c];
      if (state.accountant) state.accountant->Step(local[c].noisy_steps);
      state.noisy_steps += local[c].noisy_steps;
      if (poisoner) {
        adversary_snapshot.front().params() = local[c].params;
      }
    }
    std::vector<nn::ParameterStore> weights;
    std::vector<std::size_t> sizes;
    RoundLog log;
    log.round = round;
    for (std::size_t c = 0; c < cfg.n_clients; ++c) {
      weights.push_back(std::move(local[c].params));
      sizes.push_back(shards[c].size());
      log.client_losses.push_back(local[c].mean_loss);
    }
    result.model.params() = FedAvg(weights, sizes);
    try {
      log.clean_acc = nn::Accuracy(nn::Classifier(result.model), eval_set.images,
                                   eval_set.labels);
    } catch (const Error& e) {
      throw Error(e.code(), "aggregate, round " + std::to_string(round) + ": " + e.what());
    }
    for (const ClientState& state : result.clients) {
      if (!state.accountant || state.accountant->steps() == 0) continue;
      log.epsilon = std::max(log.epsilon,
                             state.accountant->Epsilon(cfg.dp->delta).epsilon);
    }
    result.epsilon = log.epsilon;
    result.rounds.push_back(std::move(log));
  }
  return result;
}

void WriteRoundLogCsv(std::ostream& out, std::span<const RoundLog> rounds) {
  const std::size_t n_clients = rounds.empty() ? 0 : rounds.front().client_losses.size();
  out << "round";
  for (std::size_t c = 0; c < n_clients; ++c) out << ",loss_client" << c;
  out << ",clean_acc,epsilon\n";
  const auto old_precision = out.precision(17);
  for (const RoundLog& r : rounds) {
    out << r.round;
    for (double l : r.client_losses) out << ',' << l;
    out << ',' << r.clean_acc << ',' << r.epsilon << '\n';
  }
  out.precision(old_precision);
}

}  // namespace psrlab::fed
