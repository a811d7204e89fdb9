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

#ifndef PSRLAB_FED_FEDERATION_H_
#define PSRLAB_FED_FEDERATION_H_

#include <cstddef>
#include <cstdint>
#include <optional>
#include <ostream>
#include <span>
#include <string_view>
#include <vector>

#include "psrlab/attack/attack.h"
#include "psrlab/data/dataset.h"
#include "psrlab/dp/mechanism.h"
#include "psrlab/dp/rdp_accountant.h"
#include "psrlab/nn/model.h"

namespace psrlab::fed {

enum class TrainMode { kStandard, kDp, kAdversarial, kDpAdversarial };

std::string_view TrainModeName(TrainMode mode);
// Accepts "standard", "dp", "adversarial" and "dp+adversarial".
TrainMode ParseTrainMode(std::string_view text);
bool UsesDp(TrainMode mode);
bool UsesAdversarial(TrainMode mode);

struct OptimizerParams {
  double learning_rate = 0.05;
  double momentum = 0.9;
  std::size_t batch_size = 32;
};

struct LocalTrainSpec {
  TrainMode mode = TrainMode::kStandard;
  int epochs = 1;
  OptimizerParams optimizer;
  // Required iff the mode includes DP; noise_multiplier must be resolved.
  std::optional<dp::PrivacySpec> dp;
  // Attack used to craft adversarial training examples; required iff the
  // mode is adversarial.
  std::optional<attack::AttackConfig> adversarial;
  double adv_train_fraction = 0.2;
  std::uint64_t seed = 0;
  int workers = 1;
};

struct LocalTrainResult {
  nn::ParameterStore params;
  double mean_loss = 0.0;
  std::size_t steps = 0;          // optimizer steps taken
  std::size_t noisy_steps = 0;    // DP noisy aggregations performed
  double max_clipped_norm = 0.0;  // largest per-sample norm after clipping
  // Adversarial examples mixed into each batch, in batch order.
  std::vector<std::size_t> adversarial_per_batch;
};

// Trains a copy of `snapshot` on `data`. Standard and adversarial modes run
// shuffled minibatch SGD; DP modes run Poisson-sampled DP-SGD with
// round(1 / q) steps per epoch. Adversarial modes replace round(fraction * B)
// examples of each batch with attacks on the current local model, keeping
// the true labels. Throws kInvalidArgument for inconsistent specs and
// kNonFinite when the loss diverges.
LocalTrainResult LocalTrain(const data::DataSet& data, const nn::Model& snapshot,
                            const LocalTrainSpec& spec);

// Parameter-wise mean weighted by client dataset size.
nn::ParameterStore FedAvg(std::span<const nn::ParameterStore> weights,
                          std::span<const std::size_t> client_sizes);

// Adversarial relabelled shard for the train-time attacker.
data::DataSet PoisonClientData(const data::DataSet& client_data,
                               const nn::Model& generator,
                               const attack::AttackConfig& cfg, double fraction,
                               int workers = 1);

struct FederationConfig {
  std::size_t n_clients = 2;
  int rounds = 20;
  int local_epochs = 1;
  std::optional<std::size_t> adversary_id;
  double poison_fraction = 0.0;
  // Re-craft the poisoned shard every round against the adversary's latest
  // local snapshot; when false it is crafted once against the initial model.
  bool regenerate_poison = true;
  // One mode shared by all clients, or one per client.
  std::vector<TrainMode> modes{TrainMode::kStandard};
  double adv_train_fraction = 0.2;
  OptimizerParams optimizer;
  // Clip norm, delta and either a noise multiplier or a target epsilon. A
  // sampling rate <= 0 selects batch_size / shard size.
  std::optional<dp::PrivacySpec> dp;
  attack::AttackConfig adversarial_attack;
  attack::AttackConfig poison_attack;
  std::uint64_t seed = 0;
  int workers = 1;

  TrainMode ModeFor(std::size_t client) const;
  // Throws kInvalidArgument on violated invariants.
  void Validate() const;
};

struct RoundLog {
  int round = 0;
  std::vector<double> client_losses;
  double clean_acc = 0.0;
  double epsilon = 0.0;   // largest spent by any DP client; 0 without DP
};

struct ClientState {
  std::size_t shard_size = 0;
  std::optional<dp::RdpAccountant> accountant;
  double noise_multiplier = 0.0;
  std::size_t noisy_steps = 0;
};

struct FederationResult {
  nn::Model model;
  std::vector<RoundLog> rounds;
  std::vector<ClientState> clients;
  double epsilon = 0.0;
};

// Partitions `train` across clients and runs the round loop: broadcast,
// local training (the adversary trains on a shard poisoned with its latest
// local snapshot), FedAvg. Clean accuracy is logged on `eval`, or on `train`
// when `eval` is empty.
FederationResult RunFederation(const FederationConfig& cfg, const nn::Model& initial,
                               const data::DataSet& train,
                               const data::DataSet& eval = {});

void WriteRoundLogCsv(std::ostream& out, std::span<const RoundLog> rounds);

}  // namespace psrlab::fed

#endif  // PSRLAB_FED_FEDERATION_H_
