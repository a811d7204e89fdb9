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

#ifndef PSRLAB_HARNESS_CONFIG_H_
#define PSRLAB_HARNESS_CONFIG_H_

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "psrlab/attack/attack.h"
#include "psrlab/data/split.h"
#include "psrlab/data/synthetic.h"
#include "psrlab/fed/federation.h"

namespace psrlab::harness {

struct DataConfig {
  std::string source = "synthetic";   // "synthetic" or "idx"
  data::SyntheticSpec synthetic;
  std::string images_path;            // idx source
  std::string labels_path;
  data::SplitSpec split;
};

struct ModelConfig {
  std::string arch = "micro-resnet-9";
  std::vector<std::size_t> widths;    // empty selects the architecture default
  std::size_t groups = 0;             // 0 selects per-layer defaults
};

struct TrainingConfig {
  // One trained model per entry, every client in that mode.
  std::vector<std::string> variants{"standard"};
  double learning_rate = 0.05;
  std::optional<double> dp_learning_rate;   // overrides learning_rate for DP variants
  double momentum = 0.9;
  std::size_t batch_size = 32;
  double adv_train_fraction = 0.2;
  attack::Method adv_method = attack::Method::kPgd;
};

struct DpConfig {
  double clip_norm = 1.0;
  double delta = 1e-5;
  std::optional<double> target_epsilon;
  std::optional<double> sigma;
  double sampling_rate = 0.0;   // <= 0 selects batch_size / shard size
};

struct AttackSection {
  std::vector<attack::Method> methods{attack::Method::kPgd};
  double eps = 8.0 / 255.0;
  double step = 2.0 / 255.0;
  int steps = 10;
  int restarts = 0;
  std::optional<std::uint64_t> seed;   // defaults to a stream of the root seed
};

struct FederationSection {
  std::size_t n_clients = 2;
  int rounds = 20;
  int local_epochs = 1;
  std::optional<std::size_t> adversary_id;
  double poison_fraction = 0.0;
  attack::Method poison_method = attack::Method::kPgd;
  bool regenerate_poison = true;
  // Per-client modes; when set they replace training.variants with a single
  // variant named after the modes.
  std::vector<std::string> mode;
};

struct QuantizeSection {
  bool enabled = false;
  std::size_t batch_size = 64;
};

struct EvalSection {
  int repeats = 10;
  std::vector<std::string> threats{"whitebox"};   // "whitebox", "transfer"
  int workers = 1;
};

struct ExperimentConfig {
  std::string experiment = "experiment";
  std::uint64_t seed = 0;
  DataConfig data;
  ModelConfig model;
  TrainingConfig training;
  DpConfig dp;
  AttackSection attack;
  FederationSection federation;
  QuantizeSection quantize;
  EvalSection eval;

  // Attack configuration for evaluation with the given method.
  attack::AttackConfig AttackFor(attack::Method method) const;
  std::uint64_t attack_seed() const;
  // Federation settings for one training variant.
  fed::FederationConfig FederationFor(const std::string& variant) const;
  // Throws kInvalidArgument on violated constraints.
  void Validate() const;
};

// Parses a JSON document with optional top-level keys experiment, seed and
// sections {data, model, training, dp, attack, federation, quantize, eval}.
// Unknown keys are rejected. When `env_seed` is set (normally from
// PSR_SEED) it overrides the seed.
ExperimentConfig ParseConfig(const std::string& json_text,
                             std::optional<std::uint64_t> env_seed = std::nullopt);
ExperimentConfig LoadConfig(const std::string& path);
// Reads PSR_SEED; throws kInvalidArgument if it is not an unsigned integer.
std::optional<std::uint64_t> SeedFromEnvironment();

// Canonical JSON echo of every resolved field.
std::string ConfigToJson(const ExperimentConfig& cfg);

}  // namespace psrlab::harness

#endif  // PSRLAB_HARNESS_CONFIG_H_
