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

#ifndef PSRLAB_HARNESS_EVALUATION_H_
#define PSRLAB_HARNESS_EVALUATION_H_

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "psrlab/attack/attack.h"
#include "psrlab/data/dataset.h"
#include "psrlab/nn/classifier.h"

namespace psrlab::harness {

struct ThreatModel {
  enum class Kind { kWhiteBox, kTransfer, kTrainTime };

  Kind kind = Kind::kWhiteBox;
  // Surrogate the adversary attacks in Transfer mode.
  const nn::Classifier* generator = nullptr;
  // Share of the adversary's shard that was poisoned during training.
  double poison_fraction = 0.0;

  static ThreatModel WhiteBox() { return {}; }
  static ThreatModel Transfer(const nn::Classifier& generator) {
    return {Kind::kTransfer, &generator, 0.0};
  }
  static ThreatModel TrainTime(double fraction) {
    return {Kind::kTrainTime, nullptr, fraction};
  }
};

std::string ThreatName(const ThreatModel& threat);

struct RobustStats {
  double clean_acc = 0.0;
  double mean = 0.0;
  double stddev = 0.0;        // sample standard deviation, 0 for one repeat
  std::vector<double> per_repeat;
  double success_rate_mean = 0.0;
};

// Seed of repeat r for a base attack seed.
std::uint64_t RepeatSeed(std::uint64_t base, int repeat);

// Robust accuracy of `target` over `repeats` independently seeded attack
// runs. White-box and train-time threats attack the target itself; Transfer
// crafts against the generator and scores the target. Throws
// kInvalidArgument when a transfer generator is missing or has a different
// architecture id.
RobustStats EvaluateRobustness(const nn::Classifier& target, const data::DataSet& test,
                               const attack::AttackConfig& cfg, const ThreatModel& threat,
                               int repeats = 10, int workers = 1);

struct NamedClassifier {
  std::string name;
  const nn::Classifier* classifier = nullptr;
};

struct TransferRow {
  std::string generator;
  std::string target;
  RobustStats stats;
};

// Every generator x target pair of the transfer grid, in generator-major order.
std::vector<TransferRow> RunTransferEval(const std::vector<NamedClassifier>& generators,
                                         const std::vector<NamedClassifier>& targets,
                                         const data::DataSet& test,
                                         const attack::AttackConfig& cfg, int repeats = 10,
                                         int workers = 1);

}  // namespace psrlab::harness

#endif  // PSRLAB_HARNESS_EVALUATION_H_
