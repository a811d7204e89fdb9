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

#include "psrlab/harness/evaluation.h"

#include <cmath>
#include <sstream>

#include "psrlab/util/error.h"
#include "psrlab/util/rng.h"

namespace psrlab::harness {

std::string ThreatName(const ThreatModel& threat) {
  switch (threat.kind) {
    case ThreatModel::Kind::kWhiteBox:
      return "whitebox";
    case ThreatModel::Kind::kTransfer:
      return "transfer";
    case ThreatModel::Kind::kTrainTime: {
      std::ostringstream out;
      out << "train-time(" << threat.poison_fraction << ")";
      return out.str();
    }
  }
  return "whitebox";
}

std::uint64_t RepeatSeed(std::uint64_t base, int repeat) {
  return DeriveSeed(base, {static_cast<std::uint64_t>(repeat)});
}

RobustStats EvaluateRobustness(const nn::Classifier& target, const data::DataSet& test,
                               const attack::AttackConfig& cfg, const ThreatModel& threat,
                               int repeats, int workers) {
  Require(repeats >= 1, ErrorCode::kInvalidArgument, "repeats must be >= 1");
  Require(!test.empty(), ErrorCode::kInvalidArgument, "test set is empty");
  const nn::Classifier* source = &target;
  if (threat.kind == ThreatModel::Kind::kTransfer) {
    Require(threat.generator != nullptr, ErrorCode::kInvalidArgument,
            "transfer threat needs a generator");
    Require(threat.generator->model().architecture_id() ==
                target.model().architecture_id(),
            ErrorCode::kInvalidArgument,
            "transfer generator architecture '" +
                threat.generator->model().architecture_id() + "' differs from target '" +
                target.model().architecture_id() + "'");
    source = threat.generator;
  }
  RobustStats stats;
  stats.clean_acc = nn::Accuracy(target, test.images, test.labels);
  for (int r = 0; r < repeats; ++r) {
    attack::AttackConfig run = cfg;
    run.seed = RepeatSeed(cfg.seed, r);
    const attack::AdversarialBatch adv =
        attack::RunAttack(*source, test.images, test.labels, run, {}, workers);
    nn::Tensor x_adv = adv.x_adv;
    // Minimal-norm attacks are scored inside the budget.
    if (run.method == attack::Method::kFab) attack::ProjectToBudget(test.images, run.eps, x_adv);
    stats.per_repeat.push_back(nn::Accuracy(target, x_adv, test.labels));
    stats.success_rate_mean += adv.SuccessRate() / repeats;
  }
  double sum = 0.0;
  for (double v : stats.per_repeat) sum += v;
  stats.mean = sum / repeats;
  if (repeats > 1) {
    double sq = 0.0;
    for (double v : stats.per_repeat) sq += (v - stats.mean) * (v - stats.mean);
    stats.stddev = std::sqrt(sq / (repeats - 1));
  }
  return stats;
}

std::vector<TransferRow> RunTransferEval(const std::vector<NamedClassifier>& generators,
                                         const std::vector<NamedClassifier>& targets,
                                         const data::DataSet& test,
                                         const attack::AttackConfig& cfg, int repeats,
                                         int workers) {
  std::vector<TransferRow> rows;
  for (const NamedClassifier& g : generators) {
    for (const NamedClassifier& t : targets) {
      rows.push_back({g.name, t.name,
                      EvaluateRobustness(*t.classifier, test, cfg,
                                         ThreatModel::Transfer(*g.classifier), repeats,
                                         workers)});
    }
  }
  return rows;
}

}  // namespace psrlab::harness
