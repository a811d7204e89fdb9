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

#ifndef PSRLAB_ATTACK_POISON_H_
#define PSRLAB_ATTACK_POISON_H_

#include <cstddef>
#include <vector>

#include "psrlab/attack/attack.h"
#include "psrlab/data/dataset.h"
#include "psrlab/nn/classifier.h"

namespace psrlab::attack {

struct PoisonedSet {
  data::DataSet data;
  std::vector<std::size_t> poisoned;  // replaced indices, ascending
};

// Replaces a seeded uniform subset of floor(fraction * N) samples with
// adversarial versions crafted against `generator` (attacked w.r.t. the true
// labels). Each replaced sample is relabelled with the generator's prediction
// on the perturbed input. FAB outputs are projected onto the budget. Fractions
// outside {0, 0.1, 0.2, 0.3, 0.4} are accepted with a warning.
PoisonedSet CraftAdversarialSet(const nn::Classifier& generator,
                                const data::DataSet& ds, const AttackConfig& cfg,
                                double fraction, int workers = 1);

}  // namespace psrlab::attack

#endif  // PSRLAB_ATTACK_POISON_H_
