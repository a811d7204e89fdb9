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

#include "psrlab/attack/poison.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "psrlab/util/error.h"
#include "psrlab/util/rng.h"

namespace psrlab::attack {

PoisonedSet CraftAdversarialSet(const nn::Classifier& generator,
                                const data::DataSet& ds, const AttackConfig& cfg,
                                double fraction, int workers) {
  Require(fraction >= 0.0 && fraction <= 1.0, ErrorCode::kInvalidArgument,
          "poison fraction must lie in [0, 1]");
  const double tenths = fraction * 10.0;
  if (std::abs(tenths - std::round(tenths)) > 1e-9 || fraction > 0.4 + 1e-12) {
    std::ostringstream msg;
    msg << "poison fraction " << fraction << " is outside {0, 0.1, 0.2, 0.3, 0.4}";
    Warn(msg.str());
  }
  PoisonedSet out{ds, {}};
  const std::size_t n = ds.size();
  const std::size_t count =
      static_cast<std::size_t>(std::floor(fraction * static_cast<double>(n) + 1e-9));
  if (count == 0) return out;
  Require(ds.sample_shape() == generator.model().input_shape(),
          ErrorCode::kShapeMismatch,
          "generator expects " + nn::ShapeToString(generator.model().input_shape()) +
              " samples, dataset has " + nn::ShapeToString(ds.sample_shape()));

  std::vector<std::size_t> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  Rng rng(DeriveSeed(cfg.seed, {0x9015}));
  std::shuffle(perm.begin(), perm.end(), rng.engine());
  out.poisoned.assign(perm.begin(), perm.begin() + count);
  std::sort(out.poisoned.begin(), out.poisoned.end());

  const nn::Tensor x = ds.Images(out.poisoned);
  const nn::Labels y = ds.Labels(out.poisoned);
  AdversarialBatch adv = RunAttack(generator, x, y, cfg, out.poisoned, workers);
  if (cfg.method == Method::kFab) ProjectToBudget(x, cfg.eps, adv.x_adv);
  const nn::Labels predicted = generator.Predict(adv.x_adv);

  const std::size_t row = x.RowSize();
  for (std::size_t i = 0; i < count; ++i) {
    const std::size_t dst = out.poisoned[i];
    std::copy(adv.x_adv.raw() + i * row, adv.x_adv.raw() + (i + 1) * row,
              out.data.images.raw() + dst * row);
    out.data.labels[dst] = predicted[i];
  }
  return out;
}

}  // namespace psrlab::attack
