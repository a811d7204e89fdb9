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

#ifndef PSRLAB_DP_MECHANISM_H_
#define PSRLAB_DP_MECHANISM_H_

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "psrlab/util/rng.h"

namespace psrlab::dp {

struct PrivacySpec {
  double clip_norm = 1.0;          // C
  double noise_multiplier = 1.0;   // sigma; noise stddev is sigma * C
  double delta = 1e-5;
  double sampling_rate = 0.01;     // q
  std::optional<double> target_epsilon;

  // Throws kInvalidArgument on out-of-range fields. Warns when delta is not
  // below 1 / dataset_size (pass 0 to skip that check).
  void Validate(std::size_t dataset_size = 0) const;
};

// Each index in [0, n) is included independently with probability q. The
// result may be empty; callers still take a noise-only step.
std::vector<std::size_t> PoissonSampleBatch(std::size_t n, double q, Rng& rng);

// Scales every per-sample gradient in place by min(1, C / ||g||_2), where the
// norm is global over all parameters of that sample. Returns the pre-clip
// norms. Throws kNonFinite if any input entry is NaN or infinite.
std::vector<double> ClipPerSample(std::vector<std::vector<float>>& grads,
                                  double clip_norm);

// (sum_i g_i + N(0, sigma^2 C^2 I)) / expected_batch_size over `dim`
// coordinates. The sum runs in index order with double accumulators, so the
// output depends only on the inputs and the rng state. `clipped` may be empty.
std::vector<float> NoisyAggregate(std::span<const std::vector<float>> clipped,
                                  std::size_t dim, double noise_multiplier,
                                  double clip_norm, double expected_batch_size,
                                  Rng& rng);

}  // namespace psrlab::dp

#endif  // PSRLAB_DP_MECHANISM_H_
