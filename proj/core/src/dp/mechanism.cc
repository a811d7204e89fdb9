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

#include "psrlab/dp/mechanism.h"

#include <cmath>
#include <sstream>

#include "psrlab/util/error.h"

namespace psrlab::dp {

void PrivacySpec::Validate(std::size_t dataset_size) const {
  Require(clip_norm > 0.0, ErrorCode::kInvalidArgument, "clip norm must be > 0");
  Require(noise_multiplier > 0.0, ErrorCode::kInvalidArgument,
          "noise multiplier must be > 0");
  Require(delta > 0.0 && delta < 1.0, ErrorCode::kInvalidArgument,
          "delta must be in (0, 1)");
  Require(sampling_rate > 0.0 && sampling_rate <= 1.0,
          ErrorCode::kInvalidArgument, "sampling rate must be in (0, 1]");
  if (target_epsilon) {
    Require(*target_epsilon > 0.0, ErrorCode::kInvalidArgument,
            "target epsilon must be > 0");
  }
  if (dataset_size > 0 && delta >= 1.0 / static_cast<double>(dataset_size)) {
    std::ostringstream msg;
    msg << "delta=" << delta << " is not below 1/N=" << 1.0 / dataset_size;
    Warn(msg.str());
  }
}

std::vector<std::size_t> PoissonSampleBatch(std::size_t n, double q, Rng& rng) {
  Require(q > 0.0 && q <= 1.0, ErrorCode::kInvalidArgument,
          "sampling rate must be in (0, 1]");
  std::vector<std::size_t> batch;
  batch.reserve(static_cast<std::size_t>(q * static_cast<double>(n) * 1.2) + 1);
  for (std::size_t i = 0; i < n; ++i) {
    if (rng.Uniform() < q) batch.push_back(i);
  }
  return batch;
}

std::vector<double> ClipPerSample(std::vector<std::vector<float>>& grads,
                                  double clip_norm) {
  Require(clip_norm > 0.0, ErrorCode::kInvalidArgument, "clip norm must be > 0");
  std::vector<double> norms;
  norms.reserve(grads.size());
  for (std::vector<float>& g : grads) {
    double sq = 0.0;
    for (float v : g) {
      Require(std::isfinite(v), ErrorCode::kNonFinite,
              "non-finite per-sample gradient");
      sq += static_cast<double>(v) * v;
    }
    const double norm = std::sqrt(sq);
    norms.push_back(norm);
    if (norm > clip_norm) {
      const double scale = clip_norm / norm;
      for (float& v : g) v = static_cast<float>(v * scale);
    }
  }
  return norms;
}

std::vector<float> NoisyAggregate(std::span<const std::vector<float>> clipped,
                                  std::size_t dim, double noise_multiplier,
                                  double clip_norm, double expected_batch_size,
                                  Rng& rng) {
  Require(dim > 0, ErrorCode::kInvalidArgument, "gradient dimension is 0");
  Require(noise_multiplier > 0.0, ErrorCode::kInvalidArgument,
          "noise multiplier must be > 0");
  Require(expected_batch_size > 0.0, ErrorCode::kInvalidArgument,
          "expected batch size must be > 0");
  std::vector<double> sum(dim, 0.0);
  for (const std::vector<float>& g : clipped) {
    Require(g.size() == dim, ErrorCode::kShapeMismatch,
            "per-sample gradient has wrong dimension");
    for (std::size_t k = 0; k < dim; ++k) sum[k] += g[k];
  }
  const double stddev = noise_multiplier * clip_norm;
  std::vector<float> out(dim);
  for (std::size_t k = 0; k < dim; ++k) {
    out[k] = static_cast<float>((sum[k] + rng.Normal(0.0, stddev)) /
                                expected_batch_size);
  }
  return out;
}

}  // namespace psrlab::dp
