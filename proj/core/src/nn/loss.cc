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

#include "psrlab/nn/loss.h"

#include <algorithm>
#include <cmath>

#include "psrlab/util/error.h"

namespace psrlab::nn {

std::vector<double> Softmax(std::span<const float> row) {
  const double mx = *std::max_element(row.begin(), row.end());
  std::vector<double> p(row.size());
  double z = 0.0;
  for (std::size_t k = 0; k < row.size(); ++k) {
    p[k] = std::exp(static_cast<double>(row[k]) - mx);
    z += p[k];
  }
  for (double& v : p) v /= z;
  return p;
}

LossResult CrossEntropy(const Tensor& logits,
                        std::span<const std::size_t> labels) {
  Require(logits.rank() == 2, ErrorCode::kShapeMismatch,
          "cross_entropy expects [B, K] logits");
  const std::size_t batch = logits.dim(0);
  const std::size_t classes = logits.dim(1);
  Require(labels.size() == batch, ErrorCode::kShapeMismatch,
          "label count " + std::to_string(labels.size()) +
              " != batch size " + std::to_string(batch));
  LossResult result{0.0, Tensor(logits.shape())};
  const double inv_b = 1.0 / static_cast<double>(batch);
  for (std::size_t b = 0; b < batch; ++b) {
    Require(labels[b] < classes, ErrorCode::kOutOfRange,
            "label " + std::to_string(labels[b]) + " outside [0," +
                std::to_string(classes) + ")");
    auto row = logits.data().subspan(b * classes, classes);
    const double mx = *std::max_element(row.begin(), row.end());
    double z = 0.0;
    for (float v : row) z += std::exp(static_cast<double>(v) - mx);
    const double log_z = mx + std::log(z);
    result.value += (log_z - row[labels[b]]) * inv_b;
    for (std::size_t k = 0; k < classes; ++k) {
      const double p = std::exp(static_cast<double>(row[k]) - log_z);
      result.grad_logits[b * classes + k] =
          static_cast<float>((p - (k == labels[b] ? 1.0 : 0.0)) * inv_b);
    }
  }
  return result;
}

Labels Argmax(const Tensor& logits) {
  Require(logits.rank() == 2, ErrorCode::kShapeMismatch, "argmax expects [B, K]");
  Labels out(logits.dim(0));
  const std::size_t k = logits.dim(1);
  for (std::size_t b = 0; b < out.size(); ++b) {
    auto row = logits.data().subspan(b * k, k);
    out[b] = static_cast<std::size_t>(
        std::max_element(row.begin(), row.end()) - row.begin());
  }
  return out;
}

}  // namespace psrlab::nn
