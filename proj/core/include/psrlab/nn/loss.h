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

#ifndef PSRLAB_NN_LOSS_H_
#define PSRLAB_NN_LOSS_H_

#include <cstddef>
#include <span>
#include <vector>

#include "psrlab/nn/tensor.h"

namespace psrlab::nn {

using Labels = std::vector<std::size_t>;

struct LossResult {
  double value = 0.0;   // mean over the batch
  Tensor grad_logits;   // d(value)/d(logits)
};

// Mean softmax cross-entropy with a numerically stable log-sum-exp.
// Throws kOutOfRange for a label >= K and kShapeMismatch for a label count
// that differs from the batch size.
LossResult CrossEntropy(const Tensor& logits, std::span<const std::size_t> labels);

// Row-wise softmax in double precision.
std::vector<double> Softmax(std::span<const float> row);

// Index of the largest logit per row (first on ties).
Labels Argmax(const Tensor& logits);

}  // namespace psrlab::nn

#endif  // PSRLAB_NN_LOSS_H_
