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

#include "psrlab/nn/optimizer.h"

#include "psrlab/util/error.h"

namespace psrlab::nn {

SgdOptimizer::SgdOptimizer(double learning_rate, double momentum)
    : learning_rate_(learning_rate), momentum_(momentum) {
  Require(learning_rate > 0.0, ErrorCode::kInvalidArgument, "lr must be > 0");
  Require(momentum >= 0.0 && momentum < 1.0, ErrorCode::kInvalidArgument,
          "momentum must be in [0, 1)");
}

void SgdOptimizer::set_learning_rate(double lr) {
  Require(lr > 0.0, ErrorCode::kInvalidArgument, "lr must be > 0");
  learning_rate_ = lr;
}

void SgdOptimizer::Step(ParameterStore& params, const Gradients& grads) {
  Require(grads.size() == params.size(), ErrorCode::kShapeMismatch,
          "gradient count does not match parameter count");
  if (velocity_.empty()) {
    velocity_.resize(params.size());
    for (std::size_t i = 0; i < params.size(); ++i) {
      velocity_[i].assign(params.at(i).size(), 0.0f);
    }
  }
  for (std::size_t i = 0; i < params.size(); ++i) {
    Tensor& p = params.at(i);
    Require(grads[i].shape() == p.shape(), ErrorCode::kShapeMismatch,
            "gradient shape mismatch for '" + params.name(i) + "'");
    Require(velocity_[i].size() == p.size(), ErrorCode::kShapeMismatch,
            "optimizer state does not match '" + params.name(i) + "'");
    const float lr = static_cast<float>(learning_rate_);
    const float mu = static_cast<float>(momentum_);
    float* w = p.raw();
    const float* g = grads[i].raw();
    float* v = velocity_[i].data();
    for (std::size_t e = 0; e < p.size(); ++e) {
      v[e] = mu * v[e] + g[e];
      w[e] -= lr * v[e];
    }
  }
}

}  // namespace psrlab::nn
