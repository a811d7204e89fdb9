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

#ifndef PSRLAB_NN_OPTIMIZER_H_
#define PSRLAB_NN_OPTIMIZER_H_

#include <vector>

#include "psrlab/nn/model.h"

namespace psrlab::nn {

// SGD with heavy-ball momentum: v <- momentum * v + g; p <- p - lr * v.
// Velocity buffers are created on the first step and persist across calls.
class SgdOptimizer {
 public:
  SgdOptimizer(double learning_rate, double momentum);

  void Step(ParameterStore& params, const Gradients& grads);

  double learning_rate() const { return learning_rate_; }
  void set_learning_rate(double lr);
  double momentum() const { return momentum_; }

 private:
  double learning_rate_;
  double momentum_;
  std::vector<std::vector<float>> velocity_;
};

}  // namespace psrlab::nn

#endif  // PSRLAB_NN_OPTIMIZER_H_
