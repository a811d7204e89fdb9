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

#ifndef PSRLAB_NN_ENGINE_H_
#define PSRLAB_NN_ENGINE_H_

#include <cstddef>
#include <cstdint>
#include <vector>

#include "psrlab/nn/model.h"
#include "psrlab/nn/tensor.h"

namespace psrlab::nn {

// Intercepts activations at every site during a forward pass. Site 0 is the
// model input, site i + 1 the output of layer i. A hook may rewrite values in
// place; when `pass` is non-null it is sized to the activation and zeroing an
// entry stops the gradient at that element in the backward pass.
class ActivationHook {
 public:
  virtual ~ActivationHook() = default;
  virtual void OnActivation(std::size_t site, Tensor& values,
                            std::vector<std::uint8_t>* pass) = 0;
};

// Everything a backward pass needs from one forward call. A tape belongs to
// exactly one forward evaluation and is never shared.
struct Tape {
  std::vector<Tensor> activations;                  // one per site
  std::vector<std::vector<double>> stats;           // GroupNorm mean/inv_std
  std::vector<std::vector<std::uint32_t>> argmax;   // MaxPool winners
  std::vector<std::vector<std::uint8_t>> pass;      // hook masks, empty = all
  bool recorded = false;
};

// Runs the model on a [B, ...input_shape] batch and returns [B, n_classes]
// logits. Throws kShapeMismatch for a wrong input shape and kNonFinite if any
// activation stops being finite. When `tape` is given it is filled for a
// later Backward call.
Tensor Forward(const Model& model, const Tensor& batch, Tape* tape = nullptr,
               ActivationHook* hook = nullptr);

struct BackwardOptions {
  bool parameter_grads = true;
  bool input_grad = false;
};

struct BackwardResult {
  Gradients params;  // empty when parameter_grads is false
  Tensor input;      // empty when input_grad is false
};

// Backpropagates `grad_logits` (same shape as the logits) through the
// recorded tape. Throws kFailedPrecondition when the tape was not recorded.
BackwardResult Backward(const Model& model, const Tape& tape,
                        const Tensor& grad_logits,
                        const BackwardOptions& options = {});

}  // namespace psrlab::nn

#endif  // PSRLAB_NN_ENGINE_H_
