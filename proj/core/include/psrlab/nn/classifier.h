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

#ifndef PSRLAB_NN_CLASSIFIER_H_
#define PSRLAB_NN_CLASSIFIER_H_

#include <cstddef>
#include <span>

#include "psrlab/nn/engine.h"
#include "psrlab/nn/loss.h"
#include "psrlab/nn/model.h"

namespace psrlab::nn {

// Read-only view of a model (optionally behind an activation hook, as used by
// fake-quantized inference) exposing what attacks and evaluation need: logits
// and gradients with respect to the input. Several threads may use one view
// concurrently provided the hook is stateless.
class Classifier {
 public:
  explicit Classifier(const Model& model, ActivationHook* hook = nullptr)
      : model_(&model), hook_(hook) {}

  const Model& model() const { return *model_; }
  std::size_t n_classes() const { return model_->n_classes(); }

  Tensor Logits(const Tensor& x) const;
  Labels Predict(const Tensor& x) const;

  struct Trace {
    Tensor logits;
    Tape tape;
  };
  Trace Record(const Tensor& x) const;
  // d(sum(grad_logits * logits))/dx for the recorded input.
  Tensor InputGradient(const Trace& trace, const Tensor& grad_logits) const;

  // Gradient of the mean cross-entropy with respect to x.
  Tensor LossInputGradient(const Tensor& x, std::span<const std::size_t> labels,
                           double* loss = nullptr) const;

 private:
  const Model* model_;
  ActivationHook* hook_;
};

// Mean cross-entropy and its parameter gradients on one batch.
struct ParameterGradient {
  double loss = 0.0;
  Gradients grads;
};
ParameterGradient ComputeParameterGradient(const Model& model, const Tensor& x,
                                           std::span<const std::size_t> labels);

// Shorthand for Classifier(model).LossInputGradient(x, labels).
Tensor InputGradient(const Model& model, const Tensor& x,
                     std::span<const std::size_t> labels);

// Fraction of rows whose argmax logit equals the label, evaluated in batches.
double Accuracy(const Classifier& model, const Tensor& x,
                std::span<const std::size_t> labels, std::size_t batch_size = 256);

}  // namespace psrlab::nn

#endif  // PSRLAB_NN_CLASSIFIER_H_
