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

#include "psrlab/nn/classifier.h"

#include <algorithm>

#include "psrlab/util/error.h"

namespace psrlab::nn {

Tensor Classifier::Logits(const Tensor& x) const {
  return Forward(*model_, x, nullptr, hook_);
}

Labels Classifier::Predict(const Tensor& x) const { return Argmax(Logits(x)); }

Classifier::Trace Classifier::Record(const Tensor& x) const {
  Trace trace;
  trace.logits = Forward(*model_, x, &trace.tape, hook_);
  return trace;
}

Tensor Classifier::InputGradient(const Trace& trace,
                                 const Tensor& grad_logits) const {
  BackwardOptions options;
  options.parameter_grads = false;
  options.input_grad = true;
  return Backward(*model_, trace.tape, grad_logits, options).input;
}

Tensor Classifier::LossInputGradient(const Tensor& x,
                                     std::span<const std::size_t> labels,
                                     double* loss) const {
  Trace trace = Record(x);
  LossResult ce = CrossEntropy(trace.logits, labels);
  if (loss != nullptr) *loss = ce.value;
  return InputGradient(trace, ce.grad_logits);
}

ParameterGradient ComputeParameterGradient(const Model& model, const Tensor& x,
                                           std::span<const std::size_t> labels) {
  Tape tape;
  Tensor logits = Forward(model, x, &tape);
  LossResult ce = CrossEntropy(logits, labels);
  return {ce.value, Backward(model, tape, ce.grad_logits).params};
}

Tensor InputGradient(const Model& model, const Tensor& x,
                     std::span<const std::size_t> labels) {
  return Classifier(model).LossInputGradient(x, labels);
}

double Accuracy(const Classifier& model, const Tensor& x,
                std::span<const std::size_t> labels, std::size_t batch_size) {
  Require(!labels.empty() && x.dim(0) == labels.size(), ErrorCode::kShapeMismatch,
          "accuracy needs one label per row");
  std::size_t correct = 0;
  for (std::size_t begin = 0; begin < labels.size(); begin += batch_size) {
    const std::size_t end = std::min(labels.size(), begin + batch_size);
    const Labels predicted = model.Predict(x.Slice(begin, end));
    for (std::size_t i = begin; i < end; ++i) correct += predicted[i - begin] == labels[i];
  }
  return static_cast<double>(correct) / static_cast<double>(labels.size());
}

}  // namespace psrlab::nn
