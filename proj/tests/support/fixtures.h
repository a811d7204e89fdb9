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

#ifndef PSRLAB_TESTS_SUPPORT_FIXTURES_H_
#define PSRLAB_TESTS_SUPPORT_FIXTURES_H_

#include <cstdint>
#include <string>
#include <vector>

#include "psrlab/data/dataset.h"
#include "psrlab/nn/model.h"
#include "psrlab/nn/tensor.h"

namespace psrlab::testing {

struct NamedModel {
  std::string name;
  nn::Model model;
};

// Small models that together exercise every layer kind, with non-trivial
// (randomized) biases and normalization parameters.
std::vector<NamedModel> GradientCheckModels(std::uint64_t seed);

// Fills every parameter with U(-scale, scale).
void RandomizeParameters(nn::Model& model, std::uint64_t seed, double scale = 0.5);

// Uniform [0, 1) batch with the model's per-sample shape.
nn::Tensor RandomBatch(const nn::Model& model, std::size_t batch, std::uint64_t seed);
nn::Labels RandomLabels(std::size_t batch, std::size_t n_classes, std::uint64_t seed);

// Single linear layer on `dim` features: logits = W x + b.
nn::Model LinearModel(std::size_t dim, std::size_t n_classes,
                      const std::vector<float>& weights, const std::vector<float>& bias);

// A small micro-resnet-9 trained with plain SGD on synthetic shapes.
struct DeskTask {
  data::DataSet train;
  data::DataSet test;
  nn::Model model;
};
DeskTask TrainDeskModel(std::uint64_t seed, int epochs = 6,
                        std::size_t n_per_class = 60);

}  // namespace psrlab::testing

#endif  // PSRLAB_TESTS_SUPPORT_FIXTURES_H_
