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

#include "fixtures.h"

#include "psrlab/data/split.h"
#include "psrlab/data/synthetic.h"
#include "psrlab/fed/federation.h"
#include "psrlab/nn/architectures.h"
#include "psrlab/util/rng.h"

namespace psrlab::testing {

void RandomizeParameters(nn::Model& model, std::uint64_t seed, double scale) {
  Rng rng(seed);
  for (std::size_t i = 0; i < model.params().size(); ++i) {
    for (float& v : model.params().at(i).data()) {
      v = static_cast<float>(rng.Uniform(-scale, scale));
    }
  }
}

nn::Tensor RandomBatch(const nn::Model& model, std::size_t batch, std::uint64_t seed) {
  nn::Shape shape{batch};
  shape.insert(shape.end(), model.input_shape().begin(), model.input_shape().end());
  nn::Tensor x(shape, 0.0f);
  Rng rng(seed);
  for (float& v : x.data()) v = static_cast<float>(rng.Uniform());
  return x;
}

nn::Labels RandomLabels(std::size_t batch, std::size_t n_classes, std::uint64_t seed) {
  Rng rng(seed);
  nn::Labels labels(batch);
  for (std::size_t& y : labels) y = rng.Index(n_classes);
  return labels;
}

nn::Model LinearModel(std::size_t dim, std::size_t n_classes,
                      const std::vector<float>& weights, const std::vector<float>& bias) {
  nn::Model m("linear", {dim}, n_classes);
  m.Add("fc", nn::Linear{dim, n_classes});
  m.params().at("fc.weight") = nn::Tensor({n_classes, dim}, weights);
  m.params().at("fc.bias") = nn::Tensor({n_classes}, bias);
  return m;
}

std::vector<NamedModel> GradientCheckModels(std::uint64_t seed) {
  std::vector<NamedModel> out;

  nn::Model conv("conv", {2, 5, 5}, 3);
  conv.Add("c1", nn::Conv2d{2, 3, 3, 1, 1});
  conv.Add("r1", nn::ReLU{});
  conv.Add("c2", nn::Conv2d{3, 2, 3, 2, 0});
  conv.Add("flat", nn::Flatten{});
  conv.Add("fc", nn::Linear{8, 3});
  out.push_back({"conv_stride_pad", std::move(conv)});

  nn::Model norm("norm", {1, 4, 4}, 3);
  norm.Add("c1", nn::Conv2d{1, 4, 3, 1, 1});
  norm.Add("gn", nn::GroupNorm{2, 4});
  norm.Add("r1", nn::ReLU{});
  norm.Add("gap", nn::GlobalAvgPool{});
  norm.Add("flat", nn::Flatten{});
  norm.Add("fc", nn::Linear{4, 3});
  out.push_back({"group_norm", std::move(norm)});

  nn::Model res("res", {2, 4, 4}, 3);
  res.Add("c1", nn::Conv2d{2, 4, 3, 1, 1}, "a");
  res.Add("r1", nn::ReLU{});
  res.Add("c2", nn::Conv2d{4, 4, 3, 1, 1});
  res.Add("add", nn::ResidualAdd{"a"});
  res.Add("pool", nn::MaxPool{2});
  res.Add("flat", nn::Flatten{});
  res.Add("fc", nn::Linear{16, 3});
  out.push_back({"residual_maxpool", std::move(res)});

  nn::Model input_res("input_res", {1, 4, 4}, 2);
  input_res.Add("c1", nn::Conv2d{1, 1, 3, 1, 1});
  input_res.Add("add", nn::ResidualAdd{"input"});
  input_res.Add("flat", nn::Flatten{});
  input_res.Add("fc", nn::Linear{16, 2});
  out.push_back({"input_residual", std::move(input_res)});

  nn::Model mlp("mlp", {3, 2, 2}, 4);
  mlp.Add("flat", nn::Flatten{});
  mlp.Add("fc1", nn::Linear{12, 6});
  mlp.Add("r1", nn::ReLU{});
  mlp.Add("fc2", nn::Linear{6, 4});
  out.push_back({"mlp", std::move(mlp)});

  nn::ArchitectureConfig r9;
  r9.image_size = 6;
  r9.n_classes = 3;
  r9.widths = {4, 8};
  out.push_back({"micro_resnet_9", nn::BuildModel(r9, seed)});

  nn::ArchitectureConfig r18;
  r18.id = nn::kMicroResNet18Like;
  r18.image_size = 8;
  r18.n_classes = 3;
  r18.widths = {4, 4, 8};
  out.push_back({"micro_resnet_18_like", nn::BuildModel(r18, seed)});

  for (std::size_t i = 0; i < out.size(); ++i) {
    RandomizeParameters(out[i].model, DeriveSeed(seed, {i}));
  }
  return out;
}

DeskTask TrainDeskModel(std::uint64_t seed, int epochs, std::size_t n_per_class) {
  data::SyntheticSpec spec;
  spec.n_per_class = n_per_class;
  spec.contrast = 0.3;
  spec.noise_level = 0.1;
  spec.seed = DeriveSeed(seed, {1});
  const data::Splits splits =
      data::SplitDataset(data::GenerateSynthetic(spec), {0.8, 0.0, 0.2, DeriveSeed(seed, {2})});

  nn::ArchitectureConfig arch;
  arch.widths = {8, 16};
  nn::Model model = nn::BuildModel(arch, DeriveSeed(seed, {3}));
  fed::LocalTrainSpec train;
  train.epochs = epochs;
  train.seed = DeriveSeed(seed, {4});
  model.params() = fed::LocalTrain(splits.train, model, train).params;
  return {splits.train, splits.test, std::move(model)};
}

}  // namespace psrlab::testing
