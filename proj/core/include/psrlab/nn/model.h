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

#ifndef PSRLAB_NN_MODEL_H_
#define PSRLAB_NN_MODEL_H_

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "psrlab/nn/layer.h"
#include "psrlab/nn/tensor.h"

namespace psrlab::nn {

// Ordered name -> tensor map. Insertion order is the canonical parameter
// order used by gradients, optimizers and checkpoints.
class ParameterStore {
 public:
  std::size_t Add(std::string name, Tensor value);

  std::size_t size() const { return entries_.size(); }
  const std::string& name(std::size_t i) const { return entries_[i].first; }
  Tensor& at(std::size_t i) { return entries_[i].second; }
  const Tensor& at(std::size_t i) const { return entries_[i].second; }
  Tensor& at(std::string_view name);
  const Tensor& at(std::string_view name) const;
  bool contains(std::string_view name) const;
  std::size_t index_of(std::string_view name) const;

  std::size_t TotalElements() const;

 private:
  std::vector<std::pair<std::string, Tensor>> entries_;
  std::unordered_map<std::string, std::size_t> index_;
};

// Parameter gradients, aligned index-for-index with a ParameterStore.
using Gradients = std::vector<Tensor>;

Gradients ZerosLike(const ParameterStore& params);
double GlobalL2Norm(const Gradients& grads);
// Concatenation of all gradient tensors in store order.
std::vector<float> FlattenGradients(const Gradients& grads);
void UnflattenInto(std::span<const float> flat, Gradients& grads);

class Model {
 public:
  // `input_shape` is per-sample: {channels, height, width} or {features}.
  Model(std::string architecture_id, Shape input_shape, std::size_t n_classes);

  // Appends a layer, allocating zero-initialized parameters for it. Throws
  // on duplicate names, unknown residual sources, or invalid layer fields
  // (for example GroupNorm channels not divisible by groups).
  Model& Add(std::string name, LayerKind kind, std::string tag = "");

  const std::string& architecture_id() const { return architecture_id_; }
  const Shape& input_shape() const { return input_shape_; }
  std::size_t n_classes() const { return n_classes_; }
  const std::vector<Layer>& layers() const { return layers_; }
  ParameterStore& params() { return params_; }
  const ParameterStore& params() const { return params_; }

  // Per-sample shape of each activation site; site 0 is the input and site
  // i + 1 is the output of layer i.
  std::vector<Shape> SiteShapes() const;
  std::size_t num_sites() const { return layers_.size() + 1; }

  // Checks that the layer stack maps the declared input to [B, n_classes].
  void Validate() const;

  // Deterministic He-uniform initialization of conv/linear weights, zero
  // biases, unit GroupNorm scale.
  void InitializeParameters(std::uint64_t seed);

 private:
  std::string architecture_id_;
  Shape input_shape_;
  std::size_t n_classes_;
  std::vector<Layer> layers_;
  ParameterStore params_;
  std::unordered_map<std::string, std::size_t> tag_sites_;
};

}  // namespace psrlab::nn

#endif  // PSRLAB_NN_MODEL_H_
