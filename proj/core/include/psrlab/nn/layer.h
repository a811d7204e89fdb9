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

#ifndef PSRLAB_NN_LAYER_H_
#define PSRLAB_NN_LAYER_H_

#include <cstddef>
#include <string>
#include <variant>
#include <vector>

#include "psrlab/nn/tensor.h"

namespace psrlab::nn {

struct Conv2d {
  std::size_t in_channels = 0;
  std::size_t out_channels = 0;
  std::size_t kernel = 3;
  std::size_t stride = 1;
  std::size_t pad = 1;
};

// Per-sample normalization over channel groups. Statistics never cross the
// batch dimension, which keeps per-sample gradients well defined.
struct GroupNorm {
  std::size_t groups = 1;
  std::size_t channels = 0;
  double eps = 1e-5;
};

struct ReLU {};

struct Linear {
  std::size_t in_features = 0;
  std::size_t out_features = 0;
};

// Adds the activation recorded under `source` (a layer tag, or "input").
struct ResidualAdd {
  std::string source;
};

// Non-overlapping k x k max pooling (stride k).
struct MaxPool {
  std::size_t kernel = 2;
};

struct GlobalAvgPool {};
struct Flatten {};

// The closed set of layer kinds. There is deliberately no alternative that
// computes statistics across the batch.
using LayerKind = std::variant<Conv2d, GroupNorm, ReLU, Linear, ResidualAdd,
                               MaxPool, GlobalAvgPool, Flatten>;

std::string_view LayerKindName(const LayerKind& kind);

struct Layer {
  LayerKind kind;
  // Unique within a model; parameters are named "<name>.weight" etc.
  std::string name;
  // Optional label so a later ResidualAdd can refer to this layer's output.
  std::string tag;
  // Parameter-store indices owned by this layer (weight first, then bias).
  std::vector<std::size_t> params;
  // For ResidualAdd: activation site of the source (0 = model input).
  std::size_t source_site = 0;
};

// Output shape of `kind` applied to a batch of shape `in`; throws
// kShapeMismatch if the layer cannot consume `in`.
Shape InferOutputShape(const LayerKind& kind, const Shape& in);

}  // namespace psrlab::nn

#endif  // PSRLAB_NN_LAYER_H_
