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

#include "psrlab/nn/layer.h"

#include "psrlab/util/error.h"

namespace psrlab::nn {
namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

void RequireRank(const Shape& in, std::size_t rank, std::string_view layer) {
  Require(in.size() == rank, ErrorCode::kShapeMismatch,
          std::string(layer) + " expects rank " + std::to_string(rank) +
              " input, got " + ShapeToString(in));
}

}  // namespace

std::string_view LayerKindName(const LayerKind& kind) {
  return std::visit(
      Overloaded{
          [](const Conv2d&) { return std::string_view("conv2d"); },
          [](const GroupNorm&) { return std::string_view("group_norm"); },
          [](const ReLU&) { return std::string_view("relu"); },
          [](const Linear&) { return std::string_view("linear"); },
          [](const ResidualAdd&) { return std::string_view("residual_add"); },
          [](const MaxPool&) { return std::string_view("max_pool"); },
          [](const GlobalAvgPool&) {
            return std::string_view("global_avg_pool");
          },
          [](const Flatten&) { return std::string_view("flatten"); },
      },
      kind);
}

Shape InferOutputShape(const LayerKind& kind, const Shape& in) {
  return std::visit(
      Overloaded{
          [&](const Conv2d& c) -> Shape {
            RequireRank(in, 4, "conv2d");
            Require(in[1] == c.in_channels, ErrorCode::kShapeMismatch,
                    "conv2d expects " + std::to_string(c.in_channels) +
                        " channels, got " + ShapeToString(in));
            Require(in[2] + 2 * c.pad >= c.kernel &&
                        in[3] + 2 * c.pad >= c.kernel,
                    ErrorCode::kShapeMismatch, "conv2d kernel exceeds input");
            const std::size_t h = (in[2] + 2 * c.pad - c.kernel) / c.stride + 1;
            const std::size_t w = (in[3] + 2 * c.pad - c.kernel) / c.stride + 1;
            return {in[0], c.out_channels, h, w};
          },
          [&](const GroupNorm& g) -> Shape {
            RequireRank(in, 4, "group_norm");
            Require(in[1] == g.channels, ErrorCode::kShapeMismatch,
                    "group_norm channel count mismatch: " + ShapeToString(in));
            return in;
          },
          [&](const ReLU&) -> Shape { return in; },
          [&](const Linear& l) -> Shape {
            RequireRank(in, 2, "linear");
            Require(in[1] == l.in_features, ErrorCode::kShapeMismatch,
                    "linear expects " + std::to_string(l.in_features) +
                        " features, got " + ShapeToString(in));
            return {in[0], l.out_features};
          },
          [&](const ResidualAdd&) -> Shape { return in; },
          [&](const MaxPool& p) -> Shape {
            RequireRank(in, 4, "max_pool");
            Require(in[2] >= p.kernel && in[3] >= p.kernel,
                    ErrorCode::kShapeMismatch, "max_pool kernel exceeds input");
            return {in[0], in[1], in[2] / p.kernel, in[3] / p.kernel};
          },
          [&](const GlobalAvgPool&) -> Shape {
            RequireRank(in, 4, "global_avg_pool");
            return {in[0], in[1], 1, 1};
          },
          [&](const Flatten&) -> Shape {
            Require(!in.empty(), ErrorCode::kShapeMismatch, "flatten of scalar");
            return {in[0], NumElements(in) / in[0]};
          },
      },
      kind);
}

}  // namespace psrlab::nn
