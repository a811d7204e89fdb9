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

#include "psrlab/nn/architectures.h"

#include <algorithm>

#include "psrlab/util/error.h"

namespace psrlab::nn {
namespace {

class Builder {
 public:
  Builder(Model& model, std::size_t groups) : model_(model), groups_(groups) {}

  // conv -> group norm -> relu
  void ConvBlock(const std::string& name, std::size_t in, std::size_t out,
                 std::size_t stride, const std::string& tag = "") {
    model_.Add(name + ".conv", Conv2d{in, out, 3, stride, 1});
    model_.Add(name + ".gn", GroupNorm{Groups(out), out});
    model_.Add(name + ".relu", ReLU{}, tag);
  }

  // conv-gn-relu-conv-gn, identity skip from `source`, relu.
  void ResidualBlock(const std::string& name, std::size_t width,
                     const std::string& source, const std::string& tag) {
    ConvBlock(name + ".a", width, width, 1);
    model_.Add(name + ".b.conv", Conv2d{width, width, 3, 1, 1});
    model_.Add(name + ".b.gn", GroupNorm{Groups(width), width});
    model_.Add(name + ".add", ResidualAdd{source});
    model_.Add(name + ".relu", ReLU{}, tag);
  }

  void Head(std::size_t width, std::size_t n_classes) {
    model_.Add("pool", GlobalAvgPool{});
    model_.Add("flatten", Flatten{});
    model_.Add("fc", Linear{width, n_classes});
  }

 private:
  std::size_t Groups(std::size_t channels) const {
    return groups_ == 0 ? DefaultGroups(channels) : groups_;
  }

  Model& model_;
  std::size_t groups_;
};

}  // namespace

std::size_t DefaultGroups(std::size_t channels) {
  std::size_t g = std::min<std::size_t>(8, channels);
  while (channels % g != 0) --g;
  return g;
}

std::vector<std::size_t> DefaultWidths(const std::string& id) {
  if (id == kMicroResNet9) return {16, 32};
  if (id == kMicroResNet18Like) return {16, 32, 64};
  Fail(ErrorCode::kInvalidArgument, "unknown architecture '" + id + "'");
}

Model BuildModel(const ArchitectureConfig& config, std::uint64_t seed) {
  std::vector<std::size_t> widths =
      config.widths.empty() ? DefaultWidths(config.id) : config.widths;
  Require(config.in_channels > 0 && config.image_size > 0 &&
              config.n_classes >= 2,
          ErrorCode::kInvalidArgument, "bad architecture dimensions");
  for (std::size_t w : widths) {
    Require(w > 0, ErrorCode::kInvalidArgument, "stage width must be positive");
  }
  Model model(config.id,
              {config.in_channels, config.image_size, config.image_size},
              config.n_classes);
  Builder b(model, config.groups);
  if (config.id == kMicroResNet9) {
    Require(widths.size() == 2, ErrorCode::kInvalidArgument,
            "micro-resnet-9 takes 2 widths");
    b.ConvBlock("stem", config.in_channels, widths[0], 1);
    b.ConvBlock("stage2", widths[0], widths[1], 2, "stage2");
    b.ResidualBlock("res1", widths[1], "stage2", "res1");
    b.Head(widths[1], config.n_classes);
  } else if (config.id == kMicroResNet18Like) {
    Require(widths.size() == 3, ErrorCode::kInvalidArgument,
            "micro-resnet-18-like takes 3 widths");
    b.ConvBlock("stem", config.in_channels, widths[0], 1, "stem");
    b.ResidualBlock("block1", widths[0], "stem", "block1");
    b.ConvBlock("down2", widths[0], widths[1], 2, "down2");
    b.ResidualBlock("block2", widths[1], "down2", "block2");
    b.ConvBlock("down3", widths[1], widths[2], 2, "down3");
    b.ResidualBlock("block3", widths[2], "down3", "block3");
    b.ResidualBlock("block4", widths[2], "block3", "block4");
    b.Head(widths[2], config.n_classes);
  } else {
    Fail(ErrorCode::kInvalidArgument, "unknown architecture '" + config.id + "'");
  }
  model.Validate();
  model.InitializeParameters(seed);
  return model;
}

}  // namespace psrlab::nn
