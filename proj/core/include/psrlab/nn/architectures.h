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

#ifndef PSRLAB_NN_ARCHITECTURES_H_
#define PSRLAB_NN_ARCHITECTURES_H_

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "psrlab/nn/model.h"

namespace psrlab::nn {

inline constexpr const char* kMicroResNet9 = "micro-resnet-9";
inline constexpr const char* kMicroResNet18Like = "micro-resnet-18-like";

struct ArchitectureConfig {
  std::string id = kMicroResNet9;
  std::size_t in_channels = 1;
  std::size_t image_size = 12;
  std::size_t n_classes = 10;
  // Stage widths; empty selects the default for the architecture
  // ({16, 32} for micro-resnet-9, {16, 32, 64} for micro-resnet-18-like).
  std::vector<std::size_t> widths;
  // GroupNorm group count; 0 selects min(8, channels).
  std::size_t groups = 0;
};

// micro-resnet-9: stem conv, strided conv stage, one residual block.
// micro-resnet-18-like: stem conv and four residual blocks over three widths
// with strided transitions. Both end in global average pooling and a linear
// classifier; every normalization is GroupNorm.
Model BuildModel(const ArchitectureConfig& config, std::uint64_t seed);

std::vector<std::size_t> DefaultWidths(const std::string& id);
std::size_t DefaultGroups(std::size_t channels);

}  // namespace psrlab::nn

#endif  // PSRLAB_NN_ARCHITECTURES_H_
