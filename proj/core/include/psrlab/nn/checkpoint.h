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

#ifndef PSRLAB_NN_CHECKPOINT_H_
#define PSRLAB_NN_CHECKPOINT_H_

// Binary tensor container ("PSRL"), all integers little-endian:
//
//   magic "PSRL" | u32 version | u32 tensor count
//   per tensor: u16 name length | UTF-8 name | u8 dtype (0 = f32, 1 = i8)
//               | u8 rank | u32 dims[rank] | raw payload

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "psrlab/nn/model.h"

namespace psrlab::nn {

enum class DType : std::uint8_t { kF32 = 0, kI8 = 1 };

inline constexpr std::uint32_t kContainerVersion = 1;

struct StoredTensor {
  std::string name;
  DType dtype = DType::kF32;
  std::vector<std::uint32_t> dims;
  std::vector<float> f32;         // used when dtype == kF32
  std::vector<std::int8_t> i8;    // used when dtype == kI8

  static StoredTensor Float(std::string name, const Tensor& t);
  static StoredTensor Int8(std::string name, std::vector<std::uint32_t> dims,
                           std::vector<std::int8_t> values);
  // UTF-8 text carried as an int8 vector.
  static StoredTensor Text(std::string name, const std::string& text);

  std::size_t element_count() const;
  Tensor ToTensor() const;        // f32 only
  std::string ToText() const;     // i8 only
};

struct Container {
  std::uint32_t version = kContainerVersion;
  std::vector<StoredTensor> tensors;

  const StoredTensor* Find(const std::string& name) const;
  const StoredTensor& Get(const std::string& name) const;
};

std::vector<std::uint8_t> EncodeContainer(const Container& container);
// Throws kFormat on bad magic, unknown dtype, or truncated payload.
Container DecodeContainer(std::span<const std::uint8_t> bytes);

void WriteContainer(const std::string& path, const Container& container);
Container ReadContainer(const std::string& path);

// Model checkpoints store the layer stack as JSON text under
// kModelDescriptionKey followed by every parameter in store order.
inline constexpr const char* kModelDescriptionKey = "meta.model";

std::string DescribeModel(const Model& model);
// Rebuilds the layer stack (parameters zero-initialized) from DescribeModel.
Model ModelFromDescription(const std::string& json_text);

Container ModelToContainer(const Model& model);
Model ModelFromContainer(const Container& container);
void SaveModel(const std::string& path, const Model& model);
Model LoadModel(const std::string& path);

}  // namespace psrlab::nn

#endif  // PSRLAB_NN_CHECKPOINT_H_
