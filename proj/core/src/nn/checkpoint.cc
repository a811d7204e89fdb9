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

#include "psrlab/nn/checkpoint.h"

#include <cstring>
#include <fstream>
#include <iterator>

#include "json.hpp"
#include "psrlab/util/error.h"

namespace psrlab::nn {
namespace {

using json = nlohmann::json;

constexpr char kMagic[4] = {'P', 'S', 'R', 'L'};

template <typename T>
void PutLe(std::vector<std::uint8_t>& out, T value) {
  for (std::size_t i = 0; i < sizeof(T); ++i) {
    out.push_back(static_cast<std::uint8_t>(value >> (8 * i)));
  }
}

class Reader {
 public:
  explicit Reader(std::span<const std::uint8_t> bytes) : bytes_(bytes) {}

  template <typename T>
  T Le() {
    Need(sizeof(T));
    T value = 0;
    for (std::size_t i = 0; i < sizeof(T); ++i) {
      value |= static_cast<T>(static_cast<T>(bytes_[pos_ + i]) << (8 * i));
    }
    pos_ += sizeof(T);
    return value;
  }
  std::span<const std::uint8_t> Take(std::size_t n) {
    Need(n);
    auto s = bytes_.subspan(pos_, n);
    pos_ += n;
    return s;
  }
  bool done() const { return pos_ == bytes_.size(); }

 private:
  void Need(std::size_t n) const {
    Require(pos_ + n <= bytes_.size(), ErrorCode::kFormat,
            "truncated container at byte " + std::to_string(pos_));
  }
  std::span<const std::uint8_t> bytes_;
  std::size_t pos_ = 0;
};

json LayerToJson(const Layer& layer) {
  json j;
  j["name"] = layer.name;
  j["kind"] = std::string(LayerKindName(layer.kind));
  if (!layer.tag.empty()) j["tag"] = layer.tag;
  if (const auto* c = std::get_if<Conv2d>(&layer.kind)) {
    j["in"] = c->in_channels;
    j["out"] = c->out_channels;
    j["kernel"] = c->kernel;
    j["stride"] = c->stride;
    j["pad"] = c->pad;
  } else if (const auto* g = std::get_if<GroupNorm>(&layer.kind)) {
    j["groups"] = g->groups;
    j["channels"] = g->channels;
    j["eps"] = g->eps;
  } else if (const auto* l = std::get_if<Linear>(&layer.kind)) {
    j["in"] = l->in_features;
    j["out"] = l->out_features;
  } else if (const auto* r = std::get_if<ResidualAdd>(&layer.kind)) {
    j["source"] = r->source;
  } else if (const auto* p = std::get_if<MaxPool>(&layer.kind)) {
    j["kernel"] = p->kernel;
  }
  return j;
}

LayerKind LayerKindFromJson(const json& j) {
  const std::string kind = j.at("kind").get<std::string>();
  if (kind == "conv2d") {
    return Conv2d{j.at("in").get<std::size_t>(), j.at("out").get<std::size_t>(),
                  j.at("kernel").get<std::size_t>(),
                  j.at("stride").get<std::size_t>(),
                  j.at("pad").get<std::size_t>()};
  }
  if (kind == "group_norm") {
    return GroupNorm{j.at("groups").get<std::size_t>(),
                     j.at("channels").get<std::size_t>(),
                     j.at("eps").get<double>()};
  }
  if (kind == "relu") return ReLU{};
  if (kind == "linear") {
    return Linear{j.at("in").get<std::size_t>(), j.at("out").get<std::size_t>()};
  }
  if (kind == "residual_add") return ResidualAdd{j.at("source").get<std::string>()};
  if (kind == "max_pool") return MaxPool{j.at("kernel").get<std::size_t>()};
  if (kind == "global_avg_pool") return GlobalAvgPool{};
  if (kind == "flatten") return Flatten{};
  Fail(ErrorCode::kFormat, "unknown layer kind '" + kind + "'");
}

}  // namespace

StoredTensor StoredTensor::Float(std::string name, const Tensor& t) {
  StoredTensor s;
  s.name = std::move(name);
  s.dtype = DType::kF32;
  for (std::size_t d : t.shape()) s.dims.push_back(static_cast<std::uint32_t>(d));
  s.f32 = t.values();
  return s;
}

StoredTensor StoredTensor::Int8(std::string name,
                                std::vector<std::uint32_t> dims,
                                std::vector<std::int8_t> values) {
  StoredTensor s;
  s.name = std::move(name);
  s.dtype = DType::kI8;
  s.dims = std::move(dims);
  s.i8 = std::move(values);
  Require(s.element_count() == s.i8.size(), ErrorCode::kShapeMismatch,
          "int8 tensor '" + s.name + "' has wrong element count");
  return s;
}

StoredTensor StoredTensor::Text(std::string name, const std::string& text) {
  std::vector<std::int8_t> bytes(text.size());
  std::memcpy(bytes.data(), text.data(), text.size());
  return Int8(std::move(name), {static_cast<std::uint32_t>(text.size())},
              std::move(bytes));
}

std::size_t StoredTensor::element_count() const {
  std::size_t n = 1;
  for (std::uint32_t d : dims) n *= d;
  return n;
}

Tensor StoredTensor::ToTensor() const {
  Require(dtype == DType::kF32, ErrorCode::kFormat,
          "tensor '" + name + "' is not f32");
  return Tensor(Shape(dims.begin(), dims.end()), f32);
}

std::string StoredTensor::ToText() const {
  Require(dtype == DType::kI8, ErrorCode::kFormat,
          "tensor '" + name + "' is not a text blob");
  std::string text(i8.size(), '\0');
  std::memcpy(text.data(), i8.data(), i8.size());
  return text;
}

const StoredTensor* Container::Find(const std::string& name) const {
  for (const StoredTensor& t : tensors) {
    if (t.name == name) return &t;
  }
  return nullptr;
}

const StoredTensor& Container::Get(const std::string& name) const {
  const StoredTensor* t = Find(name);
  Require(t != nullptr, ErrorCode::kFormat, "container has no tensor '" + name + "'");
  return *t;
}

std::vector<std::uint8_t> EncodeContainer(const Container& container) {
  std::vector<std::uint8_t> out(kMagic, kMagic + 4);
  PutLe<std::uint32_t>(out, container.version);
  PutLe<std::uint32_t>(out, static_cast<std::uint32_t>(container.tensors.size()));
  for (const StoredTensor& t : container.tensors) {
    Require(t.name.size() <= 0xffff, ErrorCode::kInvalidArgument,
            "tensor name too long");
    Require(t.dims.size() <= 0xff, ErrorCode::kInvalidArgument, "rank > 255");
    PutLe<std::uint16_t>(out, static_cast<std::uint16_t>(t.name.size()));
    out.insert(out.end(), t.name.begin(), t.name.end());
    out.push_back(static_cast<std::uint8_t>(t.dtype));
    out.push_back(static_cast<std::uint8_t>(t.dims.size()));
    for (std::uint32_t d : t.dims) PutLe<std::uint32_t>(out, d);
    const std::size_t n = t.element_count();
    if (t.dtype == DType::kF32) {
      Require(t.f32.size() == n, ErrorCode::kShapeMismatch,
              "tensor '" + t.name + "' payload does not match dims");
      for (float v : t.f32) {
        std::uint32_t bits;
        std::memcpy(&bits, &v, sizeof bits);
        PutLe<std::uint32_t>(out, bits);
      }
    } else {
      Require(t.i8.size() == n, ErrorCode::kShapeMismatch,
              "tensor '" + t.name + "' payload does not match dims");
      for (std::int8_t v : t.i8) out.push_back(static_cast<std::uint8_t>(v));
    }
  }
  return out;
}

Container DecodeContainer(std::span<const std::uint8_t> bytes) {
  Reader r(bytes);
  auto magic = r.Take(4);
  Require(std::memcmp(magic.data(), kMagic, 4) == 0, ErrorCode::kFormat,
          "bad magic (not a PSRL container)");
  Container c;
  c.version = r.Le<std::uint32_t>();
  Require(c.version == kContainerVersion, ErrorCode::kFormat,
          "unsupported container version " + std::to_string(c.version));
  const std::uint32_t count = r.Le<std::uint32_t>();
  for (std::uint32_t i = 0; i < count; ++i) {
    StoredTensor t;
    const std::uint16_t len = r.Le<std::uint16_t>();
    auto name = r.Take(len);
    t.name.assign(name.begin(), name.end());
    const std::uint8_t dtype = r.Le<std::uint8_t>();
    Require(dtype <= 1, ErrorCode::kFormat,
            "unknown dtype tag " + std::to_string(dtype));
    t.dtype = static_cast<DType>(dtype);
    const std::uint8_t rank = r.Le<std::uint8_t>();
    for (std::uint8_t d = 0; d < rank; ++d) t.dims.push_back(r.Le<std::uint32_t>());
    const std::size_t n = t.element_count();
    if (t.dtype == DType::kF32) {
      t.f32.resize(n);
      for (std::size_t e = 0; e < n; ++e) {
        const std::uint32_t bits = r.Le<std::uint32_t>();
        std::memcpy(&t.f32[e], &bits, sizeof bits);
      }
    } else {
      auto payload = r.Take(n);
      t.i8.resize(n);
      std::memcpy(t.i8.data(), payload.data(), n);
    }
    c.tensors.push_back(std::move(t));
  }
  Require(r.done(), ErrorCode::kFormat, "trailing bytes after last tensor");
  return c;
}

void WriteContainer(const std::string& path, const Container& container) {
  const std::vector<std::uint8_t> bytes = EncodeContainer(container);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  Require(static_cast<bool>(out), ErrorCode::kIo, "cannot open '" + path + "' for writing");
  out.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
  Require(static_cast<bool>(out), ErrorCode::kIo, "write to '" + path + "' failed");
}

Container ReadContainer(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  Require(static_cast<bool>(in), ErrorCode::kIo, "cannot open '" + path + "'");
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                  std::istreambuf_iterator<char>());
  return DecodeContainer(bytes);
}

std::string DescribeModel(const Model& model) {
  json j;
  j["architecture_id"] = model.architecture_id();
  j["input_shape"] = model.input_shape();
  j["n_classes"] = model.n_classes();
  j["layers"] = json::array();
  for (const Layer& layer : model.layers()) j["layers"].push_back(LayerToJson(layer));
  return j.dump();
}

Model ModelFromDescription(const std::string& json_text) {
  try {
    const json j = json::parse(json_text);
    Model model(j.at("architecture_id").get<std::string>(),
                j.at("input_shape").get<Shape>(),
                j.at("n_classes").get<std::size_t>());
    for (const json& l : j.at("layers")) {
      model.Add(l.at("name").get<std::string>(), LayerKindFromJson(l),
                l.value("tag", std::string()));
    }
    model.Validate();
    return model;
  } catch (const json::exception& e) {
    Fail(ErrorCode::kFormat, std::string("bad model description: ") + e.what());
  }
}

Container ModelToContainer(const Model& model) {
  Container c;
  c.tensors.push_back(StoredTensor::Text(kModelDescriptionKey, DescribeModel(model)));
  const ParameterStore& params = model.params();
  for (std::size_t i = 0; i < params.size(); ++i) {
    c.tensors.push_back(StoredTensor::Float(params.name(i), params.at(i)));
  }
  return c;
}

Model ModelFromContainer(const Container& container) {
  Model model = ModelFromDescription(container.Get(kModelDescriptionKey).ToText());
  ParameterStore& params = model.params();
  for (std::size_t i = 0; i < params.size(); ++i) {
    Tensor t = container.Get(params.name(i)).ToTensor();
    Require(t.shape() == params.at(i).shape(), ErrorCode::kFormat,
            "checkpoint tensor '" + params.name(i) + "' has shape " +
                ShapeToString(t.shape()));
    params.at(i) = std::move(t);
  }
  return model;
}

void SaveModel(const std::string& path, const Model& model) {
  WriteContainer(path, ModelToContainer(model));
}

Model LoadModel(const std::string& path) {
  return ModelFromContainer(ReadContainer(path));
}

}  // namespace psrlab::nn
