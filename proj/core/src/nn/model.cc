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

#include "psrlab/nn/model.h"

#include <cmath>

#include "psrlab/util/error.h"
#include "psrlab/util/rng.h"

namespace psrlab::nn {

std::size_t ParameterStore::Add(std::string name, Tensor value) {
  Require(!index_.contains(name), ErrorCode::kInvalidArgument,
          "duplicate parameter name '" + name + "'");
  const std::size_t i = entries_.size();
  index_.emplace(name, i);
  entries_.emplace_back(std::move(name), std::move(value));
  return i;
}

std::size_t ParameterStore::index_of(std::string_view name) const {
  auto it = index_.find(std::string(name));
  Require(it != index_.end(), ErrorCode::kOutOfRange,
          "no parameter named '" + std::string(name) + "'");
  return it->second;
}

bool ParameterStore::contains(std::string_view name) const {
  return index_.contains(std::string(name));
}

Tensor& ParameterStore::at(std::string_view name) {
  return entries_[index_of(name)].second;
}

const Tensor& ParameterStore::at(std::string_view name) const {
  return entries_[index_of(name)].second;
}

std::size_t ParameterStore::TotalElements() const {
  std::size_t n = 0;
  for (const auto& [name, t] : entries_) n += t.size();
  return n;
}

Gradients ZerosLike(const ParameterStore& params) {
  Gradients g;
  g.reserve(params.size());
  for (std::size_t i = 0; i < params.size(); ++i) {
    g.emplace_back(params.at(i).shape(), 0.0f);
  }
  return g;
}

double GlobalL2Norm(const Gradients& grads) {
  double sum = 0.0;
  for (const Tensor& t : grads) {
    for (float v : t.data()) sum += static_cast<double>(v) * v;
  }
  return std::sqrt(sum);
}

std::vector<float> FlattenGradients(const Gradients& grads) {
  std::size_t n = 0;
  for (const Tensor& t : grads) n += t.size();
  std::vector<float> flat;
  flat.reserve(n);
  for (const Tensor& t : grads) {
    flat.insert(flat.end(), t.data().begin(), t.data().end());
  }
  return flat;
}

void UnflattenInto(std::span<const float> flat, Gradients& grads) {
  std::size_t offset = 0;
  for (Tensor& t : grads) {
    Require(offset + t.size() <= flat.size(), ErrorCode::kShapeMismatch,
            "flat gradient too short");
    std::copy(flat.begin() + offset, flat.begin() + offset + t.size(),
              t.data().begin());
    offset += t.size();
  }
  Require(offset == flat.size(), ErrorCode::kShapeMismatch,
          "flat gradient too long");
}

Model::Model(std::string architecture_id, Shape input_shape,
             std::size_t n_classes)
    : architecture_id_(std::move(architecture_id)),
      input_shape_(std::move(input_shape)),
      n_classes_(n_classes) {
  Require(!input_shape_.empty(), ErrorCode::kInvalidArgument,
          "model input shape is empty");
  Require(n_classes_ >= 1, ErrorCode::kInvalidArgument, "n_classes must be >= 1");
  tag_sites_.emplace("input", 0);
}

Model& Model::Add(std::string name, LayerKind kind, std::string tag) {
  for (const Layer& l : layers_) {
    Require(l.name != name, ErrorCode::kInvalidArgument,
            "duplicate layer name '" + name + "'");
  }
  Layer layer{std::move(kind), std::move(name), std::move(tag), {}, 0};
  const std::string& n = layer.name;
  if (auto* c = std::get_if<Conv2d>(&layer.kind)) {
    Require(c->in_channels > 0 && c->out_channels > 0 && c->kernel > 0 &&
                c->stride > 0,
            ErrorCode::kInvalidArgument, "conv2d fields must be positive");
    layer.params.push_back(params_.Add(
        n + ".weight",
        Tensor({c->out_channels, c->in_channels, c->kernel, c->kernel})));
    layer.params.push_back(params_.Add(n + ".bias", Tensor({c->out_channels})));
  } else if (auto* g = std::get_if<GroupNorm>(&layer.kind)) {
    Require(g->groups > 0 && g->channels > 0 && g->channels % g->groups == 0,
            ErrorCode::kInvalidArgument,
            "group_norm channels (" + std::to_string(g->channels) +
                ") must be divisible by groups (" + std::to_string(g->groups) +
                ")");
    Require(g->eps > 0.0, ErrorCode::kInvalidArgument, "group_norm eps <= 0");
    layer.params.push_back(params_.Add(n + ".weight", Tensor({g->channels}, 1.0f)));
    layer.params.push_back(params_.Add(n + ".bias", Tensor({g->channels})));
  } else if (auto* l = std::get_if<Linear>(&layer.kind)) {
    Require(l->in_features > 0 && l->out_features > 0,
            ErrorCode::kInvalidArgument, "linear fields must be positive");
    layer.params.push_back(
        params_.Add(n + ".weight", Tensor({l->out_features, l->in_features})));
    layer.params.push_back(params_.Add(n + ".bias", Tensor({l->out_features})));
  } else if (auto* r = std::get_if<ResidualAdd>(&layer.kind)) {
    auto it = tag_sites_.find(r->source);
    Require(it != tag_sites_.end(), ErrorCode::kInvalidArgument,
            "residual source '" + r->source + "' is not an earlier tag");
    layer.source_site = it->second;
  } else if (auto* p = std::get_if<MaxPool>(&layer.kind)) {
    Require(p->kernel > 0, ErrorCode::kInvalidArgument, "max_pool kernel is 0");
  }
  if (!layer.tag.empty()) {
    Require(!tag_sites_.contains(layer.tag), ErrorCode::kInvalidArgument,
            "duplicate tag '" + layer.tag + "'");
    tag_sites_.emplace(layer.tag, layers_.size() + 1);
  }
  layers_.push_back(std::move(layer));
  return *this;
}

std::vector<Shape> Model::SiteShapes() const {
  std::vector<Shape> sites;
  Shape s = input_shape_;
  s.insert(s.begin(), 1);
  sites.push_back(s);
  for (const Layer& l : layers_) {
    s = InferOutputShape(l.kind, s);
    if (const auto* r = std::get_if<ResidualAdd>(&l.kind)) {
      Require(sites[l.source_site] == s, ErrorCode::kShapeMismatch,
              "residual '" + l.name + "' adds " +
                  ShapeToString(sites[l.source_site]) + " to " +
                  ShapeToString(s) + " from '" + r->source + "'");
    }
    sites.push_back(s);
  }
  for (Shape& site : sites) site.erase(site.begin());
  return sites;
}

void Model::Validate() const {
  const std::vector<Shape> sites = SiteShapes();
  const Shape& out = sites.back();
  Require(out.size() == 1 && out[0] == n_classes_, ErrorCode::kShapeMismatch,
          "model output per sample is " + ShapeToString(out) + ", expected [" +
              std::to_string(n_classes_) + "]");
}

void Model::InitializeParameters(std::uint64_t seed) {
  Rng rng(DeriveSeed(seed, {0x1417}));
  for (const Layer& layer : layers_) {
    std::size_t fan_in = 0;
    if (const auto* c = std::get_if<Conv2d>(&layer.kind)) {
      fan_in = c->in_channels * c->kernel * c->kernel;
    } else if (const auto* l = std::get_if<Linear>(&layer.kind)) {
      fan_in = l->in_features;
    } else if (std::holds_alternative<GroupNorm>(layer.kind)) {
      params_.at(layer.params[0]).Fill(1.0f);
      params_.at(layer.params[1]).Fill(0.0f);
      continue;
    } else {
      continue;
    }
    const double bound = std::sqrt(6.0 / static_cast<double>(fan_in));
    for (float& w : params_.at(layer.params[0]).data()) {
      w = static_cast<float>(rng.Uniform(-bound, bound));
    }
    params_.at(layer.params[1]).Fill(0.0f);
  }
}

}  // namespace psrlab::nn
