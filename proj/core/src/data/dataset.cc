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

#include "psrlab/data/dataset.h"

#include "psrlab/util/error.h"

namespace psrlab::data {

nn::Shape DataSet::sample_shape() const {
  Require(!images.empty(), ErrorCode::kFailedPrecondition, "empty dataset");
  return nn::Shape(images.shape().begin() + 1, images.shape().end());
}

void DataSet::Validate() const {
  Require(n_classes >= 1, ErrorCode::kInvalidArgument, "n_classes must be >= 1");
  if (labels.empty()) {
    Require(images.empty(), ErrorCode::kInvalidArgument,
            "images present without labels");
    return;
  }
  Require(images.rank() == 4, ErrorCode::kInvalidArgument,
          "images must be [N, C, H, W], got " + nn::ShapeToString(images.shape()));
  Require(images.dim(0) == labels.size(), ErrorCode::kInvalidArgument,
          "image count " + std::to_string(images.dim(0)) +
              " != label count " + std::to_string(labels.size()));
  for (std::size_t label : labels) {
    Require(label < n_classes, ErrorCode::kInvalidArgument,
            "label " + std::to_string(label) + " >= n_classes");
  }
  for (float v : images.data()) {
    Require(v >= 0.0f && v <= 1.0f, ErrorCode::kInvalidArgument,
            "pixel outside [0, 1]");
  }
}

nn::Tensor DataSet::Images(std::span<const std::size_t> indices) const {
  return images.Gather(indices);
}

nn::Labels DataSet::Labels(std::span<const std::size_t> indices) const {
  nn::Labels out;
  out.reserve(indices.size());
  for (std::size_t i : indices) {
    Require(i < labels.size(), ErrorCode::kOutOfRange, "sample index out of range");
    out.push_back(labels[i]);
  }
  return out;
}

DataSet DataSet::Subset(std::span<const std::size_t> indices) const {
  DataSet out;
  out.n_classes = n_classes;
  out.provenance = provenance;
  if (indices.empty()) return out;
  out.images = Images(indices);
  out.labels = Labels(indices);
  return out;
}

DataSet Merge(std::span<const DataSet> parts) {
  Require(!parts.empty(), ErrorCode::kInvalidArgument, "merge of nothing");
  DataSet out;
  out.n_classes = parts[0].n_classes;
  out.provenance = parts[0].provenance;
  std::vector<nn::Tensor> images;
  for (const DataSet& p : parts) {
    Require(p.n_classes == out.n_classes, ErrorCode::kInvalidArgument,
            "merging datasets with different class counts");
    if (p.empty()) continue;
    images.push_back(p.images);
    out.labels.insert(out.labels.end(), p.labels.begin(), p.labels.end());
  }
  if (!images.empty()) out.images = nn::Concat(images);
  return out;
}

std::vector<std::size_t> ClassHistogram(const DataSet& ds) {
  std::vector<std::size_t> h(ds.n_classes, 0);
  for (std::size_t label : ds.labels) ++h.at(label);
  return h;
}

}  // namespace psrlab::data
