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

#ifndef PSRLAB_DATA_DATASET_H_
#define PSRLAB_DATA_DATASET_H_

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "psrlab/nn/loss.h"
#include "psrlab/nn/tensor.h"

namespace psrlab::data {

// Labelled image set. images is [N, C, H, W] with pixels in [0, 1]; an empty
// set has an empty images tensor and no labels.
struct DataSet {
  nn::Tensor images;
  nn::Labels labels;
  std::size_t n_classes = 0;
  std::string provenance;

  std::size_t size() const { return labels.size(); }
  bool empty() const { return labels.empty(); }
  // Per-sample shape {C, H, W}.
  nn::Shape sample_shape() const;

  // Throws kInvalidArgument if counts disagree, a label is out of range, or a
  // pixel lies outside [0, 1].
  void Validate() const;

  // Samples at `indices`, in that order.
  DataSet Subset(std::span<const std::size_t> indices) const;
  nn::Tensor Images(std::span<const std::size_t> indices) const;
  nn::Labels Labels(std::span<const std::size_t> indices) const;
};

// Concatenation of sets with identical sample shape and class count.
DataSet Merge(std::span<const DataSet> parts);

// Counts per class, size n_classes.
std::vector<std::size_t> ClassHistogram(const DataSet& ds);

}  // namespace psrlab::data

#endif  // PSRLAB_DATA_DATASET_H_
