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

#include "psrlab/nn/tensor.h"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "psrlab/util/error.h"

namespace psrlab::nn {

std::size_t NumElements(const Shape& shape) {
  std::size_t n = 1;
  for (std::size_t d : shape) n *= d;
  return n;
}

std::string ShapeToString(const Shape& shape) {
  std::ostringstream out;
  out << '[';
  for (std::size_t i = 0; i < shape.size(); ++i) {
    if (i) out << ',';
    out << shape[i];
  }
  out << ']';
  return out.str();
}

namespace {

void ValidateShape(const Shape& shape) {
  Require(!shape.empty(), ErrorCode::kShapeMismatch, "tensor rank must be >= 1");
  for (std::size_t d : shape) {
    Require(d > 0, ErrorCode::kShapeMismatch,
            "tensor dimensions must be positive, got " + ShapeToString(shape));
  }
}

}  // namespace

Tensor::Tensor(Shape shape, float fill) : shape_(std::move(shape)) {
  ValidateShape(shape_);
  data_.assign(NumElements(shape_), fill);
}

Tensor::Tensor(Shape shape, std::vector<float> data)
    : shape_(std::move(shape)), data_(std::move(data)) {
  ValidateShape(shape_);
  Require(NumElements(shape_) == data_.size(), ErrorCode::kShapeMismatch,
          "data length " + std::to_string(data_.size()) +
              " does not match shape " + ShapeToString(shape_));
}

std::span<float> Tensor::grad() {
  Require(grad_.has_value(), ErrorCode::kFailedPrecondition,
          "tensor has no gradient buffer");
  return *grad_;
}

std::span<const float> Tensor::grad() const {
  Require(grad_.has_value(), ErrorCode::kFailedPrecondition,
          "tensor has no gradient buffer");
  return *grad_;
}

void Tensor::ZeroGrad() { grad_.emplace(data_.size(), 0.0f); }

Tensor Tensor::Reshaped(Shape shape) const {
  Require(NumElements(shape) == data_.size(), ErrorCode::kShapeMismatch,
          "cannot reshape " + ShapeToString(shape_) + " to " +
              ShapeToString(shape));
  return Tensor(std::move(shape), data_);
}

std::size_t Tensor::RowSize() const {
  return shape_.empty() ? 0 : data_.size() / shape_[0];
}

Tensor Tensor::Slice(std::size_t begin, std::size_t end) const {
  Require(begin < end && end <= dim(0), ErrorCode::kOutOfRange,
          "bad slice [" + std::to_string(begin) + "," + std::to_string(end) +
              ") of " + ShapeToString(shape_));
  Shape s = shape_;
  s[0] = end - begin;
  const std::size_t row = RowSize();
  return Tensor(std::move(s),
                std::vector<float>(data_.begin() + begin * row,
                                   data_.begin() + end * row));
}

Tensor Tensor::Gather(std::span<const std::size_t> rows) const {
  Require(!rows.empty(), ErrorCode::kOutOfRange, "gather of zero rows");
  Shape s = shape_;
  s[0] = rows.size();
  const std::size_t row = RowSize();
  std::vector<float> out;
  out.reserve(rows.size() * row);
  for (std::size_t r : rows) {
    Require(r < dim(0), ErrorCode::kOutOfRange, "gather row out of range");
    out.insert(out.end(), data_.begin() + r * row,
               data_.begin() + (r + 1) * row);
  }
  return Tensor(std::move(s), std::move(out));
}

bool Tensor::AllFinite() const {
  return std::all_of(data_.begin(), data_.end(),
                     [](float v) { return std::isfinite(v); });
}

void Tensor::Fill(float v) { std::fill(data_.begin(), data_.end(), v); }

Tensor Concat(std::span<const Tensor> parts) {
  Require(!parts.empty(), ErrorCode::kInvalidArgument, "concat of nothing");
  Shape s = parts[0].shape();
  std::size_t rows = 0;
  std::vector<float> out;
  for (const Tensor& t : parts) {
    Require(t.rank() == s.size() &&
                std::equal(s.begin() + 1, s.end(), t.shape().begin() + 1),
            ErrorCode::kShapeMismatch, "concat trailing dims differ");
    rows += t.dim(0);
    out.insert(out.end(), t.data().begin(), t.data().end());
  }
  s[0] = rows;
  return Tensor(std::move(s), std::move(out));
}

}  // namespace psrlab::nn
