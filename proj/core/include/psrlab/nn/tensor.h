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

#ifndef PSRLAB_NN_TENSOR_H_
#define PSRLAB_NN_TENSOR_H_

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace psrlab::nn {

using Shape = std::vector<std::size_t>;

std::size_t NumElements(const Shape& shape);
std::string ShapeToString(const Shape& shape);

// Dense row-major float32 array. Every dimension is positive and the data
// length always equals the product of the shape. An optional gradient buffer
// of identical shape can be attached.
class Tensor {
 public:
  Tensor() = default;
  explicit Tensor(Shape shape, float fill = 0.0f);
  Tensor(Shape shape, std::vector<float> data);

  const Shape& shape() const { return shape_; }
  std::size_t rank() const { return shape_.size(); }
  std::size_t dim(std::size_t axis) const { return shape_.at(axis); }
  std::size_t size() const { return data_.size(); }
  bool empty() const { return data_.empty(); }

  std::span<float> data() { return data_; }
  std::span<const float> data() const { return data_; }
  const std::vector<float>& values() const { return data_; }
  float* raw() { return data_.data(); }
  const float* raw() const { return data_.data(); }

  float& operator[](std::size_t i) { return data_[i]; }
  float operator[](std::size_t i) const { return data_[i]; }

  bool has_grad() const { return grad_.has_value(); }
  std::span<float> grad();
  std::span<const float> grad() const;
  // Allocates (or clears) the gradient buffer.
  void ZeroGrad();
  void DropGrad() { grad_.reset(); }

  // Same data, new shape with an equal element count.
  Tensor Reshaped(Shape shape) const;
  // Rows [begin, end) along axis 0.
  Tensor Slice(std::size_t begin, std::size_t end) const;
  // Selected rows along axis 0, in the given order.
  Tensor Gather(std::span<const std::size_t> rows) const;
  // Size of one axis-0 row.
  std::size_t RowSize() const;

  bool AllFinite() const;
  void Fill(float v);

  friend bool operator==(const Tensor& a, const Tensor& b) {
    return a.shape_ == b.shape_ && a.data_ == b.data_;
  }

 private:
  Shape shape_;
  std::vector<float> data_;
  std::optional<std::vector<float>> grad_;
};

// Concatenates tensors along axis 0; trailing dims must agree.
Tensor Concat(std::span<const Tensor> parts);

}  // namespace psrlab::nn

#endif  // PSRLAB_NN_TENSOR_H_
