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

#include <cmath>
#include <limits>
#include <vector>

#include <gmock/gmock.h>
#include <gtest/gtest.h>

#include "expect_error.h"

namespace psrlab::nn {
namespace {

using ::testing::ElementsAre;

TEST(TensorTest, ShapeAndFill) {
  const Tensor t({2, 3}, 1.5f);
  EXPECT_EQ(t.rank(), 2u);
  EXPECT_EQ(t.size(), 6u);
  EXPECT_EQ(t.RowSize(), 3u);
  for (float v : t.data()) EXPECT_EQ(v, 1.5f);
}

TEST(TensorTest, RejectsInconsistentData) {
  EXPECT_PSR_ERROR(Tensor({2, 2}, std::vector<float>{1, 2, 3}), ErrorCode::kShapeMismatch);
  EXPECT_PSR_ERROR(Tensor({2, 0}), ErrorCode::kShapeMismatch);
}

TEST(TensorTest, SliceGatherConcat) {
  const Tensor t({3, 2}, std::vector<float>{0, 1, 2, 3, 4, 5});
  EXPECT_THAT(t.Slice(1, 3).values(), ElementsAre(2, 3, 4, 5));
  const std::vector<std::size_t> rows{2, 0};
  EXPECT_THAT(t.Gather(rows).values(), ElementsAre(4, 5, 0, 1));
  const std::vector<Tensor> parts{t.Slice(0, 1), t.Slice(2, 3)};
  const Tensor joined = Concat(parts);
  EXPECT_EQ(joined.shape(), (Shape{2, 2}));
  EXPECT_THAT(joined.values(), ElementsAre(0, 1, 4, 5));
  EXPECT_PSR_ERROR(t.Slice(2, 4), ErrorCode::kOutOfRange);
}

TEST(TensorTest, ReshapeKeepsData) {
  const Tensor t({2, 3}, std::vector<float>{0, 1, 2, 3, 4, 5});
  const Tensor r = t.Reshaped({3, 2});
  EXPECT_EQ(r.values(), t.values());
  EXPECT_PSR_ERROR(t.Reshaped({4, 2}), ErrorCode::kShapeMismatch);
}

TEST(TensorTest, GradHasSameShape) {
  Tensor t({2, 2}, 3.0f);
  EXPECT_FALSE(t.has_grad());
  t.ZeroGrad();
  ASSERT_TRUE(t.has_grad());
  EXPECT_EQ(t.grad().size(), t.size());
  t.DropGrad();
  EXPECT_FALSE(t.has_grad());
}

TEST(TensorTest, FinitenessCheck) {
  Tensor t({3}, 0.0f);
  EXPECT_TRUE(t.AllFinite());
  t[1] = std::numeric_limits<float>::quiet_NaN();
  EXPECT_FALSE(t.AllFinite());
  t[1] = std::numeric_limits<float>::infinity();
  EXPECT_FALSE(t.AllFinite());
}

}  // namespace
}  // namespace psrlab::nn
