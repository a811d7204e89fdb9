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

#include <cmath>
#include <limits>
#include <vector>

#include <gtest/gtest.h>

#include "expect_error.h"
#include "psrlab/data/synthetic.h"

namespace psrlab::data {
namespace {

SyntheticSpec Spec(std::size_t classes, std::size_t per_class, double noise, std::uint64_t seed) {
  SyntheticSpec s;
  s.n_classes = classes;
  s.n_per_class = per_class;
  s.noise_level = noise;
  s.seed = seed;
  return s;
}

TEST(SyntheticTest, SameSeedIsBitIdentical) {
  const DataSet a = GenerateSynthetic(Spec(10, 5, 0.1, 11));
  const DataSet b = GenerateSynthetic(Spec(10, 5, 0.1, 11));
  EXPECT_EQ(a.images, b.images);
  EXPECT_EQ(a.labels, b.labels);
  EXPECT_FALSE(a.images == GenerateSynthetic(Spec(10, 5, 0.1, 12)).images);
}

TEST(SyntheticTest, BalancedLabelsInClassOrder) {
  const DataSet ds = GenerateSynthetic(Spec(2, 100, 0.1, 1));
  ASSERT_EQ(ds.size(), 200u);
  for (std::size_t i = 0; i < 200; ++i) EXPECT_EQ(ds.labels[i], i < 100 ? 0u : 1u);
  EXPECT_EQ(ClassHistogram(ds), (std::vector<std::size_t>{100, 100}));
}

TEST(SyntheticTest, ShapeRangeAndProvenance) {
  SyntheticSpec s = Spec(4, 3, 0.5, 2);
  s.image_size = 9;
  const DataSet ds = GenerateSynthetic(s);
  EXPECT_EQ(ds.images.shape(), (nn::Shape{12, 1, 9, 9}));
  EXPECT_EQ(ds.n_classes, 4u);
  EXPECT_NO_THROW(ds.Validate());
  EXPECT_NE(ds.provenance.find("synthetic"), std::string::npos);
}

// Noiseless samples from one seed classified by their nearest neighbour in a
// noiseless reference set drawn with another seed.
TEST(SyntheticTest, NoiselessClassesSeparableByNearestNeighbour) {
  const DataSet ref = GenerateSynthetic(Spec(10, 300, 0.0, 5));
  const DataSet query = GenerateSynthetic(Spec(10, 20, 0.0, 6));
  const std::size_t d = ref.images.size() / ref.size();
  const auto rp = ref.images.data();
  const auto qp = query.images.data();
  std::size_t correct = 0;
  for (std::size_t i = 0; i < query.size(); ++i) {
    double best = std::numeric_limits<double>::infinity();
    std::size_t label = 0;
    for (std::size_t j = 0; j < ref.size(); ++j) {
      double dist = 0.0;
      for (std::size_t k = 0; k < d; ++k) {
        const double diff = qp[i * d + k] - rp[j * d + k];
        dist += diff * diff;
      }
      if (dist < best) {
        best = dist;
        label = ref.labels[j];
      }
    }
    correct += label == query.labels[i];
  }
  EXPECT_EQ(correct, query.size());
}

TEST(SyntheticTest, RejectsUnsupportedSpecs) {
  EXPECT_PSR_ERROR(GenerateSynthetic(Spec(1, 5, 0.1, 0)), ErrorCode::kInvalidArgument);
  EXPECT_PSR_ERROR(GenerateSynthetic(Spec(11, 5, 0.1, 0)), ErrorCode::kInvalidArgument);
  SyntheticSpec tiny = Spec(2, 5, 0.1, 0);
  tiny.image_size = 5;
  EXPECT_PSR_ERROR(GenerateSynthetic(tiny), ErrorCode::kInvalidArgument);
}

TEST(DataSetTest, ValidateCatchesBrokenInvariants) {
  DataSet ds = GenerateSynthetic(Spec(3, 2, 0.1, 0));
  DataSet bad_label = ds;
  bad_label.labels[0] = 3;
  EXPECT_PSR_ERROR(bad_label.Validate(), ErrorCode::kInvalidArgument);
  DataSet bad_pixel = ds;
  bad_pixel.images[0] = 1.5f;
  EXPECT_PSR_ERROR(bad_pixel.Validate(), ErrorCode::kInvalidArgument);
  DataSet bad_count = ds;
  bad_count.labels.pop_back();
  EXPECT_PSR_ERROR(bad_count.Validate(), ErrorCode::kInvalidArgument);
}

TEST(DataSetTest, SubsetAndMerge) {
  const DataSet ds = GenerateSynthetic(Spec(3, 4, 0.1, 0));
  const std::vector<std::size_t> idx{11, 0, 5};
  const DataSet sub = ds.Subset(idx);
  EXPECT_EQ(sub.labels, (nn::Labels{2, 0, 1}));
  const std::vector<DataSet> parts{sub, ds.Subset(std::vector<std::size_t>{1})};
  const DataSet merged = Merge(parts);
  EXPECT_EQ(merged.size(), 4u);
  EXPECT_EQ(merged.Images(std::vector<std::size_t>{3}), ds.Images(std::vector<std::size_t>{1}));
  EXPECT_PSR_ERROR(ds.Subset(std::vector<std::size_t>{12}), ErrorCode::kOutOfRange);
}

}  // namespace
}  // namespace psrlab::data
