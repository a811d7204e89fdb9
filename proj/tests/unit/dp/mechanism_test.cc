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
#include <vector>

#include <gtest/gtest.h>

#include "expect_error.h"
#include "psrlab/dp/mechanism.h"
#include "psrlab/util/rng.h"

namespace psrlab::dp {
namespace {

double Norm(const std::vector<float>& v) {
  double s = 0.0;
  for (float x : v) s += static_cast<double>(x) * x;
  return std::sqrt(s);
}

TEST(PoissonSampleTest, FullRateTakesEverything) {
  Rng rng(1);
  for (int i = 0; i < 5; ++i) {
    const auto idx = PoissonSampleBatch(37, 1.0, rng);
    ASSERT_EQ(idx.size(), 37u);
    for (std::size_t j = 0; j < idx.size(); ++j) EXPECT_EQ(idx[j], j);
  }
}

TEST(PoissonSampleTest, MeanBatchSizeMatchesBinomial) {
  Rng rng(2);
  const std::size_t n = 10000, draws = 100;
  double total = 0.0;
  for (std::size_t d = 0; d < draws; ++d) total += PoissonSampleBatch(n, 0.5, rng).size();
  const double mean = total / draws;
  const double sd_of_mean = std::sqrt(n * 0.25 / draws);
  EXPECT_NEAR(mean, 5000.0, 3.0 * sd_of_mean);
}

TEST(PoissonSampleTest, DeterministicAndSorted) {
  Rng a(3), b(3);
  const auto x = PoissonSampleBatch(500, 0.1, a);
  EXPECT_EQ(x, PoissonSampleBatch(500, 0.1, b));
  EXPECT_TRUE(std::is_sorted(x.begin(), x.end()));
  EXPECT_PSR_ERROR(PoissonSampleBatch(10, 0.0, a), ErrorCode::kInvalidArgument);
}

TEST(ClipTest, SmallNormUnchangedLargeNormHalved) {
  std::vector<std::vector<float>> g{{0.3f, 0.4f}, {1.2f, 1.6f}};
  const auto norms = ClipPerSample(g, 1.0);
  EXPECT_NEAR(norms[0], 0.5, 1e-7);
  EXPECT_NEAR(norms[1], 2.0, 1e-7);
  EXPECT_EQ(g[0], (std::vector<float>{0.3f, 0.4f}));
  EXPECT_FLOAT_EQ(g[1][0], 0.6f);
  EXPECT_FLOAT_EQ(g[1][1], 0.8f);
}

TEST(ClipTest, RandomBatchesRespectBoundAndDirection) {
  Rng rng(4);
  for (int trial = 0; trial < 50; ++trial) {
    const double c = rng.Uniform(0.01, 5.0);
    std::vector<std::vector<float>> g(8, std::vector<float>(1 + rng.Index(300)));
    for (auto& v : g) {
      const double scale = std::exp(rng.Uniform(-6.0, 6.0));
      for (float& x : v) x = static_cast<float>(rng.Normal(0.0, scale));
    }
    const auto before = g;
    ClipPerSample(g, c);
    for (std::size_t i = 0; i < g.size(); ++i) {
      EXPECT_LE(Norm(g[i]), c + 1e-6);
      double dot = 0.0;
      for (std::size_t k = 0; k < g[i].size(); ++k) dot += static_cast<double>(g[i][k]) * before[i][k];
      EXPECT_NEAR(dot / (Norm(g[i]) * Norm(before[i])), 1.0, 1e-6);
    }
  }
}

TEST(ClipTest, NonFiniteInputRejected) {
  std::vector<std::vector<float>> g{{1.0f, std::nanf("")}};
  EXPECT_PSR_ERROR(ClipPerSample(g, 1.0), ErrorCode::kNonFinite);
  std::vector<std::vector<float>> inf{{INFINITY}};
  EXPECT_PSR_ERROR(ClipPerSample(inf, 1.0), ErrorCode::kNonFinite);
}

TEST(NoisyAggregateTest, VanishingNoiseGivesPlainMean) {
  const std::vector<std::vector<float>> g{{0.5f, -0.25f}, {0.1f, 0.2f}, {-0.3f, 0.0f}};
  Rng rng(5);
  const auto out = NoisyAggregate(g, 2, 1e-9, 1.0, 3.0, rng);
  EXPECT_NEAR(out[0], 0.1, 1e-6);
  EXPECT_NEAR(out[1], -0.05 / 3.0, 1e-6);
}

TEST(NoisyAggregateTest, NoiseStatistics) {
  const std::size_t dim = 100000;
  const double sigma = 1.3, c = 0.7, expected = 25.0;
  Rng rng(6);
  const auto out = NoisyAggregate({}, dim, sigma, c, expected, rng);
  double s = 0.0, s2 = 0.0;
  for (float v : out) {
    s += v;
    s2 += static_cast<double>(v) * v;
  }
  const double target_sd = sigma * c / expected;
  const double mean = s / dim;
  const double sd = std::sqrt(s2 / dim - mean * mean);
  EXPECT_LE(std::abs(mean), 3.0 * target_sd / std::sqrt(static_cast<double>(dim)));
  EXPECT_NEAR(sd / target_sd, 1.0, 0.02);
}

TEST(NoisyAggregateTest, SameStreamSameOutput) {
  const std::vector<std::vector<float>> g{{1.0f, 2.0f, 3.0f}};
  Rng a(7), b(7);
  EXPECT_EQ(NoisyAggregate(g, 3, 1.0, 1.0, 4.0, a), NoisyAggregate(g, 3, 1.0, 1.0, 4.0, b));
}

TEST(NoisyAggregateTest, RejectsBadArguments) {
  Rng rng(8);
  EXPECT_PSR_ERROR(NoisyAggregate({}, 0, 1.0, 1.0, 1.0, rng), ErrorCode::kInvalidArgument);
  const std::vector<std::vector<float>> g{{1.0f}};
  EXPECT_PSR_ERROR(NoisyAggregate(g, 2, 1.0, 1.0, 1.0, rng), ErrorCode::kShapeMismatch);
}

TEST(PrivacySpecTest, Validation) {
  PrivacySpec spec;
  EXPECT_NO_THROW(spec.Validate(1000));
  spec.noise_multiplier = 0.0;
  EXPECT_PSR_ERROR(spec.Validate(), ErrorCode::kInvalidArgument);
  spec = PrivacySpec{};
  spec.delta = 1.0;
  EXPECT_PSR_ERROR(spec.Validate(), ErrorCode::kInvalidArgument);
  spec = PrivacySpec{};
  spec.sampling_rate = 1.5;
  EXPECT_PSR_ERROR(spec.Validate(), ErrorCode::kInvalidArgument);
  spec = PrivacySpec{};
  spec.delta = 0.01;
  ::testing::internal::CaptureStderr();
  spec.Validate(1000);
  EXPECT_NE(::testing::internal::GetCapturedStderr().find("warning"), std::string::npos);
}

}  // namespace
}  // namespace psrlab::dp
