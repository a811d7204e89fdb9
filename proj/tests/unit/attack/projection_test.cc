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
#include <numeric>
#include <vector>

#include <gtest/gtest.h>

#include "expect_error.h"
#include "oracles.h"
#include "psrlab/attack/projection.h"
#include "psrlab/util/rng.h"

namespace psrlab::attack {
namespace {

TEST(ProjectionTest, PointOnHyperplaneIsFixed) {
  const std::vector<double> x{0.25, 0.75}, w{1.0, 1.0}, lo{0, 0}, hi{1, 1};
  const auto p = ProjectBoxHyperplane(x, w, -1.0, lo, hi);
  EXPECT_EQ(p.radius, 0.0);
  EXPECT_EQ(p.z, x);
}

TEST(ProjectionTest, OneDimensionalClosedForm) {
  const std::vector<double> x{0.2}, w{1.0}, lo{0.0}, hi{1.0};
  const auto p = ProjectBoxHyperplane(x, w, -0.5, lo, hi);
  EXPECT_NEAR(p.z[0], 0.5, 1e-12);
  EXPECT_NEAR(p.radius, 0.3, 1e-12);
}

TEST(ProjectionTest, BoxForcesUnevenMoves) {
  // Coordinate 0 saturates at 1 and coordinate 1 has to carry the rest.
  const std::vector<double> x{0.9, 0.1}, w{1.0, 1.0}, lo{0, 0}, hi{1, 1};
  const auto p = ProjectBoxHyperplane(x, w, -1.6, lo, hi);
  EXPECT_NEAR(p.z[0], 1.0, 1e-12);
  EXPECT_NEAR(p.z[1], 0.6, 1e-12);
  EXPECT_NEAR(p.radius, 0.5, 1e-12);
}

TEST(ProjectionTest, MatchesGridSearchOracle) {
  Rng rng(12);
  int checked = 0;
  for (int trial = 0; trial < 300 && checked < 100; ++trial) {
    const std::size_t d = 1 + rng.Index(3);
    std::vector<double> x(d), w(d), lo(d, 0.0), hi(d, 1.0);
    for (std::size_t i = 0; i < d; ++i) {
      x[i] = rng.Uniform();
      w[i] = rng.Normal();
    }
    const double b = rng.Normal(0.0, 0.7);
    const double oracle = testing::GridProjectionRadius(x, w, b, lo, hi, 1e-3);
    if (!std::isfinite(oracle)) {
      EXPECT_PSR_ERROR(ProjectBoxHyperplane(x, w, b, lo, hi), ErrorCode::kInfeasible);
      continue;
    }
    const auto p = ProjectBoxHyperplane(x, w, b, lo, hi);
    EXPECT_NEAR(p.radius, oracle, 2e-3);
    EXPECT_NEAR(std::inner_product(w.begin(), w.end(), p.z.begin(), b), 0.0, 1e-6);
    double linf = 0.0;
    for (std::size_t i = 0; i < d; ++i) {
      EXPECT_GE(p.z[i], lo[i]);
      EXPECT_LE(p.z[i], hi[i]);
      linf = std::max(linf, std::abs(p.z[i] - x[i]));
    }
    EXPECT_NEAR(linf, p.radius, 1e-9);
    ++checked;
  }
  EXPECT_EQ(checked, 100);
}

TEST(ProjectionTest, Errors) {
  const std::vector<double> x{0.5, 0.5}, lo{0, 0}, hi{1, 1};
  EXPECT_PSR_ERROR(ProjectBoxHyperplane(x, std::vector<double>{0, 0}, 1.0, lo, hi),
                   ErrorCode::kInvalidArgument);
  EXPECT_PSR_ERROR(ProjectBoxHyperplane(x, std::vector<double>{1, 1}, 5.0, lo, hi),
                   ErrorCode::kInfeasible);
  EXPECT_PSR_ERROR(ProjectBoxHyperplane(x, std::vector<double>{1}, 0.0, lo, hi),
                   ErrorCode::kInvalidArgument);
  EXPECT_PSR_ERROR(ProjectBoxHyperplane(std::vector<double>{1.5, 0.5}, std::vector<double>{1, 1},
                                        -1.0, lo, hi),
                   ErrorCode::kInvalidArgument);
}

}  // namespace
}  // namespace psrlab::attack
