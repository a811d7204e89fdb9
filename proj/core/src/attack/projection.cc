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

#include "psrlab/attack/projection.h"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "psrlab/util/error.h"

namespace psrlab::attack {

BoxHyperplaneProjection ProjectBoxHyperplane(std::span<const double> x,
                                             std::span<const double> w, double b,
                                             std::span<const double> lower,
                                             std::span<const double> upper) {
  const std::size_t d = x.size();
  Require(w.size() == d && lower.size() == d && upper.size() == d,
          ErrorCode::kInvalidArgument, "projection inputs differ in size");
  Require(std::any_of(w.begin(), w.end(), [](double v) { return v != 0.0; }),
          ErrorCode::kInvalidArgument, "hyperplane normal is zero");
  for (std::size_t i = 0; i < d; ++i) {
    Require(lower[i] <= x[i] && x[i] <= upper[i], ErrorCode::kInvalidArgument,
            "projection point lies outside the box");
  }

  const double c = std::inner_product(w.begin(), w.end(), x.begin(), b);
  BoxHyperplaneProjection out{std::vector<double>(x.begin(), x.end()), 0.0};
  if (c == 0.0) return out;

  // Move toward the hyperplane: each coordinate goes in direction dir_i with
  // rate |w_i| until it hits the box after distance reach_i.
  const double sgn = c < 0.0 ? 1.0 : -1.0;
  std::vector<double> reach(d, 0.0);
  std::vector<double> rate(d, 0.0);
  std::vector<double> dir(d, 0.0);
  std::vector<std::size_t> order;
  for (std::size_t i = 0; i < d; ++i) {
    if (w[i] == 0.0) continue;
    dir[i] = sgn * (w[i] > 0.0 ? 1.0 : -1.0);
    reach[i] = dir[i] > 0.0 ? upper[i] - x[i] : x[i] - lower[i];
    rate[i] = std::abs(w[i]);
    if (reach[i] > 0.0) order.push_back(i);
  }
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b2) {
    return reach[a] < reach[b2] || (reach[a] == reach[b2] && a < b2);
  });

  // Gap still to close: |c|. Between breakpoints the closed amount grows
  // linearly with slope = sum of rates of unsaturated coordinates.
  const double gap = std::abs(c);
  double slope = 0.0;
  for (std::size_t i : order) slope += rate[i];
  double closed = 0.0;
  double t_prev = 0.0;
  double t_star = -1.0;
  std::size_t k = 0;
  while (k < order.size()) {
    const double t_next = reach[order[k]];
    const double at_next = closed + slope * (t_next - t_prev);
    if (at_next >= gap) {
      t_star = t_prev + (gap - closed) / slope;
      break;
    }
    closed = at_next;
    t_prev = t_next;
    // Every coordinate saturating at this breakpoint stops contributing.
    while (k < order.size() && reach[order[k]] == t_next) {
      slope -= rate[order[k]];
      ++k;
    }
  }
  Require(t_star >= 0.0, ErrorCode::kInfeasible,
          "hyperplane does not intersect the box");

  for (std::size_t i = 0; i < d; ++i) {
    if (rate[i] == 0.0) continue;
    out.z[i] = x[i] + dir[i] * std::min(t_star, reach[i]);
  }
  // Absorb rounding drift in the unsaturated coordinate with the largest
  // weight, so the hyperplane equation holds tightly.
  const double residual = std::inner_product(w.begin(), w.end(), out.z.begin(), b);
  std::size_t fix = d;
  for (std::size_t i = 0; i < d; ++i) {
    if (rate[i] == 0.0 || reach[i] <= t_star) continue;
    if (fix == d || rate[i] > rate[fix]) fix = i;
  }
  if (fix != d) {
    out.z[fix] = std::clamp(out.z[fix] - residual / w[fix], lower[fix], upper[fix]);
  }
  double radius = 0.0;
  for (std::size_t i = 0; i < d; ++i) radius = std::max(radius, std::abs(out.z[i] - x[i]));
  out.radius = radius;
  return out;
}

}  // namespace psrlab::attack
