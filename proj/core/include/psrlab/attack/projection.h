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

#ifndef PSRLAB_ATTACK_PROJECTION_H_
#define PSRLAB_ATTACK_PROJECTION_H_

#include <span>
#include <vector>

namespace psrlab::attack {

struct BoxHyperplaneProjection {
  std::vector<double> z;
  double radius = 0.0;  // ||z - x||_inf
};

// Minimal L-infinity projection of x onto {z : w.z + b = 0, lower <= z <= upper}.
//
// Moving every coordinate toward the hyperplane by at most t changes w.z + b
// by a piecewise-linear, monotone amount whose breakpoints are the distances
// from x to the box faces in the direction sign(w_i). The smallest t reaching
// zero is found by scanning those breakpoints in sorted order.
//
// Requires lower <= x <= upper. Throws kInvalidArgument for w == 0 or size
// mismatches and kInfeasible when the hyperplane misses the box.
BoxHyperplaneProjection ProjectBoxHyperplane(std::span<const double> x,
                                             std::span<const double> w, double b,
                                             std::span<const double> lower,
                                             std::span<const double> upper);

}  // namespace psrlab::attack

#endif  // PSRLAB_ATTACK_PROJECTION_H_
