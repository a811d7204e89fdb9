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

#ifndef PSRLAB_DP_RDP_ACCOUNTANT_H_
#define PSRLAB_DP_RDP_ACCOUNTANT_H_

#include <cstdint>
#include <vector>

namespace psrlab::dp {

inline constexpr int kMinOrder = 2;
inline constexpr int kMaxOrder = 256;

// Renyi DP of one step of the Poisson-subsampled Gaussian mechanism at
// integer order alpha >= 2:
//
//   rho = log( sum_{j=0..alpha} C(alpha, j) (1-q)^(alpha-j) q^j
//              exp(j (j-1) / (2 sigma^2)) ) / (alpha - 1)
//
// evaluated as a log-sum-exp. With q == 1 this is exactly alpha/(2 sigma^2).
// Throws kInvalidArgument for alpha < 2 or bad (q, sigma) and kNonFinite if
// the result overflows.
double RdpSubsampledGaussian(double q, double sigma, int alpha);

struct EpsilonResult {
  double epsilon = 0.0;
  int best_order = 0;
};

// Accumulated RDP of T compositions of one (q, sigma) mechanism over the
// integer orders [kMinOrder, kMaxOrder].
class RdpAccountant {
 public:
  RdpAccountant(double q, double sigma);

  void Step(std::uint64_t count = 1);

  std::uint64_t steps() const { return steps_; }
  double q() const { return q_; }
  double sigma() const { return sigma_; }
  const std::vector<int>& orders() const { return orders_; }
  // Accumulated RDP per order, i.e. steps * rho(order).
  std::vector<double> accumulated() const;

  // eps = min over orders of T rho(alpha) + log(1/delta) / (alpha - 1).
  // With no steps taken the result is 0 (and a warning is printed).
  EpsilonResult Epsilon(double delta) const;

 private:
  double q_;
  double sigma_;
  std::uint64_t steps_ = 0;
  std::vector<int> orders_;
  std::vector<double> per_step_;
};

// Classic RDP -> (eps, delta) conversion for `steps` compositions.
EpsilonResult EpsilonFor(double q, double sigma, std::uint64_t steps,
                         double delta);

// Smallest sigma in [0.3, 64] (to within 1e-6) whose epsilon after `steps`
// compositions does not exceed target_epsilon. Throws kInfeasible when the
// target is outside what the bracket can reach.
double CalibrateSigma(double target_epsilon, double delta, double q,
                      std::uint64_t steps);

inline constexpr double kSigmaLow = 0.3;
inline constexpr double kSigmaHigh = 64.0;

}  // namespace psrlab::dp

#endif  // PSRLAB_DP_RDP_ACCOUNTANT_H_
