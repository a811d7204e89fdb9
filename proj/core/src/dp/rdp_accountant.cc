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

#include "psrlab/dp/rdp_accountant.h"

#include <cmath>
#include <limits>
#include <sstream>

#include "psrlab/util/error.h"

namespace psrlab::dp {
namespace {

double LogBinomial(int n, int k) {
  return std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0);
}

}  // namespace

double RdpSubsampledGaussian(double q, double sigma, int alpha) {
  Require(alpha >= 2, ErrorCode::kInvalidArgument,
          "RDP order must be >= 2, got " + std::to_string(alpha));
  Require(q > 0.0 && q <= 1.0, ErrorCode::kInvalidArgument,
          "sampling rate must be in (0, 1]");
  Require(sigma > 0.0, ErrorCode::kInvalidArgument, "sigma must be > 0");
  // The series is E[exp(j(j-1)/(2 sigma^2))] for j ~ Binomial(alpha, q). The
  // j = 0, 1 terms contribute exactly 1, so the sum is 1 + sum_{j>=2} pmf(j) *
  // expm1(...) and the log is taken with log1p to keep tiny values exact.
  const double log_q = std::log(q);
  const double log_1mq = std::log1p(-q);
  const double inv_two_var = 1.0 / (2.0 * sigma * sigma);
  std::vector<double> terms;
  terms.reserve(alpha - 1);
  double max_term = -std::numeric_limits<double>::infinity();
  for (int j = 2; j <= alpha; ++j) {
    const int rest = alpha - j;
    const double x = static_cast<double>(j) * (j - 1) * inv_two_var;
    const double log_expm1 = x > 30.0 ? x + std::log1p(-std::exp(-x)) : std::log(std::expm1(x));
    // (1-q)^0 is 1 even when q == 1.
    const double t = LogBinomial(alpha, j) + (rest > 0 ? rest * log_1mq : 0.0) +
                     j * log_q + log_expm1;
    terms.push_back(t);
    if (t > max_term) max_term = t;
  }
  double log_excess = max_term;
  if (std::isfinite(max_term)) {
    double sum = 0.0;
    for (double t : terms) sum += std::exp(t - max_term);
    log_excess = max_term + std::log(sum);
  }
  const double log_total = log_excess > 0.0
                               ? log_excess + std::log1p(std::exp(-log_excess))
                               : std::log1p(std::exp(log_excess));
  const double rho = log_total / (alpha - 1);
  Require(std::isfinite(rho), ErrorCode::kNonFinite,
          "RDP overflow at alpha=" + std::to_string(alpha) + " (sigma too small)");
  return std::max(rho, 0.0);
}

RdpAccountant::RdpAccountant(double q, double sigma) : q_(q), sigma_(sigma) {
  for (int a = kMinOrder; a <= kMaxOrder; ++a) {
    orders_.push_back(a);
    double rho;
    try {
      rho = RdpSubsampledGaussian(q, sigma, a);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::kNonFinite) throw;
      rho = std::numeric_limits<double>::infinity();
    }
    per_step_.push_back(rho);
  }
}

void RdpAccountant::Step(std::uint64_t count) { steps_ += count; }

std::vector<double> RdpAccountant::accumulated() const {
  std::vector<double> out(per_step_.size());
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i] = steps_ == 0 ? 0.0 : static_cast<double>(steps_) * per_step_[i];
  }
  return out;
}

EpsilonResult RdpAccountant::Epsilon(double delta) const {
  Require(delta > 0.0 && delta < 1.0, ErrorCode::kInvalidArgument,
          "delta must be in (0, 1)");
  if (steps_ == 0) {
    Warn("epsilon requested before any noisy step; reporting 0");
    return {0.0, orders_.front()};
  }
  const double log_inv_delta = std::log(1.0 / delta);
  EpsilonResult best{std::numeric_limits<double>::infinity(), 0};
  for (std::size_t i = 0; i < orders_.size(); ++i) {
    const double eps = static_cast<double>(steps_) * per_step_[i] +
                       log_inv_delta / (orders_[i] - 1);
    if (std::isfinite(eps) && eps < best.epsilon) best = {eps, orders_[i]};
  }
  Require(best.best_order != 0, ErrorCode::kNonFinite,
          "no RDP order gives a finite epsilon");
  return best;
}

EpsilonResult EpsilonFor(double q, double sigma, std::uint64_t steps,
                         double delta) {
  RdpAccountant acc(q, sigma);
  acc.Step(steps);
  return acc.Epsilon(delta);
}

double CalibrateSigma(double target_epsilon, double delta, double q,
                      std::uint64_t steps) {
  Require(target_epsilon > 0.0, ErrorCode::kInvalidArgument,
          "target epsilon must be > 0");
  Require(steps >= 1, ErrorCode::kInvalidArgument, "calibration needs steps >= 1");
  auto eps_at = [&](double sigma) {
    return EpsilonFor(q, sigma, steps, delta).epsilon;
  };
  double lo = kSigmaLow;
  double hi = kSigmaHigh;
  const double eps_lo = eps_at(lo);
  const double eps_hi = eps_at(hi);
  Require(eps_lo > eps_hi, ErrorCode::kInfeasible,
          "epsilon is not decreasing over the sigma bracket");
  if (eps_hi > target_epsilon) {
    std::ostringstream msg;
    msg << "target epsilon " << target_epsilon << " unreachable: sigma=" << hi
        << " still gives " << eps_hi;
    Fail(ErrorCode::kInfeasible, msg.str());
  }
  if (eps_lo <= target_epsilon) {
    std::ostringstream msg;
    msg << "target epsilon " << target_epsilon << " is looser than sigma=" << lo
        << " (epsilon " << eps_lo << ")";
    Fail(ErrorCode::kInfeasible, msg.str());
  }
  // Invariant: eps(lo) > target >= eps(hi).
  while (hi - lo > 1e-6) {
    const double mid = 0.5 * (lo + hi);
    if (eps_at(mid) > target_epsilon) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return hi;
}

}  // namespace psrlab::dp
