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

#ifndef PSRLAB_ATTACK_ATTACK_H_
#define PSRLAB_ATTACK_ATTACK_H_

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "psrlab/nn/classifier.h"
#include "psrlab/nn/tensor.h"

namespace psrlab::attack {

enum class Method { kFgsm, kPgd, kFab };

std::string_view MethodName(Method m);
// Accepts "fgsm", "pgd", "fab" (case-insensitive).
Method ParseMethod(std::string_view text);

// Parses "8/255", "0.03" or "2" into a double.
double ParseRational(std::string_view text);

struct AttackConfig {
  Method method = Method::kPgd;
  double eps = 8.0 / 255.0;         // L-infinity budget
  double step_size = 2.0 / 255.0;   // per-iteration step (PGD)
  int n_steps = 10;
  // 0 selects the method default: 1 for PGD/FGSM, 3 for FAB.
  int n_restarts = 0;
  bool random_start = true;         // PGD only
  std::uint64_t seed = 0;

  // FAB settings.
  double fab_alpha_max = 0.1;
  double fab_eta = 1.05;
  double fab_beta = 0.9;
  // Bisection steps that shrink FAB's best adversarial toward the input.
  int fab_refine_steps = 20;

  int restarts() const;
  // Throws kInvalidArgument unless eps lies in [0, 1], n_steps >= 0 and, for
  // eps > 0, 0 < step_size <= eps.
  void Validate() const;
};

struct AdversarialBatch {
  nn::Tensor x_adv;
  std::vector<std::size_t> origin;   // dataset index of each row
  // Misclassified at x_adv and within the budget.
  std::vector<std::uint8_t> success;
  std::vector<double> linf;          // achieved ||x_adv - x||_inf

  std::size_t size() const { return origin.size(); }
  double SuccessRate() const;
};

// Rows are processed in fixed chunks and each row draws randomness from a
// stream derived from (seed, origin index, restart), so the worker count
// never changes results. `origin` defaults to 0..B-1.
AdversarialBatch Fgsm(const nn::Classifier& model, const nn::Tensor& x,
                      std::span<const std::size_t> labels, double eps,
                      std::span<const std::size_t> origin = {}, int workers = 1);

AdversarialBatch Pgd(const nn::Classifier& model, const nn::Tensor& x,
                     std::span<const std::size_t> labels, const AttackConfig& cfg,
                     std::span<const std::size_t> origin = {}, int workers = 1);

AdversarialBatch Fab(const nn::Classifier& model, const nn::Tensor& x,
                     std::span<const std::size_t> labels, const AttackConfig& cfg,
                     std::span<const std::size_t> origin = {}, int workers = 1);

// Dispatches on cfg.method.
AdversarialBatch RunAttack(const nn::Classifier& model, const nn::Tensor& x,
                           std::span<const std::size_t> labels,
                           const AttackConfig& cfg,
                           std::span<const std::size_t> origin = {},
                           int workers = 1);

// Projects every row of x_adv onto the budget ball around x and the [0, 1] box.
void ProjectToBudget(const nn::Tensor& x, double eps, nn::Tensor& x_adv);

}  // namespace psrlab::attack

#endif  // PSRLAB_ATTACK_ATTACK_H_
