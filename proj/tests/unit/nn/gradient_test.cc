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
#include "fixtures.h"
#include "psrlab/nn/classifier.h"
#include "psrlab/nn/engine.h"
#include "psrlab/nn/loss.h"
#include "reference_net.h"

namespace psrlab::nn {
namespace {

TEST(GradientTest, AllLayerKindsMatchFiniteDifferences) {
  for (const testing::NamedModel& nm : testing::GradientCheckModels(21)) {
    if (nm.name.starts_with("micro_")) continue;
    SCOPED_TRACE(nm.name);
    const Tensor x = testing::RandomBatch(nm.model, 2, 3);
    const Labels y = testing::RandomLabels(2, nm.model.n_classes(), 4);
    const testing::GradientCheckResult r = testing::CheckGradients(nm.model, x, y);
    EXPECT_LE(r.max_param_rel_error, 1e-3) << r.worst_param;
    EXPECT_LE(r.input_rel_error, 1e-3);
  }
}

// Deep stacks put ReLU and max-pool kinks within 1e-3 of some coordinate, so
// the composed networks are checked with a step that stays on one linear piece.
TEST(GradientTest, ComposedNetworksMatchFiniteDifferences) {
  for (const testing::NamedModel& nm : testing::GradientCheckModels(21)) {
    if (!nm.name.starts_with("micro_")) continue;
    SCOPED_TRACE(nm.name);
    const Tensor x = testing::RandomBatch(nm.model, 2, 3);
    const Labels y = testing::RandomLabels(2, nm.model.n_classes(), 4);
    const testing::GradientCheckResult r = testing::CheckGradients(nm.model, x, y, 1e-6);
    EXPECT_LE(r.max_param_rel_error, 1e-3) << r.worst_param;
    EXPECT_LE(r.input_rel_error, 1e-3);
  }
}

TEST(GradientTest, LinearMatchesSoftmaxMinusOneHotOuterInput) {
  const std::vector<float> w{0.2f, -0.5f, 1.0f, 0.3f, 0.7f, -0.1f};
  const std::vector<float> b{0.05f, -0.2f};
  const Model m = testing::LinearModel(3, 2, w, b);
  const std::vector<float> xv{0.4f, 0.9f, 0.1f};
  const Tensor x({1, 3}, xv);
  const ParameterGradient g = ComputeParameterGradient(m, x, Labels{1});

  double z[2];
  for (int k = 0; k < 2; ++k) z[k] = b[k] + w[k * 3] * xv[0] + w[k * 3 + 1] * xv[1] + w[k * 3 + 2] * xv[2];
  const double mx = std::max(z[0], z[1]);
  const double s = std::exp(z[0] - mx) + std::exp(z[1] - mx);
  const double p[2] = {std::exp(z[0] - mx) / s, std::exp(z[1] - mx) / s};
  const double delta[2] = {p[0], p[1] - 1.0};
  for (int k = 0; k < 2; ++k) {
    for (int i = 0; i < 3; ++i) {
      const double expected = delta[k] * xv[i];
      EXPECT_NEAR(g.grads[0][k * 3 + i], expected, 1e-5 * std::max(1.0, std::abs(expected)));
    }
    EXPECT_NEAR(g.grads[1][k], delta[k], 1e-5);
  }
}

TEST(GradientTest, LinearInputGradientIsSoftmaxWeighted) {
  const std::vector<float> w{1.0f, -2.0f};
  const Model m = testing::LinearModel(1, 2, w, {0.0f, 0.0f});
  const Tensor x({1, 1}, std::vector<float>{0.3f});
  const Tensor g = InputGradient(m, x, Labels{0});
  const double z0 = 0.3, z1 = -0.6;
  const double p0 = 1.0 / (1.0 + std::exp(z1 - z0));
  const double expected = (p0 - 1.0) * 1.0 + (1.0 - p0) * -2.0;
  EXPECT_NEAR(g[0], expected, 1e-6);
}

TEST(GradientTest, UnusedParameterGetsExactZero) {
  // The second logit row never reaches the label-0 loss through the weights
  // when its input is zero.
  const Model m = testing::LinearModel(2, 2, {0.5f, 0.5f, 0.25f, -0.25f}, {0.0f, 0.0f});
  const ParameterGradient g = ComputeParameterGradient(m, Tensor({1, 2}, 0.0f), Labels{0});
  for (float v : g.grads[0].data()) EXPECT_EQ(v, 0.0f);
}

TEST(GradientTest, ZeroWeightsGiveZeroInputGradient) {
  auto models = testing::GradientCheckModels(1);
  Model& m = models[5].model;
  for (std::size_t i = 0; i < m.params().size(); ++i) m.params().at(i).Fill(0.0f);
  const Tensor g = InputGradient(m, testing::RandomBatch(m, 2, 1), Labels{0, 1});
  for (float v : g.data()) EXPECT_EQ(v, 0.0f);
}

TEST(GradientTest, BackwardWithoutTapeFails) {
  const Model m = testing::LinearModel(2, 2, {1, 0, 0, 1}, {0, 0});
  const Tape empty;
  EXPECT_PSR_ERROR(Backward(m, empty, Tensor({1, 2})), ErrorCode::kFailedPrecondition);
}

TEST(GradientTest, BackwardIsDeterministic) {
  const auto models = testing::GradientCheckModels(8);
  const Model& m = models[6].model;
  const Tensor x = testing::RandomBatch(m, 3, 2);
  const Labels y{0, 1, 2};
  const ParameterGradient a = ComputeParameterGradient(m, x, y);
  const ParameterGradient b = ComputeParameterGradient(m, x, y);
  ASSERT_EQ(a.grads.size(), b.grads.size());
  for (std::size_t i = 0; i < a.grads.size(); ++i) EXPECT_EQ(a.grads[i], b.grads[i]);
}

}  // namespace
}  // namespace psrlab::nn
