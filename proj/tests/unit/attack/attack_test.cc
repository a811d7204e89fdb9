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

#include <algorithm>
#include <cmath>
#include <vector>

#include <gtest/gtest.h>

#include "expect_error.h"
#include "fixtures.h"
#include "oracles.h"
#include "psrlab/attack/attack.h"
#include "psrlab/nn/classifier.h"
#include "psrlab/util/rng.h"

namespace psrlab::attack {
namespace {

constexpr double kEps = 8.0 / 255.0;

TEST(ParseTest, RationalsAndMethods) {
  EXPECT_DOUBLE_EQ(ParseRational("8/255"), 8.0 / 255.0);
  EXPECT_DOUBLE_EQ(ParseRational("0.03"), 0.03);
  EXPECT_DOUBLE_EQ(ParseRational("2"), 2.0);
  EXPECT_PSR_ERROR(ParseRational("1/0"), ErrorCode::kInvalidArgument);
  EXPECT_PSR_ERROR(ParseRational("abc"), ErrorCode::kInvalidArgument);
  EXPECT_EQ(ParseMethod("PGD"), Method::kPgd);
  EXPECT_EQ(ParseMethod("fab"), Method::kFab);
  EXPECT_PSR_ERROR(ParseMethod("cw"), ErrorCode::kInvalidArgument);
}

TEST(ConfigTest, ValidationAndDefaults) {
  AttackConfig cfg;
  EXPECT_NO_THROW(cfg.Validate());
  EXPECT_EQ(cfg.restarts(), 1);
  cfg.method = Method::kFab;
  EXPECT_EQ(cfg.restarts(), 3);
  cfg.step_size = 2.0 * cfg.eps;
  EXPECT_PSR_ERROR(cfg.Validate(), ErrorCode::kInvalidArgument);
  cfg = AttackConfig{};
  cfg.eps = 1.5;
  EXPECT_PSR_ERROR(cfg.Validate(), ErrorCode::kInvalidArgument);
  cfg = AttackConfig{};
  cfg.n_steps = -1;
  EXPECT_PSR_ERROR(cfg.Validate(), ErrorCode::kInvalidArgument);
}

TEST(FgsmTest, ZeroGradientLeavesInputUnchanged) {
  const nn::Model m = testing::LinearModel(3, 2, std::vector<float>(6, 0.0f), {0.0f, 0.0f});
  const nn::Tensor x({1, 3}, std::vector<float>{0.2f, 0.5f, 0.9f});
  const AdversarialBatch adv = Fgsm(nn::Classifier(m), x, nn::Labels{0}, kEps);
  EXPECT_EQ(adv.x_adv, x);
  EXPECT_EQ(adv.linf[0], 0.0);
}

TEST(FgsmTest, ZeroBudgetLeavesInputUnchanged) {
  const auto models = testing::GradientCheckModels(2);
  const nn::Tensor x = testing::RandomBatch(models[0].model, 4, 1);
  const AdversarialBatch adv = Fgsm(nn::Classifier(models[0].model), x, nn::Labels{0, 1, 2, 0}, 0.0);
  EXPECT_EQ(adv.x_adv, x);
}

TEST(FgsmTest, LogisticSignIsAnalytic) {
  // Logits (0, w x) with w > 0: the label-0 loss grows with x.
  const nn::Model m = testing::LinearModel(1, 2, {0.0f, 2.0f}, {0.0f, 0.0f});
  const nn::Tensor x({3, 1}, std::vector<float>{0.1f, 0.5f, 0.99f});
  const AdversarialBatch adv = Fgsm(nn::Classifier(m), x, nn::Labels{0, 0, 0}, 0.05);
  EXPECT_FLOAT_EQ(adv.x_adv[0], 0.15f);
  EXPECT_FLOAT_EQ(adv.x_adv[1], 0.55f);
  EXPECT_FLOAT_EQ(adv.x_adv[2], 1.0f);
}

TEST(PgdTest, NoStepsNoRandomStartIsIdentity) {
  const auto models = testing::GradientCheckModels(3);
  const nn::Tensor x = testing::RandomBatch(models[1].model, 3, 2);
  AttackConfig cfg;
  cfg.n_steps = 0;
  cfg.random_start = false;
  const AdversarialBatch adv = Pgd(nn::Classifier(models[1].model), x, nn::Labels{0, 1, 2}, cfg);
  EXPECT_EQ(adv.x_adv, x);
}

TEST(PgdTest, FuzzedOutputsStayInBudgetAndBox) {
  const testing::BudgetFuzzResult r = testing::FuzzAttackBudget(150, kEps, 11);
  EXPECT_EQ(r.pairs, 150u);
  EXPECT_LE(r.worst_excess, 1e-6);
  EXPECT_EQ(r.box_violations, 0u);
}

TEST(PgdTest, LinearModelReachesBestCorner) {
  Rng rng(5);
  for (int trial = 0; trial < 40; ++trial) {
    std::vector<float> w(4), b(2);
    for (float& v : w) v = static_cast<float>(rng.Normal());
    for (float& v : b) v = static_cast<float>(rng.Normal(0.0, 0.1));
    const nn::Model m = testing::LinearModel(2, 2, w, b);
    const double x0 = rng.Uniform(), x1 = rng.Uniform();
    const std::size_t y = rng.Index(2);
    AttackConfig cfg;
    cfg.eps = 0.1;
    cfg.step_size = 0.03;
    cfg.n_steps = static_cast<int>(std::ceil(cfg.eps / cfg.step_size));
    cfg.random_start = false;
    const nn::Tensor x({1, 2}, std::vector<float>{static_cast<float>(x0), static_cast<float>(x1)});
    const AdversarialBatch adv = Pgd(nn::Classifier(m), x, nn::Labels{y}, cfg);
    const std::vector<float> corner = testing::BestLossCorner2D(m, x0, x1, y, cfg.eps);
    EXPECT_NEAR(adv.x_adv[0], corner[0], 1e-6) << "trial " << trial;
    EXPECT_NEAR(adv.x_adv[1], corner[1], 1e-6) << "trial " << trial;
  }
}

TEST(PgdTest, WorkerCountDoesNotChangeResults) {
  const auto models = testing::GradientCheckModels(4);
  const nn::Model& m = models[6].model;
  const nn::Tensor x = testing::RandomBatch(m, 9, 3);
  const nn::Labels y = testing::RandomLabels(9, m.n_classes(), 4);
  AttackConfig cfg;
  cfg.seed = 99;
  const AdversarialBatch a = Pgd(nn::Classifier(m), x, y, cfg, {}, 1);
  const AdversarialBatch b = Pgd(nn::Classifier(m), x, y, cfg, {}, 3);
  EXPECT_EQ(a.x_adv, b.x_adv);
  EXPECT_EQ(a.success, b.success);
  cfg.seed = 100;
  EXPECT_FALSE(Pgd(nn::Classifier(m), x, y, cfg).x_adv == a.x_adv);
}

TEST(PgdTest, SuccessMeansMisclassifiedWithinBudget) {
  const auto models = testing::GradientCheckModels(6);
  const nn::Model& m = models[4].model;
  const nn::Tensor x = testing::RandomBatch(m, 20, 5);
  const nn::Labels y = testing::RandomLabels(20, m.n_classes(), 6);
  AttackConfig cfg;
  cfg.eps = 0.3;
  cfg.step_size = 0.05;
  const AdversarialBatch adv = Pgd(nn::Classifier(m), x, y, cfg);
  const nn::Labels pred = nn::Classifier(m).Predict(adv.x_adv);
  for (std::size_t i = 0; i < 20; ++i) {
    EXPECT_EQ(adv.success[i] != 0, pred[i] != y[i]);
    EXPECT_LE(adv.linf[i], cfg.eps + 1e-6);
  }
}

TEST(PgdTest, IteratedAttackIsAtLeastAsStrongAsFgsm) {
  const testing::DeskTask task = testing::TrainDeskModel(1);
  const nn::Classifier clf(task.model);
  double fgsm_acc = 0.0, pgd_acc = 0.0;
  const int repeats = 10;
  for (int r = 0; r < repeats; ++r) {
    AttackConfig cfg;
    cfg.seed = DeriveSeed(7, {static_cast<std::uint64_t>(r)});
    cfg.method = Method::kFgsm;
    fgsm_acc += 1.0 - RunAttack(clf, task.test.images, task.test.labels, cfg).SuccessRate();
    cfg.method = Method::kPgd;
    pgd_acc += 1.0 - RunAttack(clf, task.test.images, task.test.labels, cfg).SuccessRate();
  }
  EXPECT_LE(pgd_acc / repeats, fgsm_acc / repeats);
}

TEST(ProjectToBudgetTest, ClampsToBallAndBox) {
  const nn::Tensor x({1, 3}, std::vector<float>{0.0f, 0.5f, 0.98f});
  nn::Tensor adv({1, 3}, std::vector<float>{-0.2f, 0.9f, 1.5f});
  ProjectToBudget(x, 0.1, adv);
  EXPECT_FLOAT_EQ(adv[0], 0.0f);
  EXPECT_FLOAT_EQ(adv[1], 0.6f);
  EXPECT_FLOAT_EQ(adv[2], 1.0f);
}

}  // namespace
}  // namespace psrlab::attack
