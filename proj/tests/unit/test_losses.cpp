/* Copyright 2026 The segloss Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/
#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "oracles.hpp"
#include "segloss/error.hpp"
#include "segloss/gradcheck_suite.hpp"
#include "segloss/losses.hpp"
#include "test_helpers.hpp"

namespace segloss {
namespace {

using segloss::testing::random_grid;
using segloss::testing::random_labels;

constexpr double kLn3 = 1.0986122886681098;
constexpr double kLn2 = 0.6931471805599453;

AdaptiveLossConfig adaptive(int window, double k, int classes,
                            bool normalize = true,
                            WeightSchedule s = WeightSchedule::kChessboardPow2,
                            int stride = 1) {
  AdaptiveLossConfig cfg;
  cfg.filter.window = window;
  cfg.filter.classes = classes;
  cfg.filter.schedule = s;
  cfg.filter.stride = stride;
  cfg.k = k;
  cfg.normalize_inputs = normalize;
  return cfg;
}

TEST(LocalCrossEntropy, UniformLogits) {
  const std::vector<double> f{0.0, 0.0, 0.0};
  const LocalCrossEntropy r = softmax_ce_local(f, 1);
  EXPECT_NEAR(r.loss, kLn3, 1e-15);
  EXPECT_NEAR(r.grad[0], 1.0 / 3.0, 1e-15);
  EXPECT_NEAR(r.grad[1], -2.0 / 3.0, 1e-15);
  EXPECT_NEAR(r.grad[2], 1.0 / 3.0, 1e-15);
}

TEST(LocalCrossEntropy, ConfidentLogit) {
  const std::vector<double> f{10.0, 0.0, 0.0};
  EXPECT_NEAR(softmax_ce_local(f, 0).loss, 9.079573746724444e-05, 1e-17);
}

TEST(LocalCrossEntropy, LargeLogitsStayFinite) {
  const std::vector<double> f{1000.0, -1000.0, 0.0};
  const LocalCrossEntropy r = softmax_ce_local(f, 1);
  EXPECT_NEAR(r.loss, 2000.0, 1e-9);
  for (double g : r.grad) EXPECT_TRUE(std::isfinite(g));
  const auto p = softmax(f);
  EXPECT_NEAR(p[0], 1.0, 1e-15);
}

TEST(AdaptiveLoss, ZeroPredictionsGiveLogClassCount) {
  const Grid3 pred(4, 4, 3);
  const LabelGrid labels = random_labels(4, 4, 3, 1);
  const LossOutput out = adaptive_loss_forward(pred, labels, adaptive(5, 3.0, 3));
  EXPECT_NEAR(out.loss, kLn3, 1e-15);
  // constant pixels: normalization zeroes the gradient
  for (double g : out.grad.data()) EXPECT_EQ(g, 0.0);
}

TEST(AdaptiveLoss, ZeroPredictionsWithoutNormalization) {
  const Grid3 pred(1, 1, 3);
  const LabelGrid labels(1, 1, 3, 0);
  const LossOutput out =
      adaptive_loss_forward(pred, labels, adaptive(1, 1.0, 3, false));
  EXPECT_NEAR(out.loss, kLn3, 1e-15);
  // window 1 doubles the input: d/dx = 2 (p - onehot)
  EXPECT_NEAR(out.grad(0, 0, 0), 2.0 * (1.0 / 3.0 - 1.0), 1e-15);
  EXPECT_NEAR(out.grad(0, 0, 1), 2.0 / 3.0, 1e-15);
}

TEST(AdaptiveLoss, AllIgnoredIsDegenerate) {
  const Grid3 pred = random_grid(3, 3, 4, 2);
  const LabelGrid labels(3, 3, 4, kIgnoreLabel);
  for (const LossOutput& out :
       {adaptive_loss_forward(pred, labels, adaptive(3, 3.0, 4)),
        plain_softmax_ce(pred, labels), focal_loss(pred, labels, FocalConfig{}),
        center_loss(pred, labels, CenterLossConfig::with_zero_centers(4))}) {
    EXPECT_TRUE(out.degenerate());
    EXPECT_EQ(out.loss, 0.0);
    for (double g : out.grad.data()) EXPECT_EQ(g, 0.0);
  }
}

TEST(AdaptiveLoss, MatchesLiteralOracle) {
  for (int seed = 0; seed < 40; ++seed) {
    const int h = 3 + seed % 6, w = 3 + (seed / 2) % 6, c = 2 + seed % 4;
    const int window = 1 + 2 * (seed % 4);
    const double k = 1.0 + seed % 5;
    const bool normalize = seed % 3 != 0;
    const bool uniform = seed % 4 == 1;
    const int stride = 1 + seed % 3;
    const Grid3 pred = random_grid(h, w, c, 300 + seed, 2.0);
    const LabelGrid labels = random_labels(h, w, c, 400 + seed, 0.1);
    const auto cfg = adaptive(window, k, c, normalize,
                              uniform ? WeightSchedule::kUniform
                                      : WeightSchedule::kChessboardPow2,
                              stride);
    const double want = oracle::adaptive_loss(pred, labels, window, stride,
                                              uniform, k, normalize);
    EXPECT_NEAR(adaptive_loss_forward(pred, labels, cfg).loss, want, 1e-12)
        << "seed " << seed;
  }
}

TEST(AdaptiveLoss, PerPixelTermsPoolToLoss) {
  const Grid3 pred = random_grid(5, 5, 3, 5, 2.0);
  const LabelGrid labels = random_labels(5, 5, 3, 6, 0.2);
  const LossOutput out = adaptive_loss_forward(pred, labels, adaptive(3, 3.0, 3));
  double sum = 0;
  for (double v : out.per_pixel.data()) sum += v * v * v;
  EXPECT_NEAR(std::cbrt(sum / out.valid_count), out.loss, 1e-13);
}

TEST(AdaptiveLoss, MonotoneInMinkowskiExponent) {
  for (int seed = 0; seed < 10; ++seed) {
    const Grid3 pred = random_grid(6, 6, 4, 700 + seed, 2.0);
    const LabelGrid labels = random_labels(6, 6, 4, 800 + seed, 0.1);
    double prev = 0.0;
    for (double k : {1.0, 2.0, 3.0, 5.0}) {
      const double v = adaptive_loss_forward(pred, labels, adaptive(5, k, 4)).loss;
      EXPECT_GT(v, prev) << "k " << k;
      prev = v;
    }
  }
}

TEST(AdaptiveLoss, ReducesToCrossEntropy) {
  for (int seed = 0; seed < 10; ++seed) {
    const Grid3 pred = random_grid(5, 4, 3, seed, 2.0);
    const LabelGrid labels = random_labels(5, 4, 3, 50 + seed, 0.1);
    const LossOutput a = adaptive_loss_forward(
        pred, labels, adaptive(1, 1.0, 3, false, WeightSchedule::kUniform));
    const LossOutput b = plain_softmax_ce(pred, labels);
    EXPECT_NEAR(a.loss, b.loss, 1e-12);
    for (std::size_t q = 0; q < a.grad.size(); ++q)
      EXPECT_NEAR(a.grad.data()[q], b.grad.data()[q], 1e-12);
  }
}

TEST(MinkowskiWeight, Cases) {
  EXPECT_DOUBLE_EQ(minkowski_pixel_weight(0.7, 0.7, 4, 1.0), 0.25);
  // k = 2, losses {1, 3}: S = 5, d/dL_1 = (1/2) * 5^(-1/2) * 1
  EXPECT_NEAR(minkowski_pixel_weight(1.0, 5.0, 2, 2.0), 0.5 / std::sqrt(5.0), 1e-15);
  EXPECT_EQ(minkowski_pixel_weight(0.0, 5.0, 2, 3.0), 0.0);
  EXPECT_EQ(minkowski_pixel_weight(1.0, 0.0, 2, 3.0), 0.0);
}

TEST(AdaptiveConfig, Validation) {
  EXPECT_THROW(adaptive(3, 0.5, 3).validate(), ConfigError);
  EXPECT_THROW(adaptive(2, 3.0, 3).validate(), ConfigError);
  EXPECT_NO_THROW(adaptive(3, 1.0, 3).validate());
}

TEST(PlainCrossEntropy, MatchesOracle) {
  for (int seed = 0; seed < 10; ++seed) {
    const Grid3 pred = random_grid(4, 6, 5, 900 + seed, 2.0);
    const LabelGrid labels = random_labels(4, 6, 5, 950 + seed, 0.1);
    EXPECT_NEAR(plain_softmax_ce(pred, labels).loss,
                oracle::softmax_ce(pred, labels), 1e-12);
  }
}

TEST(Focal, HalfProbability) {
  const Grid3 pred(1, 1, 2);
  const LabelGrid labels(1, 1, 2, 0);
  FocalConfig cfg;
  cfg.alpha = 0.25;
  cfg.gamma = 2.0;
  const LossOutput out = focal_loss(pred, labels, cfg);
  EXPECT_NEAR(out.loss, 0.04332169878499658, 1e-16);
  EXPECT_NEAR(out.loss, 0.25 * 0.25 * kLn2, 1e-16);
}

TEST(Focal, ReducesToCrossEntropyAndMatchesOracle) {
  for (int seed = 0; seed < 10; ++seed) {
    const Grid3 pred = random_grid(5, 5, 4, 20 + seed, 2.0);
    const LabelGrid labels = random_labels(5, 5, 4, 40 + seed, 0.1);
    FocalConfig plain{1.0, 0.0};
    EXPECT_NEAR(focal_loss(pred, labels, plain).loss,
                plain_softmax_ce(pred, labels).loss, 1e-12);
    FocalConfig cfg{0.25, 2.0};
    EXPECT_NEAR(focal_loss(pred, labels, cfg).loss,
                oracle::focal(pred, labels, 0.25, 2.0), 1e-12);
  }
}

TEST(Focal, CertainPixelContributesNothing) {
  const Grid3 pred(1, 1, 2, {800.0, -800.0});
  const LabelGrid labels(1, 1, 2, 0);
  const LossOutput out = focal_loss(pred, labels, FocalConfig{});
  EXPECT_EQ(out.loss, 0.0);
  for (double g : out.grad.data()) EXPECT_EQ(g, 0.0);
}

TEST(Focal, InvalidConfig) {
  EXPECT_THROW((FocalConfig{0.0, 2.0}).validate(), ConfigError);
  EXPECT_THROW((FocalConfig{0.5, -1.0}).validate(), ConfigError);
}

TEST(Center, PenaltyOfUnitDistance) {
  const Grid3 pred(1, 1, 2, {1.0, 0.0});
  const LabelGrid labels(1, 1, 2, 0);
  CenterLossConfig cfg = CenterLossConfig::with_zero_centers(2, 0.5, 2.0);
  const double ce = plain_softmax_ce(pred, labels).loss;
  EXPECT_NEAR(center_loss(pred, labels, cfg).loss - ce, 1.0, 1e-15);
}

TEST(Center, ReducesToCrossEntropyAndMatchesOracle) {
  for (int seed = 0; seed < 10; ++seed) {
    const LossInstance inst = random_loss_instance(5, 4, 3, 60 + seed);
    CenterLossConfig cfg = inst.centers;
    cfg.lambda = 0.0;
    EXPECT_NEAR(center_loss(inst.pred, inst.labels, cfg).loss,
                plain_softmax_ce(inst.pred, inst.labels).loss, 1e-12);
    cfg.lambda = 0.7;
    EXPECT_NEAR(center_loss(inst.pred, inst.labels, cfg).loss,
                oracle::center(inst.pred, inst.labels, 0.7, cfg.centers), 1e-12);
  }
}

TEST(Center, UpdateMovesQuarterWayForSingleMember) {
  const Grid3 pred(1, 1, 2, {4.0, -8.0});
  const LabelGrid labels(1, 1, 2, 1);
  CenterLossConfig cfg = CenterLossConfig::with_zero_centers(2, 0.5, 1e-3);
  const Grid3* preds[] = {&pred};
  const LabelGrid* labs[] = {&labels};
  update_centers(preds, labs, cfg);
  EXPECT_DOUBLE_EQ(cfg.center(1)[0], 1.0);
  EXPECT_DOUBLE_EQ(cfg.center(1)[1], -2.0);
  EXPECT_EQ(cfg.center(0)[0], 0.0);
  EXPECT_EQ(cfg.center(0)[1], 0.0);
}

TEST(Center, UpdateAccumulatesOverBatch) {
  const Grid3 a(1, 2, 2, {2.0, 0.0, 0.0, 6.0});
  const LabelGrid la(1, 2, 2, std::vector<std::uint8_t>{0, 0});
  CenterLossConfig cfg = CenterLossConfig::with_zero_centers(2, 1.0, 1e-3);
  const Grid3* preds[] = {&a};
  const LabelGrid* labs[] = {&la};
  update_centers(preds, labs, cfg);
  // c -= 1 * ((0 - x1) + (0 - x2)) / 3
  EXPECT_NEAR(cfg.center(0)[0], 2.0 / 3.0, 1e-15);
  EXPECT_NEAR(cfg.center(0)[1], 2.0, 1e-15);
}

TEST(LossKinds, NamesRoundTrip) {
  for (LossKind k : {LossKind::kAdaptive, LossKind::kSoftmaxCe, LossKind::kFocal,
                     LossKind::kCenter}) {
    EXPECT_EQ(parse_loss_kind(loss_kind_name(k)), k);
  }
  try {
    parse_loss_kind("dice");
    FAIL();
  } catch (const ConfigError& e) {
    EXPECT_EQ(e.field(), "loss.name");
  }
}

class LossGradients : public ::testing::TestWithParam<LossKind> {};

TEST_P(LossGradients, AgreeWithFiniteDifferences) {
  LossSettings s;
  s.kind = GetParam();
  for (int seed = 0; seed < 5; ++seed) {
    for (int window : {3, 5}) {
      s.window = window;
      const GradCheckReport r = gradcheck_loss(s, 5, 6, 4, 1000 + seed);
      EXPECT_TRUE(r.passed) << r.to_json();
      if (s.kind != LossKind::kAdaptive) break;
    }
  }
}

INSTANTIATE_TEST_SUITE_P(AllLosses, LossGradients,
                         ::testing::Values(LossKind::kAdaptive,
                                           LossKind::kSoftmaxCe,
                                           LossKind::kFocal, LossKind::kCenter));

TEST(LossGradientsAdaptive, StrideAndUniformVariants) {
  LossSettings s;
  s.stride = 2;
  s.schedule = WeightSchedule::kUniform;
  s.k = 1.0;
  EXPECT_TRUE(gradcheck_loss(s, 6, 6, 3, 7).passed);
  s.normalize = false;
  s.k = 5.0;
  EXPECT_TRUE(gradcheck_loss(s, 6, 6, 3, 8).passed);
}

TEST(SegmentationLossInterface, CenterLossUpdatesAfterStep) {
  const LossInstance inst = random_loss_instance(4, 4, 3, 2);
  CenterLoss loss(CenterLossConfig::with_zero_centers(3));
  const BatchItem batch[] = {{&inst.pred, &inst.labels}};
  loss.after_step(batch);
  double norm = 0;
  for (double v : loss.config().centers) norm += v * v;
  EXPECT_GT(norm, 0.0);
}

}  // namespace
}  // namespace segloss
