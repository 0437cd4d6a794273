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
#include "segloss/gradcheck_suite.hpp"

#include <random>

namespace segloss {
namespace {

AdaptiveLossConfig adaptive_from(const LossSettings& s, int classes) {
  AdaptiveLossConfig a;
  a.filter.window = s.window;
  a.filter.stride = s.stride;
  a.filter.classes = classes;
  a.filter.schedule = s.schedule;
  a.k = s.k;
  a.normalize_inputs = s.normalize;
  return a;
}

}  // namespace

LossInstance random_loss_instance(int height, int width, int classes,
                                  std::uint64_t seed, double ignore_rate) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_int_distribution<int> label(0, classes - 1);
  std::bernoulli_distribution ignore(ignore_rate);
  LossInstance inst;
  inst.pred = Grid3(height, width, classes);
  for (double& v : inst.pred.data()) v = 2.0 * normal(rng);
  std::vector<std::uint8_t> labels(static_cast<std::size_t>(height) * width);
  for (auto& l : labels) {
    const int drawn = label(rng);
    l = ignore(rng) ? kIgnoreLabel : static_cast<std::uint8_t>(drawn);
  }
  inst.labels = LabelGrid(height, width, classes, std::move(labels));
  inst.centers = CenterLossConfig::with_zero_centers(classes);
  for (double& v : inst.centers.centers) v = normal(rng);
  return inst;
}

LossOutput loss_output(const LossSettings& s, const LossInstance& inst,
                       const Grid3& pred) {
  switch (s.kind) {
    case LossKind::kAdaptive:
      return adaptive_loss_forward(pred, inst.labels, adaptive_from(s, pred.channels()));
    case LossKind::kSoftmaxCe:
      return plain_softmax_ce(pred, inst.labels);
    case LossKind::kFocal:
      return focal_loss(pred, inst.labels, FocalConfig{s.focal_alpha, s.focal_gamma});
    case LossKind::kCenter: {
      CenterLossConfig c = inst.centers;
      c.alpha = s.center_alpha;
      c.lambda = s.center_lambda;
      return center_loss(pred, inst.labels, c);
    }
  }
  return {};
}

double loss_value(const LossSettings& s, const LossInstance& inst,
                  const Grid3& pred) {
  if (s.kind == LossKind::kAdaptive) {
    return adaptive_forward_pass(pred, inst.labels, adaptive_from(s, pred.channels())).loss;
  }
  return loss_output(s, inst, pred).loss;
}

GradCheckReport gradcheck_loss(const LossSettings& settings, int height,
                               int width, int classes, std::uint64_t seed,
                               double step, double rel_tol, double abs_tol) {
  const LossInstance inst = random_loss_instance(height, width, classes, seed);
  const LossOutput analytic = loss_output(settings, inst, inst.pred);
  const Grid3 numeric = finite_difference_grad(
      [&](const Grid3& p) { return loss_value(settings, inst, p); }, inst.pred, step);
  return check_gradient(analytic.grad, numeric, rel_tol, abs_tol);
}

}  // namespace segloss
