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
#ifndef SEGLOSS_GRADCHECK_SUITE_HPP_
#define SEGLOSS_GRADCHECK_SUITE_HPP_

#include <cstdint>
#include <optional>

#include "segloss/gradcheck.hpp"
#include "segloss/losses.hpp"
#include "segloss/run_config.hpp"

namespace segloss {

// A seeded random loss input: standard-normal predictions scaled by 2,
// uniform labels with roughly one pixel in ten ignored, and (for the center
// loss) standard-normal centers.
struct LossInstance {
  Grid3 pred;
  LabelGrid labels;
  CenterLossConfig centers;
};

LossInstance random_loss_instance(int height, int width, int classes,
                                  std::uint64_t seed, double ignore_rate = 0.1);

// Scalar loss of the configured family on pred (center state read-only).
double loss_value(const LossSettings& settings, const LossInstance& inst,
                  const Grid3& pred);
LossOutput loss_output(const LossSettings& settings, const LossInstance& inst,
                       const Grid3& pred);

// Analytic gradient against central differences on one seeded instance.
GradCheckReport gradcheck_loss(const LossSettings& settings, int height,
                               int width, int classes, std::uint64_t seed,
                               double step = 1e-6, double rel_tol = 1e-5,
                               double abs_tol = 1e-8);

}  // namespace segloss

#endif  // SEGLOSS_GRADCHECK_SUITE_HPP_
