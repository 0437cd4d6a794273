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
#ifndef SEGLOSS_SYNTHDATA_HPP_
#define SEGLOSS_SYNTHDATA_HPP_

#include <array>
#include <cstdint>
#include <random>

#include "segloss/grid.hpp"

namespace segloss {

enum class ShapeKind : unsigned { kRectangle = 1u, kDisk = 2u };

// Seeded description of one synthetic scene. Class 0 is background; shapes
// draw their class from a Zipf-like law P(c) ~ c^-skew over 1..classes-1.
struct SceneSpec {
  int height = 64;
  int width = 64;
  int classes = 6;
  int num_shapes = 5;
  unsigned shape_kinds = static_cast<unsigned>(ShapeKind::kRectangle) |
                         static_cast<unsigned>(ShapeKind::kDisk);
  double class_frequency_skew = 1.0;
  double noise_std = 0.1;
  std::uint64_t seed = 0;

  bool allows(ShapeKind kind) const {
    return (shape_kinds & static_cast<unsigned>(kind)) != 0;
  }
  // Throws ConfigError naming the bad field (relative to the scene).
  void validate() const;
};

struct Sample {
  Grid3 image;       // H x W x 3, values in [0, 1]
  LabelGrid labels;  // every label in [0, classes)
};

// Deterministic in spec: identical specs give bit-identical samples.
Sample generate_sample(const SceneSpec& spec);

// Normalized shape-class probabilities over classes 1..classes-1 (index 0 of
// the result corresponds to class 1).
std::vector<double> shape_class_probabilities(int classes, double skew);

// Base RGB color of a class.
std::array<double, 3> class_color(int label);

struct AugmentParams {
  double scale = 1.0;  // in [0.5, 1.5]
  bool hflip = false;
};

// Random scale in [0.5, 1.5] and a fair coin for the flip.
AugmentParams sample_augment_params(std::mt19937_64& rng);

// Nearest-neighbor rescale of image and labels, optional horizontal mirror,
// then a seeded crop or zero-pad to out_h x out_w (padded labels are
// kIgnoreLabel).
Sample augment(const Sample& s, double scale, bool hflip, int out_h, int out_w,
               std::uint64_t seed);

// Stateless 64-bit mix used to derive per-sample seeds from a run seed.
std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b);

}  // namespace segloss

#endif  // SEGLOSS_SYNTHDATA_HPP_
