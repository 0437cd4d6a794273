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
// Literal loop-by-loop transcriptions of the library's formulas. They use
// nothing from src/ beyond element access on Grid3 and LabelGrid.
#ifndef SEGLOSS_TESTS_ORACLES_HPP_
#define SEGLOSS_TESTS_ORACLES_HPP_

#include <cstdint>
#include <optional>
#include <vector>

#include "segloss/grid.hpp"

namespace segloss::oracle {

std::size_t offset(int i, int j, int c, int width, int channels);

// Population mean/std standardization, zeros for std < 1e-12.
std::vector<double> standardize(const std::vector<double>& v);

// f(i,j) at every pixel (zeros at invalid centers), quadruple loop.
std::vector<std::vector<std::vector<double>>> selective_pool(
    const Grid3& x, const LabelGrid& labels, int window, int stride,
    bool uniform);

double adaptive_loss(const Grid3& raw, const LabelGrid& labels, int window,
                     int stride, bool uniform, double k, bool normalize);

double softmax_ce(const Grid3& raw, const LabelGrid& labels);

double focal(const Grid3& raw, const LabelGrid& labels, double alpha,
             double gamma);

// centers: classes x classes row-major.
double center(const Grid3& raw, const LabelGrid& labels, double lambda,
              const std::vector<double>& centers);

// Zero-padded 3x3 convolution, weights [ky][kx][in][out], optional ReLU.
Grid3 conv3x3(const Grid3& in, const std::vector<double>& weights,
              const std::vector<double>& bias, int out_channels, bool relu);

struct ConfusionIoU {
  std::vector<std::optional<double>> per_class;
  std::optional<double> mean;
};

// Builds the full (classes x classes) confusion matrix, then reads IoU off
// the diagonal and the row/column sums.
ConfusionIoU confusion_iou(const Grid3& pred, const LabelGrid& labels);

}  // namespace segloss::oracle

#endif  // SEGLOSS_TESTS_ORACLES_HPP_
