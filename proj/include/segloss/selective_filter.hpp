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
#ifndef SEGLOSS_SELECTIVE_FILTER_HPP_
#define SEGLOSS_SELECTIVE_FILTER_HPP_

#include <cstdint>
#include <vector>

#include "segloss/grid.hpp"

namespace segloss {

enum class WeightSchedule {
  // 2^(1 - D8): 2 at the center, 1 at chessboard distance 1, 1/2 at 2, ...
  kChessboardPow2,
  // 1 everywhere; used as a test fixture.
  kUniform,
};

struct FilterSpec {
  int window = 5;  // odd, square
  int stride = 1;
  int classes = 0;
  WeightSchedule schedule = WeightSchedule::kChessboardPow2;

  int radius() const { return (window - 1) / 2; }
  bool is_center(int i, int j) const {
    return i % stride == 0 && j % stride == 0;
  }
  // Throws ConfigError naming the bad field.
  void validate() const;
};

// 2^(1 - max(|du|, |dv|)).
double chessboard_weight(int du, int dv);

double offset_weight(WeightSchedule schedule, int du, int dv);

// Output of the selective pooling filter.
//
// values(i, j, :) is the merged vector at every valid center; all zeros
// elsewhere. support(i, j) counts the in-bounds window pixels sharing the
// center's label (the center included). A pixel is valid when it lies on the
// stride lattice and its label is not kIgnoreLabel.
struct MergedMap {
  Grid3 values;
  std::vector<int> support;
  std::vector<std::uint8_t> valid;

  std::size_t index(int i, int j) const {
    return static_cast<std::size_t>(i) * values.width() + j;
  }
  int valid_count() const;
};

// Label-selective, distance-weighted neighborhood average:
//
//   f(i,j) = (1/xi) * sum_{(u,v) in window} [y(i+u,j+v) == y(i,j)]
//                                           * w(u,v) * x(i+u,j+v)
//
// Windows are clipped at the image border. Ignored pixels never match.
MergedMap selective_pool(const Grid3& pred, const LabelGrid& labels,
                         const FilterSpec& spec);

// Exact transpose of selective_pool for fixed labels. Entries of
// grad_merged at invalid centers are ignored.
Grid3 selective_pool_adjoint(const Grid3& grad_merged, const LabelGrid& labels,
                             const FilterSpec& spec);

}  // namespace segloss

#endif  // SEGLOSS_SELECTIVE_FILTER_HPP_
