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
#ifndef SEGLOSS_METRICS_HPP_
#define SEGLOSS_METRICS_HPP_

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "segloss/grid.hpp"

namespace segloss {

struct IoUReport {
  // Absent for classes that appear in neither prediction nor ground truth.
  std::vector<std::optional<double>> per_class_iou;
  // Mean over present classes; absent when every pixel is ignored.
  std::optional<double> mean_iou;

  std::string to_json() const;
};

// Hard argmax over channels; ties resolve to the lowest class index.
std::vector<std::uint8_t> argmax_labels(const Grid3& pred);

// Accumulates per-class intersection and union counts over a dataset.
class IoUAccumulator {
 public:
  explicit IoUAccumulator(int classes);

  void add(const Grid3& pred, const LabelGrid& labels);
  IoUReport report() const;

 private:
  int classes_;
  std::vector<std::int64_t> intersection_;
  std::vector<std::int64_t> predicted_;
  std::vector<std::int64_t> actual_;
};

IoUReport mean_iou(const Grid3& pred, const LabelGrid& labels);

}  // namespace segloss

#endif  // SEGLOSS_METRICS_HPP_
