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
#include "segloss/metrics.hpp"

#include <nlohmann/json.hpp>

#include "segloss/error.hpp"

namespace segloss {

std::vector<std::uint8_t> argmax_labels(const Grid3& pred) {
  std::vector<std::uint8_t> out(static_cast<std::size_t>(pred.height()) * pred.width());
  const std::size_t c = pred.channels();
  auto d = pred.data();
  for (std::size_t p = 0; p < out.size(); ++p) {
    std::size_t best = 0;
    for (std::size_t k = 1; k < c; ++k) {
      if (d[p * c + k] > d[p * c + best]) best = k;
    }
    out[p] = static_cast<std::uint8_t>(best);
  }
  return out;
}

IoUAccumulator::IoUAccumulator(int classes)
    : classes_(classes),
      intersection_(classes, 0),
      predicted_(classes, 0),
      actual_(classes, 0) {
  if (classes <= 0) throw DimensionError("IoU needs a positive class count");
}

void IoUAccumulator::add(const Grid3& pred, const LabelGrid& labels) {
  check_compatible(pred, labels);
  if (pred.channels() != classes_) {
    throw DimensionError("IoU accumulator class count mismatch");
  }
  const auto hard = argmax_labels(pred);
  const auto truth = labels.labels();
  for (std::size_t p = 0; p < hard.size(); ++p) {
    if (truth[p] == kIgnoreLabel) continue;
    ++predicted_[hard[p]];
    ++actual_[truth[p]];
    intersection_[truth[p]] += (hard[p] == truth[p]);
  }
}

IoUReport IoUAccumulator::report() const {
  IoUReport r;
  r.per_class_iou.resize(classes_);
  double sum = 0.0;
  int present = 0;
  for (int c = 0; c < classes_; ++c) {
    const std::int64_t uni = predicted_[c] + actual_[c] - intersection_[c];
    if (uni == 0) continue;
    const double iou = static_cast<double>(intersection_[c]) / static_cast<double>(uni);
    r.per_class_iou[c] = iou;
    sum += iou;
    ++present;
  }
  if (present > 0) r.mean_iou = sum / present;
  return r;
}

IoUReport mean_iou(const Grid3& pred, const LabelGrid& labels) {
  IoUAccumulator acc(pred.channels());
  acc.add(pred, labels);
  return acc.report();
}

std::string IoUReport::to_json() const {
  nlohmann::json j;
  nlohmann::json per = nlohmann::json::array();
  for (const auto& v : per_class_iou) {
    per.push_back(v ? nlohmann::json(*v) : nlohmann::json(nullptr));
  }
  j["per_class_iou"] = per;
  j["mean_iou"] = mean_iou ? nlohmann::json(*mean_iou) : nlohmann::json(nullptr);
  return j.dump();
}

}  // namespace segloss
