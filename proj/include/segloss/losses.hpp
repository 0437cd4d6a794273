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
#ifndef SEGLOSS_LOSSES_HPP_
#define SEGLOSS_LOSSES_HPP_

#include <memory>
#include <span>
#include <string>
#include <vector>

#include "segloss/grid.hpp"
#include "segloss/selective_filter.hpp"

namespace segloss {

// Result of evaluating a loss on one prediction map.
//
// grad has the shape of the raw prediction map. per_pixel is H x W x 1 and
// holds each valid pixel's loss term (zero elsewhere). When valid_count is
// zero the batch is degenerate: loss and grad are zero.
struct LossOutput {
  double loss = 0.0;
  Grid3 grad;
  Grid3 per_pixel;
  int valid_count = 0;

  bool degenerate() const { return valid_count == 0; }
  double grad_norm() const;
  // {"loss": ..., "valid_count": ..., "grad_norm": ...}
  std::string to_json() const;
};

struct LocalCrossEntropy {
  double loss = 0.0;
  std::vector<double> grad;  // softmax(f) - onehot(label)
};

// -log softmax(f)[label] and its gradient with respect to f.
LocalCrossEntropy softmax_ce_local(std::span<const double> f, int label);

// Softmax probabilities, computed with max subtraction.
std::vector<double> softmax(std::span<const double> v);

struct AdaptiveLossConfig {
  FilterSpec filter;
  double k = 3.0;  // Minkowski exponent, >= 1
  bool normalize_inputs = true;

  void validate() const;
};

// Intermediates kept from the adaptive forward pass for the backward pass.
struct AdaptiveForward {
  NormalizedMap inputs;  // normalized (or copied) predictions fed to the filter
  MergedMap merged;
  Grid3 per_pixel;
  int valid_count = 0;
  double mean_power = 0.0;  // (1/M) * sum L^k
  double loss = 0.0;
};

// normalize -> selective pool -> local softmax CE -> Minkowski pooling.
AdaptiveForward adaptive_forward_pass(const Grid3& pred_raw,
                                      const LabelGrid& labels,
                                      const AdaptiveLossConfig& cfg);

// Gradient of the pooled loss with respect to the raw predictions.
Grid3 adaptive_loss_backward(const AdaptiveForward& state,
                             const LabelGrid& labels,
                             const AdaptiveLossConfig& cfg);

// Forward and backward in one call.
LossOutput adaptive_loss_forward(const Grid3& pred_raw, const LabelGrid& labels,
                                 const AdaptiveLossConfig& cfg);

// d(pooled)/d(L_p) for one pixel term given the pooled statistics.
double minkowski_pixel_weight(double pixel_loss, double mean_power,
                              int valid_count, double k);

LossOutput plain_softmax_ce(const Grid3& pred_raw, const LabelGrid& labels);

struct FocalConfig {
  double alpha = 0.25;
  double gamma = 2.0;

  void validate() const;
};

// Mean over valid pixels of -alpha * (1 - p_t)^gamma * log(p_t).
LossOutput focal_loss(const Grid3& pred_raw, const LabelGrid& labels,
                      const FocalConfig& cfg);

// Center loss in class-score space. centers is a classes x classes row-major
// matrix; row j is the center of class j.
struct CenterLossConfig {
  double alpha = 0.5;      // center update rate
  double lambda = 3e-4;    // weight of the center term
  int classes = 0;
  std::vector<double> centers;

  // Zero centers for the given class count.
  static CenterLossConfig with_zero_centers(int classes, double alpha = 0.5,
                                            double lambda = 3e-4);
  std::span<const double> center(int label) const;
  void validate() const;
};

// CE + (lambda / 2) * mean ||x - c_y||^2 over valid pixels.
LossOutput center_loss(const Grid3& pred_raw, const LabelGrid& labels,
                       const CenterLossConfig& cfg);

// c_j <- c_j - alpha * sum_{y_i = j} (c_j - x_i) / (1 + n_j), accumulated over
// all images given. Classes with no members keep their center.
void update_centers(std::span<const Grid3* const> preds,
                    std::span<const LabelGrid* const> labels,
                    CenterLossConfig& cfg);

enum class LossKind { kAdaptive, kSoftmaxCe, kFocal, kCenter };

const char* loss_kind_name(LossKind kind);
// Throws ConfigError("loss.name") for unknown names.
LossKind parse_loss_kind(const std::string& name);

struct BatchItem {
  const Grid3* pred;
  const LabelGrid* labels;
};

// Uniform forward/backward contract used by the trainer.
class SegmentationLoss {
 public:
  virtual ~SegmentationLoss() = default;
  virtual LossKind kind() const = 0;
  virtual LossOutput evaluate(const Grid3& pred_raw,
                              const LabelGrid& labels) const = 0;
  // Called once per iteration after the optimizer step.
  virtual void after_step(std::span<const BatchItem> batch) { (void)batch; }
};

std::unique_ptr<SegmentationLoss> make_adaptive_loss(AdaptiveLossConfig cfg);
std::unique_ptr<SegmentationLoss> make_softmax_ce_loss();
std::unique_ptr<SegmentationLoss> make_focal_loss(FocalConfig cfg);

class CenterLoss : public SegmentationLoss {
 public:
  explicit CenterLoss(CenterLossConfig cfg);
  LossKind kind() const override { return LossKind::kCenter; }
  LossOutput evaluate(const Grid3& pred_raw,
                      const LabelGrid& labels) const override;
  void after_step(std::span<const BatchItem> batch) override;
  const CenterLossConfig& config() const { return cfg_; }

 private:
  CenterLossConfig cfg_;
};

}  // namespace segloss

#endif  // SEGLOSS_LOSSES_HPP_
