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
#include "segloss/losses.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include <nlohmann/json.hpp>

#include "segloss/error.hpp"

namespace segloss {
namespace {

constexpr double kFocalMinProb = 1e-15;

struct LogSumExpParts {
  double max;
  double log1p_rest;  // log(sum exp(v - max)), the max term split off
};

LogSumExpParts log_sum_exp_parts(std::span<const double> v) {
  const auto top = std::max_element(v.begin(), v.end());
  double rest = 0.0;
  for (auto it = v.begin(); it != v.end(); ++it) {
    if (it != top) rest += std::exp(*it - *top);
  }
  return {*top, std::log1p(rest)};
}

double log_sum_exp(std::span<const double> v) {
  const LogSumExpParts p = log_sum_exp_parts(v);
  return p.max + p.log1p_rest;
}

// -log softmax(v)[label] as (max - v[label]) + log1p(rest).
double neg_log_softmax(std::span<const double> v, int label) {
  const LogSumExpParts p = log_sum_exp_parts(v);
  return (p.max - v[label]) + p.log1p_rest;
}

void check_label(int label, std::size_t classes) {
  if (label < 0 || static_cast<std::size_t>(label) >= classes) {
    throw Error(ErrorKind::kInvalidArgument,
                "label " + std::to_string(label) + " outside [0, " +
                    std::to_string(classes) + ")");
  }
}

LossOutput empty_output(const Grid3& pred) {
  LossOutput out;
  out.grad = Grid3(pred.height(), pred.width(), pred.channels());
  out.per_pixel = Grid3(pred.height(), pred.width(), 1);
  return out;
}

// Shared body of the three per-pixel losses. term(x, label, grad_out)
// returns the pixel's loss and writes its unscaled gradient.
template <typename Term>
LossOutput per_pixel_mean(const Grid3& pred, const LabelGrid& labels,
                          Term&& term) {
  check_compatible(pred, labels);
  LossOutput out = empty_output(pred);
  out.valid_count = labels.valid_count();
  if (out.valid_count == 0) return out;
  const double inv_m = 1.0 / out.valid_count;
  const std::size_t c = pred.channels();
  std::vector<double> g(c);
  double total = 0.0;
  for (int i = 0; i < pred.height(); ++i) {
    for (int j = 0; j < pred.width(); ++j) {
      const std::uint8_t y = labels(i, j);
      if (y == kIgnoreLabel) continue;
      const double l = term(pred.pixel(i, j), static_cast<int>(y), g);
      out.per_pixel(i, j, 0) = l;
      total += l;
      auto dst = out.grad.pixel(i, j);
      for (std::size_t k = 0; k < c; ++k) dst[k] = g[k] * inv_m;
    }
  }
  out.loss = total * inv_m;
  return out;
}

}  // namespace

double LossOutput::grad_norm() const {
  double s = 0.0;
  for (double v : grad.data()) s += v * v;
  return std::sqrt(s);
}

std::string LossOutput::to_json() const {
  nlohmann::json j;
  j["loss"] = loss;
  j["valid_count"] = valid_count;
  j["grad_norm"] = grad_norm();
  return j.dump();
}

std::vector<double> softmax(std::span<const double> v) {
  const double lse = log_sum_exp(v);
  std::vector<double> p(v.size());
  for (std::size_t k = 0; k < v.size(); ++k) p[k] = std::exp(v[k] - lse);
  return p;
}

LocalCrossEntropy softmax_ce_local(std::span<const double> f, int label) {
  check_label(label, f.size());
  const double lse = log_sum_exp(f);
  LocalCrossEntropy out;
  out.loss = neg_log_softmax(f, label);
  out.grad.resize(f.size());
  for (std::size_t k = 0; k < f.size(); ++k) out.grad[k] = std::exp(f[k] - lse);
  out.grad[label] -= 1.0;
  return out;
}

void AdaptiveLossConfig::validate() const {
  filter.validate();
  if (!(k >= 1.0) || !std::isfinite(k)) {
    throw ConfigError("k", "Minkowski exponent must be finite and >= 1");
  }
}

AdaptiveForward adaptive_forward_pass(const Grid3& pred_raw,
                                      const LabelGrid& labels,
                                      const AdaptiveLossConfig& cfg) {
  cfg.validate();
  check_compatible(pred_raw, labels);
  AdaptiveForward st;
  if (cfg.normalize_inputs) {
    st.inputs = normalize_pixels(pred_raw);
  } else {
    st.inputs.values = pred_raw;
  }
  st.merged = selective_pool(st.inputs.values, labels, cfg.filter);
  st.per_pixel = Grid3(pred_raw.height(), pred_raw.width(), 1);
  st.valid_count = st.merged.valid_count();
  if (st.valid_count == 0) return st;

  double power_sum = 0.0;
  for (int i = 0; i < pred_raw.height(); ++i) {
    for (int j = 0; j < pred_raw.width(); ++j) {
      if (!st.merged.valid[st.merged.index(i, j)]) continue;
      auto f = st.merged.values.pixel(i, j);
      const double l = neg_log_softmax(f, labels(i, j));
      st.per_pixel(i, j, 0) = l;
      power_sum += cfg.k == 1.0 ? l : std::pow(l, cfg.k);
    }
  }
  st.mean_power = power_sum / st.valid_count;
  st.loss = cfg.k == 1.0 ? st.mean_power : std::pow(st.mean_power, 1.0 / cfg.k);
  return st;
}

double minkowski_pixel_weight(double pixel_loss, double mean_power,
                              int valid_count, double k) {
  // L = S^(1/k), S = (1/M) sum L_p^k  =>  dL/dL_p = (1/M) S^(1/k - 1) L_p^(k-1)
  const double inv_m = 1.0 / valid_count;
  if (k == 1.0) return inv_m;
  if (pixel_loss <= 0.0 || mean_power <= 0.0) return 0.0;
  return inv_m * std::pow(mean_power, 1.0 / k - 1.0) *
         std::pow(pixel_loss, k - 1.0);
}

Grid3 adaptive_loss_backward(const AdaptiveForward& st,
                             const LabelGrid& labels,
                             const AdaptiveLossConfig& cfg) {
  const Grid3& merged = st.merged.values;
  Grid3 grad_merged(merged.height(), merged.width(), merged.channels());
  if (st.valid_count == 0) return grad_merged;
  const std::size_t c = merged.channels();
  for (int i = 0; i < merged.height(); ++i) {
    for (int j = 0; j < merged.width(); ++j) {
      if (!st.merged.valid[st.merged.index(i, j)]) continue;
      const double scale = minkowski_pixel_weight(
          st.per_pixel(i, j, 0), st.mean_power, st.valid_count, cfg.k);
      if (scale == 0.0) continue;
      auto f = merged.pixel(i, j);
      const double lse = log_sum_exp(f);
      auto g = grad_merged.pixel(i, j);
      for (std::size_t k = 0; k < c; ++k) g[k] = scale * std::exp(f[k] - lse);
      g[labels(i, j)] -= scale;
    }
  }
  Grid3 grad_inputs = selective_pool_adjoint(grad_merged, labels, cfg.filter);
  if (!cfg.normalize_inputs) return grad_inputs;
  return normalize_pixels_backward(st.inputs, grad_inputs);
}

LossOutput adaptive_loss_forward(const Grid3& pred_raw, const LabelGrid& labels,
                                 const AdaptiveLossConfig& cfg) {
  AdaptiveForward st = adaptive_forward_pass(pred_raw, labels, cfg);
  LossOutput out;
  out.loss = st.loss;
  out.valid_count = st.valid_count;
  out.grad = adaptive_loss_backward(st, labels, cfg);
  out.per_pixel = std::move(st.per_pixel);
  return out;
}

LossOutput plain_softmax_ce(const Grid3& pred_raw, const LabelGrid& labels) {
  return per_pixel_mean(pred_raw, labels,
                        [](std::span<const double> x, int y, std::vector<double>& g) {
                          LocalCrossEntropy ce = softmax_ce_local(x, y);
                          g = std::move(ce.grad);
                          return ce.loss;
                        });
}

void FocalConfig::validate() const {
  if (!(alpha > 0.0 && alpha <= 1.0)) {
    throw ConfigError("alpha", "focal alpha must lie in (0, 1]");
  }
  if (!(gamma >= 0.0) || !std::isfinite(gamma)) {
    throw ConfigError("gamma", "focal gamma must be finite and >= 0");
  }
}

LossOutput focal_loss(const Grid3& pred_raw, const LabelGrid& labels,
                      const FocalConfig& cfg) {
  cfg.validate();
  const double log_floor = std::log(kFocalMinProb);
  return per_pixel_mean(
      pred_raw, labels,
      [&](std::span<const double> x, int y, std::vector<double>& g) {
        const double lse = log_sum_exp(x);
        const double log_pt = std::max(-neg_log_softmax(x, y), log_floor);
        const double pt = std::exp(log_pt);
        const double one_minus = -std::expm1(log_pt);
        if (one_minus <= 0.0) {
          std::fill(g.begin(), g.end(), 0.0);
          return 0.0;
        }
        const double modulator = std::pow(one_minus, cfg.gamma);
        // d/dp_t of -alpha (1-p)^gamma log p, times p_t (from dp_t/dx).
        double dl_dpt_times_pt = -modulator;
        if (cfg.gamma != 0.0) {
          dl_dpt_times_pt +=
              cfg.gamma * std::pow(one_minus, cfg.gamma - 1.0) * pt * log_pt;
        }
        dl_dpt_times_pt *= cfg.alpha;
        // dp_t/dx_k = p_t (delta_ky - p_k)
        for (std::size_t k = 0; k < x.size(); ++k) {
          const double pk = std::exp(x[k] - lse);
          g[k] = dl_dpt_times_pt * ((static_cast<int>(k) == y ? 1.0 : 0.0) - pk);
        }
        return -cfg.alpha * modulator * log_pt;
      });
}

CenterLossConfig CenterLossConfig::with_zero_centers(int classes, double alpha,
                                                     double lambda) {
  CenterLossConfig cfg;
  cfg.alpha = alpha;
  cfg.lambda = lambda;
  cfg.classes = classes;
  cfg.centers.assign(static_cast<std::size_t>(classes) * classes, 0.0);
  return cfg;
}

std::span<const double> CenterLossConfig::center(int label) const {
  return std::span<const double>(centers).subspan(
      static_cast<std::size_t>(label) * classes, classes);
}

void CenterLossConfig::validate() const {
  if (!(alpha > 0.0 && alpha <= 1.0)) {
    throw ConfigError("alpha", "center update rate must lie in (0, 1]");
  }
  if (!(lambda >= 0.0) || !std::isfinite(lambda)) {
    throw ConfigError("lambda", "center loss weight must be finite and >= 0");
  }
  if (classes < 1 ||
      centers.size() != static_cast<std::size_t>(classes) * classes) {
    throw DimensionError("center matrix must be classes x classes");
  }
  for (double v : centers) {
    if (!std::isfinite(v)) throw NumericError("center matrix is not finite");
  }
}

LossOutput center_loss(const Grid3& pred_raw, const LabelGrid& labels,
                       const CenterLossConfig& cfg) {
  cfg.validate();
  if (cfg.classes != pred_raw.channels()) {
    throw DimensionError("center matrix class count does not match predictions");
  }
  return per_pixel_mean(
      pred_raw, labels,
      [&](std::span<const double> x, int y, std::vector<double>& g) {
        LocalCrossEntropy ce = softmax_ce_local(x, y);
        auto c = cfg.center(y);
        double dist2 = 0.0;
        for (std::size_t k = 0; k < x.size(); ++k) {
          const double d = x[k] - c[k];
          dist2 += d * d;
          g[k] = ce.grad[k] + cfg.lambda * d;
        }
        return ce.loss + 0.5 * cfg.lambda * dist2;
      });
}

void update_centers(std::span<const Grid3* const> preds,
                    std::span<const LabelGrid* const> labels,
                    CenterLossConfig& cfg) {
  if (preds.size() != labels.size()) {
    throw DimensionError("update_centers: preds and labels differ in count");
  }
  cfg.validate();
  const std::size_t c = cfg.classes;
  std::vector<double> diff_sum(c * c, 0.0);
  std::vector<int> members(c, 0);
  for (std::size_t b = 0; b < preds.size(); ++b) {
    const Grid3& pred = *preds[b];
    const LabelGrid& lab = *labels[b];
    check_compatible(pred, lab);
    if (static_cast<std::size_t>(pred.channels()) != c) {
      throw DimensionError("center matrix class count does not match predictions");
    }
    for (int i = 0; i < pred.height(); ++i) {
      for (int j = 0; j < pred.width(); ++j) {
        const std::uint8_t y = lab(i, j);
        if (y == kIgnoreLabel) continue;
        ++members[y];
        auto x = pred.pixel(i, j);
        for (std::size_t k = 0; k < c; ++k) {
          diff_sum[y * c + k] += cfg.centers[y * c + k] - x[k];
        }
      }
    }
  }
  for (std::size_t cls = 0; cls < c; ++cls) {
    if (members[cls] == 0) continue;
    const double scale = cfg.alpha / (1.0 + members[cls]);
    for (std::size_t k = 0; k < c; ++k) {
      cfg.centers[cls * c + k] -= scale * diff_sum[cls * c + k];
    }
  }
}

const char* loss_kind_name(LossKind kind) {
  switch (kind) {
    case LossKind::kAdaptive: return "adaptive";
    case LossKind::kSoftmaxCe: return "softmax_ce";
    case LossKind::kFocal: return "focal";
    case LossKind::kCenter: return "center";
  }
  return "unknown";
}

LossKind parse_loss_kind(const std::string& name) {
  for (LossKind k : {LossKind::kAdaptive, LossKind::kSoftmaxCe,
                     LossKind::kFocal, LossKind::kCenter}) {
    if (name == loss_kind_name(k)) return k;
  }
  throw ConfigError("loss.name", "unknown loss '" + name +
                                     "' (expected adaptive, softmax_ce, "
                                     "focal or center)");
}

namespace {

class AdaptiveLoss : public SegmentationLoss {
 public:
  explicit AdaptiveLoss(AdaptiveLossConfig cfg) : cfg_(cfg) { cfg_.validate(); }
  LossKind kind() const override { return LossKind::kAdaptive; }
  LossOutput evaluate(const Grid3& pred, const LabelGrid& labels) const override {
    return adaptive_loss_forward(pred, labels, cfg_);
  }

 private:
  AdaptiveLossConfig cfg_;
};

class SoftmaxCeLoss : public SegmentationLoss {
 public:
  LossKind kind() const override { return LossKind::kSoftmaxCe; }
  LossOutput evaluate(const Grid3& pred, const LabelGrid& labels) const override {
    return plain_softmax_ce(pred, labels);
  }
};

class FocalLoss : public SegmentationLoss {
 public:
  explicit FocalLoss(FocalConfig cfg) : cfg_(cfg) { cfg_.validate(); }
  LossKind kind() const override { return LossKind::kFocal; }
  LossOutput evaluate(const Grid3& pred, const LabelGrid& labels) const override {
    return focal_loss(pred, labels, cfg_);
  }

 private:
  FocalConfig cfg_;
};

}  // namespace

std::unique_ptr<SegmentationLoss> make_adaptive_loss(AdaptiveLossConfig cfg) {
  return std::make_unique<AdaptiveLoss>(cfg);
}

std::unique_ptr<SegmentationLoss> make_softmax_ce_loss() {
  return std::make_unique<SoftmaxCeLoss>();
}

std::unique_ptr<SegmentationLoss> make_focal_loss(FocalConfig cfg) {
  return std::make_unique<FocalLoss>(cfg);
}

CenterLoss::CenterLoss(CenterLossConfig cfg) : cfg_(std::move(cfg)) {
  cfg_.validate();
}

LossOutput CenterLoss::evaluate(const Grid3& pred,
                                const LabelGrid& labels) const {
  return center_loss(pred, labels, cfg_);
}

void CenterLoss::after_step(std::span<const BatchItem> batch) {
  std::vector<const Grid3*> preds;
  std::vector<const LabelGrid*> labels;
  for (const BatchItem& item : batch) {
    preds.push_back(item.pred);
    labels.push_back(item.labels);
  }
  update_centers(preds, labels, cfg_);
}

}  // namespace segloss
