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
#include "segloss/grid.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <utility>

#include "segloss/error.hpp"

namespace segloss {
namespace {

void check_dims(int height, int width, int channels) {
  if (height <= 0 || width <= 0 || channels <= 0) {
    throw DimensionError("grid dimensions must be positive, got " +
                         std::to_string(height) + "x" + std::to_string(width) +
                         "x" + std::to_string(channels));
  }
}

}  // namespace

Grid3::Grid3(int height, int width, int channels)
    : height_(height), width_(width), channels_(channels) {
  check_dims(height, width, channels);
  data_.assign(static_cast<std::size_t>(height) * width * channels, 0.0);
}

Grid3::Grid3(int height, int width, int channels, std::vector<double> data)
    : height_(height), width_(width), channels_(channels),
      data_(std::move(data)) {
  check_dims(height, width, channels);
  if (data_.size() != static_cast<std::size_t>(height) * width * channels) {
    throw DimensionError("grid data length " + std::to_string(data_.size()) +
                         " does not match " + std::to_string(height) + "x" +
                         std::to_string(width) + "x" +
                         std::to_string(channels));
  }
  if (!all_finite()) {
    throw Error(ErrorKind::kInvalidArgument, "grid data contains NaN or Inf");
  }
}

void Grid3::check_index(int i, int j, int c) const {
  if (i < 0 || i >= height_ || j < 0 || j >= width_ || c < 0 ||
      c >= channels_) {
    throw IndexError("index (" + std::to_string(i) + ", " + std::to_string(j) +
                     ", " + std::to_string(c) + ") outside " +
                     std::to_string(height_) + "x" + std::to_string(width_) +
                     "x" + std::to_string(channels_) + " grid");
  }
}

double Grid3::at(int i, int j, int c) const {
  check_index(i, j, c);
  return data_[offset(i, j, c)];
}

double& Grid3::at(int i, int j, int c) {
  check_index(i, j, c);
  return data_[offset(i, j, c)];
}

std::span<const double> Grid3::pixel(int i, int j) const {
  check_index(i, j, 0);
  return std::span<const double>(data_).subspan(offset(i, j), channels_);
}

std::span<double> Grid3::pixel(int i, int j) {
  check_index(i, j, 0);
  return std::span<double>(data_).subspan(offset(i, j), channels_);
}

bool Grid3::all_finite() const {
  for (double v : data_) {
    if (!std::isfinite(v)) return false;
  }
  return true;
}

void Grid3::fill(double value) {
  for (double& v : data_) v = value;
}

LabelGrid::LabelGrid(int height, int width, int classes,
                     std::uint8_t fill_label)
    : LabelGrid(height, width, classes,
                std::vector<std::uint8_t>(
                    static_cast<std::size_t>(std::max(height, 0)) *
                        std::max(width, 0),
                    fill_label)) {}

LabelGrid::LabelGrid(int height, int width, int classes,
                     std::vector<std::uint8_t> labels)
    : height_(height), width_(width), classes_(classes),
      labels_(std::move(labels)) {
  check_dims(height, width, classes);
  if (classes >= kIgnoreLabel) {
    throw DimensionError("class count must be below the ignore label (255)");
  }
  if (labels_.size() != static_cast<std::size_t>(height) * width) {
    throw DimensionError("label data length does not match " +
                         std::to_string(height) + "x" + std::to_string(width));
  }
  for (std::uint8_t l : labels_) {
    if (l != kIgnoreLabel && l >= classes) {
      throw Error(ErrorKind::kInvalidArgument,
                  "label " + std::to_string(l) + " outside [0, " +
                      std::to_string(classes) + ")");
    }
  }
}

std::uint8_t LabelGrid::at(int i, int j) const {
  if (i < 0 || i >= height_ || j < 0 || j >= width_) {
    throw IndexError("label index (" + std::to_string(i) + ", " +
                     std::to_string(j) + ") out of bounds");
  }
  return (*this)(i, j);
}

void LabelGrid::set(int i, int j, std::uint8_t label) {
  at(i, j);
  if (label != kIgnoreLabel && label >= classes_) {
    throw Error(ErrorKind::kInvalidArgument,
                "label " + std::to_string(label) + " outside [0, " +
                    std::to_string(classes_) + ")");
  }
  labels_[static_cast<std::size_t>(i) * width_ + j] = label;
}

int LabelGrid::valid_count() const {
  int n = 0;
  for (std::uint8_t l : labels_) n += (l != kIgnoreLabel);
  return n;
}

void check_compatible(const Grid3& pred, const LabelGrid& labels) {
  if (pred.height() != labels.height() || pred.width() != labels.width()) {
    throw DimensionError("prediction map is " + std::to_string(pred.height()) +
                         "x" + std::to_string(pred.width()) +
                         " but label map is " +
                         std::to_string(labels.height()) + "x" +
                         std::to_string(labels.width()));
  }
  if (pred.channels() != labels.classes()) {
    throw DimensionError("prediction map has " +
                         std::to_string(pred.channels()) +
                         " channels but labels declare " +
                         std::to_string(labels.classes()) + " classes");
  }
}

namespace {

// Writes the normalized vector into out and returns sigma (0 if degenerate).
double normalize_into(std::span<const double> v, std::span<double> out) {
  const double n = static_cast<double>(v.size());
  double mean = 0.0;
  for (double x : v) mean += x;
  mean /= n;
  double var = 0.0;
  for (double x : v) var += (x - mean) * (x - mean);
  const double sigma = std::sqrt(var / n);
  if (!(sigma >= kNormalizeSigmaFloor)) {
    for (double& o : out) o = 0.0;
    return 0.0;
  }
  for (std::size_t c = 0; c < v.size(); ++c) out[c] = (v[c] - mean) / sigma;
  return sigma;
}

}  // namespace

std::vector<double> standard_score_normalize(std::span<const double> v) {
  if (v.size() < 2) {
    throw DimensionError("standard score normalization needs >= 2 channels");
  }
  std::vector<double> out(v.size());
  normalize_into(v, out);
  return out;
}

NormalizedMap normalize_pixels(const Grid3& raw) {
  if (raw.channels() < 2) {
    throw DimensionError("standard score normalization needs >= 2 channels");
  }
  NormalizedMap result{Grid3(raw.height(), raw.width(), raw.channels()), {}};
  result.sigma.resize(static_cast<std::size_t>(raw.height()) * raw.width());
  const std::size_t c = raw.channels();
  auto src = raw.data();
  auto dst = result.values.data();
  for (std::size_t p = 0; p < result.sigma.size(); ++p) {
    result.sigma[p] =
        normalize_into(src.subspan(p * c, c), dst.subspan(p * c, c));
  }
  return result;
}

Grid3 normalize_pixels_backward(const NormalizedMap& normalized,
                                const Grid3& grad_normalized) {
  const Grid3& y = normalized.values;
  if (!y.same_shape(grad_normalized)) {
    throw DimensionError("normalization backward: gradient shape mismatch");
  }
  Grid3 grad(y.height(), y.width(), y.channels());
  const std::size_t c = y.channels();
  const double n = static_cast<double>(c);
  auto yv = y.data();
  auto gv = grad_normalized.data();
  auto out = grad.data();
  for (std::size_t p = 0; p < normalized.sigma.size(); ++p) {
    const double sigma = normalized.sigma[p];
    if (sigma == 0.0) continue;
    const std::size_t base = p * c;
    double mean_g = 0.0;
    double mean_gy = 0.0;
    for (std::size_t k = 0; k < c; ++k) {
      mean_g += gv[base + k];
      mean_gy += gv[base + k] * yv[base + k];
    }
    mean_g /= n;
    mean_gy /= n;
    for (std::size_t k = 0; k < c; ++k) {
      out[base + k] = (gv[base + k] - mean_g - yv[base + k] * mean_gy) / sigma;
    }
  }
  return grad;
}

}  // namespace segloss
