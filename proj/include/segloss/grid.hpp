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
#ifndef SEGLOSS_GRID_HPP_
#define SEGLOSS_GRID_HPP_

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace segloss {

// Label value marking pixels excluded from every loss and metric.
inline constexpr std::uint8_t kIgnoreLabel = 255;

// Dense H x W x C grid of doubles, row-major with the channel index fastest:
// offset(i, j, c) = (i * W + j) * C + c.
class Grid3 {
 public:
  Grid3() = default;
  // Zero-filled grid. All dimensions must be positive.
  Grid3(int height, int width, int channels);
  // Takes ownership of data; its length must equal height*width*channels and
  // every value must be finite.
  Grid3(int height, int width, int channels, std::vector<double> data);

  int height() const { return height_; }
  int width() const { return width_; }
  int channels() const { return channels_; }
  std::size_t size() const { return data_.size(); }
  bool empty() const { return data_.empty(); }

  std::size_t offset(int i, int j, int c = 0) const {
    return (static_cast<std::size_t>(i) * width_ + j) * channels_ + c;
  }

  double operator()(int i, int j, int c) const { return data_[offset(i, j, c)]; }
  double& operator()(int i, int j, int c) { return data_[offset(i, j, c)]; }

  // Bounds-checked element access; throws IndexError.
  double at(int i, int j, int c) const;
  double& at(int i, int j, int c);

  // The C channel values at (i, j). Throws IndexError when out of bounds.
  std::span<const double> pixel(int i, int j) const;
  std::span<double> pixel(int i, int j);

  std::span<const double> data() const { return data_; }
  std::span<double> data() { return data_; }

  bool same_shape(const Grid3& other) const {
    return height_ == other.height_ && width_ == other.width_ &&
           channels_ == other.channels_;
  }

  bool all_finite() const;
  void fill(double value);

 private:
  void check_index(int i, int j, int c) const;

  int height_ = 0;
  int width_ = 0;
  int channels_ = 0;
  std::vector<double> data_;
};

// Per-pixel integer class labels in [0, classes) or kIgnoreLabel.
class LabelGrid {
 public:
  LabelGrid() = default;
  // Every pixel set to fill_label, which must itself be valid.
  LabelGrid(int height, int width, int classes,
            std::uint8_t fill_label = 0);
  LabelGrid(int height, int width, int classes,
            std::vector<std::uint8_t> labels);

  int height() const { return height_; }
  int width() const { return width_; }
  int classes() const { return classes_; }
  std::size_t size() const { return labels_.size(); }

  std::uint8_t operator()(int i, int j) const {
    return labels_[static_cast<std::size_t>(i) * width_ + j];
  }
  std::uint8_t at(int i, int j) const;
  // Validates the label against classes(); throws InvalidArgument otherwise.
  void set(int i, int j, std::uint8_t label);

  bool is_valid(int i, int j) const { return (*this)(i, j) != kIgnoreLabel; }
  std::span<const std::uint8_t> labels() const { return labels_; }
  int valid_count() const;

 private:
  int height_ = 0;
  int width_ = 0;
  int classes_ = 0;
  std::vector<std::uint8_t> labels_;
};

// Throws DimensionError unless pred and labels agree on H x W and classes.
void check_compatible(const Grid3& pred, const LabelGrid& labels);

// Below this population standard deviation a vector counts as constant.
inline constexpr double kNormalizeSigmaFloor = 1e-12;

// (v - mean) / sigma with the population standard deviation. Returns zeros
// when sigma < kNormalizeSigmaFloor. Requires at least two elements.
std::vector<double> standard_score_normalize(std::span<const double> v);

// Per-pixel standard-score normalization of a whole map. sigma holds the
// per-pixel population standard deviation, or 0 where the pixel was constant
// and its output zeroed.
struct NormalizedMap {
  Grid3 values;
  std::vector<double> sigma;
};

NormalizedMap normalize_pixels(const Grid3& raw);

// Pulls a gradient with respect to normalized values back to the raw values
// through the full Jacobian of (x - mean) / sigma. Pixels with sigma == 0 get
// zero gradient.
Grid3 normalize_pixels_backward(const NormalizedMap& normalized,
                                const Grid3& grad_normalized);

}  // namespace segloss

#endif  // SEGLOSS_GRID_HPP_
