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
#include "segloss/selective_filter.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <string>

#include "segloss/error.hpp"

namespace segloss {
namespace {

std::vector<double> weight_table(const FilterSpec& spec) {
  const int r = spec.radius();
  std::vector<double> table(static_cast<std::size_t>(spec.window) * spec.window);
  for (int du = -r; du <= r; ++du) {
    for (int dv = -r; dv <= r; ++dv) {
      table[(du + r) * spec.window + (dv + r)] = offset_weight(spec.schedule, du, dv);
    }
  }
  return table;
}

// Support counts and validity flags; shared by the forward and adjoint.
void compute_support(const LabelGrid& labels, const FilterSpec& spec,
                     std::vector<int>& support,
                     std::vector<std::uint8_t>& valid) {
  const int h = labels.height();
  const int w = labels.width();
  const int r = spec.radius();
  support.assign(static_cast<std::size_t>(h) * w, 0);
  valid.assign(static_cast<std::size_t>(h) * w, 0);
  for (int i = 0; i < h; ++i) {
    for (int j = 0; j < w; ++j) {
      const std::uint8_t center = labels(i, j);
      if (center == kIgnoreLabel || !spec.is_center(i, j)) continue;
      int count = 0;
      for (int ni = std::max(0, i - r); ni <= std::min(h - 1, i + r); ++ni) {
        for (int nj = std::max(0, j - r); nj <= std::min(w - 1, j + r); ++nj) {
          count += (labels(ni, nj) == center);
        }
      }
      const std::size_t p = static_cast<std::size_t>(i) * w + j;
      support[p] = count;
      valid[p] = 1;
    }
  }
}

void check_spec_against(const Grid3& grid, const LabelGrid& labels,
                        const FilterSpec& spec) {
  spec.validate();
  check_compatible(grid, labels);
  if (grid.channels() != spec.classes) {
    throw DimensionError("filter expects " + std::to_string(spec.classes) +
                         " classes, map has " +
                         std::to_string(grid.channels()));
  }
}

}  // namespace

void FilterSpec::validate() const {
  if (window <= 0 || window % 2 == 0) {
    throw ConfigError("window", "must be an odd positive integer, got " +
                                    std::to_string(window));
  }
  if (stride < 1) {
    throw ConfigError("stride", "must be >= 1, got " + std::to_string(stride));
  }
  if (classes < 1) {
    throw ConfigError("classes", "must be positive");
  }
}

double chessboard_weight(int du, int dv) {
  const int d8 = std::max(std::abs(du), std::abs(dv));
  return std::ldexp(1.0, 1 - d8);
}

double offset_weight(WeightSchedule schedule, int du, int dv) {
  return schedule == WeightSchedule::kUniform ? 1.0 : chessboard_weight(du, dv);
}

int MergedMap::valid_count() const {
  int n = 0;
  for (std::uint8_t v : valid) n += v;
  return n;
}

MergedMap selective_pool(const Grid3& pred, const LabelGrid& labels,
                         const FilterSpec& spec) {
  check_spec_against(pred, labels, spec);
  const int h = pred.height();
  const int w = pred.width();
  const int c = pred.channels();
  const int r = spec.radius();
  const auto weights = weight_table(spec);

  MergedMap out{Grid3(h, w, c), {}, {}};
  compute_support(labels, spec, out.support, out.valid);

  auto src = pred.data();
  auto dst = out.values.data();
  for (int i = 0; i < h; ++i) {
    for (int j = 0; j < w; ++j) {
      const std::size_t p = out.index(i, j);
      if (!out.valid[p]) continue;
      const std::uint8_t center = labels(i, j);
      double* f = dst.data() + pred.offset(i, j);
      for (int ni = std::max(0, i - r); ni <= std::min(h - 1, i + r); ++ni) {
        for (int nj = std::max(0, j - r); nj <= std::min(w - 1, j + r); ++nj) {
          if (labels(ni, nj) != center) continue;
          const double wt = weights[(ni - i + r) * spec.window + (nj - j + r)];
          const double* x = src.data() + pred.offset(ni, nj);
          for (int k = 0; k < c; ++k) f[k] += wt * x[k];
        }
      }
      const double inv = 1.0 / out.support[p];
      for (int k = 0; k < c; ++k) f[k] *= inv;
    }
  }
  return out;
}

Grid3 selective_pool_adjoint(const Grid3& grad_merged, const LabelGrid& labels,
                             const FilterSpec& spec) {
  check_spec_against(grad_merged, labels, spec);
  const int h = grad_merged.height();
  const int w = grad_merged.width();
  const int c = grad_merged.channels();
  const int r = spec.radius();
  const auto weights = weight_table(spec);
  std::vector<int> support;
  std::vector<std::uint8_t> valid;
  compute_support(labels, spec, support, valid);

  // Gather form: each pixel collects from every valid center whose window
  // covers it and whose label matches. Each output is written exactly once.
  Grid3 out(h, w, c);
  auto g = grad_merged.data();
  auto dst = out.data();
  for (int i = 0; i < h; ++i) {
    for (int j = 0; j < w; ++j) {
      const std::uint8_t own = labels(i, j);
      if (own == kIgnoreLabel) continue;
      double* acc = dst.data() + out.offset(i, j);
      for (int ci = std::max(0, i - r); ci <= std::min(h - 1, i + r); ++ci) {
        for (int cj = std::max(0, j - r); cj <= std::min(w - 1, j + r); ++cj) {
          const std::size_t p = static_cast<std::size_t>(ci) * w + cj;
          if (!valid[p] || labels(ci, cj) != own) continue;
          // w(u, v) with (u, v) = (i - ci, j - cj), the offset seen from the
          // center; the schedules are symmetric so this equals w(-m, -n).
          const double scale =
              weights[(i - ci + r) * spec.window + (j - cj + r)] / support[p];
          const double* gc = g.data() + grad_merged.offset(ci, cj);
          for (int k = 0; k < c; ++k) acc[k] += scale * gc[k];
        }
      }
    }
  }
  return out;
}

}  // namespace segloss
