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
#include "segloss/synthdata.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "segloss/error.hpp"

namespace segloss {

void SceneSpec::validate() const {
  if (height <= 0) throw ConfigError("height", "must be positive");
  if (width <= 0) throw ConfigError("width", "must be positive");
  if (classes < 2 || classes >= kIgnoreLabel) {
    throw ConfigError("classes", "must lie in [2, 254]");
  }
  if (num_shapes < 0) throw ConfigError("num_shapes", "must be >= 0");
  if (shape_kinds == 0 || (shape_kinds & ~3u) != 0) {
    throw ConfigError("shape_kinds", "must name rectangle and/or disk");
  }
  if (!(class_frequency_skew >= 0.0) || !std::isfinite(class_frequency_skew)) {
    throw ConfigError("skew", "must be finite and >= 0");
  }
  if (!(noise_std >= 0.0) || !std::isfinite(noise_std)) {
    throw ConfigError("noise_std", "must be finite and >= 0");
  }
}

std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b) {
  // splitmix64 finalizer over a combination of both inputs.
  std::uint64_t z = a + 0x9e3779b97f4a7c15ULL * (b + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

std::vector<double> shape_class_probabilities(int classes, double skew) {
  std::vector<double> p(static_cast<std::size_t>(classes - 1));
  double total = 0.0;
  for (int r = 1; r < classes; ++r) {
    p[r - 1] = std::pow(static_cast<double>(r), -skew);
    total += p[r - 1];
  }
  for (double& v : p) v /= total;
  return p;
}

std::array<double, 3> class_color(int label) {
  if (label == 0) return {0.15, 0.15, 0.15};
  // Hues spread by the golden angle; alternate brightness for neighbors.
  const double hue = std::fmod(0.61803398874989485 * label, 1.0) * 6.0;
  const double sat = 0.8;
  const double val = label % 2 ? 0.95 : 0.7;
  const int sector = static_cast<int>(hue) % 6;
  const double frac = hue - std::floor(hue);
  const double p = val * (1 - sat);
  const double q = val * (1 - sat * frac);
  const double t = val * (1 - sat * (1 - frac));
  switch (sector) {
    case 0: return {val, t, p};
    case 1: return {q, val, p};
    case 2: return {p, val, t};
    case 3: return {p, q, val};
    case 4: return {t, p, val};
    default: return {val, p, q};
  }
}

Sample generate_sample(const SceneSpec& spec) {
  spec.validate();
  std::mt19937_64 rng(spec.seed);
  const int h = spec.height;
  const int w = spec.width;
  Sample s{Grid3(h, w, 3), LabelGrid(h, w, spec.classes, 0)};
  std::vector<std::uint8_t> labels(static_cast<std::size_t>(h) * w, 0);

  const auto probs = shape_class_probabilities(spec.classes, spec.class_frequency_skew);
  std::discrete_distribution<int> pick_class(probs.begin(), probs.end());
  std::vector<ShapeKind> kinds;
  if (spec.allows(ShapeKind::kRectangle)) kinds.push_back(ShapeKind::kRectangle);
  if (spec.allows(ShapeKind::kDisk)) kinds.push_back(ShapeKind::kDisk);
  std::uniform_int_distribution<std::size_t> pick_kind(0, kinds.size() - 1);
  const double extent = std::min(h, w);
  std::uniform_real_distribution<double> size_dist(0.08 * extent, 0.25 * extent);
  std::uniform_real_distribution<double> row_dist(0.0, h);
  std::uniform_real_distribution<double> col_dist(0.0, w);

  for (int n = 0; n < spec.num_shapes; ++n) {
    const ShapeKind kind = kinds[pick_kind(rng)];
    const auto label = static_cast<std::uint8_t>(1 + pick_class(rng));
    const double ci = row_dist(rng);
    const double cj = col_dist(rng);
    const double a = size_dist(rng);
    const double b = kind == ShapeKind::kRectangle ? size_dist(rng) : a;
    // Painting is clipped to the frame.
    const int i0 = std::max(0, static_cast<int>(std::floor(ci - a)));
    const int i1 = std::min(h - 1, static_cast<int>(std::ceil(ci + a)));
    const int j0 = std::max(0, static_cast<int>(std::floor(cj - b)));
    const int j1 = std::min(w - 1, static_cast<int>(std::ceil(cj + b)));
    for (int i = i0; i <= i1; ++i) {
      for (int j = j0; j <= j1; ++j) {
        const double di = i + 0.5 - ci;
        const double dj = j + 0.5 - cj;
        const bool inside = kind == ShapeKind::kRectangle
                                ? std::abs(di) <= a && std::abs(dj) <= b
                                : di * di + dj * dj <= a * a;
        if (inside) labels[static_cast<std::size_t>(i) * w + j] = label;
      }
    }
  }

  s.labels = LabelGrid(h, w, spec.classes, std::move(labels));
  std::normal_distribution<double> noise(0.0, 1.0);
  for (int i = 0; i < h; ++i) {
    for (int j = 0; j < w; ++j) {
      const auto color = class_color(s.labels(i, j));
      for (int c = 0; c < 3; ++c) {
        const double v = color[c] + spec.noise_std * noise(rng);
        s.image(i, j, c) = std::clamp(v, 0.0, 1.0);
      }
    }
  }
  return s;
}

AugmentParams sample_augment_params(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> scale(0.5, 1.5);
  std::bernoulli_distribution flip(0.5);
  AugmentParams p;
  p.scale = scale(rng);
  p.hflip = flip(rng);
  return p;
}

Sample augment(const Sample& s, double scale, bool hflip, int out_h, int out_w,
               std::uint64_t seed) {
  if (!(scale >= 0.5 && scale <= 1.5)) {
    throw Error(ErrorKind::kInvalidArgument, "augment scale must lie in [0.5, 1.5]");
  }
  if (out_h <= 0 || out_w <= 0) {
    throw DimensionError("augment output dimensions must be positive");
  }
  const int h = s.image.height();
  const int w = s.image.width();
  const int ch = s.image.channels();
  const int sh = std::max(1, static_cast<int>(std::lround(h * scale)));
  const int sw = std::max(1, static_cast<int>(std::lround(w * scale)));

  std::mt19937_64 rng(seed);
  auto offset = [&rng](int content, int out) {
    const int slack = std::abs(content - out);
    if (slack == 0) return 0;
    return std::uniform_int_distribution<int>(0, slack)(rng);
  };
  // Crop when content is larger (offset into content), pad when smaller
  // (offset into output).
  const int off_i = offset(sh, out_h);
  const int off_j = offset(sw, out_w);

  Sample out{Grid3(out_h, out_w, ch),
             LabelGrid(out_h, out_w, s.labels.classes(), kIgnoreLabel)};
  std::vector<std::uint8_t> labels(static_cast<std::size_t>(out_h) * out_w,
                                   kIgnoreLabel);
  for (int oi = 0; oi < out_h; ++oi) {
    const int ci = sh > out_h ? oi + off_i : oi - off_i;  // content row
    if (ci < 0 || ci >= sh) continue;
    const int si = std::min(h - 1, static_cast<int>((ci + 0.5) / scale));
    for (int oj = 0; oj < out_w; ++oj) {
      const int cj = sw > out_w ? oj + off_j : oj - off_j;
      if (cj < 0 || cj >= sw) continue;
      int sj = std::min(w - 1, static_cast<int>((cj + 0.5) / scale));
      if (hflip) sj = w - 1 - sj;
      labels[static_cast<std::size_t>(oi) * out_w + oj] = s.labels(si, sj);
      for (int c = 0; c < ch; ++c) out.image(oi, oj, c) = s.image(si, sj, c);
    }
  }
  out.labels = LabelGrid(out_h, out_w, s.labels.classes(), std::move(labels));
  return out;
}

}  // namespace segloss
