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
#include "segloss/png_export.hpp"

#include <png.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <memory>
#include <vector>

#include "segloss/error.hpp"

namespace segloss {
namespace {

struct FileCloser {
  void operator()(std::FILE* f) const { std::fclose(f); }
};

void write_png(const std::filesystem::path& path, int width, int height,
               int color_type, const std::vector<png_color>& palette,
               const std::vector<std::vector<png_byte>>& rows) {
  std::unique_ptr<std::FILE, FileCloser> fp(std::fopen(path.c_str(), "wb"));
  if (!fp) throw IoError("cannot write " + path.string());
  png_structp png =
      png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  png_infop info = png ? png_create_info_struct(png) : nullptr;
  if (!png || !info) {
    png_destroy_write_struct(&png, &info);
    throw IoError("libpng initialization failed");
  }
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_write_struct(&png, &info);
    throw IoError("libpng failed writing " + path.string());
  }
  png_init_io(png, fp.get());
  png_set_IHDR(png, info, width, height, 8, color_type, PNG_INTERLACE_NONE,
               PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
  if (color_type == PNG_COLOR_TYPE_PALETTE) {
    png_set_PLTE(png, info, palette.data(), static_cast<int>(palette.size()));
  }
  png_write_info(png, info);
  for (const auto& row : rows) png_write_row(png, row.data());
  png_write_end(png, nullptr);
  png_destroy_write_struct(&png, &info);
}

}  // namespace

std::array<std::uint8_t, 3> voc_color(int index) {
  std::array<std::uint8_t, 3> rgb{0, 0, 0};
  int c = index;
  for (int bit = 7; bit >= 0; --bit) {
    for (int ch = 0; ch < 3; ++ch) {
      rgb[ch] |= static_cast<std::uint8_t>(((c >> ch) & 1) << bit);
    }
    c >>= 3;
  }
  return rgb;
}

void write_label_png(const std::filesystem::path& path, const LabelGrid& labels) {
  std::vector<png_color> palette(256);
  for (int k = 0; k < 256; ++k) {
    const auto rgb = voc_color(k);
    palette[k] = png_color{rgb[0], rgb[1], rgb[2]};
  }
  std::vector<std::vector<png_byte>> rows(labels.height(),
                                          std::vector<png_byte>(labels.width()));
  for (int i = 0; i < labels.height(); ++i) {
    for (int j = 0; j < labels.width(); ++j) rows[i][j] = labels(i, j);
  }
  write_png(path, labels.width(), labels.height(), PNG_COLOR_TYPE_PALETTE,
            palette, rows);
}

void write_rgb_png(const std::filesystem::path& path, const Grid3& image) {
  if (image.channels() != 3) {
    throw DimensionError("RGB export needs a 3-channel image");
  }
  std::vector<std::vector<png_byte>> rows(
      image.height(), std::vector<png_byte>(3 * static_cast<std::size_t>(image.width())));
  for (int i = 0; i < image.height(); ++i) {
    for (int j = 0; j < image.width(); ++j) {
      for (int c = 0; c < 3; ++c) {
        const double v = std::clamp(image(i, j, c), 0.0, 1.0);
        rows[i][3 * j + c] = static_cast<png_byte>(std::lround(v * 255.0));
      }
    }
  }
  write_png(path, image.width(), image.height(), PNG_COLOR_TYPE_RGB, {}, rows);
}

}  // namespace segloss
