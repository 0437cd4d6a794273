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
#ifndef SEGLOSS_PNG_EXPORT_HPP_
#define SEGLOSS_PNG_EXPORT_HPP_

#include <array>
#include <cstdint>
#include <filesystem>

#include "segloss/grid.hpp"

namespace segloss {

// The Pascal VOC colormap entry for a palette index (255 -> the "void"
// border color).
std::array<std::uint8_t, 3> voc_color(int index);

// 8-bit paletted PNG with the VOC colormap; palette index = class label.
void write_label_png(const std::filesystem::path& path, const LabelGrid& labels);

// 8-bit RGB PNG of an H x W x 3 image with values in [0, 1].
void write_rgb_png(const std::filesystem::path& path, const Grid3& image);

}  // namespace segloss

#endif  // SEGLOSS_PNG_EXPORT_HPP_
