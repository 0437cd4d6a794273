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
#ifndef SEGLOSS_GRID_IO_HPP_
#define SEGLOSS_GRID_IO_HPP_

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "segloss/grid.hpp"

namespace segloss {

// Flat little-endian binary formats.
//
//   Grid3:     "SLG1" u32 H, u32 W, u32 C, then H*W*C float64 values.
//   LabelGrid: "SLL1" u32 H, u32 W, u32 classes, then H*W uint8 labels.
//
// Both headers are 16 bytes. Decoding validates the magic, the payload
// length, and the same invariants the in-memory constructors enforce.

std::vector<std::uint8_t> encode_grid(const Grid3& grid);
Grid3 decode_grid(std::span<const std::uint8_t> bytes);

std::vector<std::uint8_t> encode_labels(const LabelGrid& labels);
LabelGrid decode_labels(std::span<const std::uint8_t> bytes);

void write_grid(const std::filesystem::path& path, const Grid3& grid);
Grid3 read_grid(const std::filesystem::path& path);

void write_labels(const std::filesystem::path& path, const LabelGrid& labels);
LabelGrid read_labels(const std::filesystem::path& path);

std::vector<std::uint8_t> read_file_bytes(const std::filesystem::path& path);
void write_file_bytes(const std::filesystem::path& path,
                      std::span<const std::uint8_t> bytes);

}  // namespace segloss

#endif  // SEGLOSS_GRID_IO_HPP_
