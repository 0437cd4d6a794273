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
#include "segloss/grid_io.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>
#include <string>

#include "segloss/error.hpp"

namespace segloss {
namespace {

constexpr char kGridMagic[4] = {'S', 'L', 'G', '1'};
constexpr char kLabelMagic[4] = {'S', 'L', 'L', '1'};
constexpr std::size_t kHeaderBytes = 16;

void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  for (int b = 0; b < 4; ++b) out.push_back(static_cast<std::uint8_t>(v >> (8 * b)));
}

std::uint32_t get_u32(std::span<const std::uint8_t> in, std::size_t at) {
  std::uint32_t v = 0;
  for (int b = 0; b < 4; ++b) v |= static_cast<std::uint32_t>(in[at + b]) << (8 * b);
  return v;
}

void put_header(std::vector<std::uint8_t>& out, const char (&magic)[4],
                int h, int w, int c) {
  out.insert(out.end(), magic, magic + 4);
  put_u32(out, static_cast<std::uint32_t>(h));
  put_u32(out, static_cast<std::uint32_t>(w));
  put_u32(out, static_cast<std::uint32_t>(c));
}

struct Header {
  int h, w, c;
};

Header get_header(std::span<const std::uint8_t> in, const char (&magic)[4],
                  const char* what) {
  if (in.size() < kHeaderBytes) {
    throw IntegrityError(std::string(what) + ": truncated header");
  }
  if (std::memcmp(in.data(), magic, 4) != 0) {
    throw IntegrityError(std::string(what) + ": bad magic");
  }
  const std::uint32_t h = get_u32(in, 4);
  const std::uint32_t w = get_u32(in, 8);
  const std::uint32_t c = get_u32(in, 12);
  constexpr std::uint32_t kMaxDim = 1u << 20;
  if (h == 0 || w == 0 || c == 0 || h > kMaxDim || w > kMaxDim || c > kMaxDim) {
    throw IntegrityError(std::string(what) + ": implausible dimensions");
  }
  return {static_cast<int>(h), static_cast<int>(w), static_cast<int>(c)};
}

}  // namespace

std::vector<std::uint8_t> encode_grid(const Grid3& grid) {
  std::vector<std::uint8_t> out;
  out.reserve(kHeaderBytes + grid.size() * 8);
  put_header(out, kGridMagic, grid.height(), grid.width(), grid.channels());
  for (double v : grid.data()) {
    const auto bits = std::bit_cast<std::uint64_t>(v);
    for (int b = 0; b < 8; ++b) out.push_back(static_cast<std::uint8_t>(bits >> (8 * b)));
  }
  return out;
}

Grid3 decode_grid(std::span<const std::uint8_t> bytes) {
  const Header hd = get_header(bytes, kGridMagic, "grid");
  const std::size_t n = static_cast<std::size_t>(hd.h) * hd.w * hd.c;
  if (bytes.size() != kHeaderBytes + n * 8) {
    throw IntegrityError("grid: payload length " +
                         std::to_string(bytes.size() - kHeaderBytes) +
                         " does not match header (" + std::to_string(n * 8) +
                         " expected)");
  }
  std::vector<double> data(n);
  for (std::size_t k = 0; k < n; ++k) {
    std::uint64_t bits = 0;
    const std::size_t at = kHeaderBytes + k * 8;
    for (int b = 0; b < 8; ++b) bits |= static_cast<std::uint64_t>(bytes[at + b]) << (8 * b);
    data[k] = std::bit_cast<double>(bits);
  }
  try {
    return Grid3(hd.h, hd.w, hd.c, std::move(data));
  } catch (const Error& e) {
    throw IntegrityError(std::string("grid: ") + e.what());
  }
}

std::vector<std::uint8_t> encode_labels(const LabelGrid& labels) {
  std::vector<std::uint8_t> out;
  out.reserve(kHeaderBytes + labels.size());
  put_header(out, kLabelMagic, labels.height(), labels.width(), labels.classes());
  out.insert(out.end(), labels.labels().begin(), labels.labels().end());
  return out;
}

LabelGrid decode_labels(std::span<const std::uint8_t> bytes) {
  const Header hd = get_header(bytes, kLabelMagic, "labels");
  const std::size_t n = static_cast<std::size_t>(hd.h) * hd.w;
  if (bytes.size() != kHeaderBytes + n) {
    throw IntegrityError("labels: payload length does not match header");
  }
  std::vector<std::uint8_t> data(bytes.begin() + kHeaderBytes, bytes.end());
  try {
    return LabelGrid(hd.h, hd.w, hd.c, std::move(data));
  } catch (const Error& e) {
    throw IntegrityError(std::string("labels: ") + e.what());
  }
}

std::vector<std::uint8_t> read_file_bytes(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  return std::vector<std::uint8_t>(std::istreambuf_iterator<char>(in), {});
}

void write_file_bytes(const std::filesystem::path& path,
                      std::span<const std::uint8_t> bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());
  out.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
  if (!out) throw IoError("short write to " + path.string());
}

void write_grid(const std::filesystem::path& path, const Grid3& grid) {
  write_file_bytes(path, encode_grid(grid));
}

Grid3 read_grid(const std::filesystem::path& path) {
  return decode_grid(read_file_bytes(path));
}

void write_labels(const std::filesystem::path& path, const LabelGrid& labels) {
  write_file_bytes(path, encode_labels(labels));
}

LabelGrid read_labels(const std::filesystem::path& path) {
  return decode_labels(read_file_bytes(path));
}

}  // namespace segloss
