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
#include "segloss/checkpoint.hpp"

#include <fstream>
#include <sstream>
#include <string>

#include <nlohmann/json.hpp>
#include <zlib.h>

#include "segloss/error.hpp"
#include "segloss/grid_io.hpp"

namespace segloss {
namespace {

using nlohmann::json;

constexpr const char* kFormat = "segloss-checkpoint-1";

std::uint32_t crc_of(std::span<const std::uint8_t> bytes) {
  uLong crc = crc32(0L, Z_NULL, 0);
  crc = crc32(crc, bytes.data(), static_cast<uInt>(bytes.size()));
  return static_cast<std::uint32_t>(crc);
}

json write_blob(const std::filesystem::path& dir, const std::string& name,
                const Grid3& grid) {
  const auto bytes = encode_grid(grid);
  const std::string file = name + ".slg";
  write_file_bytes(dir / file, bytes);
  return {{"name", name},
          {"file", file},
          {"shape", {grid.height(), grid.width(), grid.channels()}},
          {"crc32", crc_of(bytes)}};
}

Grid3 read_blob(const std::filesystem::path& dir, const json& entry) {
  const std::string name = entry.value("name", std::string("<unnamed>"));
  try {
    const auto bytes = read_file_bytes(dir / entry.at("file").get<std::string>());
    if (crc_of(bytes) != entry.at("crc32").get<std::uint32_t>()) {
      throw IntegrityError("checksum mismatch");
    }
    Grid3 grid = decode_grid(bytes);
    const auto shape = entry.at("shape").get<std::vector<int>>();
    if (shape != std::vector<int>{grid.height(), grid.width(), grid.channels()}) {
      throw IntegrityError("shape does not match manifest");
    }
    return grid;
  } catch (const Error& e) {
    throw IntegrityError("checkpoint blob '" + name + "': " + e.what());
  } catch (const json::exception& e) {
    throw IntegrityError("checkpoint blob '" + name + "': bad manifest entry: " + e.what());
  }
}

const json& find_blob(const json& blobs, const std::string& name) {
  for (const json& b : blobs) {
    if (b.value("name", std::string()) == name) return b;
  }
  throw IntegrityError("checkpoint blob '" + name + "': missing from manifest");
}

}  // namespace

void save_checkpoint(const std::filesystem::path& dir, const Checkpoint& ckpt) {
  std::filesystem::create_directories(dir);
  json blobs = json::array();
  const auto& layers = ckpt.net.layers();
  for (std::size_t l = 0; l < layers.size(); ++l) {
    const ConvLayer& layer = layers[l];
    const std::string prefix = "conv" + std::to_string(l);
    blobs.push_back(write_blob(dir, prefix + ".weight",
                               Grid3(ConvLayer::kKernel * ConvLayer::kKernel,
                                     layer.in_channels, layer.out_channels,
                                     layer.weights)));
    blobs.push_back(write_blob(dir, prefix + ".bias",
                               Grid3(1, 1, layer.out_channels, layer.bias)));
  }
  if (ckpt.centers) {
    const int c = ckpt.centers->classes;
    blobs.push_back(write_blob(dir, "centers", Grid3(c, c, 1, ckpt.centers->centers)));
  }
  json manifest;
  manifest["format"] = kFormat;
  manifest["channel_plan"] = ckpt.net.channel_plan();
  manifest["blobs"] = blobs;
  manifest["config"] = json::parse(serialize_run_config(ckpt.config));
  std::ofstream out(dir / "manifest.json", std::ios::trunc);
  if (!out) throw IoError("cannot write " + (dir / "manifest.json").string());
  out << manifest.dump(2) << "\n";
}

Checkpoint load_checkpoint(const std::filesystem::path& dir) {
  std::ifstream in(dir / "manifest.json");
  if (!in) throw IntegrityError("checkpoint manifest missing in " + dir.string());
  json manifest;
  try {
    manifest = json::parse(in);
  } catch (const json::exception& e) {
    throw IntegrityError(std::string("checkpoint manifest unreadable: ") + e.what());
  }
  if (manifest.value("format", std::string()) != kFormat) {
    throw IntegrityError("checkpoint manifest has unknown format");
  }
  Checkpoint ckpt;
  std::vector<int> plan;
  try {
    plan = manifest.at("channel_plan").get<std::vector<int>>();
    ckpt.config = parse_run_config(manifest.at("config").dump());
  } catch (const json::exception& e) {
    throw IntegrityError(std::string("checkpoint manifest incomplete: ") + e.what());
  } catch (const ConfigError& e) {
    throw IntegrityError(std::string("checkpoint config invalid: ") + e.what());
  }
  ckpt.net = TinyNet(plan);
  const json& blobs = manifest.at("blobs");
  auto& layers = ckpt.net.layers();
  for (std::size_t l = 0; l < layers.size(); ++l) {
    const std::string prefix = "conv" + std::to_string(l);
    Grid3 w = read_blob(dir, find_blob(blobs, prefix + ".weight"));
    Grid3 b = read_blob(dir, find_blob(blobs, prefix + ".bias"));
    if (w.size() != layers[l].weights.size() || b.size() != layers[l].bias.size()) {
      throw IntegrityError("checkpoint blob '" + prefix +
                           "': size does not match channel plan");
    }
    layers[l].weights.assign(w.data().begin(), w.data().end());
    layers[l].bias.assign(b.data().begin(), b.data().end());
  }
  for (const json& b : blobs) {
    if (b.value("name", std::string()) != "centers") continue;
    Grid3 c = read_blob(dir, b);
    CenterLossConfig centers = CenterLossConfig::with_zero_centers(
        c.height(), ckpt.config.loss.center_alpha, ckpt.config.loss.center_lambda);
    centers.centers.assign(c.data().begin(), c.data().end());
    ckpt.centers = std::move(centers);
  }
  return ckpt;
}

}  // namespace segloss
