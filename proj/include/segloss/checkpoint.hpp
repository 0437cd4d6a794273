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
#ifndef SEGLOSS_CHECKPOINT_HPP_
#define SEGLOSS_CHECKPOINT_HPP_

#include <filesystem>
#include <optional>

#include "segloss/losses.hpp"
#include "segloss/run_config.hpp"
#include "segloss/tinynet.hpp"

namespace segloss {

// A checkpoint directory holds manifest.json plus one grid blob per tensor:
// layer weights as 9 x in x out grids ([ky*3+kx][in][out]), biases as
// 1 x 1 x out grids, and optionally the center-loss matrix. The manifest
// records each blob's file name, shape and CRC-32, plus the run config.
struct Checkpoint {
  TinyNet net;
  RunConfig config;
  std::optional<CenterLossConfig> centers;
};

void save_checkpoint(const std::filesystem::path& dir, const Checkpoint& ckpt);

// Throws IntegrityError naming the blob when a file is missing, fails its
// checksum, or does not match the manifest's shape.
Checkpoint load_checkpoint(const std::filesystem::path& dir);

}  // namespace segloss

#endif  // SEGLOSS_CHECKPOINT_HPP_
