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
#ifndef SEGLOSS_EXPERIMENT_HPP_
#define SEGLOSS_EXPERIMENT_HPP_

#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "segloss/losses.hpp"
#include "segloss/metrics.hpp"
#include "segloss/run_config.hpp"
#include "segloss/synthdata.hpp"
#include "segloss/tinynet.hpp"

namespace segloss {

struct EvalResult {
  IoUReport iou;
  double loss = 0.0;  // mean loss over non-degenerate held-out images
  int images = 0;
};

struct ExperimentReport {
  // Newline-delimited JSON records, one per entry, without trailing newline.
  std::vector<std::string> metrics;
  std::string summary_json;
  EvalResult initial;
  EvalResult final;
  TinyNet net;
  std::optional<CenterLossConfig> centers;
  // Set when training hit a non-finite loss or gradient; diagnostic holds
  // {"iteration", "loss", "grad_norm"}.
  bool aborted = false;
  std::string diagnostic_json;
};

// The seeded held-out set shared by training-time and checkpoint evaluation.
std::vector<Sample> make_eval_set(const RunConfig& cfg);

EvalResult evaluate(const TinyNet& net, const SegmentationLoss& loss,
                    std::span<const Sample> eval_set);

// Trains a TinyNet on the synthetic stream. Deterministic in cfg.
ExperimentReport run_experiment(const RunConfig& cfg);

// Runs the experiment and writes config.json, metrics.jsonl, summary.json,
// checkpoint/ and masks/ into dir. An existing run directory is replaced
// only when force is set; otherwise IoError.
ExperimentReport train_to_directory(const RunConfig& cfg,
                                    const std::filesystem::path& dir,
                                    bool force);

// Evaluates a checkpoint on the held-out set. Scene and eval settings come
// from override_cfg if given, else from the checkpoint's own config.
EvalResult evaluate_checkpoint(const std::filesystem::path& checkpoint_dir,
                               const std::optional<RunConfig>& override_cfg);
std::string eval_result_json(const EvalResult& result);

struct SweepRow {
  double k = 0.0;
  double final_mean_iou = 0.0;
  double final_loss = 0.0;
};

// Trains one adaptive-loss run per k into dir/k_<k>/, running up to
// worker_threads() runs concurrently, and writes dir/sweep.csv.
std::vector<SweepRow> k_sweep(const RunConfig& base, std::span<const double> ks,
                              const std::filesystem::path& dir, bool force);
std::string sweep_csv(std::span<const SweepRow> rows);

// Writes count samples (grid, labels, label PNG, image PNG) into dir.
void generate_dataset(const RunConfig& cfg, int count,
                      const std::filesystem::path& dir);

// SEGLOSS_THREADS if set to a positive integer, else hardware concurrency.
int worker_threads();

}  // namespace segloss

#endif  // SEGLOSS_EXPERIMENT_HPP_
