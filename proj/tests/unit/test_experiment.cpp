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
#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "segloss/checkpoint.hpp"
#include "segloss/error.hpp"
#include "segloss/experiment.hpp"
#include "segloss/grid_io.hpp"

namespace segloss {
namespace {

namespace fs = std::filesystem;

RunConfig tiny_config(LossKind kind = LossKind::kAdaptive) {
  RunConfig cfg;
  cfg.loss.kind = kind;
  cfg.scene.height = 16;
  cfg.scene.width = 16;
  cfg.scene.classes = 3;
  cfg.scene.num_shapes = 3;
  cfg.trainer.iterations = 20;
  cfg.trainer.eval_interval = 10;
  cfg.trainer.log_interval = 5;
  cfg.trainer.hidden_channels = 4;
  cfg.eval.count = 2;
  cfg.eval.mask_count = 1;
  return cfg;
}

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("segloss_test_" + name);
  fs::remove_all(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

TEST(Experiment, ZeroIterationsHasOnlyInitialEvaluation) {
  RunConfig cfg = tiny_config();
  cfg.trainer.iterations = 0;
  const ExperimentReport r = run_experiment(cfg);
  ASSERT_EQ(r.metrics.size(), 1u);
  const auto rec = nlohmann::json::parse(r.metrics[0]);
  EXPECT_EQ(rec["iteration"], 0);
  EXPECT_EQ(rec["split"], "eval");
  EXPECT_TRUE(rec.contains("mean_iou"));
  EXPECT_EQ(r.final.loss, r.initial.loss);
}

TEST(Experiment, LogSchedule) {
  const ExperimentReport r = run_experiment(tiny_config());
  int train = 0, eval = 0;
  for (const auto& line : r.metrics) {
    const auto rec = nlohmann::json::parse(line);
    (rec["split"] == "train" ? train : eval)++;
    EXPECT_TRUE(std::isfinite(rec["loss"].get<double>()));
  }
  EXPECT_EQ(train, 4);
  EXPECT_EQ(eval, 3);
}

TEST(Experiment, Deterministic) {
  const RunConfig cfg = tiny_config(LossKind::kCenter);
  const ExperimentReport a = run_experiment(cfg);
  const ExperimentReport b = run_experiment(cfg);
  EXPECT_EQ(a.metrics, b.metrics);
  EXPECT_EQ(a.summary_json, b.summary_json);
  ASSERT_TRUE(a.centers.has_value());
}

TEST(Experiment, SeedChangesTrajectory) {
  RunConfig cfg = tiny_config();
  const ExperimentReport a = run_experiment(cfg);
  cfg.seed = 2;
  EXPECT_NE(a.metrics, run_experiment(cfg).metrics);
}

TEST(Experiment, EveryLossReducesHeldOutLoss) {
  for (LossKind kind : {LossKind::kAdaptive, LossKind::kSoftmaxCe, LossKind::kFocal,
                        LossKind::kCenter}) {
    RunConfig cfg = tiny_config(kind);
    cfg.scene.height = 24;
    cfg.scene.width = 24;
    cfg.trainer.iterations = 150;
    cfg.trainer.eval_interval = 150;
    cfg.trainer.hidden_channels = 8;
    const ExperimentReport r = run_experiment(cfg);
    EXPECT_FALSE(r.aborted);
    EXPECT_LT(r.final.loss, r.initial.loss) << loss_kind_name(kind);
  }
}

TEST(Experiment, BatchOfTwoRuns) {
  RunConfig cfg = tiny_config();
  cfg.trainer.batch_size = 2;
  const ExperimentReport r = run_experiment(cfg);
  EXPECT_FALSE(r.aborted);
  EXPECT_EQ(r.metrics, run_experiment(cfg).metrics);
}

TEST(Experiment, DivergenceAbortsWithDiagnostic) {
  RunConfig cfg = tiny_config(LossKind::kSoftmaxCe);
  cfg.trainer.lr = 1e300;
  cfg.trainer.momentum = 0.0;
  cfg.trainer.iterations = 50;
  const fs::path dir = scratch("diverge");
  EXPECT_THROW(train_to_directory(cfg, dir, false), NumericError);
  const auto diag = nlohmann::json::parse(slurp(dir / "diagnostic.json"));
  EXPECT_TRUE(diag.contains("iteration"));
  EXPECT_TRUE(diag.contains("loss"));
  EXPECT_TRUE(diag.contains("grad_norm"));
  fs::remove_all(dir);
}

TEST(TrainToDirectory, WritesArtifactsAndRefusesOverwrite) {
  const RunConfig cfg = tiny_config();
  const fs::path dir = scratch("train_dir");
  train_to_directory(cfg, dir, false);
  for (const char* f : {"config.json", "metrics.jsonl", "summary.json",
                        "checkpoint/manifest.json", "masks/eval_000_pred.png",
                        "masks/eval_000_truth.png", "masks/eval_000_image.png"}) {
    EXPECT_TRUE(fs::exists(dir / f)) << f;
  }
  EXPECT_EQ(parse_run_config(slurp(dir / "config.json")).seed, cfg.seed);
  const std::string metrics = slurp(dir / "metrics.jsonl");
  EXPECT_THROW(train_to_directory(cfg, dir, false), IoError);
  train_to_directory(cfg, dir, true);
  EXPECT_EQ(slurp(dir / "metrics.jsonl"), metrics);
  fs::remove_all(dir);
}

TEST(Checkpoint, EvaluationMatchesTrainingLog) {
  RunConfig cfg = tiny_config(LossKind::kCenter);
  const fs::path dir = scratch("ckpt_eval");
  const ExperimentReport r = train_to_directory(cfg, dir, false);
  const EvalResult e = evaluate_checkpoint(dir / "checkpoint", std::nullopt);
  const auto last = nlohmann::json::parse(r.metrics.back());
  EXPECT_EQ(e.iou.mean_iou.value(), last["mean_iou"].get<double>());
  EXPECT_EQ(e.loss, last["loss"].get<double>());
  EXPECT_EQ(eval_result_json(e),
            eval_result_json(evaluate_checkpoint(dir / "checkpoint", std::nullopt)));

  const Checkpoint ck = load_checkpoint(dir / "checkpoint");
  ASSERT_TRUE(ck.centers.has_value());
  EXPECT_EQ(ck.centers->centers, r.centers->centers);
  for (std::size_t l = 0; l < ck.net.layers().size(); ++l)
    EXPECT_EQ(ck.net.layers()[l].weights, r.net.layers()[l].weights);
  fs::remove_all(dir);
}

TEST(Checkpoint, CorruptBlobIsNamed) {
  const fs::path dir = scratch("ckpt_corrupt");
  Checkpoint ck{TinyNet::random({3, 2, 3}, 1), tiny_config(), std::nullopt};
  save_checkpoint(dir, ck);
  auto bytes = read_file_bytes(dir / "conv1.weight.slg");
  bytes[20] ^= 0x40;
  write_file_bytes(dir / "conv1.weight.slg", bytes);
  try {
    load_checkpoint(dir);
    FAIL();
  } catch (const IntegrityError& e) {
    EXPECT_NE(std::string(e.what()).find("conv1.weight"), std::string::npos);
  }
  fs::remove(dir / "conv1.weight.slg");
  EXPECT_THROW(load_checkpoint(dir), IntegrityError);
  fs::remove_all(dir);
}

TEST(Checkpoint, UntrainedNetIsNearChance) {
  RunConfig cfg = tiny_config();
  cfg.trainer.iterations = 0;
  cfg.eval.count = 4;
  const fs::path dir = scratch("ckpt_zero");
  train_to_directory(cfg, dir, false);
  const EvalResult e = evaluate_checkpoint(dir / "checkpoint", std::nullopt);
  EXPECT_LT(e.iou.mean_iou.value(), 0.6);
  fs::remove_all(dir);
}

TEST(KSweep, OneSummaryPerExponent) {
  RunConfig cfg = tiny_config();
  cfg.trainer.iterations = 5;
  const fs::path dir = scratch("sweep");
  const double ks[] = {1, 2, 3, 5};
  const auto rows = k_sweep(cfg, ks, dir, false);
  ASSERT_EQ(rows.size(), 4u);
  for (std::size_t n = 0; n < 4; ++n) EXPECT_EQ(rows[n].k, ks[n]);
  const std::string csv = slurp(dir / "sweep.csv");
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "k,final_mean_iou,final_loss");
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 5);
  int summaries = 0;
  for (const auto& e : fs::recursive_directory_iterator(dir))
    summaries += e.path().filename() == "summary.json";
  EXPECT_EQ(summaries, 4);
  cfg.loss.kind = LossKind::kFocal;
  EXPECT_THROW(k_sweep(cfg, ks, scratch("sweep_bad"), false), ConfigError);
  fs::remove_all(dir);
}

TEST(GenerateDataset, WritesReadableSamples) {
  const fs::path dir = scratch("gen");
  RunConfig cfg = tiny_config();
  generate_dataset(cfg, 3, dir);
  const Grid3 img = read_grid(dir / "sample_0002.slg");
  const LabelGrid lab = read_labels(dir / "sample_0002.sll");
  EXPECT_EQ(img.height(), 16);
  EXPECT_EQ(img.channels(), 3);
  EXPECT_EQ(lab.classes(), 3);
  EXPECT_TRUE(fs::exists(dir / "sample_0000_labels.png"));
  EXPECT_TRUE(fs::exists(dir / "sample_0000_image.png"));
  fs::remove_all(dir);
}

TEST(WorkerThreads, ReadsEnvironment) {
  setenv("SEGLOSS_THREADS", "3", 1);
  EXPECT_EQ(worker_threads(), 3);
  setenv("SEGLOSS_THREADS", "0", 1);
  EXPECT_GE(worker_threads(), 1);
  unsetenv("SEGLOSS_THREADS");
  EXPECT_GE(worker_threads(), 1);
}

}  // namespace
}  // namespace segloss
