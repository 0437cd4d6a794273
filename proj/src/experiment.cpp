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
#include "segloss/experiment.hpp"

#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <exception>
#include <fstream>
#include <mutex>
#include <sstream>
#include <thread>

#include <nlohmann/json.hpp>

#include "segloss/checkpoint.hpp"
#include "segloss/error.hpp"
#include "segloss/grid_io.hpp"
#include "segloss/png_export.hpp"

namespace segloss {
namespace {

using ojson = nlohmann::ordered_json;

// Stream identifiers mixed with the run seed.
constexpr std::uint64_t kInitStream = 0x1417;
constexpr std::uint64_t kDatasetStream = 0x6e6;

std::vector<int> channel_plan(const RunConfig& cfg) {
  const int hidden = cfg.trainer.hidden_channels;
  return {3, hidden, hidden, cfg.scene.classes};
}

SceneSpec scene_with_seed(const RunConfig& cfg, std::uint64_t seed) {
  SceneSpec s = cfg.scene;
  s.seed = seed;
  return s;
}

Sample training_sample(const RunConfig& cfg, std::uint64_t index) {
  Sample s = generate_sample(scene_with_seed(cfg, mix_seed(cfg.seed, 2 * index)));
  if (!cfg.trainer.augment) return s;
  std::mt19937_64 rng(mix_seed(cfg.seed, 2 * index + 1));
  const AugmentParams p = sample_augment_params(rng);
  return augment(s, p.scale, p.hflip, cfg.scene.height, cfg.scene.width, rng());
}

ojson iou_json(const IoUReport& r) {
  ojson per = ojson::array();
  for (const auto& v : r.per_class_iou) per.push_back(v ? ojson(*v) : ojson(nullptr));
  return per;
}

ojson eval_record(long iteration, double lr, const EvalResult& e) {
  ojson j;
  j["iteration"] = iteration;
  j["split"] = "eval";
  j["loss"] = e.loss;
  j["lr"] = lr;
  j["mean_iou"] = e.iou.mean_iou ? ojson(*e.iou.mean_iou) : ojson(nullptr);
  return j;
}

double mean_iou_or_zero(const EvalResult& e) {
  return e.iou.mean_iou.value_or(0.0);
}

std::string format_k(double k) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%g", k);
  return buf;
}

void prepare_run_dir(const std::filesystem::path& dir, bool force) {
  namespace fs = std::filesystem;
  if (fs::exists(dir) && !fs::is_empty(dir)) {
    if (!force) {
      throw IoError("output directory " + dir.string() +
                    " is not empty; pass --force to replace it");
    }
    fs::remove_all(dir);
  }
  fs::create_directories(dir);
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());
  out << text;
}

}  // namespace

int worker_threads() {
  if (const char* env = std::getenv("SEGLOSS_THREADS")) {
    const int n = std::atoi(env);
    if (n > 0) return n;
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

std::vector<Sample> make_eval_set(const RunConfig& cfg) {
  std::vector<Sample> set;
  set.reserve(cfg.eval.count);
  for (int e = 0; e < cfg.eval.count; ++e) {
    set.push_back(generate_sample(scene_with_seed(cfg, mix_seed(cfg.eval.seed, e))));
  }
  return set;
}

EvalResult evaluate(const TinyNet& net, const SegmentationLoss& loss,
                    std::span<const Sample> eval_set) {
  EvalResult r;
  IoUAccumulator acc(net.out_channels());
  int counted = 0;
  for (const Sample& s : eval_set) {
    const Grid3 pred = net.forward(s.image);
    acc.add(pred, s.labels);
    const LossOutput out = loss.evaluate(pred, s.labels);
    if (!out.degenerate()) {
      r.loss += out.loss;
      ++counted;
    }
  }
  if (counted > 0) r.loss /= counted;
  r.images = static_cast<int>(eval_set.size());
  r.iou = acc.report();
  return r;
}

ExperimentReport run_experiment(const RunConfig& cfg) {
  cfg.validate();
  ExperimentReport report;
  const TrainerSettings& tr = cfg.trainer;
  TrainState state = TrainState::for_net(
      TinyNet::random(channel_plan(cfg), mix_seed(cfg.seed, kInitStream)), tr.lr,
      tr.momentum, tr.decay_rate, tr.decay_interval);
  state.rng_seed = cfg.seed;
  std::unique_ptr<SegmentationLoss> loss = make_loss(cfg);
  const std::vector<Sample> eval_set = make_eval_set(cfg);

  report.initial = evaluate(state.net, *loss, eval_set);
  report.final = report.initial;
  report.metrics.push_back(eval_record(0, state.lr, report.initial).dump());

  const int batch = tr.batch_size;
  std::vector<Sample> samples(batch);
  std::vector<Grid3> preds(batch);
  for (long t = 1; t <= tr.iterations; ++t) {
    const double lr_used = state.lr;
    NetGradients total = state.net.zero_gradients();
    double batch_loss = 0.0;
    for (int b = 0; b < batch; ++b) {
      samples[b] = training_sample(cfg, static_cast<std::uint64_t>(t - 1) * batch + b);
      ForwardCache cache;
      preds[b] = state.net.forward(samples[b].image, &cache);
      const LossOutput out = loss->evaluate(preds[b], samples[b].labels);
      NetGradients g = state.net.backward(cache, out.grad);
      const double gnorm = std::sqrt(g.squared_norm());
      if (!std::isfinite(out.loss) || !std::isfinite(gnorm)) {
        ojson diag;
        diag["iteration"] = t;
        diag["loss"] = std::isfinite(out.loss) ? ojson(out.loss) : ojson(std::to_string(out.loss));
        diag["grad_norm"] = std::isfinite(gnorm) ? ojson(gnorm) : ojson(std::to_string(gnorm));
        report.aborted = true;
        report.diagnostic_json = diag.dump();
        report.net = std::move(state.net);
        return report;
      }
      total.add(g);
      batch_loss += out.loss;
    }
    if (batch > 1) {
      total.scale(1.0 / batch);
      batch_loss /= batch;
    }
    sgd_step(state, total);
    std::vector<BatchItem> items;
    for (int b = 0; b < batch; ++b) items.push_back({&preds[b], &samples[b].labels});
    loss->after_step(items);

    if (t % tr.log_interval == 0 || t == tr.iterations) {
      ojson rec;
      rec["iteration"] = t;
      rec["split"] = "train";
      rec["loss"] = batch_loss;
      rec["lr"] = lr_used;
      report.metrics.push_back(rec.dump());
    }
    if (t % tr.eval_interval == 0 || t == tr.iterations) {
      report.final = evaluate(state.net, *loss, eval_set);
      report.metrics.push_back(eval_record(t, state.lr, report.final).dump());
    }
  }

  if (loss->kind() == LossKind::kCenter) {
    report.centers = static_cast<const CenterLoss&>(*loss).config();
  }
  ojson summary;
  summary["loss"] = loss_kind_name(cfg.loss.kind);
  summary["seed"] = cfg.seed;
  summary["iterations"] = tr.iterations;
  summary["initial_loss"] = report.initial.loss;
  summary["initial_mean_iou"] = mean_iou_or_zero(report.initial);
  summary["final_loss"] = report.final.loss;
  summary["final_mean_iou"] = mean_iou_or_zero(report.final);
  summary["final_per_class_iou"] = iou_json(report.final.iou);
  report.summary_json = summary.dump(2);
  report.net = std::move(state.net);
  return report;
}

ExperimentReport train_to_directory(const RunConfig& cfg,
                                    const std::filesystem::path& dir,
                                    bool force) {
  cfg.validate();
  prepare_run_dir(dir, force);
  write_text(dir / "config.json", serialize_run_config(cfg));
  ExperimentReport report = run_experiment(cfg);

  std::string log;
  for (const std::string& line : report.metrics) log += line + "\n";
  write_text(dir / "metrics.jsonl", log);
  if (report.aborted) {
    write_text(dir / "diagnostic.json", report.diagnostic_json + "\n");
    throw NumericError("non-finite loss or gradient during training: " +
                       report.diagnostic_json);
  }
  write_text(dir / "summary.json", report.summary_json + "\n");
  save_checkpoint(dir / "checkpoint", Checkpoint{report.net, cfg, report.centers});

  if (cfg.eval.mask_count > 0) {
    std::filesystem::create_directories(dir / "masks");
    const std::vector<Sample> eval_set = make_eval_set(cfg);
    for (int e = 0; e < cfg.eval.mask_count; ++e) {
      const Sample& s = eval_set[e];
      const Grid3 pred = report.net.forward(s.image);
      const LabelGrid hard(s.labels.height(), s.labels.width(), s.labels.classes(),
                           argmax_labels(pred));
      char stem[32];
      std::snprintf(stem, sizeof(stem), "eval_%03d", e);
      write_rgb_png(dir / "masks" / (std::string(stem) + "_image.png"), s.image);
      write_label_png(dir / "masks" / (std::string(stem) + "_truth.png"), s.labels);
      write_label_png(dir / "masks" / (std::string(stem) + "_pred.png"), hard);
    }
  }
  return report;
}

EvalResult evaluate_checkpoint(const std::filesystem::path& checkpoint_dir,
                               const std::optional<RunConfig>& override_cfg) {
  Checkpoint ckpt = load_checkpoint(checkpoint_dir);
  RunConfig cfg = ckpt.config;
  if (override_cfg) {
    cfg.scene = override_cfg->scene;
    cfg.eval = override_cfg->eval;
  }
  if (cfg.scene.classes != ckpt.net.out_channels()) {
    throw DimensionError("scene has " + std::to_string(cfg.scene.classes) +
                         " classes but the checkpoint predicts " +
                         std::to_string(ckpt.net.out_channels()));
  }
  std::unique_ptr<SegmentationLoss> loss;
  if (ckpt.centers && cfg.loss.kind == LossKind::kCenter) {
    loss = std::make_unique<CenterLoss>(*ckpt.centers);
  } else {
    loss = make_loss(cfg);
  }
  const std::vector<Sample> eval_set = make_eval_set(cfg);
  return evaluate(ckpt.net, *loss, eval_set);
}

std::string eval_result_json(const EvalResult& result) {
  ojson j;
  j["mean_iou"] = result.iou.mean_iou ? ojson(*result.iou.mean_iou) : ojson(nullptr);
  j["per_class_iou"] = iou_json(result.iou);
  j["loss"] = result.loss;
  j["images"] = result.images;
  return j.dump(2);
}

std::string sweep_csv(std::span<const SweepRow> rows) {
  std::ostringstream out;
  out << "k,final_mean_iou,final_loss\n";
  char buf[128];
  for (const SweepRow& r : rows) {
    std::snprintf(buf, sizeof(buf), "%s,%.6f,%.6f\n", format_k(r.k).c_str(),
                  r.final_mean_iou, r.final_loss);
    out << buf;
  }
  return out.str();
}

std::vector<SweepRow> k_sweep(const RunConfig& base, std::span<const double> ks,
                              const std::filesystem::path& dir, bool force) {
  if (base.loss.kind != LossKind::kAdaptive) {
    throw ConfigError("loss.name", "k-sweep requires the adaptive loss");
  }
  std::vector<RunConfig> configs;
  for (double k : ks) {
    RunConfig cfg = base;
    cfg.loss.k = k;
    cfg.output_dir = (dir / ("k_" + format_k(k))).string();
    cfg.validate();
    configs.push_back(cfg);
  }
  std::filesystem::create_directories(dir);
  std::vector<SweepRow> rows(configs.size());
  std::vector<std::exception_ptr> errors(configs.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t n = next++; n < configs.size(); n = next++) {
      try {
        const ExperimentReport r =
            train_to_directory(configs[n], configs[n].output_dir, force);
        rows[n] = {configs[n].loss.k, mean_iou_or_zero(r.final), r.final.loss};
      } catch (...) {
        errors[n] = std::current_exception();
      }
    }
  };
  const int threads = std::min<int>(worker_threads(), static_cast<int>(configs.size()));
  std::vector<std::thread> pool;
  for (int t = 1; t < threads; ++t) pool.emplace_back(worker);
  worker();
  for (std::thread& t : pool) t.join();
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  write_text(dir / "sweep.csv", sweep_csv(rows));
  return rows;
}

void generate_dataset(const RunConfig& cfg, int count,
                      const std::filesystem::path& dir) {
  if (count < 0) throw Error(ErrorKind::kInvalidArgument, "count must be >= 0");
  cfg.validate();
  std::filesystem::create_directories(dir);
  for (int n = 0; n < count; ++n) {
    const Sample s = generate_sample(
        scene_with_seed(cfg, mix_seed(mix_seed(cfg.seed, kDatasetStream), n)));
    char stem[32];
    std::snprintf(stem, sizeof(stem), "sample_%04d", n);
    write_grid(dir / (std::string(stem) + ".slg"), s.image);
    write_labels(dir / (std::string(stem) + ".sll"), s.labels);
    write_label_png(dir / (std::string(stem) + "_labels.png"), s.labels);
    write_rgb_png(dir / (std::string(stem) + "_image.png"), s.image);
  }
}

}  // namespace segloss
