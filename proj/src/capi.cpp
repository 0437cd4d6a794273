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
#include "segloss/segloss.h"

#include <cmath>
#include <cstdlib>
#include <cstring>
#include <exception>
#include <new>
#include <string>

#include "segloss/error.hpp"
#include "segloss/experiment.hpp"
#include "segloss/gradcheck_suite.hpp"
#include "segloss/grid_io.hpp"
#include "segloss/losses.hpp"
#include "segloss/png_export.hpp"
#include "segloss/run_config.hpp"

struct segloss_grid {
  segloss::Grid3 grid;
};

struct segloss_labels {
  segloss::LabelGrid labels;
};

struct segloss_loss_result {
  segloss::LossOutput output;
};

struct segloss_centers {
  segloss::CenterLossConfig cfg;
};

struct segloss_config {
  segloss::RunConfig cfg;
};

namespace {

thread_local std::string g_last_error;

segloss_status status_for(segloss::ErrorKind kind) {
  using segloss::ErrorKind;
  switch (kind) {
    case ErrorKind::kInvalidArgument: return SEGLOSS_ERR_INVALID_ARGUMENT;
    case ErrorKind::kDimension: return SEGLOSS_ERR_DIMENSION;
    case ErrorKind::kIndex: return SEGLOSS_ERR_INDEX;
    case ErrorKind::kConfig: return SEGLOSS_ERR_CONFIG;
    case ErrorKind::kIo: return SEGLOSS_ERR_IO;
    case ErrorKind::kIntegrity: return SEGLOSS_ERR_INTEGRITY;
    case ErrorKind::kNumeric: return SEGLOSS_ERR_NUMERIC;
    case ErrorKind::kState: return SEGLOSS_ERR_STATE;
  }
  return SEGLOSS_ERR_INTERNAL;
}

segloss_status fail(segloss_status status, std::string message) {
  g_last_error = std::move(message);
  return status;
}

// Runs body, translating exceptions into status codes.
template <typename Body>
segloss_status guarded(Body&& body) {
  g_last_error.clear();
  try {
    body();
    return SEGLOSS_OK;
  } catch (const segloss::Error& e) {
    return fail(status_for(e.kind()), e.what());
  } catch (const std::filesystem::filesystem_error& e) {
    return fail(SEGLOSS_ERR_IO, e.what());
  } catch (const std::bad_alloc&) {
    return fail(SEGLOSS_ERR_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return fail(SEGLOSS_ERR_INTERNAL, e.what());
  } catch (...) {
    return fail(SEGLOSS_ERR_INTERNAL, "unknown exception");
  }
}

void require(const void* p, const char* what) {
  if (!p) {
    throw segloss::Error(segloss::ErrorKind::kInvalidArgument,
                         std::string(what) + " must not be NULL");
  }
}

char* dup_string(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (!out) throw std::bad_alloc();
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

segloss::WeightSchedule to_schedule(segloss_weight_schedule s) {
  switch (s) {
    case SEGLOSS_SCHEDULE_CHESSBOARD: return segloss::WeightSchedule::kChessboardPow2;
    case SEGLOSS_SCHEDULE_UNIFORM: return segloss::WeightSchedule::kUniform;
  }
  throw segloss::Error(segloss::ErrorKind::kInvalidArgument, "unknown weight schedule");
}

template <typename Fn>
segloss_status make_result(segloss_loss_result** out, Fn&& fn) {
  return guarded([&] {
    require(out, "out");
    *out = nullptr;
    *out = new segloss_loss_result{fn()};
  });
}

}  // namespace

extern "C" {

const char* segloss_last_error(void) { return g_last_error.c_str(); }

const char* segloss_status_name(segloss_status status) {
  switch (status) {
    case SEGLOSS_OK: return "ok";
    case SEGLOSS_ERR_INVALID_ARGUMENT: return "invalid argument";
    case SEGLOSS_ERR_DIMENSION: return "dimension error";
    case SEGLOSS_ERR_INDEX: return "index error";
    case SEGLOSS_ERR_CONFIG: return "config error";
    case SEGLOSS_ERR_IO: return "io error";
    case SEGLOSS_ERR_INTEGRITY: return "integrity error";
    case SEGLOSS_ERR_NUMERIC: return "numeric error";
    case SEGLOSS_ERR_STATE: return "state error";
    case SEGLOSS_ERR_INTERNAL: return "internal error";
  }
  return "unknown status";
}

const char* segloss_version(void) { return "1.0.0"; }

void segloss_string_free(char* s) { std::free(s); }

segloss_status segloss_grid_new(int height, int width, int channels,
                                const double* data, segloss_grid** out) {
  return guarded([&] {
    require(out, "out");
    *out = nullptr;
    segloss::Grid3 g(height, width, channels);
    if (data) {
      g = segloss::Grid3(height, width, channels,
                         std::vector<double>(data, data + g.size()));
    }
    *out = new segloss_grid{std::move(g)};
  });
}

void segloss_grid_free(segloss_grid* grid) { delete grid; }

segloss_status segloss_grid_shape(const segloss_grid* grid, int* height,
                                  int* width, int* channels) {
  return guarded([&] {
    require(grid, "grid");
    if (height) *height = grid->grid.height();
    if (width) *width = grid->grid.width();
    if (channels) *channels = grid->grid.channels();
  });
}

segloss_status segloss_grid_get(const segloss_grid* grid, int i, int j, int c,
                                double* value) {
  return guarded([&] {
    require(grid, "grid");
    require(value, "value");
    *value = grid->grid.at(i, j, c);
  });
}

segloss_status segloss_grid_set(segloss_grid* grid, int i, int j, int c,
                                double value) {
  return guarded([&] {
    require(grid, "grid");
    if (!std::isfinite(value)) {
      throw segloss::Error(segloss::ErrorKind::kInvalidArgument,
                           "grid values must be finite");
    }
    grid->grid.at(i, j, c) = value;
  });
}

segloss_status segloss_grid_copy_data(const segloss_grid* grid, double* dst,
                                      size_t len) {
  return guarded([&] {
    require(grid, "grid");
    require(dst, "dst");
    auto d = grid->grid.data();
    std::copy_n(d.begin(), std::min(len, d.size()), dst);
  });
}

segloss_status segloss_grid_load(const char* path, segloss_grid** out) {
  return guarded([&] {
    require(path, "path");
    require(out, "out");
    *out = nullptr;
    *out = new segloss_grid{segloss::read_grid(path)};
  });
}

segloss_status segloss_grid_save(const segloss_grid* grid, const char* path) {
  return guarded([&] {
    require(grid, "grid");
    require(path, "path");
    segloss::write_grid(path, grid->grid);
  });
}

segloss_status segloss_labels_new(int height, int width, int classes,
                                  const uint8_t* labels, segloss_labels** out) {
  return guarded([&] {
    require(out, "out");
    *out = nullptr;
    segloss::LabelGrid l(height, width, classes, 0);
    if (labels) {
      l = segloss::LabelGrid(height, width, classes,
                             std::vector<std::uint8_t>(labels, labels + l.size()));
    }
    *out = new segloss_labels{std::move(l)};
  });
}

void segloss_labels_free(segloss_labels* labels) { delete labels; }

segloss_status segloss_labels_shape(const segloss_labels* labels, int* height,
                                    int* width, int* classes) {
  return guarded([&] {
    require(labels, "labels");
    if (height) *height = labels->labels.height();
    if (width) *width = labels->labels.width();
    if (classes) *classes = labels->labels.classes();
  });
}

segloss_status segloss_labels_get(const segloss_labels* labels, int i, int j,
                                  uint8_t* value) {
  return guarded([&] {
    require(labels, "labels");
    require(value, "value");
    *value = labels->labels.at(i, j);
  });
}

segloss_status segloss_labels_load(const char* path, segloss_labels** out) {
  return guarded([&] {
    require(path, "path");
    require(out, "out");
    *out = nullptr;
    *out = new segloss_labels{segloss::read_labels(path)};
  });
}

segloss_status segloss_labels_save(const segloss_labels* labels,
                                   const char* path) {
  return guarded([&] {
    require(labels, "labels");
    require(path, "path");
    segloss::write_labels(path, labels->labels);
  });
}

segloss_status segloss_labels_write_png(const segloss_labels* labels,
                                        const char* path) {
  return guarded([&] {
    require(labels, "labels");
    require(path, "path");
    segloss::write_label_png(path, labels->labels);
  });
}

segloss_status segloss_adaptive_loss(const segloss_grid* pred,
                                     const segloss_labels* labels, int window,
                                     int stride,
                                     segloss_weight_schedule schedule, double k,
                                     int normalize, segloss_loss_result** out) {
  return make_result(out, [&] {
    require(pred, "pred");
    require(labels, "labels");
    segloss::AdaptiveLossConfig cfg;
    cfg.filter.window = window;
    cfg.filter.stride = stride;
    cfg.filter.classes = pred->grid.channels();
    cfg.filter.schedule = to_schedule(schedule);
    cfg.k = k;
    cfg.normalize_inputs = normalize != 0;
    return segloss::adaptive_loss_forward(pred->grid, labels->labels, cfg);
  });
}

segloss_status segloss_softmax_ce_loss(const segloss_grid* pred,
                                       const segloss_labels* labels,
                                       segloss_loss_result** out) {
  return make_result(out, [&] {
    require(pred, "pred");
    require(labels, "labels");
    return segloss::plain_softmax_ce(pred->grid, labels->labels);
  });
}

segloss_status segloss_focal_loss(const segloss_grid* pred,
                                  const segloss_labels* labels, double alpha,
                                  double gamma, segloss_loss_result** out) {
  return make_result(out, [&] {
    require(pred, "pred");
    require(labels, "labels");
    return segloss::focal_loss(pred->grid, labels->labels,
                               segloss::FocalConfig{alpha, gamma});
  });
}

segloss_status segloss_centers_new(int classes, double alpha, double lambda,
                                   segloss_centers** out) {
  return guarded([&] {
    require(out, "out");
    *out = nullptr;
    if (classes <= 0) {
      throw segloss::DimensionError("class count must be positive");
    }
    auto cfg = segloss::CenterLossConfig::with_zero_centers(classes, alpha, lambda);
    cfg.validate();
    *out = new segloss_centers{std::move(cfg)};
  });
}

void segloss_centers_free(segloss_centers* centers) { delete centers; }

segloss_status segloss_centers_get(const segloss_centers* centers, int label,
                                   int channel, double* value) {
  return guarded([&] {
    require(centers, "centers");
    require(value, "value");
    const int c = centers->cfg.classes;
    if (label < 0 || label >= c || channel < 0 || channel >= c) {
      throw segloss::IndexError("center index out of range");
    }
    *value = centers->cfg.centers[static_cast<std::size_t>(label) * c + channel];
  });
}

segloss_status segloss_center_loss(const segloss_grid* pred,
                                   const segloss_labels* labels,
                                   const segloss_centers* centers,
                                   segloss_loss_result** out) {
  return make_result(out, [&] {
    require(pred, "pred");
    require(labels, "labels");
    require(centers, "centers");
    return segloss::center_loss(pred->grid, labels->labels, centers->cfg);
  });
}

segloss_status segloss_centers_update(segloss_centers* centers,
                                      const segloss_grid* pred,
                                      const segloss_labels* labels) {
  return guarded([&] {
    require(centers, "centers");
    require(pred, "pred");
    require(labels, "labels");
    const segloss::Grid3* preds[] = {&pred->grid};
    const segloss::LabelGrid* labs[] = {&labels->labels};
    segloss::update_centers(preds, labs, centers->cfg);
  });
}

void segloss_loss_result_free(segloss_loss_result* result) { delete result; }

double segloss_loss_result_value(const segloss_loss_result* result) {
  return result ? result->output.loss : 0.0;
}

int segloss_loss_result_valid_count(const segloss_loss_result* result) {
  return result ? result->output.valid_count : 0;
}

segloss_status segloss_loss_result_grad(const segloss_loss_result* result,
                                        segloss_grid** out) {
  return guarded([&] {
    require(result, "result");
    require(out, "out");
    *out = nullptr;
    *out = new segloss_grid{result->output.grad};
  });
}

segloss_status segloss_loss_result_json(const segloss_loss_result* result,
                                        char** out) {
  return guarded([&] {
    require(result, "result");
    require(out, "out");
    *out = dup_string(result->output.to_json());
  });
}

segloss_status segloss_config_default(segloss_config** out) {
  return guarded([&] {
    require(out, "out");
    *out = new segloss_config{segloss::RunConfig{}};
  });
}

segloss_status segloss_config_load(const char* path, segloss_config** out) {
  return guarded([&] {
    require(path, "path");
    require(out, "out");
    *out = nullptr;
    *out = new segloss_config{segloss::load_run_config(path)};
  });
}

segloss_status segloss_config_parse(const char* json_text, segloss_config** out) {
  return guarded([&] {
    require(json_text, "json_text");
    require(out, "out");
    *out = nullptr;
    *out = new segloss_config{segloss::parse_run_config(json_text)};
  });
}

void segloss_config_free(segloss_config* cfg) { delete cfg; }

segloss_status segloss_config_to_json(const segloss_config* cfg, char** out) {
  return guarded([&] {
    require(cfg, "cfg");
    require(out, "out");
    *out = dup_string(segloss::serialize_run_config(cfg->cfg));
  });
}

segloss_status segloss_config_set(segloss_config* cfg, const char* dotted_key,
                                  const char* json_value) {
  return guarded([&] {
    require(cfg, "cfg");
    require(dotted_key, "dotted_key");
    require(json_value, "json_value");
    segloss::RunConfig updated = cfg->cfg;
    segloss::set_config_value(updated, dotted_key, json_value);
    cfg->cfg = std::move(updated);
  });
}

segloss_status segloss_train(const segloss_config* cfg, const char* output_dir,
                             int force, char** summary_json) {
  return guarded([&] {
    require(cfg, "cfg");
    if (summary_json) *summary_json = nullptr;
    const std::string dir = output_dir ? output_dir : cfg->cfg.output_dir;
    const auto report = segloss::train_to_directory(cfg->cfg, dir, force != 0);
    if (summary_json) *summary_json = dup_string(report.summary_json);
  });
}

segloss_status segloss_eval(const char* checkpoint_dir, const segloss_config* cfg,
                            char** report_json) {
  return guarded([&] {
    require(checkpoint_dir, "checkpoint_dir");
    require(report_json, "report_json");
    *report_json = nullptr;
    std::optional<segloss::RunConfig> override_cfg;
    if (cfg) override_cfg = cfg->cfg;
    const auto result = segloss::evaluate_checkpoint(checkpoint_dir, override_cfg);
    *report_json = dup_string(segloss::eval_result_json(result));
  });
}

segloss_status segloss_gradcheck(const segloss_config* cfg, int height,
                                 int width, int classes, uint64_t seed,
                                 int* passed, char** report_json) {
  return guarded([&] {
    require(cfg, "cfg");
    require(passed, "passed");
    require(report_json, "report_json");
    *report_json = nullptr;
    if (height <= 0 || width <= 0 || classes < 2) {
      throw segloss::DimensionError("gradcheck size must be positive with >= 2 classes");
    }
    const auto report =
        segloss::gradcheck_loss(cfg->cfg.loss, height, width, classes, seed);
    *passed = report.passed ? 1 : 0;
    *report_json = dup_string(report.to_json());
  });
}

segloss_status segloss_gen_data(const segloss_config* cfg, int count,
                                const char* output_dir) {
  return guarded([&] {
    require(cfg, "cfg");
    require(output_dir, "output_dir");
    segloss::generate_dataset(cfg->cfg, count, output_dir);
  });
}

segloss_status segloss_k_sweep(const segloss_config* cfg, const double* ks,
                               size_t num_ks, const char* output_dir, int force,
                               char** csv) {
  return guarded([&] {
    require(cfg, "cfg");
    require(ks, "ks");
    require(output_dir, "output_dir");
    if (csv) *csv = nullptr;
    const auto rows = segloss::k_sweep(cfg->cfg, std::span<const double>(ks, num_ks),
                                       output_dir, force != 0);
    if (csv) *csv = dup_string(segloss::sweep_csv(rows));
  });
}

}  // extern "C"
