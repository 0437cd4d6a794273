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
/* C interface to the segloss library.
 *
 * All functions return a segloss_status. On failure a human-readable message
 * is available from segloss_last_error() on the calling thread until the next
 * call into the library. Objects are opaque handles released with their
 * matching *_free function; strings returned through char** are released with
 * segloss_string_free. Passing NULL to a *_free function is a no-op.
 */
#ifndef SEGLOSS_SEGLOSS_H_
#define SEGLOSS_SEGLOSS_H_

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#  if defined(SEGLOSS_BUILDING_LIBRARY)
#    define SEGLOSS_API __declspec(dllexport)
#  else
#    define SEGLOSS_API __declspec(dllimport)
#  endif
#else
#  define SEGLOSS_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum segloss_status {
  SEGLOSS_OK = 0,
  SEGLOSS_ERR_INVALID_ARGUMENT = 1,
  SEGLOSS_ERR_DIMENSION = 2,
  SEGLOSS_ERR_INDEX = 3,
  SEGLOSS_ERR_CONFIG = 4,
  SEGLOSS_ERR_IO = 5,
  SEGLOSS_ERR_INTEGRITY = 6,
  SEGLOSS_ERR_NUMERIC = 7,
  SEGLOSS_ERR_STATE = 8,
  SEGLOSS_ERR_INTERNAL = 9
} segloss_status;

typedef enum segloss_loss_kind {
  SEGLOSS_LOSS_ADAPTIVE = 0,
  SEGLOSS_LOSS_SOFTMAX_CE = 1,
  SEGLOSS_LOSS_FOCAL = 2,
  SEGLOSS_LOSS_CENTER = 3
} segloss_loss_kind;

typedef enum segloss_weight_schedule {
  SEGLOSS_SCHEDULE_CHESSBOARD = 0,
  SEGLOSS_SCHEDULE_UNIFORM = 1
} segloss_weight_schedule;

#define SEGLOSS_IGNORE_LABEL 255

typedef struct segloss_grid segloss_grid;
typedef struct segloss_labels segloss_labels;
typedef struct segloss_loss_result segloss_loss_result;
typedef struct segloss_centers segloss_centers;
typedef struct segloss_config segloss_config;

SEGLOSS_API const char* segloss_last_error(void);
SEGLOSS_API const char* segloss_status_name(segloss_status status);
SEGLOSS_API const char* segloss_version(void);
SEGLOSS_API void segloss_string_free(char* s);

/* ---- grids ------------------------------------------------------------ */

/* Zero-filled H x W x C grid. data may be NULL; otherwise it must hold
 * H*W*C finite values in row-major, channel-fastest order. */
SEGLOSS_API segloss_status segloss_grid_new(int height, int width, int channels,
                                            const double* data,
                                            segloss_grid** out);
SEGLOSS_API void segloss_grid_free(segloss_grid* grid);
SEGLOSS_API segloss_status segloss_grid_shape(const segloss_grid* grid,
                                              int* height, int* width,
                                              int* channels);
SEGLOSS_API segloss_status segloss_grid_get(const segloss_grid* grid, int i,
                                            int j, int c, double* value);
SEGLOSS_API segloss_status segloss_grid_set(segloss_grid* grid, int i, int j,
                                            int c, double value);
/* Copies min(len, H*W*C) values out. */
SEGLOSS_API segloss_status segloss_grid_copy_data(const segloss_grid* grid,
                                                  double* dst, size_t len);
SEGLOSS_API segloss_status segloss_grid_load(const char* path,
                                             segloss_grid** out);
SEGLOSS_API segloss_status segloss_grid_save(const segloss_grid* grid,
                                             const char* path);

/* labels may be NULL (all zero). Values must be < classes or 255. */
SEGLOSS_API segloss_status segloss_labels_new(int height, int width,
                                              int classes,
                                              const uint8_t* labels,
                                              segloss_labels** out);
SEGLOSS_API void segloss_labels_free(segloss_labels* labels);
SEGLOSS_API segloss_status segloss_labels_shape(const segloss_labels* labels,
                                                int* height, int* width,
                                                int* classes);
SEGLOSS_API segloss_status segloss_labels_get(const segloss_labels* labels,
                                              int i, int j, uint8_t* value);
SEGLOSS_API segloss_status segloss_labels_load(const char* path,
                                               segloss_labels** out);
SEGLOSS_API segloss_status segloss_labels_save(const segloss_labels* labels,
                                               const char* path);
SEGLOSS_API segloss_status segloss_labels_write_png(
    const segloss_labels* labels, const char* path);

/* ---- losses ----------------------------------------------------------- */

SEGLOSS_API segloss_status segloss_adaptive_loss(
    const segloss_grid* pred, const segloss_labels* labels, int window,
    int stride, segloss_weight_schedule schedule, double k, int normalize,
    segloss_loss_result** out);
SEGLOSS_API segloss_status segloss_softmax_ce_loss(
    const segloss_grid* pred, const segloss_labels* labels,
    segloss_loss_result** out);
SEGLOSS_API segloss_status segloss_focal_loss(const segloss_grid* pred,
                                              const segloss_labels* labels,
                                              double alpha, double gamma,
                                              segloss_loss_result** out);

/* Center-loss state: a classes x classes matrix of class centers. */
SEGLOSS_API segloss_status segloss_centers_new(int classes, double alpha,
                                               double lambda,
                                               segloss_centers** out);
SEGLOSS_API void segloss_centers_free(segloss_centers* centers);
SEGLOSS_API segloss_status segloss_centers_get(const segloss_centers* centers,
                                               int label, int channel,
                                               double* value);
SEGLOSS_API segloss_status segloss_center_loss(const segloss_grid* pred,
                                               const segloss_labels* labels,
                                               const segloss_centers* centers,
                                               segloss_loss_result** out);
SEGLOSS_API segloss_status segloss_centers_update(segloss_centers* centers,
                                                  const segloss_grid* pred,
                                                  const segloss_labels* labels);

SEGLOSS_API void segloss_loss_result_free(segloss_loss_result* result);
SEGLOSS_API double segloss_loss_result_value(const segloss_loss_result* result);
SEGLOSS_API int segloss_loss_result_valid_count(
    const segloss_loss_result* result);
/* New grid owned by the caller. */
SEGLOSS_API segloss_status segloss_loss_result_grad(
    const segloss_loss_result* result, segloss_grid** out);
/* {"loss", "valid_count", "grad_norm"} */
SEGLOSS_API segloss_status segloss_loss_result_json(
    const segloss_loss_result* result, char** out);

/* ---- experiments ------------------------------------------------------ */

SEGLOSS_API segloss_status segloss_config_default(segloss_config** out);
SEGLOSS_API segloss_status segloss_config_load(const char* path,
                                               segloss_config** out);
SEGLOSS_API segloss_status segloss_config_parse(const char* json_text,
                                                segloss_config** out);
SEGLOSS_API void segloss_config_free(segloss_config* cfg);
/* Canonical JSON text of the config. */
SEGLOSS_API segloss_status segloss_config_to_json(const segloss_config* cfg,
                                                  char** out);
/* Overrides a dotted key ("loss.k", "trainer.iterations", ...) with a JSON
 * value and revalidates; the config is unchanged on failure. */
SEGLOSS_API segloss_status segloss_config_set(segloss_config* cfg,
                                              const char* dotted_key,
                                              const char* json_value);

/* Trains into output_dir (the config's own output_dir when NULL).
 * summary_json may be NULL. */
SEGLOSS_API segloss_status segloss_train(const segloss_config* cfg,
                                         const char* output_dir, int force,
                                         char** summary_json);
/* Evaluates a checkpoint directory; cfg (may be NULL) overrides the scene
 * and held-out set settings stored in the checkpoint. */
SEGLOSS_API segloss_status segloss_eval(const char* checkpoint_dir,
                                        const segloss_config* cfg,
                                        char** report_json);
/* Finite-difference check of the configured loss on a seeded
 * height x width x classes instance. passed receives 1 or 0. */
SEGLOSS_API segloss_status segloss_gradcheck(const segloss_config* cfg,
                                             int height, int width,
                                             int classes, uint64_t seed,
                                             int* passed, char** report_json);
SEGLOSS_API segloss_status segloss_gen_data(const segloss_config* cfg,
                                            int count, const char* output_dir);
/* One adaptive-loss run per k; csv receives "k,final_mean_iou,final_loss". */
SEGLOSS_API segloss_status segloss_k_sweep(const segloss_config* cfg,
                                           const double* ks, size_t num_ks,
                                           const char* output_dir, int force,
                                           char** csv);

#ifdef __cplusplus
}  /* extern "C" */
#endif

#endif  /* SEGLOSS_SEGLOSS_H_ */
