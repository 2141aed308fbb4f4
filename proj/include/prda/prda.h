/*
 * SPDX-FileCopyrightText: Copyright (c) 2026 The prda authors. All rights reserved.
 * SPDX-License-Identifier: Apache-2.0
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 * http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

/* C interface to the prda source-free adaptation engine.
 *
 * Objects are opaque handles owned by the caller and released with the
 * matching *_free function. Every fallible call returns a prda_status; on
 * failure prda_last_error() describes the problem for the calling thread.
 * Output pointers are only written on success.
 */

#ifndef PRDA_PRDA_H
#define PRDA_PRDA_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#  if defined(PRDA_BUILDING_LIBRARY)
#    define PRDA_API __declspec(dllexport)
#  else
#    define PRDA_API __declspec(dllimport)
#  endif
#else
#  define PRDA_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum prda_status {
  PRDA_OK = 0,
  PRDA_ERR_INVALID_INPUT = 1,
  PRDA_ERR_DEGENERATE_INPUT = 2,
  PRDA_ERR_CONFIG = 3,
  PRDA_ERR_INVALID_STATE = 4,
  PRDA_ERR_USAGE = 5,
  PRDA_ERR_DIVERGENCE = 6,
  PRDA_ERR_PARSE = 7,
  PRDA_ERR_IO = 8,
  PRDA_ERR_QUALITY_GATE = 9,
  PRDA_ERR_INTERNAL = 10
} prda_status;

typedef struct prda_dataset prda_dataset;
typedef struct prda_labels prda_labels;
typedef struct prda_model prda_model;
typedef struct prda_run prda_run;

typedef enum prda_model_kind { PRDA_MODEL_SOURCE = 1, PRDA_MODEL_TARGET = 2 } prda_model_kind;

typedef enum prda_generator { PRDA_GEN_GAUSSIAN_MIXTURE = 0, PRDA_GEN_TWO_ARCS = 1 } prda_generator;

typedef struct prda_shift_spec {
  prda_generator family;
  int32_t num_classes;
  double radius;
  double spread;
  double rotation_deg;
  double translation[2];
  double noise;
  uint64_t samples_per_domain;
  uint64_t seed;
} prda_shift_spec;

typedef struct prda_pretrain_config {
  uint64_t hidden_size; /* one hidden layer */
  uint64_t embedding_dim;
  uint64_t epochs;
  uint64_t batch_size;
  double lr;
  double momentum;
  double weight_decay;
  uint64_t seed;
  double min_accuracy;
} prda_pretrain_config;

typedef struct prda_adapt_config {
  int64_t max_iter;
  uint64_t batch_size;
  int64_t update_period;
  double lr0;
  double lr_a;
  double lr_b;
  double lr_extractor_scale;
  double momentum;
  double weight_decay;
  int32_t alpha_dynamic; /* nonzero: dynamic schedule; zero: alpha_static */
  double alpha_static;
  uint64_t seed;
  int64_t log_interval;
} prda_adapt_config;

PRDA_API const char* prda_version(void);
PRDA_API const char* prda_last_error(void);
PRDA_API const char* prda_status_string(prda_status status);

/* Synthetic data ------------------------------------------------------- */

/* preset: "blobs-rot35" or "two-arcs". */
PRDA_API prda_status prda_shift_spec_preset(const char* preset, uint64_t seed, prda_shift_spec* out);
PRDA_API prda_status prda_shift_spec_validate(const prda_shift_spec* spec);

/* Source comes back labeled; target labels are returned separately. */
PRDA_API prda_status prda_generate(const prda_shift_spec* spec, prda_dataset** source, prda_dataset** target,
                                   prda_labels** target_labels);

/* Datasets and labels -------------------------------------------------- */

PRDA_API prda_status prda_dataset_read(const char* path, prda_dataset** out);
/* Writes labels inline only if the dataset was created labeled. */
PRDA_API prda_status prda_dataset_write(const prda_dataset* data, const char* path);
PRDA_API size_t prda_dataset_size(const prda_dataset* data);
PRDA_API size_t prda_dataset_dim(const prda_dataset* data);
PRDA_API int32_t prda_dataset_num_classes(const prda_dataset* data);
PRDA_API int32_t prda_dataset_is_labeled(const prda_dataset* data);
/* Copies row i's features into buf (capacity >= dim). */
PRDA_API prda_status prda_dataset_row(const prda_dataset* data, size_t i, double* buf, size_t capacity);
PRDA_API void prda_dataset_free(prda_dataset* data);

PRDA_API prda_status prda_labels_read(const char* path, prda_labels** out);
PRDA_API prda_status prda_labels_write(const prda_labels* labels, const char* path);
PRDA_API size_t prda_labels_size(const prda_labels* labels);
PRDA_API void prda_labels_free(prda_labels* labels);

/* Models ---------------------------------------------------------------- */

PRDA_API void prda_pretrain_config_default(prda_pretrain_config* out);
/* Requires a labeled dataset. PRDA_ERR_QUALITY_GATE below min_accuracy. */
PRDA_API prda_status prda_pretrain(const prda_dataset* source, const prda_pretrain_config* config, prda_model** out,
                                   double* train_accuracy);

PRDA_API prda_status prda_model_load(const char* path, prda_model** out);
PRDA_API prda_status prda_model_save(const prda_model* model, const char* path);
PRDA_API prda_model_kind prda_model_get_kind(const prda_model* model);
PRDA_API uint64_t prda_model_digest(const prda_model* model);
/* Class probabilities for one input: C_s for source models, C_t for target models. */
PRDA_API prda_status prda_model_predict(const prda_model* model, const double* x, size_t dim, double* probs,
                                        size_t capacity);
PRDA_API void prda_model_free(prda_model* model);

/* Accuracy on labeled data (labels == NULL uses the dataset's own labels). */
PRDA_API prda_status prda_evaluate(const prda_model* model, const prda_dataset* data, const prda_labels* labels,
                                   double* accuracy);

/* Adaptation ----------------------------------------------------------- */

PRDA_API void prda_adapt_config_default(prda_adapt_config* out);

/* Adapts a source model to unlabeled target data. diagnostic_labels may be
 * NULL; when given they only feed the accuracy fields of the metrics.
 * divergence_dir may be NULL; when given a diverging run leaves a checkpoint
 * there before returning PRDA_ERR_DIVERGENCE. */
PRDA_API prda_status prda_adapt(const prda_model* source, const prda_dataset* target, const prda_adapt_config* config,
                                const prda_labels* diagnostic_labels, const char* divergence_dir, prda_run** out);

/* Borrowed pointer to the adapted target model, valid until prda_run_free. */
PRDA_API const prda_model* prda_run_model(const prda_run* run);
PRDA_API prda_status prda_run_write_metrics(const prda_run* run, const char* path);
PRDA_API size_t prda_run_metrics_count(const prda_run* run);
PRDA_API size_t prda_run_steps(const prda_run* run);
/* Fraction of w = 1 samples in each step's batch. */
PRDA_API prda_status prda_run_confident_trace(const prda_run* run, double* buf, size_t capacity);
PRDA_API size_t prda_run_refresh_count(const prda_run* run);
PRDA_API void prda_run_free(prda_run* run);

/* File access log ------------------------------------------------------- */

PRDA_API void prda_access_log_clear(void);
PRDA_API size_t prda_access_log_size(void);
/* Entry i, or NULL if out of range. Valid until the next log mutation. */
PRDA_API const char* prda_access_log_entry(size_t i);

PRDA_API prda_status prda_file_digest(const char* path, uint64_t* out);

#ifdef __cplusplus
}
#endif

#endif /* PRDA_PRDA_H */
