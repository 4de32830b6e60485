// SPDX-License-Identifier: Apache-2.0
//
// qcslab: quantized compressed sensing laboratory
// Copyright (C) 2026 qcslab developers
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#ifndef QCS_H
#define QCS_H

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

#if defined(QCS_BUILDING_LIBRARY)
#define QCS_API __attribute__((visibility("default")))
#else
#define QCS_API
#endif

typedef enum qcs_status {
    QCS_OK = 0,
    QCS_ERR_CONFIG = 1,     /* invalid configuration or parameter value */
    QCS_ERR_SHAPE = 2,      /* dimension mismatch */
    QCS_ERR_DOMAIN = 3,     /* non-finite or out-of-domain numeric input */
    QCS_ERR_PROTOCOL = 4,   /* index outside 1..I */
    QCS_ERR_STATE = 5,      /* object not ready, e.g. no hard quantizer */
    QCS_ERR_DIVERGED = 6,   /* training produced non-finite values */
    QCS_ERR_IO = 7,
    QCS_ERR_FORMAT = 8,     /* malformed file */
    QCS_ERR_ARGUMENT = 9,   /* null pointer or too small buffer */
    QCS_ERR_INTERNAL = 10
} qcs_status;

typedef struct qcs_config qcs_config;
typedef struct qcs_dataset qcs_dataset;
typedef struct qcs_model qcs_model;

/* Progress messages from long operations; may be NULL. */
typedef void (*qcs_log_fn)(const char* message, void* user);

QCS_API const char* qcs_version(void);
QCS_API const char* qcs_status_string(qcs_status status);
/* Message of the last failed call on this thread; "" if none. */
QCS_API const char* qcs_last_error(void);

/* ---- configuration (flat dotted keys) ---- */
QCS_API qcs_status qcs_config_load(const char* path, qcs_config** out);
QCS_API qcs_status qcs_config_parse(const char* text, qcs_config** out);
QCS_API qcs_status qcs_config_set(qcs_config* cfg, const char* key, const char* value);
/* Copies the value into buf (NUL terminated). *needed receives the
   buffer size required including the terminator. */
QCS_API qcs_status qcs_config_get(const qcs_config* cfg, const char* key, char* buf, size_t cap,
                                  size_t* needed);
/* Checks every key and every rate point. */
QCS_API qcs_status qcs_config_validate(const qcs_config* cfg);
QCS_API void qcs_config_free(qcs_config* cfg);

/* ---- datasets ---- */
/* split is "train", "val" or "test"; the first configured seed is used. */
QCS_API qcs_status qcs_dataset_generate(const qcs_config* cfg, const char* split, qcs_dataset** out);
QCS_API qcs_status qcs_dataset_load(const char* path, qcs_dataset** out);
QCS_API qcs_status qcs_dataset_save(const qcs_dataset* data, const char* path);
QCS_API qcs_status qcs_dataset_info(const qcs_dataset* data, size_t* n, size_t* m, size_t* s, size_t* count);
/* Copies sample k: x_out gets N values, y_out M values (either may be NULL). */
QCS_API qcs_status qcs_dataset_sample(const qcs_dataset* data, size_t k, double* x_out, double* y_out);
QCS_API void qcs_dataset_free(qcs_dataset* data);

/* ---- DeepVQCS models ---- */
/* Trains the method named by `method` ("deepvqcs", "deepvqcs-ste" or
   "ce-decnet") at resolution (k, levels) on the configured train and
   validation splits of the first seed. k = 0 picks the configured K. */
QCS_API qcs_status qcs_train(const qcs_config* cfg, const char* method, size_t k, size_t levels,
                             qcs_log_fn log, void* user, qcs_model** out);
QCS_API qcs_status qcs_model_load(const char* path, qcs_model** out);
QCS_API qcs_status qcs_model_save(const qcs_model* model, const char* path);
QCS_API qcs_status qcs_model_info(const qcs_model* model, size_t* m, size_t* k, size_t* n, size_t* levels);
/* Writes K indices in 1..I. */
QCS_API qcs_status qcs_model_compress(const qcs_model* model, const double* y, size_t m, uint32_t* indices,
                                      size_t k);
QCS_API qcs_status qcs_model_reconstruct(const qcs_model* model, const uint32_t* indices, size_t k, double* x,
                                         size_t n);
/* NMSE in dB of per-sample compress and reconstruct over the dataset. */
QCS_API qcs_status qcs_model_evaluate(const qcs_model* model, const qcs_dataset* data, double* nmse_db);
/* Evaluates and writes one result row to csv_path (with header). */
QCS_API qcs_status qcs_evaluate_to_csv(const qcs_model* model, const qcs_dataset* data, const char* ckpt_path,
                                       const char* csv_path);
QCS_API void qcs_model_free(qcs_model* model);

/* ---- experiments ---- */
/* Runs the configured methods except the learned ones. */
QCS_API qcs_status qcs_run_baselines(const qcs_config* cfg, const char* csv_path, qcs_log_fn log, void* user);
/* Runs every configured method at every rate point. */
QCS_API qcs_status qcs_run_sweep(const qcs_config* cfg, const char* csv_path, qcs_log_fn log, void* user);
QCS_API qcs_status qcs_bench_time(const qcs_config* cfg, const char* const* ckpt_paths, size_t count,
                                  const char* csv_path, qcs_log_fn log, void* user);

/* K ceil(log2 I) / N. */
QCS_API qcs_status qcs_rate_bits(size_t k, size_t levels, size_t n, double* out);

#ifdef __cplusplus
}
#endif

#endif
