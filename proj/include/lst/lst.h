/*
 * Copyright 2026 The LST Authors.
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#ifndef LST_LST_H_
#define LST_LST_H_

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#  define LST_API __declspec(dllexport)
#else
#  define LST_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

/* Every call returns a status; on failure lst_last_error() describes it.
 * Outputs are written only on success. */
typedef enum lst_status {
  LST_OK = 0,
  LST_ERR_INVALID_ARGUMENT = 1,
  LST_ERR_DIMENSION_MISMATCH = 2,
  LST_ERR_INDEX_OUT_OF_RANGE = 3,
  LST_ERR_SINGULAR_UPDATE = 4,
  LST_ERR_SINGULAR_MATRIX = 5,
  LST_ERR_NO_CONVERGENCE = 6,
  LST_ERR_ZERO_MATRIX = 7,
  LST_ERR_DEGENERATE_VALUE = 8,
  LST_ERR_LOSS_DOMAIN = 9,
  LST_ERR_IO = 10,
  LST_ERR_FORMAT = 11,
  LST_ERR_EMPTY_CORPUS = 12,
  LST_ERR_OUT_OF_MEMORY = 13,
  LST_ERR_INTERNAL = 14
} lst_status;

LST_API const char* lst_status_string(lst_status status);
/* Message of the most recent failure on the calling thread. */
LST_API const char* lst_last_error(void);
LST_API const char* lst_version(void);

typedef enum lst_precision { LST_F64 = 0, LST_F32 = 1 } lst_precision;

/* Column-compressed K-sparse matrix, rows x cols. Column j owns entries
 * [col_offsets[j], col_offsets[j+1]). Indices within a column must be
 * distinct; order is free. */
typedef struct lst_sparse_batch {
  size_t rows;
  size_t cols;
  const size_t* col_offsets; /* cols + 1 entries, col_offsets[0] == 0 */
  const size_t* indices;
  const double* values;
} lst_sparse_batch;

/* ---- losses ---------------------------------------------------------- */

typedef struct lst_loss lst_loss;

/* A spherical loss l(q, s, active, a, t) where q = |o|^2, s = sum(o) and a, t
 * are the outputs and targets on the k active coordinates. Callbacks return
 * 0 on success and nonzero to signal a domain error. */
typedef struct lst_loss_callbacks {
  int uses_sum_of_outputs;
  int (*value)(void* user, double q, double s, size_t k, const size_t* active,
               const double* a, const double* t, double* out);
  int (*partials)(void* user, double q, double s, size_t k,
                  const size_t* active, const double* a, const double* t,
                  double* dq, double* ds, double* grad_a);
} lst_loss_callbacks;

LST_API lst_status lst_loss_squared_error(lst_loss** out);
LST_API lst_status lst_loss_custom(const lst_loss_callbacks* callbacks,
                                   void* user, lst_loss** out);
LST_API void lst_loss_destroy(lst_loss* loss);

/* ---- stabilization --------------------------------------------------- */

typedef enum lst_strategy {
  LST_STRATEGY_POWER_SCAN = 0,
  LST_STRATEGY_FULL_SVD = 1
} lst_strategy;

typedef struct lst_stabilize_config {
  double sigma_low;
  double sigma_high;
  size_t n_check;
  size_t power_iters;
  lst_strategy strategy;
} lst_stabilize_config;

typedef struct lst_stabilize_report {
  size_t values_fixed;
  double cond_before;
  double cond_after;
} lst_stabilize_report;

LST_API void lst_stabilize_config_default(lst_stabilize_config* out);

/* ---- factored output layer ------------------------------------------- */

typedef struct lst_factored lst_factored;

typedef enum lst_v_init { LST_INIT_ZEROS = 0, LST_INIT_RANDOM = 1 } lst_v_init;

typedef enum lst_factored_part {
  LST_PART_V = 0,       /* D x d */
  LST_PART_U = 1,       /* d x d */
  LST_PART_OMEGA = 2,   /* d */
  LST_PART_Q = 3,       /* d x d */
  LST_PART_U_INV_T = 4, /* d x d */
  LST_PART_WBAR = 5     /* d */
} lst_factored_part;

LST_API lst_status lst_factored_create(size_t output_dim, size_t hidden_dim,
                                       lst_precision precision,
                                       lst_v_init init, uint64_t seed,
                                       double scale, lst_factored** out);
/* Starts from an explicit row-major D x d matrix W. */
LST_API lst_status lst_factored_from_weights(size_t output_dim,
                                             size_t hidden_dim,
                                             const double* w,
                                             lst_factored** out);
LST_API void lst_factored_destroy(lst_factored* layer);

LST_API lst_status lst_factored_dims(const lst_factored* layer,
                                     size_t* output_dim, size_t* hidden_dim);

/* h is a row-major d x m matrix; grad_h (nullable) receives d x m. */
LST_API lst_status lst_factored_mse_update(lst_factored* layer,
                                           const double* h, size_t m,
                                           const lst_sparse_batch* y,
                                           double eta, double* loss,
                                           double* grad_h);
LST_API lst_status lst_factored_online_update(lst_factored* layer,
                                              const double* h, size_t nnz,
                                              const size_t* indices,
                                              const double* values, double eta,
                                              double* loss, double* grad_h);
LST_API lst_status lst_factored_spherical_update(lst_factored* layer,
                                                 const double* h, size_t m,
                                                 const lst_sparse_batch* y,
                                                 double eta,
                                                 const lst_loss* loss,
                                                 double* total_loss,
                                                 double* grad_h);

/* out receives the row-major D x d matrix W = VU + 1 omega^T. */
LST_API lst_status lst_factored_materialize(const lst_factored* layer,
                                            double* out);
LST_API lst_status lst_factored_get(const lst_factored* layer,
                                    lst_factored_part part, double* out);

LST_API lst_status lst_factored_refresh_inverse(lst_factored* layer);
LST_API lst_status lst_factored_inverse_residual(const lst_factored* layer,
                                                 double* out);
/* Singular values of U, nonincreasing (d entries). */
LST_API lst_status lst_factored_singular_values(const lst_factored* layer,
                                                double* out);
/* Condition number of U from a full SVD. */
LST_API lst_status lst_factored_condition(const lst_factored* layer,
                                          double* out);

LST_API lst_status lst_factored_restore_pristine(lst_factored* layer);
LST_API lst_status lst_factored_fix_singular_value(lst_factored* layer,
                                                   double sigma,
                                                   const double* u,
                                                   double sigma_target);
/* Runs one stabilization pass. fixed_before / fixed_after (nullable) receive
 * up to capacity (sigma before, sigma after) pairs. */
LST_API lst_status lst_factored_stabilize(lst_factored* layer,
                                          const lst_stabilize_config* config,
                                          lst_stabilize_report* report,
                                          double* fixed_before,
                                          double* fixed_after,
                                          size_t capacity);
/* Periodic stabilization after every n_check-th update; NULL disables it. */
LST_API lst_status lst_factored_set_stabilization(
    lst_factored* layer, const lst_stabilize_config* config);

LST_API lst_status lst_factored_save(const lst_factored* layer,
                                     const char* path);
LST_API lst_status lst_factored_load(const char* path, lst_factored** out);

/* ---- naive output layer ---------------------------------------------- */

typedef struct lst_naive lst_naive;

LST_API lst_status lst_naive_create(size_t output_dim, size_t hidden_dim,
                                    lst_precision precision, lst_naive** out);
LST_API lst_status lst_naive_from_weights(size_t output_dim, size_t hidden_dim,
                                          const double* w, lst_naive** out);
LST_API void lst_naive_destroy(lst_naive* layer);

LST_API lst_status lst_naive_dims(const lst_naive* layer, size_t* output_dim,
                                  size_t* hidden_dim);
LST_API lst_status lst_naive_mse_step(lst_naive* layer, const double* h,
                                      size_t m, const lst_sparse_batch* y,
                                      double eta, double* loss,
                                      double* grad_h);
LST_API lst_status lst_naive_spherical_step(lst_naive* layer, const double* h,
                                            size_t m,
                                            const lst_sparse_batch* y,
                                            double eta, const lst_loss* loss,
                                            double* total_loss,
                                            double* grad_h);
LST_API lst_status lst_naive_weights(const lst_naive* layer, double* out);

LST_API lst_status lst_naive_save(const lst_naive* layer, const char* path);
LST_API lst_status lst_naive_load(const char* path, lst_naive** out);

/* ---- synthetic data -------------------------------------------------- */

typedef enum lst_value_dist {
  LST_VALUES_GAUSSIAN = 0,
  LST_VALUES_UNIT = 1
} lst_value_dist;

typedef struct lst_synthetic_spec {
  size_t input_dim;
  size_t output_dim;
  size_t hidden_dim;
  size_t k;
  size_t batch;
  size_t count;
  uint64_t seed;
  lst_value_dist dist;
} lst_synthetic_spec;

/* Views into stream-owned storage, valid until the next call on the stream. */
typedef struct lst_batch_view {
  lst_sparse_batch x;
  lst_sparse_batch y;
  const double* h; /* hidden_dim x batch, row-major */
} lst_batch_view;

typedef struct lst_synthetic lst_synthetic;

LST_API lst_status lst_synthetic_create(const lst_synthetic_spec* spec,
                                        lst_synthetic** out);
LST_API void lst_synthetic_destroy(lst_synthetic* stream);
/* *has_batch is set to 0 once the stream is exhausted. */
LST_API lst_status lst_synthetic_next(lst_synthetic* stream,
                                      lst_batch_view* out, int* has_batch);
LST_API lst_status lst_synthetic_reset(lst_synthetic* stream);

/* ---- n-gram corpora -------------------------------------------------- */

typedef struct lst_ngram lst_ngram;

typedef struct lst_ngram_info {
  size_t n;
  size_t vocab_cap;
  size_t vocab_size;
  size_t examples;
  size_t input_dim;
  size_t output_dim;
} lst_ngram_info;

LST_API lst_status lst_ngram_ingest_file(const char* path, size_t n,
                                         size_t vocab_cap, lst_ngram** out);
LST_API lst_status lst_ngram_ingest_text(const char* text, size_t n,
                                         size_t vocab_cap, lst_ngram** out);
LST_API lst_status lst_ngram_load_cache(const char* path, lst_ngram** out);
LST_API lst_status lst_ngram_save_cache(const lst_ngram* data,
                                        const char* path);
LST_API void lst_ngram_destroy(lst_ngram* data);
LST_API lst_status lst_ngram_get_info(const lst_ngram* data,
                                      lst_ngram_info* out);
/* Inputs and one-hot targets for examples [begin, begin + count). */
LST_API lst_status lst_ngram_batch(lst_ngram* data, size_t begin, size_t count,
                                   lst_sparse_batch* x, lst_sparse_batch* y);

/* ---- network --------------------------------------------------------- */

typedef enum lst_activation {
  LST_ACT_TANH = 0,
  LST_ACT_IDENTITY = 1
} lst_activation;

typedef enum lst_output_kind {
  LST_OUTPUT_FACTORED = 0,
  LST_OUTPUT_NAIVE = 1
} lst_output_kind;

typedef struct lst_network_config {
  size_t input_dim;
  const size_t* hidden; /* widths; the first is the sparse input layer */
  size_t n_hidden;
  lst_activation activation;
  size_t output_dim;
  lst_output_kind output;
  uint64_t seed;
  double output_init_scale;                /* 0 starts the output at zero */
  const lst_stabilize_config* stabilize;   /* nullable */
} lst_network_config;

typedef struct lst_network lst_network;

LST_API lst_status lst_network_create(const lst_network_config* config,
                                      lst_network** out);
LST_API void lst_network_destroy(lst_network* net);
/* loss may be NULL for the dedicated squared-error path. */
LST_API lst_status lst_network_train_step(lst_network* net,
                                          const lst_sparse_batch* x,
                                          const lst_sparse_batch* y,
                                          double eta, const lst_loss* loss,
                                          double* total_loss);
LST_API lst_status lst_network_evaluate(lst_network* net,
                                        const lst_sparse_batch* x,
                                        const lst_sparse_batch* y,
                                        const lst_loss* loss,
                                        double* total_loss);
LST_API lst_status lst_network_output_dims(const lst_network* net,
                                           size_t* output_dim,
                                           size_t* hidden_dim);
/* Row-major output weights, output_dim x (last hidden width + 1). */
LST_API lst_status lst_network_output_weights(const lst_network* net,
                                              double* out);
LST_API lst_status lst_network_save(const lst_network* net, const char* path);
LST_API lst_status lst_network_load(const char* path, lst_network** out);

#ifdef __cplusplus
}
#endif

#endif /* LST_LST_H_ */
