// Copyright 2026 The LST Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "lst/lst.h"

#include <memory>
#include <new>
#include <sstream>
#include <string>
#include <variant>

#include "lst/checkpoint.hpp"
#include "lst/data.hpp"
#include "lst/factored_layer.hpp"
#include "lst/kernels.hpp"
#include "lst/loss.hpp"
#include "lst/naive_layer.hpp"
#include "lst/network.hpp"
#include "lst/stabilizer.hpp"

using lst::ErrorCode;
using lst::Index;

struct lst_loss {
  std::shared_ptr<const lst::SphericalLoss> impl;
};

struct lst_factored {
  std::variant<lst::BasicFactoredLayer<double>, lst::BasicFactoredLayer<float>>
      layer;
};

struct lst_naive {
  std::variant<lst::BasicNaiveLayer<double>, lst::BasicNaiveLayer<float>> layer;
};

struct lst_synthetic {
  lst::SyntheticStream stream;
  lst::SyntheticBatch current;
};

struct lst_ngram {
  lst::NgramDataset data;
  lst::KSparseMat x;
  lst::KSparseMat y;
};

struct lst_network {
  lst::Network net;
};

namespace {

thread_local std::string g_last_error;

lst_status status_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidArgument: return LST_ERR_INVALID_ARGUMENT;
    case ErrorCode::kDimensionMismatch: return LST_ERR_DIMENSION_MISMATCH;
    case ErrorCode::kIndexOutOfRange: return LST_ERR_INDEX_OUT_OF_RANGE;
    case ErrorCode::kSingularUpdate: return LST_ERR_SINGULAR_UPDATE;
    case ErrorCode::kSingularMatrix: return LST_ERR_SINGULAR_MATRIX;
    case ErrorCode::kNoConvergence: return LST_ERR_NO_CONVERGENCE;
    case ErrorCode::kZeroMatrix: return LST_ERR_ZERO_MATRIX;
    case ErrorCode::kDegenerateValue: return LST_ERR_DEGENERATE_VALUE;
    case ErrorCode::kLossDomain: return LST_ERR_LOSS_DOMAIN;
    case ErrorCode::kIo: return LST_ERR_IO;
    case ErrorCode::kFormat: return LST_ERR_FORMAT;
    case ErrorCode::kEmptyCorpus: return LST_ERR_EMPTY_CORPUS;
  }
  return LST_ERR_INTERNAL;
}

template <typename F>
lst_status guarded(F&& body) {
  try {
    body();
    g_last_error.clear();
    return LST_OK;
  } catch (const lst::Error& e) {
    g_last_error = e.what();
    return status_for(e.code());
  } catch (const std::bad_alloc&) {
    g_last_error = "out of memory";
    return LST_ERR_OUT_OF_MEMORY;
  } catch (const std::length_error& e) {
    g_last_error = std::string("out of memory: ") + e.what();
    return LST_ERR_OUT_OF_MEMORY;
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return LST_ERR_INTERNAL;
  } catch (...) {
    g_last_error = "unknown exception";
    return LST_ERR_INTERNAL;
  }
}

void require(bool ok, const char* what) {
  if (!ok) lst::fail(ErrorCode::kInvalidArgument, what);
}

lst::KSparseMat to_sparse(const lst_sparse_batch* b) {
  require(b != nullptr && b->col_offsets != nullptr, "null sparse batch");
  const Index nnz = b->col_offsets[b->cols];
  require(nnz == 0 || (b->indices && b->values), "null sparse entries");
  return lst::KSparseMat(
      b->rows, std::vector<Index>(b->col_offsets, b->col_offsets + b->cols + 1),
      std::vector<Index>(b->indices, b->indices + nnz),
      std::vector<double>(b->values, b->values + nnz));
}

lst_sparse_batch view_of(const lst::KSparseMat& s) {
  return {s.rows(), s.cols(), s.col_offsets().data(), s.indices().data(),
          s.values().data()};
}

template <typename T>
lst::Matrix<T> to_matrix(const double* p, Index rows, Index cols) {
  require(p != nullptr, "null matrix data");
  lst::Matrix<T> m(rows, cols);
  for (Index k = 0; k < m.size(); ++k) m.data()[k] = static_cast<T>(p[k]);
  return m;
}

template <typename C>
void copy_out(const C& values, double* out) {
  require(out != nullptr, "null output buffer");
  Index k = 0;
  for (auto v : values) out[k++] = static_cast<double>(v);
}

class CallbackLoss final : public lst::SphericalLoss {
 public:
  CallbackLoss(const lst_loss_callbacks& cb, void* user) : cb_(cb), user_(user) {}

  std::string name() const override { return "custom"; }
  bool uses_sum_of_outputs() const override { return cb_.uses_sum_of_outputs != 0; }

  double value(const lst::LossPoint& p) const override {
    double out = 0.0;
    if (cb_.value(user_, p.q, p.s, p.a.size(), p.active.data(), p.a.data(),
                  p.t.data(), &out) != 0) {
      lst::fail(ErrorCode::kLossDomain, "custom loss rejected its input");
    }
    return out;
  }

  lst::LossPartials partials(const lst::LossPoint& p,
                             std::span<double> grad_a) const override {
    lst::LossPartials d;
    if (cb_.partials(user_, p.q, p.s, p.a.size(), p.active.data(), p.a.data(),
                     p.t.data(), &d.dq, &d.ds, grad_a.data()) != 0) {
      lst::fail(ErrorCode::kLossDomain, "custom loss rejected its input");
    }
    return d;
  }

 private:
  lst_loss_callbacks cb_;
  void* user_;
};

lst::StabilizeConfig to_config(const lst_stabilize_config& c) {
  lst::StabilizeConfig out;
  out.sigma_low = c.sigma_low;
  out.sigma_high = c.sigma_high;
  out.n_check = c.n_check;
  out.power_iters = c.power_iters;
  out.strategy = c.strategy == LST_STRATEGY_FULL_SVD
                     ? lst::StabilizeStrategy::kFullSvd
                     : lst::StabilizeStrategy::kPowerScan;
  out.validate();
  return out;
}

template <typename R>
void emit(const R& r, double* loss, double* grad_h) {
  if (loss) *loss = r.loss;
  if (grad_h) copy_out(r.grad_h.values(), grad_h);
}

}  // namespace

extern "C" {

const char* lst_status_string(lst_status status) {
  switch (status) {
    case LST_OK: return "ok";
    case LST_ERR_OUT_OF_MEMORY: return "out of memory";
    case LST_ERR_INTERNAL: return "internal error";
    default: break;
  }
  if (status > LST_OK && status < LST_ERR_OUT_OF_MEMORY) {
    return lst::to_string(static_cast<ErrorCode>(status - 1));
  }
  return "unknown status";
}

const char* lst_last_error(void) { return g_last_error.c_str(); }

const char* lst_version(void) { return "1.0.0"; }

lst_status lst_loss_squared_error(lst_loss** out) {
  return guarded([&] {
    require(out != nullptr, "null output handle");
    *out = new lst_loss{lst::squared_error_loss()};
  });
}

lst_status lst_loss_custom(const lst_loss_callbacks* callbacks, void* user,
                           lst_loss** out) {
  return guarded([&] {
    require(out && callbacks && callbacks->value && callbacks->partials,
            "custom loss needs value and partials callbacks");
    *out = new lst_loss{std::make_shared<CallbackLoss>(*callbacks, user)};
  });
}

void lst_loss_destroy(lst_loss* loss) { delete loss; }

void lst_stabilize_config_default(lst_stabilize_config* out) {
  if (!out) return;
  const lst::StabilizeConfig d;
  out->sigma_low = d.sigma_low;
  out->sigma_high = d.sigma_high;
  out->n_check = d.n_check;
  out->power_iters = d.power_iters;
  out->strategy = LST_STRATEGY_POWER_SCAN;
}

/* ---- factored -------------------------------------------------------- */

lst_status lst_factored_create(size_t output_dim, size_t hidden_dim,
                               lst_precision precision, lst_v_init init,
                               uint64_t seed, double scale,
                               lst_factored** out) {
  return guarded([&] {
    require(out != nullptr, "null output handle");
    lst::LayerInit li;
    li.kind = init == LST_INIT_RANDOM ? lst::VInit::kRandom : lst::VInit::kZeros;
    li.seed = seed;
    li.scale = scale;
    if (precision == LST_F32) {
      *out = new lst_factored{lst::BasicFactoredLayer<float>(output_dim, hidden_dim, li)};
    } else {
      *out = new lst_factored{lst::BasicFactoredLayer<double>(output_dim, hidden_dim, li)};
    }
  });
}

lst_status lst_factored_from_weights(size_t output_dim, size_t hidden_dim,
                                     const double* w, lst_factored** out) {
  return guarded([&] {
    require(out != nullptr, "null output handle");
    *out = new lst_factored{lst::FactoredOutputLayer::from_weights(
        to_matrix<double>(w, output_dim, hidden_dim))};
  });
}

void lst_factored_destroy(lst_factored* layer) { delete layer; }

lst_status lst_factored_dims(const lst_factored* layer, size_t* output_dim,
                             size_t* hidden_dim) {
  return guarded([&] {
    require(layer != nullptr, "null layer");
    std::visit([&](const auto& l) {
      if (output_dim) *output_dim = l.output_dim();
      if (hidden_dim) *hidden_dim = l.hidden_dim();
    }, layer->layer);
  });
}

lst_status lst_factored_mse_update(lst_factored* layer, const double* h,
                                   size_t m, const lst_sparse_batch* y,
                                   double eta, double* loss, double* grad_h) {
  return guarded([&] {
    require(layer != nullptr, "null layer");
    const lst::KSparseMat ys = to_sparse(y);
    std::visit([&](auto& l) {
      using T = typename std::decay_t<decltype(l.v())>::value_type;
      emit(l.minibatch_mse_update(to_matrix<T>(h, l.hidden_dim(), m), ys,
                                  static_cast<T>(eta)),
           loss, grad_h);
    }, layer->layer);
  });
}

lst_status lst_factored_online_update(lst_factored* layer, const double* h,
                                      size_t nnz, const size_t* indices,
                                      const double* values, double eta,
                                      double* loss, double* grad_h) {
  return guarded([&] {
    require(layer != nullptr, "null layer");
    require(nnz == 0 || (indices && values), "null target entries");
    std::visit([&](auto& l) {
      using T = typename std::decay_t<decltype(l.v())>::value_type;
      const lst::KSparseVec y(l.output_dim(),
                              std::vector<Index>(indices, indices + nnz),
                              std::vector<double>(values, values + nnz));
      const lst::Matrix<T> hv = to_matrix<T>(h, l.hidden_dim(), 1);
      const auto r = l.online_mse_update(hv.values(), y, static_cast<T>(eta));
      if (loss) *loss = r.loss;
      if (grad_h) copy_out(r.grad_h, grad_h);
    }, layer->layer);
  });
}

lst_status lst_factored_spherical_update(lst_factored* layer, const double* h,
                                         size_t m, const lst_sparse_batch* y,
                                         double eta, const lst_loss* loss,
                                         double* total_loss, double* grad_h) {
  return guarded([&] {
    require(layer != nullptr && loss != nullptr, "null layer or loss");
    const lst::KSparseMat ys = to_sparse(y);
    std::visit([&](auto& l) {
      using T = typename std::decay_t<decltype(l.v())>::value_type;
      emit(l.spherical_update(to_matrix<T>(h, l.hidden_dim(), m), ys,
                              static_cast<T>(eta), *loss->impl),
           total_loss, grad_h);
    }, layer->layer);
  });
}

lst_status lst_factored_materialize(const lst_factored* layer, double* out) {
  return guarded([&] {
    require(layer != nullptr, "null layer");
    std::visit([&](const auto& l) { copy_out(l.materialize_w().values(), out); },
               layer->layer);
  });
}

lst_status lst_factored_get(const lst_factored* layer, lst_factored_part part,
                            double* out) {
  return guarded([&] {
    require(layer != nullptr, "null layer");
    std::visit([&](const auto& l) {
      switch (part) {
        case LST_PART_V: copy_out(l.v().values(), out); break;
        case LST_PART_U: copy_out(l.u().values(), out); break;
        case LST_PART_OMEGA: copy_out(l.omega(), out); break;
        case LST_PART_Q: copy_out(l.q().values(), out); break;
        case LST_PART_U_INV_T: copy_out(l.u_inv_t().values(), out); break;
        case LST_PART_WBAR: copy_out(l.wbar(), out); break;
        default: require(false, "unknown layer part");
      }
    }, layer->layer);
  });
}

lst_status lst_factored_refresh_inverse(lst_factored* layer) {
  return guarded([&] {
    require(layer != nullptr, "null layer");
    std::visit([](auto& l) { l.refresh_inverse(); }, layer->layer);
  });
}

lst_status lst_factored_inverse_residual(const lst_factored* layer,
                                         double* out) {
  return guarded([&] {
    require(layer != nullptr && out != nullptr, "null argument");
    *out = std::visit([](const auto& l) { return l.inverse_residual(); },
                      layer->layer);
  });
}

lst_status lst_factored_singular_values(const lst_factored* layer,
                                        double* out) {
  return guarded([&] {
    require(layer != nullptr, "null layer");
    const lst::SvdResult svd = std::visit(
        [](const auto& l) { return lst::svd_square(l.u().template cast<double>()); },
        layer->layer);
    copy_out(svd.singular_values, out);
  });
}

lst_status lst_factored_condition(const lst_factored* layer, double* out) {
  return guarded([&] {
    require(layer != nullptr && out != nullptr, "null argument");
    *out = std::visit(
        [](const auto& l) {
          return lst::condition_number(l.u().template cast<double>());
        },
        layer->layer);
  });
}

lst_status lst_factored_restore_pristine(lst_factored* layer) {
  return guarded([&] {
    require(layer != nullptr, "null layer");
    std::visit([](auto& l) { lst::restore_pristine(l); }, layer->layer);
  });
}

lst_status lst_factored_fix_singular_value(lst_factored* layer, double sigma,
                                           const double* u,
                                           double sigma_target) {
  return guarded([&] {
    require(layer != nullptr && u != nullptr, "null argument");
    std::visit([&](auto& l) {
      lst::fix_singular_value(l, sigma, std::span<const double>(u, l.hidden_dim()),
                              sigma_target);
    }, layer->layer);
  });
}

lst_status lst_factored_stabilize(lst_factored* layer,
                                  const lst_stabilize_config* config,
                                  lst_stabilize_report* report,
                                  double* fixed_before, double* fixed_after,
                                  size_t capacity) {
  return guarded([&] {
    require(layer != nullptr, "null layer");
    lst::StabilizeConfig cfg;
    if (config) cfg = to_config(*config);
    const lst::StabilizeReport r = std::visit(
        [&](auto& l) { return lst::singular_stabilize(l, cfg); }, layer->layer);
    if (report) {
      report->values_fixed = r.values_fixed.size();
      report->cond_before = r.cond_before;
      report->cond_after = r.cond_after;
    }
    for (Index k = 0; k < r.values_fixed.size() && k < capacity; ++k) {
      if (fixed_before) fixed_before[k] = r.values_fixed[k].before;
      if (fixed_after) fixed_after[k] = r.values_fixed[k].after;
    }
  });
}

lst_status lst_factored_set_stabilization(lst_factored* layer,
                                          const lst_stabilize_config* config) {
  return guarded([&] {
    require(layer != nullptr, "null layer");
    std::optional<lst::StabilizeConfig> cfg;
    if (config) cfg = to_config(*config);
    std::visit([&](auto& l) { l.set_stabilization(cfg); }, layer->layer);
  });
}

lst_status lst_factored_save(const lst_factored* layer, const char* path) {
  return guarded([&] {
    require(layer != nullptr && path != nullptr, "null argument");
    const auto* l = std::get_if<lst::FactoredOutputLayer>(&layer->layer);
    require(l != nullptr, "checkpoints hold 64-bit layers only");
    lst::save_factored(path, *l);
  });
}

lst_status lst_factored_load(const char* path, lst_factored** out) {
  return guarded([&] {
    require(path != nullptr && out != nullptr, "null argument");
    *out = new lst_factored{lst::load_factored(path)};
  });
}

/* ---- naive ----------------------------------------------------------- */

lst_status lst_naive_create(size_t output_dim, size_t hidden_dim,
                            lst_precision precision, lst_naive** out) {
  return guarded([&] {
    require(out != nullptr, "null output handle");
    if (precision == LST_F32) {
      *out = new lst_naive{lst::BasicNaiveLayer<float>(output_dim, hidden_dim)};
    } else {
      *out = new lst_naive{lst::BasicNaiveLayer<double>(output_dim, hidden_dim)};
    }
  });
}

lst_status lst_naive_from_weights(size_t output_dim, size_t hidden_dim,
                                  const double* w, lst_naive** out) {
  return guarded([&] {
    require(out != nullptr, "null output handle");
    *out = new lst_naive{
        lst::NaiveOutputLayer(to_matrix<double>(w, output_dim, hidden_dim))};
  });
}

void lst_naive_destroy(lst_naive* layer) { delete layer; }

lst_status lst_naive_dims(const lst_naive* layer, size_t* output_dim,
                          size_t* hidden_dim) {
  return guarded([&] {
    require(layer != nullptr, "null layer");
    std::visit([&](const auto& l) {
      if (output_dim) *output_dim = l.output_dim();
      if (hidden_dim) *hidden_dim = l.hidden_dim();
    }, layer->layer);
  });
}

lst_status lst_naive_mse_step(lst_naive* layer, const double* h, size_t m,
                              const lst_sparse_batch* y, double eta,
                              double* loss, double* grad_h) {
  return guarded([&] {
    require(layer != nullptr, "null layer");
    const lst::KSparseMat ys = to_sparse(y);
    std::visit([&](auto& l) {
      using T = typename std::decay_t<decltype(l.w())>::value_type;
      emit(l.mse_step(to_matrix<T>(h, l.hidden_dim(), m), ys, static_cast<T>(eta)),
           loss, grad_h);
    }, layer->layer);
  });
}

lst_status lst_naive_spherical_step(lst_naive* layer, const double* h, size_t m,
                                    const lst_sparse_batch* y, double eta,
                                    const lst_loss* loss, double* total_loss,
                                    double* grad_h) {
  return guarded([&] {
    require(layer != nullptr && loss != nullptr, "null layer or loss");
    const lst::KSparseMat ys = to_sparse(y);
    std::visit([&](auto& l) {
      using T = typename std::decay_t<decltype(l.w())>::value_type;
      emit(l.spherical_step(to_matrix<T>(h, l.hidden_dim(), m), ys,
                            static_cast<T>(eta), *loss->impl),
           total_loss, grad_h);
    }, layer->layer);
  });
}

lst_status lst_naive_weights(const lst_naive* layer, double* out) {
  return guarded([&] {
    require(layer != nullptr, "null layer");
    std::visit([&](const auto& l) { copy_out(l.w().values(), out); }, layer->layer);
  });
}

lst_status lst_naive_save(const lst_naive* layer, const char* path) {
  return guarded([&] {
    require(layer != nullptr && path != nullptr, "null argument");
    const auto* l = std::get_if<lst::NaiveOutputLayer>(&layer->layer);
    require(l != nullptr, "checkpoints hold 64-bit layers only");
    lst::save_naive(path, *l);
  });
}

lst_status lst_naive_load(const char* path, lst_naive** out) {
  return guarded([&] {
    require(path != nullptr && out != nullptr, "null argument");
    *out = new lst_naive{lst::load_naive(path)};
  });
}

/* ---- synthetic ------------------------------------------------------- */

lst_status lst_synthetic_create(const lst_synthetic_spec* spec,
                                lst_synthetic** out) {
  return guarded([&] {
    require(spec != nullptr && out != nullptr, "null argument");
    lst::SyntheticSpec s;
    s.input_dim = spec->input_dim;
    s.output_dim = spec->output_dim;
    s.hidden_dim = spec->hidden_dim;
    s.k = spec->k;
    s.batch = spec->batch;
    s.count = spec->count;
    s.seed = spec->seed;
    s.dist = spec->dist == LST_VALUES_UNIT ? lst::ValueDist::kUnit
                                           : lst::ValueDist::kGaussian;
    *out = new lst_synthetic{lst::SyntheticStream(s), {}};
  });
}

void lst_synthetic_destroy(lst_synthetic* stream) { delete stream; }

lst_status lst_synthetic_next(lst_synthetic* stream, lst_batch_view* out,
                              int* has_batch) {
  return guarded([&] {
    require(stream && out && has_batch, "null argument");
    *has_batch = stream->stream.next(stream->current) ? 1 : 0;
    if (*has_batch) {
      out->x = view_of(stream->current.x);
      out->y = view_of(stream->current.y);
      out->h = stream->current.h.data();
    }
  });
}

lst_status lst_synthetic_reset(lst_synthetic* stream) {
  return guarded([&] {
    require(stream != nullptr, "null stream");
    stream->stream.reset();
  });
}

/* ---- n-gram ---------------------------------------------------------- */

lst_status lst_ngram_ingest_file(const char* path, size_t n, size_t vocab_cap,
                                 lst_ngram** out) {
  return guarded([&] {
    require(path && out, "null argument");
    *out = new lst_ngram{lst::ingest_ngrams_file(path, n, vocab_cap), {}, {}};
  });
}

lst_status lst_ngram_ingest_text(const char* text, size_t n, size_t vocab_cap,
                                 lst_ngram** out) {
  return guarded([&] {
    require(text && out, "null argument");
    std::istringstream in(text);
    *out = new lst_ngram{lst::ingest_ngrams(in, n, vocab_cap), {}, {}};
  });
}

lst_status lst_ngram_load_cache(const char* path, lst_ngram** out) {
  return guarded([&] {
    require(path && out, "null argument");
    *out = new lst_ngram{lst::load_dataset_cache(path), {}, {}};
  });
}

lst_status lst_ngram_save_cache(const lst_ngram* data, const char* path) {
  return guarded([&] {
    require(data && path, "null argument");
    lst::save_dataset_cache(path, data->data);
  });
}

void lst_ngram_destroy(lst_ngram* data) { delete data; }

lst_status lst_ngram_get_info(const lst_ngram* data, lst_ngram_info* out) {
  return guarded([&] {
    require(data && out, "null argument");
    out->n = data->data.n;
    out->vocab_cap = data->data.vocab_cap;
    out->vocab_size = data->data.vocab.size();
    out->examples = data->data.examples.size();
    out->input_dim = data->data.input_dim();
    out->output_dim = data->data.output_dim();
  });
}

lst_status lst_ngram_batch(lst_ngram* data, size_t begin, size_t count,
                           lst_sparse_batch* x, lst_sparse_batch* y) {
  return guarded([&] {
    require(data && x && y, "null argument");
    data->x = data->data.inputs(begin, count);
    data->y = data->data.targets(begin, count);
    *x = view_of(data->x);
    *y = view_of(data->y);
  });
}

/* ---- network --------------------------------------------------------- */

lst_status lst_network_create(const lst_network_config* config,
                              lst_network** out) {
  return guarded([&] {
    require(config && out, "null argument");
    require(config->n_hidden == 0 || config->hidden, "null hidden widths");
    lst::NetworkConfig c;
    c.input_dim = config->input_dim;
    c.hidden.assign(config->hidden, config->hidden + config->n_hidden);
    c.activation = config->activation == LST_ACT_IDENTITY
                       ? lst::Activation::kIdentity
                       : lst::Activation::kTanh;
    c.output_dim = config->output_dim;
    c.output = config->output == LST_OUTPUT_NAIVE ? lst::OutputKind::kNaive
                                                  : lst::OutputKind::kFactored;
    c.seed = config->seed;
    c.output_init_scale = config->output_init_scale;
    if (config->stabilize) c.stabilization = to_config(*config->stabilize);
    *out = new lst_network{lst::Network(c)};
  });
}

void lst_network_destroy(lst_network* net) { delete net; }

lst_status lst_network_train_step(lst_network* net, const lst_sparse_batch* x,
                                  const lst_sparse_batch* y, double eta,
                                  const lst_loss* loss, double* total_loss) {
  return guarded([&] {
    require(net != nullptr, "null network");
    const double l = net->net.train_step(to_sparse(x), to_sparse(y), eta,
                                         loss ? loss->impl.get() : nullptr);
    if (total_loss) *total_loss = l;
  });
}

lst_status lst_network_evaluate(lst_network* net, const lst_sparse_batch* x,
                                const lst_sparse_batch* y,
                                const lst_loss* loss, double* total_loss) {
  return guarded([&] {
    require(net != nullptr, "null network");
    const double l = net->net.evaluate(to_sparse(x), to_sparse(y),
                                       loss ? loss->impl.get() : nullptr);
    if (total_loss) *total_loss = l;
  });
}

lst_status lst_network_output_dims(const lst_network* net, size_t* output_dim,
                                   size_t* hidden_dim) {
  return guarded([&] {
    require(net != nullptr, "null network");
    const auto& c = net->net.config();
    if (output_dim) *output_dim = c.output_dim;
    if (hidden_dim) *hidden_dim = c.hidden.back() + 1;
  });
}

lst_status lst_network_output_weights(const lst_network* net, double* out) {
  return guarded([&] {
    require(net != nullptr, "null network");
    copy_out(net->net.output_weights().values(), out);
  });
}

lst_status lst_network_save(const lst_network* net, const char* path) {
  return guarded([&] {
    require(net && path, "null argument");
    net->net.save(path);
  });
}

lst_status lst_network_load(const char* path, lst_network** out) {
  return guarded([&] {
    require(path && out, "null argument");
    *out = new lst_network{lst::Network::load(path)};
  });
}

}  // extern "C"
