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

#include "lst/network.hpp"

#include <cmath>
#include <fstream>
#include <random>

#include <json.hpp>

#include "lst/checkpoint.hpp"
#include "lst/kernels.hpp"

namespace lst {

const char* to_string(Activation a) noexcept {
  return a == Activation::kTanh ? "tanh" : "identity";
}

Activation activation_from_string(const std::string& name) {
  if (name == "tanh") return Activation::kTanh;
  if (name == "identity") return Activation::kIdentity;
  fail(ErrorCode::kInvalidArgument, "unknown activation '" + name + "'");
}

DenseMat sparse_input_forward(const SparseInputLayer& layer,
                              const KSparseMat& x) {
  if (x.rows() != layer.w.rows()) {
    fail(ErrorCode::kDimensionMismatch, "sparse input: dimension of x");
  }
  const DenseMat xt_w = sparse_transpose_times_dense(x, layer.w);  // m x width
  DenseMat a = xt_w.transposed();
  for (Index i = 0; i < a.rows(); ++i)
    for (Index j = 0; j < a.cols(); ++j) a(i, j) += layer.b[i];
  return a;
}

void sparse_input_update(SparseInputLayer& layer, const KSparseMat& x,
                         const DenseMat& grad_a, double eta) {
  if (x.rows() != layer.w.rows() || grad_a.rows() != layer.w.cols() ||
      grad_a.cols() != x.cols()) {
    fail(ErrorCode::kDimensionMismatch, "sparse input update: shapes");
  }
  if (eta == 0.0) return;
  scatter_row_update(layer.w, x, grad_a.transposed(), -eta);
  for (Index i = 0; i < grad_a.rows(); ++i) {
    double acc = 0.0;
    for (Index j = 0; j < grad_a.cols(); ++j) acc += grad_a(i, j);
    layer.b[i] -= eta * acc;
  }
}

void NetworkConfig::validate() const {
  if (input_dim < 1 || output_dim < 1 || hidden.empty()) {
    fail(ErrorCode::kInvalidArgument,
         "network: need input/output dims and at least one hidden layer");
  }
  for (Index w : hidden)
    if (w < 1) fail(ErrorCode::kInvalidArgument, "network: zero-width layer");
  if (stabilization) stabilization->validate();
}

namespace {

void init_uniform(std::mt19937_64& gen, DenseMat& w, Vector& b, Index fan_in) {
  const double r = 1.0 / std::sqrt(static_cast<double>(fan_in));
  std::uniform_real_distribution<double> dist(-r, r);
  for (double& v : w.values()) v = dist(gen);
  for (double& v : b) v = dist(gen);
}

void activate(DenseMat& a, Activation act) {
  if (act == Activation::kTanh)
    for (double& v : a.values()) v = std::tanh(v);
}

// grad wrt pre-activation given grad wrt activation h = act(a)
void backprop_activation(DenseMat& g, const DenseMat& h, Activation act) {
  if (act != Activation::kTanh) return;
  for (Index k = 0; k < g.size(); ++k) {
    const double y = h.data()[k];
    g.data()[k] *= 1.0 - y * y;
  }
}

DenseMat with_bias_row(const DenseMat& h) {
  DenseMat out(h.rows() + 1, h.cols());
  std::copy(h.values().begin(), h.values().end(), out.values().begin());
  for (Index j = 0; j < h.cols(); ++j) out(h.rows(), j) = 1.0;
  return out;
}

}  // namespace

Network::Network(const NetworkConfig& config) : config_(config) {
  config_.validate();
  std::mt19937_64 gen(config_.seed);
  input_.w = DenseMat(config_.input_dim, config_.hidden[0]);
  input_.b.assign(config_.hidden[0], 0.0);
  // fan-in of the sparse layer is its input dimension
  init_uniform(gen, input_.w, input_.b, config_.input_dim);
  for (Index k = 1; k < config_.hidden.size(); ++k) {
    DenseLayer layer{DenseMat(config_.hidden[k - 1], config_.hidden[k]),
                     Vector(config_.hidden[k], 0.0)};
    init_uniform(gen, layer.w, layer.b, config_.hidden[k - 1]);
    hidden_.push_back(std::move(layer));
  }
  const Index d = config_.hidden.back() + 1;
  LayerInit init;
  if (config_.output_init_scale > 0.0) {
    init.kind = VInit::kRandom;
    init.scale = config_.output_init_scale;
    init.seed = gen();
  }
  FactoredOutputLayer factored(config_.output_dim, d, init);
  if (config_.output == OutputKind::kFactored) {
    factored.set_stabilization(config_.stabilization);
    output_ = std::move(factored);
  } else {
    output_ = NaiveOutputLayer(factored.materialize_w());
  }
}

const FactoredOutputLayer& Network::factored_output() const {
  if (!has_factored_output()) fail(ErrorCode::kInvalidArgument, "output is naive");
  return std::get<FactoredOutputLayer>(output_);
}

const NaiveOutputLayer& Network::naive_output() const {
  if (has_factored_output()) fail(ErrorCode::kInvalidArgument, "output is factored");
  return std::get<NaiveOutputLayer>(output_);
}

DenseMat Network::output_weights() const {
  return has_factored_output() ? factored_output().materialize_w()
                               : naive_output().w();
}

DenseMat Network::forward(const KSparseMat& x, Trace& trace) const {
  trace.h.clear();
  DenseMat h = sparse_input_forward(input_, x);
  activate(h, config_.activation);
  trace.h.push_back(h);
  for (const DenseLayer& layer : hidden_) {
    DenseMat a = matmul(layer.w, h, Trans::kYes, Trans::kNo);
    for (Index i = 0; i < a.rows(); ++i)
      for (Index j = 0; j < a.cols(); ++j) a(i, j) += layer.b[i];
    activate(a, config_.activation);
    h = std::move(a);
    trace.h.push_back(h);
  }
  return with_bias_row(h);
}

DenseMat Network::output_input(const KSparseMat& x) const {
  Trace trace;
  return forward(x, trace);
}

UpdateResult<double> Network::output_step(const DenseMat& h,
                                          const KSparseMat& y, double eta,
                                          const SphericalLoss* loss) {
  if (auto* f = std::get_if<FactoredOutputLayer>(&output_)) {
    return loss ? f->spherical_update(h, y, eta, *loss)
                : f->minibatch_mse_update(h, y, eta);
  }
  auto& n = std::get<NaiveOutputLayer>(output_);
  return loss ? n.spherical_step(h, y, eta, *loss) : n.mse_step(h, y, eta);
}

double Network::train_step(const KSparseMat& x, const KSparseMat& y,
                           double eta, const SphericalLoss* loss) {
  if (x.cols() != y.cols() || x.cols() < 1) {
    fail(ErrorCode::kDimensionMismatch, "train_step: batch sizes");
  }
  Trace trace;
  const DenseMat h_out = forward(x, trace);
  const UpdateResult<double> res = output_step(h_out, y, eta, loss);
  if (eta == 0.0) return res.loss;

  // drop the bias row's gradient
  DenseMat g(h_out.rows() - 1, h_out.cols());
  std::copy_n(res.grad_h.values().begin(), g.size(), g.values().begin());

  for (Index k = hidden_.size(); k-- > 0;) {
    backprop_activation(g, trace.h[k + 1], config_.activation);
    DenseLayer& layer = hidden_[k];
    DenseMat g_prev = matmul(layer.w, g);  // with pre-update weights
    matmul_accumulate(layer.w, trace.h[k], g, -eta, Trans::kNo, Trans::kYes);
    for (Index i = 0; i < g.rows(); ++i) {
      double acc = 0.0;
      for (Index j = 0; j < g.cols(); ++j) acc += g(i, j);
      layer.b[i] -= eta * acc;
    }
    g = std::move(g_prev);
  }
  backprop_activation(g, trace.h[0], config_.activation);
  sparse_input_update(input_, x, g, eta);
  return res.loss;
}

double Network::evaluate(const KSparseMat& x, const KSparseMat& y,
                         const SphericalLoss* loss) {
  return output_step(output_input(x), y, 0.0, loss).loss;
}

namespace {

constexpr std::uint64_t kModelVersion = 1;

}  // namespace

void Network::save(const std::string& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorCode::kIo, "cannot open " + path + " for writing");
  nlohmann::json manifest = {
      {"input_dim", config_.input_dim},
      {"hidden", config_.hidden},
      {"activation", to_string(config_.activation)},
      {"output_dim", config_.output_dim},
      {"output", has_factored_output() ? "factored" : "naive"},
      {"seed", config_.seed},
  };
  const std::string text = manifest.dump();
  io::write_magic(out, "LSTA");
  io::write_u64(out, kModelVersion);
  io::write_u64(out, text.size());
  io::write_bytes(out, text);
  io::write_matrix(out, input_.w);
  io::write_f64s(out, input_.b);
  for (const DenseLayer& layer : hidden_) {
    io::write_matrix(out, layer.w);
    io::write_f64s(out, layer.b);
  }
  if (has_factored_output()) {
    write_factored(out, factored_output());
  } else {
    write_naive(out, naive_output());
  }
  if (!out) fail(ErrorCode::kIo, "model checkpoint write failed");
}

Network Network::load(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::kIo, "cannot open " + path);
  io::expect_magic(in, "LSTA");
  if (io::read_u64(in) != kModelVersion) {
    fail(ErrorCode::kFormat, "unsupported model checkpoint version");
  }
  const std::uint64_t len = io::read_u64(in);
  if (len > (1u << 24)) fail(ErrorCode::kFormat, "manifest too large");
  Network net;
  try {
    const auto manifest = nlohmann::json::parse(io::read_bytes(in, len));
    net.config_.input_dim = manifest.at("input_dim").get<Index>();
    net.config_.hidden = manifest.at("hidden").get<std::vector<Index>>();
    net.config_.activation =
        activation_from_string(manifest.at("activation").get<std::string>());
    net.config_.output_dim = manifest.at("output_dim").get<Index>();
    const auto kind = manifest.at("output").get<std::string>();
    if (kind != "factored" && kind != "naive") {
      fail(ErrorCode::kFormat, "unknown output kind '" + kind + "'");
    }
    net.config_.output = kind == "factored" ? OutputKind::kFactored : OutputKind::kNaive;
    net.config_.seed = manifest.value("seed", std::uint64_t{0});
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::kFormat, std::string("model manifest: ") + e.what());
  }
  net.config_.validate();

  const auto& cfg = net.config_;
  auto expect_shape = [](const DenseMat& m, Index r, Index c) {
    if (m.rows() != r || m.cols() != c) {
      fail(ErrorCode::kFormat, "model checkpoint: layer shape disagrees with manifest");
    }
  };
  net.input_.w = io::read_matrix(in);
  expect_shape(net.input_.w, cfg.input_dim, cfg.hidden[0]);
  net.input_.b.resize(cfg.hidden[0]);
  io::read_f64s(in, net.input_.b);
  for (Index k = 1; k < cfg.hidden.size(); ++k) {
    DenseLayer layer{io::read_matrix(in), Vector(cfg.hidden[k])};
    expect_shape(layer.w, cfg.hidden[k - 1], cfg.hidden[k]);
    io::read_f64s(in, layer.b);
    net.hidden_.push_back(std::move(layer));
  }
  if (cfg.output == OutputKind::kFactored) {
    net.output_ = read_factored(in);
  } else {
    net.output_ = read_naive(in);
  }
  const Index d = cfg.hidden.back() + 1;
  const DenseMat w = net.output_weights();
  if (w.rows() != cfg.output_dim || w.cols() != d) {
    fail(ErrorCode::kFormat, "model checkpoint: output layer shape");
  }
  return net;
}

}  // namespace lst
