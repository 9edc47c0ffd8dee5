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

#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "lst/factored_layer.hpp"
#include "lst/loss.hpp"
#include "lst/matrix.hpp"
#include "lst/naive_layer.hpp"
#include "lst/sparse.hpp"
#include "lst/stabilize_config.hpp"

namespace lst {

enum class Activation { kTanh, kIdentity };

const char* to_string(Activation a) noexcept;
Activation activation_from_string(const std::string& name);

// a = W^T x + b with W stored D_in x width, so each active input coordinate
// selects one row.
struct SparseInputLayer {
  DenseMat w;
  Vector b;
};

DenseMat sparse_input_forward(const SparseInputLayer& layer, const KSparseMat& x);

// W <- W - eta X grad^T on the active rows only; b <- b - eta rowsum(grad).
void sparse_input_update(SparseInputLayer& layer, const KSparseMat& x,
                         const DenseMat& grad_a, double eta);

struct DenseLayer {
  DenseMat w;  // fan_in x fan_out
  Vector b;
};

enum class OutputKind { kFactored, kNaive };

struct NetworkConfig {
  Index input_dim = 1;
  std::vector<Index> hidden{16};  // widths; hidden[0] is the sparse input layer
  Activation activation = Activation::kTanh;
  Index output_dim = 1;
  OutputKind output = OutputKind::kFactored;
  std::uint64_t seed = 0;
  double output_init_scale = 0.0;  // 0 keeps the output layer at zero
  std::optional<StabilizeConfig> stabilization;

  void validate() const;
};

class Network {
 public:
  explicit Network(const NetworkConfig& config);

  const NetworkConfig& config() const noexcept { return config_; }
  const SparseInputLayer& input_layer() const noexcept { return input_; }
  SparseInputLayer& input_layer() noexcept { return input_; }
  const std::vector<DenseLayer>& hidden_layers() const noexcept { return hidden_; }
  bool has_factored_output() const noexcept {
    return std::holds_alternative<FactoredOutputLayer>(output_);
  }
  const FactoredOutputLayer& factored_output() const;
  const NaiveOutputLayer& naive_output() const;

  // Dense output weights regardless of the output implementation.
  DenseMat output_weights() const;

  // Returns the summed minibatch loss. A null loss selects the dedicated
  // squared-error path of the output layer.
  double train_step(const KSparseMat& x, const KSparseMat& y, double eta,
                    const SphericalLoss* loss = nullptr);

  // Loss without changing any parameter.
  double evaluate(const KSparseMat& x, const KSparseMat& y,
                  const SphericalLoss* loss = nullptr);

  // Hidden representation handed to the output layer, bias row included.
  DenseMat output_input(const KSparseMat& x) const;

  void save(const std::string& path) const;
  static Network load(const std::string& path);

 private:
  struct Trace {
    std::vector<DenseMat> h;  // h[0] input-layer activations, ...
  };

  Network() = default;
  DenseMat forward(const KSparseMat& x, Trace& trace) const;
  UpdateResult<double> output_step(const DenseMat& h, const KSparseMat& y,
                                   double eta, const SphericalLoss* loss);

  NetworkConfig config_;
  SparseInputLayer input_;
  std::vector<DenseLayer> hidden_;
  std::variant<FactoredOutputLayer, NaiveOutputLayer> output_{
      NaiveOutputLayer(1, 1)};
};

}  // namespace lst
