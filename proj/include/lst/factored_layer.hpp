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
#include <optional>
#include <span>
#include <vector>

#include "lst/loss.hpp"
#include "lst/matrix.hpp"
#include "lst/sparse.hpp"
#include "lst/stabilize_config.hpp"

namespace lst {

namespace detail {
struct StabilizerAccess;
}

enum class VInit { kZeros, kRandom };

struct LayerInit {
  VInit kind = VInit::kZeros;
  std::uint64_t seed = 0;
  double scale = 0.01;  // V entries uniform in [-scale, scale]
};

// Quantities shared by loss evaluation, the upstream gradient and the update.
// `a` holds O = WH at the target entries, in the target's storage order.
template <typename T>
struct ForwardStats {
  Matrix<T> h_hat;    // Q H        (d x m)
  Matrix<T> m_hat;    // H^T Q H    (m x m)
  Vector q;           // squared output norms, diag(m_hat)
  Vector s;           // output sums H^T wbar (zeros unless requested)
  Matrix<T> h_tilde;  // U H        (d x m)
  Vector h_omega;     // H^T omega
  Vector a;
};

template <typename T>
struct UpdateResult {
  double loss = 0.0;
  Matrix<T> grad_h;  // d x m
};

template <typename T>
struct OnlineResult {
  double loss = 0.0;
  std::vector<T> grad_h;
};

// Linear output layer W = V U + 1_D omega^T (D x d) that is never stored
// explicitly. Alongside V, U and omega the layer keeps Q = W^T W,
// wbar = W^T 1_D and U^{-T}, which lets every update run in O(m d^2) plus
// O(K m d) for the rows of V selected by the sparse targets.
//
// Updates follow plain SGD on W with the learning rate applied as
// W <- W - eta * dL/dW.
template <typename T>
class BasicFactoredLayer {
 public:
  BasicFactoredLayer(Index output_dim, Index hidden_dim, LayerInit init = {});

  // Starts from an explicit W (V = W, U = I, omega = 0).
  static BasicFactoredLayer from_weights(const Matrix<T>& w);

  // Reassembles a layer from stored state; shapes are validated.
  static BasicFactoredLayer from_state(Matrix<T> v, Matrix<T> u,
                                       std::vector<T> omega, Matrix<T> q,
                                       Matrix<T> u_inv_t, std::vector<T> wbar);

  Index output_dim() const noexcept { return v_.rows(); }
  Index hidden_dim() const noexcept { return u_.rows(); }

  const Matrix<T>& v() const noexcept { return v_; }
  const Matrix<T>& u() const noexcept { return u_; }
  const std::vector<T>& omega() const noexcept { return omega_; }
  const Matrix<T>& q() const noexcept { return q_; }
  const Matrix<T>& u_inv_t() const noexcept { return u_inv_t_; }
  const std::vector<T>& wbar() const noexcept { return wbar_; }
  Index update_count() const noexcept { return updates_; }

  // Dense W. O(D d^2); for tests, checkpoints and final export.
  Matrix<T> materialize_w() const;

  ForwardStats<T> forward_stats(const Matrix<T>& h, const KSparseMat& targets,
                                bool needs_s) const;

  // Single example, squared error, Sherman-Morrison tracking of U^{-T}.
  OnlineResult<T> online_mse_update(std::span<const T> h, const KSparseVec& y,
                                    T eta);

  // Minibatch squared error; h is d x m, y is D x m.
  UpdateResult<T> minibatch_mse_update(const Matrix<T>& h, const KSparseMat& y,
                                       T eta);

  // Minibatch update for any spherical loss.
  UpdateResult<T> spherical_update(const Matrix<T>& h, const KSparseMat& y,
                                   T eta, const SphericalLoss& loss);

  // Recomputes U^{-T} from scratch.
  void refresh_inverse();

  // max |(U^{-T})^T U - I|
  double inverse_residual() const;

  // When set, singular_stabilize runs after every n_check-th update.
  void set_stabilization(std::optional<StabilizeConfig> config);
  const std::optional<StabilizeConfig>& stabilization() const noexcept {
    return stabilization_;
  }

 private:
  friend struct detail::StabilizerAccess;

  BasicFactoredLayer() = default;

  void check_batch(const Matrix<T>& h, const KSparseMat& y) const;
  void after_update();

  Matrix<T> v_;
  Matrix<T> u_;
  std::vector<T> omega_;
  Matrix<T> q_;
  Matrix<T> u_inv_t_;
  std::vector<T> wbar_;
  Index updates_ = 0;
  std::optional<StabilizeConfig> stabilization_;
};

using FactoredOutputLayer = BasicFactoredLayer<double>;

extern template class BasicFactoredLayer<float>;
extern template class BasicFactoredLayer<double>;

}  // namespace lst
