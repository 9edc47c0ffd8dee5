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

#include "lst/factored_layer.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <string>

#include "lst/kernels.hpp"
#include "lst/stabilizer.hpp"

namespace lst {

namespace {

// Pivot magnitude below which the small Woodbury / Sherman-Morrison system
// (equivalently the updated U) is treated as singular.
constexpr double kSingularUpdateFloor = 1e-12;

template <typename T>
void add_outer(Matrix<T>& a, std::span<const T> x, std::span<const T> y,
               T alpha) {
  for (Index i = 0; i < a.rows(); ++i) {
    const T xi = alpha * x[i];
    T* row = a.data() + i * a.cols();
    for (Index j = 0; j < a.cols(); ++j) row[j] += xi * y[j];
  }
}

// x^T H for each column: out[j] = sum_i H(i, j) x[i]
template <typename T>
std::vector<T> columns_dot(const Matrix<T>& h, std::span<const T> x) {
  return matvec(h, x, Trans::kYes);
}

template <typename T>
bool any_nonzero(const std::vector<T>& x) {
  return std::any_of(x.begin(), x.end(), [](T v) { return v != T{0}; });
}

template <typename T>
Matrix<T> transposed_inverse(const Matrix<T>& u) {
  return invert_square(u.template cast<double>()).transposed().template cast<T>();
}

// Q <- Q - eta (G H^T + H G^T) + c (H M) H^T
template <typename T>
void update_gram(Matrix<T>& q, const Matrix<T>& g, const Matrix<T>& h,
                 const Matrix<T>& m, T eta, T c) {
  const Matrix<T> p = matmul(g, h, Trans::kNo, Trans::kYes);
  for (Index i = 0; i < q.rows(); ++i)
    for (Index j = 0; j < q.cols(); ++j) q(i, j) -= eta * (p(i, j) + p(j, i));
  const Matrix<T> hm = matmul(h, m);
  matmul_accumulate(q, hm, h, c, Trans::kNo, Trans::kYes);
}

}  // namespace

template <typename T>
BasicFactoredLayer<T>::BasicFactoredLayer(Index output_dim, Index hidden_dim,
                                          LayerInit init) {
  if (output_dim < 1 || hidden_dim < 1) {
    fail(ErrorCode::kInvalidArgument, "factored layer: D and d must be >= 1");
  }
  v_ = Matrix<T>(output_dim, hidden_dim);
  u_ = Matrix<T>::identity(hidden_dim);
  u_inv_t_ = Matrix<T>::identity(hidden_dim);
  omega_.assign(hidden_dim, T{0});
  q_ = Matrix<T>(hidden_dim, hidden_dim);
  wbar_.assign(hidden_dim, T{0});
  if (init.kind == VInit::kRandom) {
    std::mt19937_64 gen(init.seed);
    std::uniform_real_distribution<double> dist(-init.scale, init.scale);
    for (T& x : v_.values()) x = static_cast<T>(dist(gen));
    q_ = matmul(v_, v_, Trans::kYes, Trans::kNo);
    for (Index r = 0; r < output_dim; ++r) {
      const auto row = v_.row(r);
      for (Index i = 0; i < hidden_dim; ++i) wbar_[i] += row[i];
    }
  }
}

template <typename T>
BasicFactoredLayer<T> BasicFactoredLayer<T>::from_weights(const Matrix<T>& w) {
  BasicFactoredLayer layer(w.rows(), w.cols());
  layer.v_ = w;
  layer.q_ = matmul(w, w, Trans::kYes, Trans::kNo);
  for (Index r = 0; r < w.rows(); ++r) {
    const auto row = w.row(r);
    for (Index i = 0; i < w.cols(); ++i) layer.wbar_[i] += row[i];
  }
  return layer;
}

template <typename T>
BasicFactoredLayer<T> BasicFactoredLayer<T>::from_state(
    Matrix<T> v, Matrix<T> u, std::vector<T> omega, Matrix<T> q,
    Matrix<T> u_inv_t, std::vector<T> wbar) {
  const Index d = v.cols();
  if (v.rows() < 1 || d < 1 || u.rows() != d || u.cols() != d ||
      q.rows() != d || q.cols() != d || u_inv_t.rows() != d ||
      u_inv_t.cols() != d || omega.size() != d || wbar.size() != d) {
    fail(ErrorCode::kDimensionMismatch, "factored layer: inconsistent state");
  }
  BasicFactoredLayer layer;
  layer.v_ = std::move(v);
  layer.u_ = std::move(u);
  layer.omega_ = std::move(omega);
  layer.q_ = std::move(q);
  layer.u_inv_t_ = std::move(u_inv_t);
  layer.wbar_ = std::move(wbar);
  return layer;
}

template <typename T>
Matrix<T> BasicFactoredLayer<T>::materialize_w() const {
  Matrix<T> w = matmul(v_, u_);
  for (Index r = 0; r < w.rows(); ++r) {
    T* row = w.data() + r * w.cols();
    for (Index i = 0; i < w.cols(); ++i) row[i] += omega_[i];
  }
  return w;
}

template <typename T>
void BasicFactoredLayer<T>::check_batch(const Matrix<T>& h,
                                        const KSparseMat& y) const {
  if (h.rows() != hidden_dim()) {
    fail(ErrorCode::kDimensionMismatch,
         "hidden batch has " + std::to_string(h.rows()) + " rows, layer d = " +
             std::to_string(hidden_dim()));
  }
  if (y.rows() != output_dim()) {
    fail(ErrorCode::kDimensionMismatch,
         "target dimension " + std::to_string(y.rows()) + " != layer D = " +
             std::to_string(output_dim()));
  }
  if (h.cols() != y.cols() || h.cols() < 1) {
    fail(ErrorCode::kDimensionMismatch,
         "minibatch sizes disagree or are empty");
  }
}

template <typename T>
ForwardStats<T> BasicFactoredLayer<T>::forward_stats(const Matrix<T>& h,
                                                     const KSparseMat& targets,
                                                     bool needs_s) const {
  check_batch(h, targets);
  const Index m = h.cols();
  ForwardStats<T> st;
  st.h_hat = matmul(q_, h);
  st.m_hat = matmul(h, st.h_hat, Trans::kYes, Trans::kNo);
  st.q.resize(m);
  for (Index j = 0; j < m; ++j) st.q[j] = static_cast<double>(st.m_hat(j, j));
  st.s.assign(m, 0.0);
  if (needs_s) {
    const auto s = columns_dot<T>(h, wbar_);
    std::copy(s.begin(), s.end(), st.s.begin());
  }
  st.h_tilde = matmul(u_, h);
  const auto ho = columns_dot<T>(h, omega_);
  st.h_omega.assign(ho.begin(), ho.end());

  // A_kj = (U H)_j . V_{K_kj} + (H^T omega)_j
  const Matrix<T> ht = st.h_tilde.transposed();
  st.a.resize(targets.nnz());
  const auto offsets = targets.col_offsets();
  const auto idx = targets.indices();
  for (Index j = 0; j < m; ++j) {
    for (Index e = offsets[j]; e < offsets[j + 1]; ++e) {
      st.a[e] = static_cast<double>(dot(ht.row(j), v_.row(idx[e]))) +
                st.h_omega[j];
    }
  }
  return st;
}

template <typename T>
OnlineResult<T> BasicFactoredLayer<T>::online_mse_update(std::span<const T> h,
                                                         const KSparseVec& y,
                                                         T eta) {
  const Index d = hidden_dim();
  if (h.size() != d || y.dim() != output_dim()) {
    fail(ErrorCode::kDimensionMismatch, "online_mse_update: shapes");
  }
  const auto idx = y.indices();
  const auto val = y.values();
  double y_sum = 0.0;
  for (double v : val) y_sum += v;

  // y_hat = W^T y = U^T (V^T y) + omega sum(y)
  std::vector<T> vty(d, T{0});
  for (Index k = 0; k < idx.size(); ++k) {
    const auto row = v_.row(idx[k]);
    const T w = static_cast<T>(val[k]);
    for (Index i = 0; i < d; ++i) vty[i] += w * row[i];
  }
  std::vector<T> y_hat = matvec<T>(u_, vty, Trans::kYes);
  for (Index i = 0; i < d; ++i) y_hat[i] += omega_[i] * static_cast<T>(y_sum);
  const std::vector<T> h_hat = matvec<T>(q_, h);

  OnlineResult<T> out;
  out.grad_h.resize(d);
  for (Index i = 0; i < d; ++i) out.grad_h[i] = T{2} * (h_hat[i] - y_hat[i]);
  out.loss = static_cast<double>(dot<T>(h, h_hat)) -
             2.0 * static_cast<double>(dot<T>(h, y_hat)) + y.squared_norm();

  if (eta != T{0}) {
    const T hh = dot<T>(h, h);
    const T denom = T{1} - T{2} * eta * hh;
    if (!(std::abs(static_cast<double>(denom)) >= kSingularUpdateFloor)) {
      fail(ErrorCode::kSingularUpdate,
           "online_mse_update: 1 - 2 eta |h|^2 = " +
               std::to_string(static_cast<double>(denom)));
    }
    const std::vector<T> uh = matvec<T>(u_, h);
    add_outer<T>(u_, uh, h, T{-2} * eta);

    const std::vector<T> uith = matvec<T>(u_inv_t_, h);
    add_outer<T>(u_inv_t_, uith, h, T{2} * eta / denom);

    const std::vector<T> uith_new = matvec<T>(u_inv_t_, h);
    for (Index k = 0; k < idx.size(); ++k) {
      T* row = v_.data() + idx[k] * d;
      const T w = T{2} * eta * static_cast<T>(val[k]);
      for (Index i = 0; i < d; ++i) row[i] += w * uith_new[i];
    }

    if (any_nonzero(omega_)) {
      const T ho = dot<T>(h, omega_);
      for (Index i = 0; i < d; ++i) omega_[i] -= T{2} * eta * ho * h[i];
    }
    const T r = dot<T>(h, wbar_) - static_cast<T>(y_sum);
    for (Index i = 0; i < d; ++i) wbar_[i] -= T{2} * eta * r * h[i];

    for (Index i = 0; i < d; ++i) {
      for (Index j = 0; j < d; ++j) {
        q_(i, j) -= eta * (h[i] * out.grad_h[j] + out.grad_h[i] * h[j]);
      }
    }
    add_outer<T>(q_, h, h, T{4} * eta * eta * static_cast<T>(out.loss));
    after_update();
  }
  return out;
}

namespace {

// Solves the small system of the Woodbury identity for
// U_new = U (I + B H^T), B = -2 eta H diag(scale):
//   X = (I_m + H^T B)^{-T} B^T   (m x d)
// so that U_new^{-T} = U^{-T} - (U^{-T} H) X.
template <typename T>
Matrix<T> woodbury_factor(const Matrix<T>& h, std::span<const double> scale,
                          T eta) {
  const Index m = h.cols();
  const Index d = h.rows();
  const Matrix<T> hth = matmul(h, h, Trans::kYes, Trans::kNo);
  Matrix<T> st(m, m);
  Matrix<T> x(m, d);
  for (Index i = 0; i < m; ++i) {
    const T g = static_cast<T>(scale[i]);
    for (Index j = 0; j < m; ++j)
      st(i, j) = (i == j ? T{1} : T{0}) - T{2} * eta * g * hth(i, j);
    for (Index r = 0; r < d; ++r) x(i, r) = T{-2} * eta * g * h(r, i);
  }
  solve_in_place(std::move(st), x, kSingularUpdateFloor,
                 ErrorCode::kSingularUpdate);
  return x;
}

}  // namespace

template <typename T>
UpdateResult<T> BasicFactoredLayer<T>::minibatch_mse_update(const Matrix<T>& h,
                                                            const KSparseMat& y,
                                                            T eta) {
  check_batch(h, y);
  const Index m = h.cols();
  const Index d = hidden_dim();

  const Matrix<T> h_hat = matmul(q_, h);
  const Matrix<T> vty = sparse_transpose_times_dense(y, v_);
  Matrix<T> y_hat = matmul(u_, vty, Trans::kYes, Trans::kYes);
  const Vector y_sum = sparse_column_sums(y);
  const bool has_omega = any_nonzero(omega_);
  if (has_omega) {
    for (Index i = 0; i < d; ++i)
      for (Index j = 0; j < m; ++j)
        y_hat(i, j) += omega_[i] * static_cast<T>(y_sum[j]);
  }

  UpdateResult<T> out;
  out.grad_h = Matrix<T>(d, m);
  for (Index k = 0; k < h_hat.size(); ++k)
    out.grad_h.data()[k] = T{2} * (h_hat.data()[k] - y_hat.data()[k]);

  // M = H^T H_hat - (Y_hat^T H + H^T Y_hat) + Y^T Y; L = Tr(M)
  const Matrix<T> hth_hat = matmul(h, h_hat, Trans::kYes, Trans::kNo);
  const Matrix<T> hty = matmul(h, y_hat, Trans::kYes, Trans::kNo);
  const DenseMat yty = sparse_gram(y);
  Matrix<T> mm(m, m);
  for (Index i = 0; i < m; ++i)
    for (Index j = 0; j < m; ++j)
      mm(i, j) = hth_hat(i, j) - hty(j, i) - hty(i, j) +
                 static_cast<T>(yty(i, j));
  for (Index j = 0; j < m; ++j) out.loss += static_cast<double>(mm(j, j));

  if (eta != T{0}) {
    const Vector ones(m, 1.0);
    Matrix<T> u_new = u_;
    matmul_accumulate(u_new, matmul(u_, h), h, T{-2} * eta, Trans::kNo,
                      Trans::kYes);
    if (m > d) {
      u_inv_t_ = transposed_inverse(u_new);
    } else {
      const Matrix<T> x = woodbury_factor<T>(h, ones, eta);
      const Matrix<T> uih = matmul(u_inv_t_, h);
      matmul_accumulate(u_inv_t_, uih, x, T{-1});
    }
    u_ = std::move(u_new);

    if (has_omega) {
      const auto ho = columns_dot<T>(h, omega_);
      const auto delta = matvec<T>(h, ho);
      for (Index i = 0; i < d; ++i) omega_[i] -= T{2} * eta * delta[i];
    }

    const Matrix<T> g = matmul(h, u_inv_t_, Trans::kYes, Trans::kYes);
    scatter_row_update(v_, y, g, T{2} * eta);

    auto r = columns_dot<T>(h, wbar_);
    for (Index j = 0; j < m; ++j) r[j] -= static_cast<T>(y_sum[j]);
    const auto delta = matvec<T>(h, r);
    for (Index i = 0; i < d; ++i) wbar_[i] -= T{2} * eta * delta[i];

    update_gram(q_, out.grad_h, h, mm, eta, T{4} * eta * eta);
    after_update();
  }
  return out;
}

template <typename T>
UpdateResult<T> BasicFactoredLayer<T>::spherical_update(const Matrix<T>& h,
                                                        const KSparseMat& y,
                                                        T eta,
                                                        const SphericalLoss& loss) {
  check_batch(h, y);
  const Index m = h.cols();
  const Index d = hidden_dim();
  const double big_d = static_cast<double>(output_dim());

  const ForwardStats<T> st = forward_stats(h, y, loss.uses_sum_of_outputs());
  const LossEvalBatch ev = eval_with_grads(loss, st.q, st.s, y, st.a);
  const KSparseMat ring = y.with_values(ev.grad_a);
  const Vector ybar = sparse_column_sums(ring);

  // Z_hat = wbar grad_s^T + U^T (V^T Y_ring) + omega ybar^T
  Matrix<T> z_hat =
      matmul(u_, sparse_transpose_times_dense(ring, v_), Trans::kYes, Trans::kYes);
  for (Index i = 0; i < d; ++i)
    for (Index j = 0; j < m; ++j)
      z_hat(i, j) += wbar_[i] * static_cast<T>(ev.grad_s[j]) +
                     omega_[i] * static_cast<T>(ybar[j]);

  UpdateResult<T> out;
  out.loss = ev.total();
  out.grad_h = z_hat;
  for (Index i = 0; i < d; ++i)
    for (Index j = 0; j < m; ++j)
      out.grad_h(i, j) += T{2} * st.h_hat(i, j) * static_cast<T>(ev.grad_q[j]);

  if (eta != T{0}) {
    // U <- U - 2 eta (U H) diag(grad_q) H^T
    Matrix<T> scaled = st.h_tilde;
    for (Index i = 0; i < d; ++i)
      for (Index j = 0; j < m; ++j) scaled(i, j) *= static_cast<T>(ev.grad_q[j]);
    Matrix<T> u_new = u_;
    matmul_accumulate(u_new, scaled, h, T{-2} * eta, Trans::kNo, Trans::kYes);
    if (m > d) {
      u_inv_t_ = transposed_inverse(u_new);
    } else {
      const Matrix<T> x = woodbury_factor<T>(h, ev.grad_q, eta);
      const Matrix<T> uih = matmul(u_inv_t_, h);
      matmul_accumulate(u_inv_t_, uih, x, T{-1});
    }
    u_ = std::move(u_new);

    // omega <- omega - eta H (2 diag(grad_q) H^T omega + grad_s)
    std::vector<T> r(m);
    for (Index j = 0; j < m; ++j)
      r[j] = static_cast<T>(2.0 * ev.grad_q[j] * st.h_omega[j] + ev.grad_s[j]);
    auto delta = matvec<T>(h, r);
    for (Index i = 0; i < d; ++i) omega_[i] -= eta * delta[i];

    // V <- V - eta Y_ring (U_new^{-T} H)^T
    const Matrix<T> g = matmul(h, u_inv_t_, Trans::kYes, Trans::kYes);
    scatter_row_update(v_, ring, g, -eta);

    // wbar <- wbar - eta H (2 diag(grad_q) H^T wbar + D grad_s + ybar)
    const auto hw = columns_dot<T>(h, wbar_);
    for (Index j = 0; j < m; ++j)
      r[j] = static_cast<T>(2.0 * ev.grad_q[j] * static_cast<double>(hw[j]) +
                            big_d * ev.grad_s[j] + ybar[j]);
    delta = matvec<T>(h, r);
    for (Index i = 0; i < d; ++i) wbar_[i] -= eta * delta[i];

    // M = grad_O^T grad_O without forming grad_O.
    const DenseMat ring_gram = sparse_gram(ring);
    const Matrix<T> hz = matmul(h, z_hat, Trans::kYes, Trans::kNo);
    Matrix<T> mm(m, m);
    for (Index i = 0; i < m; ++i) {
      const double gqi = ev.grad_q[i], gsi = ev.grad_s[i];
      for (Index j = 0; j < m; ++j) {
        const double gqj = ev.grad_q[j], gsj = ev.grad_s[j];
        mm(i, j) = static_cast<T>(
            4.0 * gqi * static_cast<double>(st.m_hat(i, j)) * gqj +
            big_d * gsi * gsj + ring_gram(i, j) + gsi * ybar[j] +
            ybar[i] * gsj + 2.0 * gqi * static_cast<double>(hz(i, j)) +
            2.0 * gqj * static_cast<double>(hz(j, i)));
      }
    }
    update_gram(q_, out.grad_h, h, mm, eta, eta * eta);
    after_update();
  }
  return out;
}

template <typename T>
void BasicFactoredLayer<T>::refresh_inverse() {
  u_inv_t_ = transposed_inverse(u_);
}

template <typename T>
double BasicFactoredLayer<T>::inverse_residual() const {
  const Matrix<T> prod = matmul(u_inv_t_, u_, Trans::kYes, Trans::kNo);
  double r = 0.0;
  for (Index i = 0; i < prod.rows(); ++i)
    for (Index j = 0; j < prod.cols(); ++j)
      r = std::max(r, std::abs(static_cast<double>(prod(i, j)) -
                               (i == j ? 1.0 : 0.0)));
  return r;
}

template <typename T>
void BasicFactoredLayer<T>::set_stabilization(
    std::optional<StabilizeConfig> config) {
  if (config) config->validate();
  stabilization_ = config;
}

template <typename T>
void BasicFactoredLayer<T>::after_update() {
  ++updates_;
  if (stabilization_ && updates_ % stabilization_->n_check == 0) {
    singular_stabilize(*this, *stabilization_);
  }
}

template class BasicFactoredLayer<float>;
template class BasicFactoredLayer<double>;

}  // namespace lst
