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

#include "lst/naive_layer.hpp"

#include <string>

#include "lst/kernels.hpp"

namespace lst {

template <typename T>
BasicNaiveLayer<T>::BasicNaiveLayer(Index output_dim, Index hidden_dim)
    : w_(output_dim, hidden_dim) {
  if (output_dim < 1 || hidden_dim < 1) {
    fail(ErrorCode::kInvalidArgument, "naive layer: D and d must be >= 1");
  }
}

template <typename T>
BasicNaiveLayer<T>::BasicNaiveLayer(Matrix<T> w) : w_(std::move(w)) {
  if (w_.rows() < 1 || w_.cols() < 1) {
    fail(ErrorCode::kInvalidArgument, "naive layer: empty W");
  }
}

template <typename T>
void BasicNaiveLayer<T>::check_batch(const Matrix<T>& h,
                                     const KSparseMat& y) const {
  if (h.rows() != hidden_dim() || y.rows() != output_dim() ||
      h.cols() != y.cols() || h.cols() < 1) {
    fail(ErrorCode::kDimensionMismatch,
         "naive layer: batch shapes (" + std::to_string(h.rows()) + "x" +
             std::to_string(h.cols()) + ", targets " +
             std::to_string(y.rows()) + "x" + std::to_string(y.cols()) + ")");
  }
}

template <typename T>
Matrix<T> BasicNaiveLayer<T>::outputs(const Matrix<T>& h) const {
  return matmul(w_, h);
}

template <typename T>
UpdateResult<T> BasicNaiveLayer<T>::mse_step(const Matrix<T>& h,
                                             const KSparseMat& y, T eta) {
  check_batch(h, y);
  // r = O - Y, with Y subtracted entry by entry on its support
  Matrix<T> r = outputs(h);
  const auto offsets = y.col_offsets();
  const auto idx = y.indices();
  const auto val = y.values();
  for (Index j = 0; j < y.cols(); ++j)
    for (Index e = offsets[j]; e < offsets[j + 1]; ++e)
      r(idx[e], j) -= static_cast<T>(val[e]);

  UpdateResult<T> out;
  for (T x : r.values()) out.loss += static_cast<double>(x) * x;
  out.grad_h = matmul(w_, r, Trans::kYes, Trans::kNo);
  for (T& g : out.grad_h.values()) g *= T{2};
  if (eta != T{0}) matmul_accumulate(w_, r, h, T{-2} * eta, Trans::kNo, Trans::kYes);
  return out;
}

template <typename T>
UpdateResult<T> BasicNaiveLayer<T>::spherical_step(const Matrix<T>& h,
                                                   const KSparseMat& y, T eta,
                                                   const SphericalLoss& loss) {
  check_batch(h, y);
  const Index big_d = output_dim();
  const Index m = h.cols();
  const Matrix<T> o = outputs(h);

  Vector q(m, 0.0), s(m, 0.0);
  for (Index i = 0; i < big_d; ++i) {
    for (Index j = 0; j < m; ++j) {
      const double x = static_cast<double>(o(i, j));
      q[j] += x * x;
      s[j] += x;
    }
  }
  const auto offsets = y.col_offsets();
  const auto idx = y.indices();
  Vector a(y.nnz());
  for (Index j = 0; j < m; ++j)
    for (Index e = offsets[j]; e < offsets[j + 1]; ++e)
      a[e] = static_cast<double>(o(idx[e], j));

  const LossEvalBatch ev = eval_with_grads(loss, q, s, y, a);

  Matrix<T> grad_o(big_d, m);
  for (Index i = 0; i < big_d; ++i)
    for (Index j = 0; j < m; ++j)
      grad_o(i, j) = static_cast<T>(2.0 * ev.grad_q[j] * static_cast<double>(o(i, j)) +
                                    ev.grad_s[j]);
  for (Index j = 0; j < m; ++j)
    for (Index e = offsets[j]; e < offsets[j + 1]; ++e)
      grad_o(idx[e], j) += static_cast<T>(ev.grad_a[e]);

  UpdateResult<T> out;
  out.loss = ev.total();
  out.grad_h = matmul(w_, grad_o, Trans::kYes, Trans::kNo);
  if (eta != T{0}) matmul_accumulate(w_, grad_o, h, -eta, Trans::kNo, Trans::kYes);
  return out;
}

template class BasicNaiveLayer<float>;
template class BasicNaiveLayer<double>;

}  // namespace lst
