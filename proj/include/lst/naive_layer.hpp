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

#include "lst/factored_layer.hpp"
#include "lst/loss.hpp"
#include "lst/matrix.hpp"
#include "lst/sparse.hpp"

namespace lst {

// Explicit dense W with the O(D d) update. Written literally on purpose: it
// serves as the reference the factored layer is checked against and as the
// benchmark baseline.
template <typename T>
class BasicNaiveLayer {
 public:
  BasicNaiveLayer(Index output_dim, Index hidden_dim);
  explicit BasicNaiveLayer(Matrix<T> w);

  Index output_dim() const noexcept { return w_.rows(); }
  Index hidden_dim() const noexcept { return w_.cols(); }
  const Matrix<T>& w() const noexcept { return w_; }

  // O = W H, D x m
  Matrix<T> outputs(const Matrix<T>& h) const;

  // L = sum_j |O_j - Y_j|^2, grad H = 2 W^T (O - Y), W <- W - 2 eta (O - Y) H^T
  UpdateResult<T> mse_step(const Matrix<T>& h, const KSparseMat& y, T eta);

  // grad O = 2 O diag(dq) + 1 ds^T + Y_ring, grad H = W^T grad O,
  // W <- W - eta grad O H^T
  UpdateResult<T> spherical_step(const Matrix<T>& h, const KSparseMat& y,
                                 T eta, const SphericalLoss& loss);

 private:
  void check_batch(const Matrix<T>& h, const KSparseMat& y) const;

  Matrix<T> w_;
};

using NaiveOutputLayer = BasicNaiveLayer<double>;

extern template class BasicNaiveLayer<float>;
extern template class BasicNaiveLayer<double>;

}  // namespace lst
