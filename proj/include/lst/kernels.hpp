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

#include <span>
#include <vector>

#include "lst/matrix.hpp"

namespace lst {

enum class Trans { kNo, kYes };

// C = op(A) * op(B). Accumulation runs in a fixed order, so the result is
// bit-reproducible for a given shape.
template <typename T>
Matrix<T> matmul(const Matrix<T>& a, const Matrix<T>& b, Trans ta = Trans::kNo,
                 Trans tb = Trans::kNo);

// C += alpha * op(A) * op(B), in place.
template <typename T>
void matmul_accumulate(Matrix<T>& c, const Matrix<T>& a, const Matrix<T>& b,
                       T alpha, Trans ta = Trans::kNo, Trans tb = Trans::kNo);

// y = op(A) x
template <typename T>
std::vector<T> matvec(const Matrix<T>& a, std::span<const T> x,
                      Trans ta = Trans::kNo);

template <typename T>
T dot(std::span<const T> x, std::span<const T> y) {
  T acc{0};
  for (Index i = 0; i < x.size(); ++i) acc += x[i] * y[i];
  return acc;
}

// Gauss-Jordan elimination with partial pivoting. Throws
// ErrorCode::kSingularMatrix when a pivot vanishes relative to its row.
DenseMat invert_square(const DenseMat& a);

// Solves A X = B for square A with partial pivoting; B is overwritten by X.
// A pivot below `pivot_floor` in magnitude raises `singular_code`.
template <typename T>
void solve_in_place(Matrix<T> a, Matrix<T>& b, double pivot_floor,
                    ErrorCode singular_code);

struct SvdResult {
  DenseMat left;          // orthonormal columns, left singular vectors
  Vector singular_values; // nonincreasing, nonnegative
  DenseMat right;         // orthonormal columns, right singular vectors
};

// One-sided Jacobi SVD of a square matrix: A = left * diag(sigma) * right^T.
// Gives up with ErrorCode::kNoConvergence after 100 * d sweeps.
SvdResult svd_square(const DenseMat& a);

struct ExtremeSingularPairs {
  double sigma_max = 0.0;
  Vector u_max;  // unit left singular vector for sigma_max
  double sigma_min = 0.0;
  Vector u_min;  // unit left singular vector for sigma_min
};

// Power iteration on U U^T (largest) and on U^{-T} U^{-1} (smallest), both
// started from the same fixed vector. `u_inv` must be the inverse of `u`.
ExtremeSingularPairs power_iteration_extremes(const DenseMat& u,
                                              const DenseMat& u_inv,
                                              Index iters);

// Condition number sigma_1 / sigma_d from a full SVD; infinity when singular.
double condition_number(const DenseMat& a);

}  // namespace lst
