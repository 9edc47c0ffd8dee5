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

#include "lst/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>

namespace lst {

namespace {

struct GemmShape {
  Index m, k, n;
};

template <typename T>
GemmShape gemm_shape(const Matrix<T>& a, const Matrix<T>& b, Trans ta,
                     Trans tb) {
  const Index m = ta == Trans::kNo ? a.rows() : a.cols();
  const Index k = ta == Trans::kNo ? a.cols() : a.rows();
  const Index kb = tb == Trans::kNo ? b.rows() : b.cols();
  const Index n = tb == Trans::kNo ? b.cols() : b.rows();
  if (k != kb) {
    fail(ErrorCode::kDimensionMismatch,
         "matmul: inner dimensions " + std::to_string(k) + " and " +
             std::to_string(kb) + " disagree");
  }
  return {m, k, n};
}

double norm2(std::span<const double> x) {
  return std::sqrt(dot(x, x));
}

}  // namespace

template <typename T>
void matmul_accumulate(Matrix<T>& c, const Matrix<T>& a, const Matrix<T>& b,
                       T alpha, Trans ta, Trans tb) {
  const GemmShape s = gemm_shape(a, b, ta, tb);
  if (c.rows() != s.m || c.cols() != s.n) {
    fail(ErrorCode::kDimensionMismatch, "matmul: output shape mismatch");
  }
  // The inner loop always streams a contiguous row of op(B).
  Matrix<T> b_transposed;
  const Matrix<T>* bp = &b;
  if (tb == Trans::kYes) {
    b_transposed = b.transposed();
    bp = &b_transposed;
  }
  const Index n = s.n;
  if (ta == Trans::kNo) {
    for (Index i = 0; i < s.m; ++i) {
      T* crow = c.data() + i * n;
      const T* arow = a.data() + i * s.k;
      for (Index p = 0; p < s.k; ++p) {
        const T scale = alpha * arow[p];
        const T* brow = bp->data() + p * n;
        for (Index j = 0; j < n; ++j) crow[j] += scale * brow[j];
      }
    }
  } else {
    for (Index p = 0; p < s.k; ++p) {
      const T* arow = a.data() + p * s.m;
      const T* brow = bp->data() + p * n;
      for (Index i = 0; i < s.m; ++i) {
        const T scale = alpha * arow[i];
        T* crow = c.data() + i * n;
        for (Index j = 0; j < n; ++j) crow[j] += scale * brow[j];
      }
    }
  }
}

template <typename T>
Matrix<T> matmul(const Matrix<T>& a, const Matrix<T>& b, Trans ta, Trans tb) {
  const GemmShape s = gemm_shape(a, b, ta, tb);
  Matrix<T> c(s.m, s.n);
  matmul_accumulate(c, a, b, T{1}, ta, tb);
  return c;
}

template <typename T>
std::vector<T> matvec(const Matrix<T>& a, std::span<const T> x, Trans ta) {
  const Index in = ta == Trans::kNo ? a.cols() : a.rows();
  const Index out = ta == Trans::kNo ? a.rows() : a.cols();
  if (x.size() != in) {
    fail(ErrorCode::kDimensionMismatch, "matvec: vector length mismatch");
  }
  std::vector<T> y(out, T{0});
  if (ta == Trans::kNo) {
    for (Index i = 0; i < out; ++i) y[i] = dot(a.row(i), x);
  } else {
    for (Index p = 0; p < in; ++p) {
      const T xp = x[p];
      const auto arow = a.row(p);
      for (Index i = 0; i < out; ++i) y[i] += xp * arow[i];
    }
  }
  return y;
}

template <typename T>
void solve_in_place(Matrix<T> a, Matrix<T>& b, double pivot_floor,
                    ErrorCode singular_code) {
  const Index n = a.rows();
  if (!a.is_square() || b.rows() != n) {
    fail(ErrorCode::kDimensionMismatch, "solve: shape mismatch");
  }
  const Index r = b.cols();
  for (Index col = 0; col < n; ++col) {
    Index piv = col;
    for (Index i = col + 1; i < n; ++i)
      if (std::abs(a(i, col)) > std::abs(a(piv, col))) piv = i;
    if (!(std::abs(static_cast<double>(a(piv, col))) >= pivot_floor)) {
      fail(singular_code, "solve: pivot " +
                              std::to_string(static_cast<double>(a(piv, col))) +
                              " in column " + std::to_string(col) +
                              " is below threshold");
    }
    if (piv != col) {
      std::swap_ranges(a.row(col).begin(), a.row(col).end(), a.row(piv).begin());
      std::swap_ranges(b.row(col).begin(), b.row(col).end(), b.row(piv).begin());
    }
    const T inv = T{1} / a(col, col);
    for (Index i = col + 1; i < n; ++i) {
      const T f = a(i, col) * inv;
      if (f == T{0}) continue;
      for (Index j = col; j < n; ++j) a(i, j) -= f * a(col, j);
      for (Index j = 0; j < r; ++j) b(i, j) -= f * b(col, j);
    }
  }
  for (Index ii = n; ii-- > 0;) {
    for (Index j = 0; j < r; ++j) {
      T acc = b(ii, j);
      for (Index p = ii + 1; p < n; ++p) acc -= a(ii, p) * b(p, j);
      b(ii, j) = acc / a(ii, ii);
    }
  }
}

DenseMat invert_square(const DenseMat& a) {
  if (!a.is_square()) {
    fail(ErrorCode::kDimensionMismatch, "invert_square: matrix is not square");
  }
  constexpr double kPivotFloor = 1e-300;
  const Index n = a.rows();
  DenseMat work = a;
  DenseMat inv = DenseMat::identity(n);
  Vector scale(n);
  for (Index i = 0; i < n; ++i) {
    for (double v : work.row(i)) scale[i] = std::max(scale[i], std::abs(v));
    if (scale[i] == 0.0) {
      fail(ErrorCode::kSingularMatrix,
           "invert_square: row " + std::to_string(i) + " is zero");
    }
  }
  for (Index col = 0; col < n; ++col) {
    Index piv = col;
    for (Index i = col + 1; i < n; ++i)
      if (std::abs(work(i, col)) > std::abs(work(piv, col))) piv = i;
    if (!(std::abs(work(piv, col)) / scale[piv] > kPivotFloor)) {
      fail(ErrorCode::kSingularMatrix,
           "invert_square: effective zero pivot in column " +
               std::to_string(col));
    }
    if (piv != col) {
      std::swap_ranges(work.row(col).begin(), work.row(col).end(),
                       work.row(piv).begin());
      std::swap_ranges(inv.row(col).begin(), inv.row(col).end(),
                       inv.row(piv).begin());
      std::swap(scale[col], scale[piv]);
    }
    const double p = work(col, col);
    for (Index j = 0; j < n; ++j) {
      work(col, j) /= p;
      inv(col, j) /= p;
    }
    for (Index i = 0; i < n; ++i) {
      if (i == col) continue;
      const double f = work(i, col);
      if (f == 0.0) continue;
      for (Index j = 0; j < n; ++j) {
        work(i, j) -= f * work(col, j);
        inv(i, j) -= f * inv(col, j);
      }
    }
  }
  if (!all_finite(inv)) {
    fail(ErrorCode::kSingularMatrix, "invert_square: inverse is not finite");
  }
  return inv;
}

SvdResult svd_square(const DenseMat& a) {
  if (!a.is_square()) {
    fail(ErrorCode::kDimensionMismatch, "svd_square: matrix is not square");
  }
  if (!all_finite(a)) {
    fail(ErrorCode::kInvalidArgument, "svd_square: non-finite entry");
  }
  const Index n = a.rows();
  const double tol = std::numeric_limits<double>::epsilon() *
                     static_cast<double>(std::max<Index>(n, 1));
  DenseMat w = a;
  DenseMat v = DenseMat::identity(n);

  const Index max_sweeps = 100 * std::max<Index>(n, 1);
  bool converged = false;
  for (Index sweep = 0; sweep < max_sweeps && !converged; ++sweep) {
    converged = true;
    for (Index p = 0; p + 1 < n; ++p) {
      for (Index q = p + 1; q < n; ++q) {
        double alpha = 0.0, beta = 0.0, gamma = 0.0;
        for (Index i = 0; i < n; ++i) {
          alpha += w(i, p) * w(i, p);
          beta += w(i, q) * w(i, q);
          gamma += w(i, p) * w(i, q);
        }
        if (gamma == 0.0 || std::abs(gamma) <= tol * std::sqrt(alpha * beta))
          continue;
        converged = false;
        const double zeta = (beta - alpha) / (2.0 * gamma);
        const double t = (zeta >= 0.0 ? 1.0 : -1.0) /
                         (std::abs(zeta) + std::sqrt(1.0 + zeta * zeta));
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const double s = c * t;
        for (Index i = 0; i < n; ++i) {
          const double wp = w(i, p), wq = w(i, q);
          w(i, p) = c * wp - s * wq;
          w(i, q) = s * wp + c * wq;
          const double vp = v(i, p), vq = v(i, q);
          v(i, p) = c * vp - s * vq;
          v(i, q) = s * vp + c * vq;
        }
      }
    }
  }
  if (!converged) {
    fail(ErrorCode::kNoConvergence, "svd_square: no convergence after " +
                                        std::to_string(max_sweeps) + " sweeps");
  }

  Vector sigma(n);
  for (Index j = 0; j < n; ++j) {
    double acc = 0.0;
    for (Index i = 0; i < n; ++i) acc += w(i, j) * w(i, j);
    sigma[j] = std::sqrt(acc);
  }
  std::vector<Index> order(n);
  std::iota(order.begin(), order.end(), Index{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](Index x, Index y) { return sigma[x] > sigma[y]; });

  SvdResult out{DenseMat(n, n), Vector(n), DenseMat(n, n)};
  const double floor = n == 0 ? 0.0 : sigma[order[0]] * tol;
  std::vector<Index> deficient;
  for (Index k = 0; k < n; ++k) {
    const Index j = order[k];
    out.singular_values[k] = sigma[j];
    for (Index i = 0; i < n; ++i) out.right(i, k) = v(i, j);
    if (sigma[j] > floor && sigma[j] > 0.0) {
      for (Index i = 0; i < n; ++i) out.left(i, k) = w(i, j) / sigma[j];
    } else {
      deficient.push_back(k);
    }
  }
  // Rank-deficient columns: complete the left basis by Gram-Schmidt against
  // the columns already fixed, picking the best-conditioned unit vector.
  std::vector<bool> filled(n, true);
  for (Index k : deficient) filled[k] = false;
  for (Index k : deficient) {
    Vector best;
    double best_norm = -1.0;
    for (Index e = 0; e < n; ++e) {
      Vector cand(n, 0.0);
      cand[e] = 1.0;
      for (int pass = 0; pass < 2; ++pass) {
        for (Index c = 0; c < n; ++c) {
          if (!filled[c]) continue;
          double proj = 0.0;
          for (Index i = 0; i < n; ++i) proj += out.left(i, c) * cand[i];
          for (Index i = 0; i < n; ++i) cand[i] -= proj * out.left(i, c);
        }
      }
      const double nrm = norm2(cand);
      if (nrm > best_norm) {
        best_norm = nrm;
        best = std::move(cand);
      }
    }
    for (Index i = 0; i < n; ++i) out.left(i, k) = best[i] / best_norm;
    filled[k] = true;
  }
  return out;
}

namespace {

Vector power_start(Index n) {
  std::mt19937_64 gen(0x9e3779b97f4a7c15ULL);
  std::uniform_real_distribution<double> dist(0.5, 1.5);
  Vector x(n);
  for (auto& v : x) v = dist(gen);
  const double nrm = norm2(x);
  for (auto& v : x) v /= nrm;
  return x;
}

// Dominant eigenvector of the symmetric operator y = apply(x).
template <typename Apply>
Vector dominant_direction(Vector x, Index iters, Apply apply) {
  for (Index it = 0; it < iters; ++it) {
    Vector y = apply(x);
    const double nrm = norm2(y);
    if (!(nrm > 1e-300) || !std::isfinite(nrm)) {
      fail(ErrorCode::kZeroMatrix, "power iteration: iterate norm underflow");
    }
    for (Index i = 0; i < y.size(); ++i) x[i] = y[i] / nrm;
  }
  return x;
}

}  // namespace

ExtremeSingularPairs power_iteration_extremes(const DenseMat& u,
                                              const DenseMat& u_inv,
                                              Index iters) {
  if (!u.is_square() || u_inv.rows() != u.rows() || u_inv.cols() != u.cols()) {
    fail(ErrorCode::kDimensionMismatch, "power_iteration_extremes: shapes");
  }
  if (iters < 1) {
    fail(ErrorCode::kInvalidArgument, "power_iteration_extremes: iters < 1");
  }
  const Vector start = power_start(u.rows());
  ExtremeSingularPairs out;

  out.u_max = dominant_direction(start, iters, [&](const Vector& x) {
    const Vector ut_x = matvec<double>(u, x, Trans::kYes);
    return matvec<double>(u, ut_x);
  });
  out.sigma_max = norm2(matvec<double>(u, out.u_max, Trans::kYes));

  // U^{-T} U^{-1} = Ubar diag(sigma^-2) Ubar^T
  out.u_min = dominant_direction(start, iters, [&](const Vector& x) {
    const Vector uinv_x = matvec<double>(u_inv, x);
    return matvec<double>(u_inv, uinv_x, Trans::kYes);
  });
  const double inv_norm = norm2(matvec<double>(u_inv, out.u_min));
  if (!(inv_norm > 0.0)) {
    fail(ErrorCode::kZeroMatrix, "power iteration: inverse maps to zero");
  }
  out.sigma_min = 1.0 / inv_norm;
  return out;
}

double condition_number(const DenseMat& a) {
  const SvdResult s = svd_square(a);
  if (s.singular_values.empty()) return 1.0;
  const double lo = s.singular_values.back();
  return lo > 0.0 ? s.singular_values.front() / lo
                  : std::numeric_limits<double>::infinity();
}

template Matrix<float> matmul(const Matrix<float>&, const Matrix<float>&, Trans,
                              Trans);
template Matrix<double> matmul(const Matrix<double>&, const Matrix<double>&,
                               Trans, Trans);
template void matmul_accumulate(Matrix<float>&, const Matrix<float>&,
                                const Matrix<float>&, float, Trans, Trans);
template void matmul_accumulate(Matrix<double>&, const Matrix<double>&,
                                const Matrix<double>&, double, Trans, Trans);
template std::vector<float> matvec(const Matrix<float>&, std::span<const float>,
                                   Trans);
template std::vector<double> matvec(const Matrix<double>&,
                                    std::span<const double>, Trans);
template void solve_in_place(Matrix<float>, Matrix<float>&, double, ErrorCode);
template void solve_in_place(Matrix<double>, Matrix<double>&, double,
                             ErrorCode);

const char* to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::kInvalidArgument: return "invalid argument";
    case ErrorCode::kDimensionMismatch: return "dimension mismatch";
    case ErrorCode::kIndexOutOfRange: return "index out of range";
    case ErrorCode::kSingularUpdate: return "singular update";
    case ErrorCode::kSingularMatrix: return "singular matrix";
    case ErrorCode::kNoConvergence: return "no convergence";
    case ErrorCode::kZeroMatrix: return "zero matrix";
    case ErrorCode::kDegenerateValue: return "degenerate value";
    case ErrorCode::kLossDomain: return "loss domain error";
    case ErrorCode::kIo: return "i/o error";
    case ErrorCode::kFormat: return "format error";
    case ErrorCode::kEmptyCorpus: return "empty corpus";
  }
  return "unknown error";
}

}  // namespace lst
