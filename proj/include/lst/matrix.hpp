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

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "lst/error.hpp"

namespace lst {

using Index = std::size_t;

// Dense matrix stored row-major: entry (i, j) lives at data()[i * cols() + j].
template <typename T>
class Matrix {
 public:
  using value_type = T;

  Matrix() = default;
  Matrix(Index rows, Index cols, T fill = T{0})
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}
  Matrix(Index rows, Index cols, std::vector<T> data)
      : rows_(rows), cols_(cols), data_(std::move(data)) {
    if (data_.size() != rows_ * cols_) {
      fail(ErrorCode::kDimensionMismatch,
           "matrix storage holds " + std::to_string(data_.size()) +
               " entries, expected " + std::to_string(rows_ * cols_));
    }
  }

  static Matrix zeros(Index rows, Index cols) { return Matrix(rows, cols); }

  static Matrix identity(Index n) {
    Matrix m(n, n);
    for (Index i = 0; i < n; ++i) m(i, i) = T{1};
    return m;
  }

  Index rows() const noexcept { return rows_; }
  Index cols() const noexcept { return cols_; }
  Index size() const noexcept { return data_.size(); }
  bool empty() const noexcept { return data_.empty(); }
  bool is_square() const noexcept { return rows_ == cols_; }

  T& operator()(Index i, Index j) { return data_[i * cols_ + j]; }
  const T& operator()(Index i, Index j) const { return data_[i * cols_ + j]; }

  std::span<T> row(Index i) { return {data_.data() + i * cols_, cols_}; }
  std::span<const T> row(Index i) const {
    return {data_.data() + i * cols_, cols_};
  }

  T* data() noexcept { return data_.data(); }
  const T* data() const noexcept { return data_.data(); }
  std::span<T> values() noexcept { return data_; }
  std::span<const T> values() const noexcept { return data_; }

  Matrix transposed() const {
    Matrix t(cols_, rows_);
    for (Index i = 0; i < rows_; ++i)
      for (Index j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
    return t;
  }

  template <typename U>
  Matrix<U> cast() const {
    Matrix<U> out(rows_, cols_);
    std::transform(data_.begin(), data_.end(), out.data(),
                   [](T v) { return static_cast<U>(v); });
    return out;
  }

  void fill(T value) { std::fill(data_.begin(), data_.end(), value); }

  bool operator==(const Matrix&) const = default;

 private:
  Index rows_ = 0;
  Index cols_ = 0;
  std::vector<T> data_;
};

using DenseMat = Matrix<double>;
using Vector = std::vector<double>;

template <typename T>
double frobenius_norm(const Matrix<T>& a) {
  double acc = 0.0;
  for (T v : a.values()) acc += static_cast<double>(v) * static_cast<double>(v);
  return std::sqrt(acc);
}

template <typename T>
double max_abs(const Matrix<T>& a) {
  double m = 0.0;
  for (T v : a.values()) m = std::max(m, std::abs(static_cast<double>(v)));
  return m;
}

template <typename T>
double max_abs_diff(const Matrix<T>& a, const Matrix<T>& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols())
    fail(ErrorCode::kDimensionMismatch, "max_abs_diff: shape mismatch");
  double m = 0.0;
  for (Index k = 0; k < a.size(); ++k)
    m = std::max(m, std::abs(static_cast<double>(a.data()[k]) -
                             static_cast<double>(b.data()[k])));
  return m;
}

// ||a - b||_F / ||b||_F, or the absolute difference when b is zero.
template <typename T>
double relative_frobenius_diff(const Matrix<T>& a, const Matrix<T>& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols())
    fail(ErrorCode::kDimensionMismatch, "relative_frobenius_diff: shape mismatch");
  double num = 0.0;
  double den = 0.0;
  for (Index k = 0; k < a.size(); ++k) {
    const double diff =
        static_cast<double>(a.data()[k]) - static_cast<double>(b.data()[k]);
    num += diff * diff;
    den += static_cast<double>(b.data()[k]) * static_cast<double>(b.data()[k]);
  }
  return den > 0.0 ? std::sqrt(num / den) : std::sqrt(num);
}

template <typename T>
bool all_finite(const Matrix<T>& a) {
  return std::all_of(a.values().begin(), a.values().end(),
                     [](T v) { return std::isfinite(v); });
}

}  // namespace lst
