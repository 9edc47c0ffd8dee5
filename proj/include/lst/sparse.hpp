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

// A D-dimensional vector with a handful of nonzeros, kept as (index, value)
// pairs sorted by index. Duplicate indices are rejected.
class KSparseVec {
 public:
  KSparseVec() = default;
  KSparseVec(Index dim, std::vector<Index> indices, std::vector<double> values);

  static KSparseVec one_hot(Index dim, Index at, double value = 1.0);

  Index dim() const noexcept { return dim_; }
  Index nnz() const noexcept { return indices_.size(); }
  std::span<const Index> indices() const noexcept { return indices_; }
  std::span<const double> values() const noexcept { return values_; }
  double squared_norm() const noexcept;
  Vector densify() const;

 private:
  Index dim_ = 0;
  std::vector<Index> indices_;
  std::vector<double> values_;
};

// A D x m matrix whose columns are K-sparse. Storage is column-compressed:
// column j owns entries [col_offsets[j], col_offsets[j + 1]). Within a column
// entries are sorted by row index, and every per-entry array handed around
// alongside a KSparseMat (activations A, gradients dL/dA) uses this order.
class KSparseMat {
 public:
  struct Column {
    std::span<const Index> indices;
    std::span<const double> values;
  };

  KSparseMat() = default;
  KSparseMat(Index rows, std::vector<Index> col_offsets,
             std::vector<Index> indices, std::vector<double> values);

  static KSparseMat from_columns(Index rows, std::span<const KSparseVec> columns);

  Index rows() const noexcept { return rows_; }
  Index cols() const noexcept { return col_offsets_.empty() ? 0 : col_offsets_.size() - 1; }
  Index nnz() const noexcept { return indices_.size(); }
  Index max_active() const noexcept;

  Column column(Index j) const;
  KSparseVec column_vector(Index j) const;

  std::span<const Index> col_offsets() const noexcept { return col_offsets_; }
  std::span<const Index> indices() const noexcept { return indices_; }
  std::span<const double> values() const noexcept { return values_; }

  // Same sparsity pattern, new values (one per stored entry).
  KSparseMat with_values(std::vector<double> values) const;

  // Dense D x m copy. O(Dm); meant for oracles and tests.
  DenseMat densify() const;

 private:
  Index rows_ = 0;
  std::vector<Index> col_offsets_{0};
  std::vector<Index> indices_;
  std::vector<double> values_;
};

// S^T V for S (D x m) sparse and V (D x d) dense -> m x d.
// Touches only the rows of V that S selects.
template <typename T>
Matrix<T> sparse_transpose_times_dense(const KSparseMat& s, const Matrix<T>& v);

// S^T S, an m x m symmetric matrix, from pairwise sparse dot products.
DenseMat sparse_gram(const KSparseMat& s);

// Per-column sum of stored values, i.e. S^T 1_D.
Vector sparse_column_sums(const KSparseMat& s);

// V += scale * S * G with G (m x d). Rows of V not selected by S are left
// bit-identical.
template <typename T>
void scatter_row_update(Matrix<T>& v, const KSparseMat& s, const Matrix<T>& g,
                        T scale);

}  // namespace lst
