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

#include "lst/sparse.hpp"

#include <algorithm>
#include <numeric>
#include <string>

namespace lst {

namespace {

void sort_and_check(Index dim, std::span<Index> idx, std::span<double> val,
                    const char* what) {
  std::vector<Index> order(idx.size());
  std::iota(order.begin(), order.end(), Index{0});
  std::sort(order.begin(), order.end(),
            [&](Index a, Index b) { return idx[a] < idx[b]; });
  std::vector<Index> si(idx.size());
  std::vector<double> sv(idx.size());
  for (Index k = 0; k < order.size(); ++k) {
    si[k] = idx[order[k]];
    sv[k] = val[order[k]];
  }
  for (Index k = 0; k < si.size(); ++k) {
    if (si[k] >= dim) {
      fail(ErrorCode::kIndexOutOfRange,
           std::string(what) + ": index " + std::to_string(si[k]) +
               " outside [0, " + std::to_string(dim) + ")");
    }
    if (k > 0 && si[k] == si[k - 1]) {
      fail(ErrorCode::kInvalidArgument, std::string(what) +
                                            ": duplicate index " +
                                            std::to_string(si[k]));
    }
  }
  std::copy(si.begin(), si.end(), idx.begin());
  std::copy(sv.begin(), sv.end(), val.begin());
}

}  // namespace

KSparseVec::KSparseVec(Index dim, std::vector<Index> indices,
                       std::vector<double> values)
    : dim_(dim), indices_(std::move(indices)), values_(std::move(values)) {
  if (indices_.size() != values_.size()) {
    fail(ErrorCode::kDimensionMismatch,
         "KSparseVec: index and value counts differ");
  }
  sort_and_check(dim_, indices_, values_, "KSparseVec");
}

KSparseVec KSparseVec::one_hot(Index dim, Index at, double value) {
  return KSparseVec(dim, {at}, {value});
}

double KSparseVec::squared_norm() const noexcept {
  double acc = 0.0;
  for (double v : values_) acc += v * v;
  return acc;
}

Vector KSparseVec::densify() const {
  Vector out(dim_, 0.0);
  for (Index k = 0; k < nnz(); ++k) out[indices_[k]] = values_[k];
  return out;
}

KSparseMat::KSparseMat(Index rows, std::vector<Index> col_offsets,
                       std::vector<Index> indices, std::vector<double> values)
    : rows_(rows),
      col_offsets_(std::move(col_offsets)),
      indices_(std::move(indices)),
      values_(std::move(values)) {
  if (col_offsets_.empty() || col_offsets_.front() != 0 ||
      col_offsets_.back() != indices_.size() ||
      indices_.size() != values_.size()) {
    fail(ErrorCode::kDimensionMismatch, "KSparseMat: inconsistent layout");
  }
  for (Index j = 0; j + 1 < col_offsets_.size(); ++j) {
    const Index b = col_offsets_[j], e = col_offsets_[j + 1];
    if (e < b) fail(ErrorCode::kInvalidArgument, "KSparseMat: offsets decrease");
    sort_and_check(rows_, std::span(indices_).subspan(b, e - b),
                   std::span(values_).subspan(b, e - b), "KSparseMat");
  }
}

KSparseMat KSparseMat::from_columns(Index rows,
                                    std::span<const KSparseVec> columns) {
  std::vector<Index> offsets{0};
  std::vector<Index> idx;
  std::vector<double> val;
  for (const auto& c : columns) {
    if (c.dim() != rows) {
      fail(ErrorCode::kDimensionMismatch, "KSparseMat: column dimension");
    }
    idx.insert(idx.end(), c.indices().begin(), c.indices().end());
    val.insert(val.end(), c.values().begin(), c.values().end());
    offsets.push_back(idx.size());
  }
  return KSparseMat(rows, std::move(offsets), std::move(idx), std::move(val));
}

Index KSparseMat::max_active() const noexcept {
  Index k = 0;
  for (Index j = 0; j + 1 < col_offsets_.size(); ++j)
    k = std::max(k, col_offsets_[j + 1] - col_offsets_[j]);
  return k;
}

KSparseMat::Column KSparseMat::column(Index j) const {
  const Index b = col_offsets_[j], e = col_offsets_[j + 1];
  return {std::span(indices_).subspan(b, e - b),
          std::span(values_).subspan(b, e - b)};
}

KSparseVec KSparseMat::column_vector(Index j) const {
  const Column c = column(j);
  return KSparseVec(rows_, {c.indices.begin(), c.indices.end()},
                    {c.values.begin(), c.values.end()});
}

KSparseMat KSparseMat::with_values(std::vector<double> values) const {
  if (values.size() != values_.size()) {
    fail(ErrorCode::kDimensionMismatch, "KSparseMat::with_values: count");
  }
  KSparseMat out;
  out.rows_ = rows_;
  out.col_offsets_ = col_offsets_;
  out.indices_ = indices_;
  out.values_ = std::move(values);
  return out;
}

DenseMat KSparseMat::densify() const {
  DenseMat out(rows_, cols());
  for (Index j = 0; j < cols(); ++j) {
    const Column c = column(j);
    for (Index k = 0; k < c.indices.size(); ++k) out(c.indices[k], j) = c.values[k];
  }
  return out;
}

template <typename T>
Matrix<T> sparse_transpose_times_dense(const KSparseMat& s, const Matrix<T>& v) {
  if (s.rows() != v.rows()) {
    fail(ErrorCode::kDimensionMismatch,
         "sparse_transpose_times_dense: row dimensions differ");
  }
  const Index d = v.cols();
  Matrix<T> out(s.cols(), d);
  for (Index j = 0; j < s.cols(); ++j) {
    const auto c = s.column(j);
    T* orow = out.data() + j * d;
    for (Index k = 0; k < c.indices.size(); ++k) {
      const T w = static_cast<T>(c.values[k]);
      const T* vrow = v.data() + c.indices[k] * d;
      for (Index i = 0; i < d; ++i) orow[i] += w * vrow[i];
    }
  }
  return out;
}

DenseMat sparse_gram(const KSparseMat& s) {
  const Index m = s.cols();
  DenseMat g(m, m);
  for (Index a = 0; a < m; ++a) {
    const auto ca = s.column(a);
    for (Index b = a; b < m; ++b) {
      const auto cb = s.column(b);
      double acc = 0.0;
      Index i = 0, j = 0;
      while (i < ca.indices.size() && j < cb.indices.size()) {
        if (ca.indices[i] < cb.indices[j]) {
          ++i;
        } else if (cb.indices[j] < ca.indices[i]) {
          ++j;
        } else {
          acc += ca.values[i++] * cb.values[j++];
        }
      }
      g(a, b) = acc;
      g(b, a) = acc;
    }
  }
  return g;
}

Vector sparse_column_sums(const KSparseMat& s) {
  Vector out(s.cols(), 0.0);
  for (Index j = 0; j < s.cols(); ++j)
    for (double v : s.column(j).values) out[j] += v;
  return out;
}

template <typename T>
void scatter_row_update(Matrix<T>& v, const KSparseMat& s, const Matrix<T>& g,
                        T scale) {
  if (s.rows() != v.rows() || g.rows() != s.cols() || g.cols() != v.cols()) {
    fail(ErrorCode::kDimensionMismatch, "scatter_row_update: shapes");
  }
  const Index d = v.cols();
  for (Index j = 0; j < s.cols(); ++j) {
    const auto c = s.column(j);
    const T* grow = g.data() + j * d;
    for (Index k = 0; k < c.indices.size(); ++k) {
      const T w = scale * static_cast<T>(c.values[k]);
      T* vrow = v.data() + c.indices[k] * d;
      for (Index i = 0; i < d; ++i) vrow[i] += w * grow[i];
    }
  }
}

template Matrix<float> sparse_transpose_times_dense(const KSparseMat&,
                                                    const Matrix<float>&);
template Matrix<double> sparse_transpose_times_dense(const KSparseMat&,
                                                     const Matrix<double>&);
template void scatter_row_update(Matrix<float>&, const KSparseMat&,
                                 const Matrix<float>&, float);
template void scatter_row_update(Matrix<double>&, const KSparseMat&,
                                 const Matrix<double>&, double);

}  // namespace lst
