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

#include <gtest/gtest.h>

#include <cstring>
#include <random>

#include "lst/kernels.hpp"
#include "lst/sparse.hpp"
#include "test_support.hpp"

namespace lst {
namespace {

using testing::random_matrix;
using testing::random_sparse;
using testing::triple_product;

constexpr int kCases = 200;

struct Shape {
  Index rows, cols, k, d;
};

Shape random_shape(std::mt19937_64& gen) {
  auto pick = [&](Index lo, Index hi) {
    return std::uniform_int_distribution<Index>(lo, hi)(gen);
  };
  const Index rows = pick(1, 100);
  return {rows, pick(1, 16), std::min<Index>(rows, pick(0, 8)), pick(1, 10)};
}

TEST(KSparseVec, RejectsBadIndices) {
  EXPECT_THROW(KSparseVec(5, {5}, {1.0}), Error);
  EXPECT_THROW(KSparseVec(5, {1, 1}, {1.0, 2.0}), Error);
  EXPECT_THROW(KSparseVec(5, {1}, {1.0, 2.0}), Error);
  try {
    KSparseVec(3, {7}, {1.0});
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kIndexOutOfRange);
  }
}

TEST(KSparseVec, OneHotAndNorm) {
  const KSparseVec v = KSparseVec::one_hot(6, 4, -3.0);
  EXPECT_EQ(v.nnz(), 1u);
  EXPECT_DOUBLE_EQ(v.squared_norm(), 9.0);
  const Vector dense = v.densify();
  EXPECT_EQ(dense, (Vector{0, 0, 0, 0, -3.0, 0}));
}

TEST(KSparseMat, RejectsDuplicatesWithinColumnOnly) {
  EXPECT_THROW(KSparseMat(4, {0, 2}, {1, 1}, {1.0, 1.0}), Error);
  EXPECT_THROW(KSparseMat(4, {0, 1}, {4}, {1.0}), Error);
  const KSparseMat ok(4, {0, 1, 2}, {1, 1}, {1.0, 1.0});
  EXPECT_EQ(ok.cols(), 2u);
}

TEST(KSparseMat, EmptyColumnsAreLegal) {
  const KSparseMat s(5, {0, 0, 2, 2}, {0, 3}, {1.0, 2.0});
  EXPECT_EQ(s.cols(), 3u);
  EXPECT_EQ(s.max_active(), 2u);
  EXPECT_EQ(s.column(0).indices.size(), 0u);
  EXPECT_EQ(s.densify()(3, 1), 2.0);
}

TEST(KSparseMat, ColumnsRoundTrip) {
  std::mt19937_64 gen(1);
  const KSparseMat s = random_sparse(gen, 30, 6, 4);
  std::vector<KSparseVec> cols;
  for (Index j = 0; j < s.cols(); ++j) cols.push_back(s.column_vector(j));
  const KSparseMat back = KSparseMat::from_columns(30, cols);
  EXPECT_EQ(back.densify(), s.densify());
}

TEST(SparseTransposeTimesDense, SelectsRow) {
  std::mt19937_64 gen(2);
  const DenseMat v = random_matrix(gen, 8, 3);
  const KSparseMat s(8, {0, 1}, {3}, {1.0});
  const DenseMat out = sparse_transpose_times_dense(s, v);
  for (Index i = 0; i < 3; ++i) EXPECT_EQ(out(0, i), v(3, i));
}

TEST(SparseTransposeTimesDense, EmptyColumnsGiveZeros) {
  std::mt19937_64 gen(3);
  const DenseMat v = random_matrix(gen, 8, 3);
  const KSparseMat s(8, {0, 0, 0}, {}, {});
  EXPECT_EQ(sparse_transpose_times_dense(s, v), DenseMat(2, 3));
}

TEST(SparseTransposeTimesDense, MatchesDensifiedProduct) {
  std::mt19937_64 gen(4);
  for (int c = 0; c < kCases; ++c) {
    const Shape sh = random_shape(gen);
    const KSparseMat s = random_sparse(gen, sh.rows, sh.cols, sh.k);
    const DenseMat v = random_matrix(gen, sh.rows, sh.d);
    const DenseMat want = triple_product(s.densify().transposed(), v);
    EXPECT_LE(max_abs_diff(sparse_transpose_times_dense(s, v), want), 1e-14);
  }
}

TEST(SparseTransposeTimesDense, RejectsRowMismatch) {
  const KSparseMat s(4, {0, 1}, {0}, {1.0});
  EXPECT_THROW(sparse_transpose_times_dense(s, DenseMat(5, 2)), Error);
}

TEST(SparseGram, OneHotAndDuplicateColumns) {
  const KSparseMat one_hot(5, {0, 1, 2, 3}, {0, 2, 4}, {2.0, -1.0, 3.0});
  const DenseMat g = sparse_gram(one_hot);
  for (Index i = 0; i < 3; ++i)
    for (Index j = 0; j < 3; ++j)
      EXPECT_EQ(g(i, j), i == j ? one_hot.values()[i] * one_hot.values()[i] : 0.0);

  const KSparseMat twins(5, {0, 2, 4}, {1, 3, 1, 3}, {1.0, 2.0, 1.0, 2.0});
  const DenseMat t = sparse_gram(twins);
  for (double v : t.values()) EXPECT_EQ(v, 5.0);
}

TEST(SparseGram, MatchesDensifiedGram) {
  std::mt19937_64 gen(5);
  for (int c = 0; c < kCases; ++c) {
    const Shape sh = random_shape(gen);
    const KSparseMat s = random_sparse(gen, sh.rows, sh.cols, sh.k);
    const DenseMat dense = s.densify();
    const DenseMat got = sparse_gram(s);
    EXPECT_LE(max_abs_diff(got, triple_product(dense.transposed(), dense)), 1e-14);
    EXPECT_EQ(got, got.transposed());
  }
}

TEST(SparseColumnSums, SimpleCases) {
  EXPECT_EQ(sparse_column_sums(KSparseMat(4, {0, 0, 0}, {}, {})), (Vector{0, 0}));
  EXPECT_EQ(sparse_column_sums(KSparseMat(4, {0, 3}, {0, 1, 2}, {1, 2, 3})),
            (Vector{6}));
}

TEST(SparseColumnSums, MatchesDensifiedSums) {
  std::mt19937_64 gen(6);
  for (int c = 0; c < kCases; ++c) {
    const Shape sh = random_shape(gen);
    const KSparseMat s = random_sparse(gen, sh.rows, sh.cols, sh.k);
    const DenseMat ones(1, sh.rows, 1.0);
    const DenseMat want = triple_product(ones, s.densify());
    const Vector got = sparse_column_sums(s);
    EXPECT_LE(testing::max_abs_diff(got, want.values()), 1e-14);
  }
}

TEST(ScatterRowUpdate, ZeroScaleIsNoop) {
  std::mt19937_64 gen(7);
  DenseMat v = random_matrix(gen, 10, 4);
  const DenseMat before = v;
  const KSparseMat s = random_sparse(gen, 10, 3, 3, 1);
  scatter_row_update(v, s, random_matrix(gen, 3, 4), 0.0);
  EXPECT_EQ(v, before);
}

TEST(ScatterRowUpdate, SingleEntryAddsScaledRow) {
  std::mt19937_64 gen(8);
  DenseMat v = random_matrix(gen, 6, 3);
  const DenseMat before = v;
  const DenseMat g = random_matrix(gen, 2, 3);
  const KSparseMat s(6, {0, 0, 1}, {4}, {2.5});
  scatter_row_update(v, s, g, -0.5);
  for (Index r = 0; r < 6; ++r)
    for (Index i = 0; i < 3; ++i)
      if (r == 4)
        EXPECT_DOUBLE_EQ(v(r, i), before(r, i) + (-0.5 * 2.5) * g(1, i));
      else
        EXPECT_EQ(v(r, i), before(r, i));
}

TEST(ScatterRowUpdate, MatchesDenseAndLeavesOtherRowsBitIdentical) {
  std::mt19937_64 gen(9);
  for (int c = 0; c < kCases; ++c) {
    const Shape sh = random_shape(gen);
    const KSparseMat s = random_sparse(gen, sh.rows, sh.cols, sh.k);
    DenseMat v = random_matrix(gen, sh.rows, sh.d);
    const DenseMat before = v;
    const DenseMat g = random_matrix(gen, sh.cols, sh.d);
    const double scale = std::uniform_real_distribution<double>(-2, 2)(gen);
    scatter_row_update(v, s, g, scale);

    DenseMat want = triple_product(s.densify(), g);
    for (Index k = 0; k < want.size(); ++k)
      want.data()[k] = before.data()[k] + scale * want.data()[k];
    EXPECT_LE(max_abs_diff(v, want), 1e-14);

    std::vector<bool> touched(sh.rows, false);
    for (Index r : s.indices()) touched[r] = true;
    for (Index r = 0; r < sh.rows; ++r) {
      if (touched[r]) continue;
      EXPECT_EQ(std::memcmp(v.row(r).data(), before.row(r).data(),
                            sh.d * sizeof(double)),
                0);
    }
  }
}

TEST(ScatterRowUpdate, SinglePrecisionMatchesDouble) {
  std::mt19937_64 gen(10);
  const KSparseMat s = random_sparse(gen, 40, 5, 3, 1);
  DenseMat v = random_matrix(gen, 40, 6);
  const DenseMat g = random_matrix(gen, 5, 6);
  Matrix<float> vf = v.cast<float>();
  scatter_row_update(v, s, g, 0.25);
  scatter_row_update(vf, s, g.cast<float>(), 0.25f);
  EXPECT_LE(max_abs_diff(vf.cast<double>(), v), 1e-5);
}

}  // namespace
}  // namespace lst
