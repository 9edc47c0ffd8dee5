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

#include "lst/factored_layer.hpp"
#include "lst/kernels.hpp"
#include "lst/naive_layer.hpp"
#include "oracles/oracle_values.hpp"
#include "test_support.hpp"

namespace lst {
namespace {

using testing::column_sums_of_rows;
using testing::from_array;
using testing::gram;
using testing::random_matrix;
using testing::random_sparse;
using testing::relative_diff;
using testing::triple_product;

// Layer with a non-identity U and nonzero omega, bookkeeping computed densely.
FactoredOutputLayer random_layer(std::mt19937_64& gen, Index big_d, Index d,
                                 double omega_scale = 0.3) {
  DenseMat v = random_matrix(gen, big_d, d, -0.5, 0.5);
  DenseMat u = random_matrix(gen, d, d, -0.2, 0.2);
  for (Index i = 0; i < d; ++i) u(i, i) += 1.0;
  std::vector<double> omega(d);
  std::uniform_real_distribution<double> o(-omega_scale, omega_scale);
  for (double& x : omega) x = o(gen);
  DenseMat w = triple_product(v, u);
  for (Index r = 0; r < big_d; ++r)
    for (Index i = 0; i < d; ++i) w(r, i) += omega[i];
  const Vector sums = column_sums_of_rows(w);
  return FactoredOutputLayer::from_state(v, u, omega, gram(w),
                                         invert_square(u).transposed(),
                                         std::vector<double>(sums));
}

struct Bookkeeping {
  double q = 0.0;
  double wbar = 0.0;
  double inverse = 0.0;
};

Bookkeeping bookkeeping(const FactoredOutputLayer& layer) {
  const DenseMat w = layer.materialize_w();
  return {relative_frobenius_diff(layer.q(), gram(w)),
          relative_diff(layer.wbar(), column_sums_of_rows(w)),
          layer.inverse_residual()};
}

void expect_bookkeeping(const FactoredOutputLayer& layer, double inverse_tol = 1e-6) {
  const Bookkeeping b = bookkeeping(layer);
  EXPECT_LE(b.q, 1e-8);
  EXPECT_LE(b.wbar, 1e-8);
  EXPECT_LE(b.inverse, inverse_tol);
}

void expect_same_state(const FactoredOutputLayer& a, const FactoredOutputLayer& b,
                       double tol) {
  EXPECT_LE(max_abs_diff(a.v(), b.v()), tol);
  EXPECT_LE(max_abs_diff(a.u(), b.u()), tol);
  EXPECT_LE(max_abs_diff(a.q(), b.q()), tol);
  EXPECT_LE(max_abs_diff(a.u_inv_t(), b.u_inv_t()), tol);
  EXPECT_LE(testing::max_abs_diff(a.omega(), b.omega()), tol);
  EXPECT_LE(testing::max_abs_diff(a.wbar(), b.wbar()), tol);
}

double dense_loss(const DenseMat& w, const DenseMat& h, const KSparseMat& y) {
  const DenseMat o = triple_product(w, h);
  const DenseMat yd = y.densify();
  double l = 0.0;
  for (Index k = 0; k < o.size(); ++k)
    l += (o.data()[k] - yd.data()[k]) * (o.data()[k] - yd.data()[k]);
  return l;
}

DenseMat dense_mse_grad(const DenseMat& w, const DenseMat& h, const KSparseMat& y) {
  DenseMat r = triple_product(w, h);
  const DenseMat yd = y.densify();
  for (Index k = 0; k < r.size(); ++k) r.data()[k] = 2.0 * (r.data()[k] - yd.data()[k]);
  return triple_product(w.transposed(), r);
}

TEST(FactoredInit, ZerosInit) {
  const FactoredOutputLayer layer(7, 3);
  EXPECT_EQ(layer.materialize_w(), DenseMat(7, 3));
  EXPECT_EQ(layer.q(), DenseMat(3, 3));
  EXPECT_EQ(layer.wbar(), std::vector<double>(3, 0.0));
  EXPECT_EQ(layer.u(), DenseMat::identity(3));
  EXPECT_EQ(layer.u_inv_t(), DenseMat::identity(3));
  EXPECT_EQ(layer.update_count(), 0u);
}

TEST(FactoredInit, RandomInitBookkeeping) {
  const FactoredOutputLayer layer(10, 3, {VInit::kRandom, 5, 0.5});
  EXPECT_LE(max_abs_diff(layer.q(), gram(layer.v())), 1e-14);
  EXPECT_LE(testing::max_abs_diff(layer.wbar(), column_sums_of_rows(layer.v())),
            1e-14);
  EXPECT_EQ(layer.materialize_w(), layer.v());
  EXPECT_EQ(matmul(layer.u_inv_t(), layer.u(), Trans::kYes), DenseMat::identity(3));
  EXPECT_EQ(layer.inverse_residual(), 0.0);
  double biggest = 0.0;
  for (double x : layer.v().values()) biggest = std::max(biggest, std::abs(x));
  EXPECT_LE(biggest, 0.5);
  EXPECT_GT(biggest, 0.0);
}

TEST(FactoredInit, RejectsEmptyDimensions) {
  EXPECT_THROW(FactoredOutputLayer(0, 3), Error);
  EXPECT_THROW(FactoredOutputLayer(3, 0), Error);
}

TEST(FactoredInit, FromStateChecksShapes) {
  const DenseMat i3 = DenseMat::identity(3);
  EXPECT_THROW(FactoredOutputLayer::from_state(DenseMat(4, 3), DenseMat::identity(2),
                                               {0, 0, 0}, i3, i3, {0, 0, 0}),
               Error);
}

TEST(Materialize, OmegaOnlyRowsRepeatOmega) {
  const std::vector<double> omega{0.5, -1.0, 2.0};
  const DenseMat i3 = DenseMat::identity(3);
  const FactoredOutputLayer layer =
      FactoredOutputLayer::from_state(DenseMat(4, 3), i3, omega, i3, i3, {0, 0, 0});
  const DenseMat w = layer.materialize_w();
  for (Index r = 0; r < 4; ++r)
    for (Index i = 0; i < 3; ++i) EXPECT_EQ(w(r, i), omega[i]);
}

TEST(Materialize, StoredRowSumsAgree) {
  std::mt19937_64 gen(1);
  const FactoredOutputLayer layer = random_layer(gen, 12, 4);
  EXPECT_LE(testing::max_abs_diff(layer.wbar(),
                                  column_sums_of_rows(layer.materialize_w())),
            1e-10);
}

TEST(ForwardStats, ZeroLayerGivesZeros) {
  std::mt19937_64 gen(2);
  const FactoredOutputLayer layer(9, 4);
  const KSparseMat y = random_sparse(gen, 9, 3, 3, 1);
  const ForwardStats<double> st = layer.forward_stats(random_matrix(gen, 4, 3), y, true);
  for (double v : st.q) EXPECT_EQ(v, 0.0);
  for (double v : st.s) EXPECT_EQ(v, 0.0);
  for (double v : st.a) EXPECT_EQ(v, 0.0);
}

TEST(ForwardStats, MatchesDenseOutputs) {
  std::mt19937_64 gen(3);
  for (int rep = 0; rep < 50; ++rep) {
    const FactoredOutputLayer layer = random_layer(gen, 15, 5);
    const DenseMat h = random_matrix(gen, 5, 4);
    const KSparseMat y = random_sparse(gen, 15, 4, 3);
    const ForwardStats<double> st = layer.forward_stats(h, y, true);
    const DenseMat o = triple_product(layer.materialize_w(), h);
    Index e = 0;
    for (Index j = 0; j < 4; ++j) {
      double q = 0.0, s = 0.0;
      for (Index r = 0; r < 15; ++r) q += o(r, j) * o(r, j), s += o(r, j);
      EXPECT_NEAR(st.q[j], q, 1e-10);
      EXPECT_NEAR(st.s[j], s, 1e-10);
      for (Index r : y.column(j).indices) EXPECT_NEAR(st.a[e++], o(r, j), 1e-10);
    }
    const ForwardStats<double> no_s = layer.forward_stats(h, y, false);
    for (double v : no_s.s) EXPECT_EQ(v, 0.0);
  }
}

TEST(ForwardStats, OmegaOnlyLayerBroadcastsProjection) {
  std::mt19937_64 gen(4);
  const std::vector<double> omega{0.5, 0.5, 0.5};
  const DenseMat i3 = DenseMat::identity(3);
  DenseMat q(3, 3, 0.25 * 6);
  const FactoredOutputLayer layer = FactoredOutputLayer::from_state(
      DenseMat(6, 3), i3, omega, q, i3, {3.0, 3.0, 3.0});
  const DenseMat h = random_matrix(gen, 3, 2);
  const KSparseMat y = random_sparse(gen, 6, 2, 3, 3);
  const ForwardStats<double> st = layer.forward_stats(h, y, true);
  for (Index j = 0; j < 2; ++j) {
    const double proj = 0.5 * (h(0, j) + h(1, j) + h(2, j));
    EXPECT_NEAR(st.h_omega[j], proj, 1e-15);
    for (Index e = 3 * j; e < 3 * j + 3; ++e) EXPECT_NEAR(st.a[e], proj, 1e-15);
  }
}

TEST(ForwardStats, SquaredNormsAreNonnegative) {
  std::mt19937_64 gen(5);
  FactoredOutputLayer layer(30, 6, {VInit::kRandom, 9, 0.3});
  for (int step = 0; step < 200; ++step) {
    const DenseMat h = random_matrix(gen, 6, 4);
    const KSparseMat y = random_sparse(gen, 30, 4, 3);
    const ForwardStats<double> st = layer.forward_stats(h, y, false);
    const double qn = frobenius_norm(layer.q());
    for (Index j = 0; j < 4; ++j) {
      double hn = 0.0;
      for (Index i = 0; i < 6; ++i) hn += h(i, j) * h(i, j);
      EXPECT_GE(st.q[j], -1e-9 * hn * qn);
    }
    layer.minibatch_mse_update(h, y, 0.02);
  }
}

TEST(ForwardStats, RejectsShapeErrors) {
  const FactoredOutputLayer layer(6, 3);
  EXPECT_THROW(layer.forward_stats(DenseMat(4, 2), KSparseMat(6, {0, 0, 0}, {}, {}), false),
               Error);
  EXPECT_THROW(layer.forward_stats(DenseMat(3, 2), KSparseMat(7, {0, 0, 0}, {}, {}), false),
               Error);
  EXPECT_THROW(layer.forward_stats(DenseMat(3, 2), KSparseMat(6, {0, 0}, {}, {}), false),
               Error);
}

TEST(OnlineUpdate, ZeroStepEvaluatesWithoutChangingState) {
  std::mt19937_64 gen(6);
  FactoredOutputLayer layer = random_layer(gen, 8, 3);
  const FactoredOutputLayer before = layer;
  const DenseMat h = random_matrix(gen, 3, 1);
  const KSparseMat y = random_sparse(gen, 8, 1, 2, 2);
  const OnlineResult<double> r = layer.online_mse_update(h.values(), y.column_vector(0), 0.0);
  const DenseMat w = before.materialize_w();
  EXPECT_NEAR(r.loss, dense_loss(w, h, y), 1e-12);
  EXPECT_LE(testing::max_abs_diff(r.grad_h, dense_mse_grad(w, h, y).values()), 1e-12);
  expect_same_state(layer, before, 0.0);
  EXPECT_EQ(layer.update_count(), 0u);
}

TEST(OnlineUpdate, OneStepMatchesNaive) {
  std::mt19937_64 gen(7);
  FactoredOutputLayer layer(6, 3, {VInit::kRandom, 1, 0.5});
  NaiveOutputLayer naive(layer.materialize_w());
  const DenseMat h = random_matrix(gen, 3, 1);
  const KSparseMat y = random_sparse(gen, 6, 1, 2, 2);
  const OnlineResult<double> r = layer.online_mse_update(h.values(), y.column_vector(0), 0.1);
  const UpdateResult<double> n = naive.mse_step(h, y, 0.1);
  EXPECT_NEAR(r.loss, n.loss, 1e-12);
  EXPECT_LE(testing::max_abs_diff(r.grad_h, n.grad_h.values()), 1e-12);
  EXPECT_LE(max_abs_diff(layer.materialize_w(), naive.w()), 1e-12);
  expect_bookkeeping(layer, 1e-12);
  EXPECT_EQ(layer.update_count(), 1u);
}

TEST(OnlineUpdate, NonzeroOmegaTrajectoryMatchesNaive) {
  std::mt19937_64 gen(8);
  FactoredOutputLayer layer = random_layer(gen, 20, 4);
  NaiveOutputLayer naive(layer.materialize_w());
  for (int step = 0; step < 100; ++step) {
    const DenseMat h = random_matrix(gen, 4, 1);
    const KSparseMat y = random_sparse(gen, 20, 1, 3);
    const OnlineResult<double> r =
        layer.online_mse_update(h.values(), y.column_vector(0), 0.03);
    const UpdateResult<double> n = naive.mse_step(h, y, 0.03);
    ASSERT_LE(std::abs(r.loss - n.loss), 1e-9 * std::max(1.0, n.loss));
    ASSERT_LE(relative_frobenius_diff(layer.materialize_w(), naive.w()), 1e-8);
  }
  expect_bookkeeping(layer);
}

TEST(OnlineUpdate, ForcedSingularityIsRejected) {
  std::mt19937_64 gen(9);
  FactoredOutputLayer layer(6, 3, {VInit::kRandom, 2, 0.5});
  const FactoredOutputLayer before = layer;
  const std::vector<double> h{0.5, -1.0, 2.0};
  const double eta = 1.0 / (2.0 * (0.25 + 1.0 + 4.0));
  try {
    layer.online_mse_update(h, KSparseVec::one_hot(6, 2), eta);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kSingularUpdate);
  }
  expect_same_state(layer, before, 0.0);
}

TEST(OnlineUpdate, RejectsShapeErrors) {
  FactoredOutputLayer layer(6, 3);
  const std::vector<double> h{1, 2};
  EXPECT_THROW(layer.online_mse_update(h, KSparseVec::one_hot(6, 1), 0.1), Error);
  const std::vector<double> h3{1, 2, 3};
  EXPECT_THROW(layer.online_mse_update(h3, KSparseVec::one_hot(5, 1), 0.1), Error);
}

TEST(MinibatchUpdate, MatchesFrozenAutodiffOracle) {
  FactoredOutputLayer layer =
      FactoredOutputLayer::from_weights(from_array(6, 3, oracle::kMseW));
  const DenseMat h = from_array(3, 2, oracle::kMseH);
  const KSparseMat y = testing::sparse_from_entries(6, 2, oracle::kMseY);
  const UpdateResult<double> r = layer.minibatch_mse_update(h, y, oracle::kMseEta);
  EXPECT_NEAR(r.loss, oracle::kMseLoss, 1e-12);
  EXPECT_LE(testing::max_abs_diff(r.grad_h.values(), oracle::kMseGradH), 1e-12);
  EXPECT_LE(testing::max_abs_diff(layer.materialize_w().values(), oracle::kMseWNew),
            1e-12);
}

TEST(MinibatchUpdate, SingleColumnEqualsOnlineUpdate) {
  std::mt19937_64 gen(10);
  FactoredOutputLayer a(12, 4, {VInit::kRandom, 3, 0.4});
  FactoredOutputLayer b = a;
  for (int step = 0; step < 20; ++step) {
    const DenseMat h = random_matrix(gen, 4, 1);
    const KSparseMat y = random_sparse(gen, 12, 1, 3);
    const OnlineResult<double> ro = a.online_mse_update(h.values(), y.column_vector(0), 0.05);
    const UpdateResult<double> rm = b.minibatch_mse_update(h, y, 0.05);
    EXPECT_NEAR(ro.loss, rm.loss, 1e-12);
    EXPECT_LE(testing::max_abs_diff(ro.grad_h, rm.grad_h.values()), 1e-12);
    expect_same_state(a, b, 1e-12);
  }
}

TEST(MinibatchUpdate, ZeroStepEvaluatesWithoutChangingState) {
  std::mt19937_64 gen(11);
  FactoredOutputLayer layer = random_layer(gen, 14, 4);
  const FactoredOutputLayer before = layer;
  const DenseMat h = random_matrix(gen, 4, 5);
  const KSparseMat y = random_sparse(gen, 14, 5, 3);
  const UpdateResult<double> r = layer.minibatch_mse_update(h, y, 0.0);
  const DenseMat w = before.materialize_w();
  EXPECT_NEAR(r.loss, dense_loss(w, h, y), 1e-10);
  EXPECT_LE(max_abs_diff(r.grad_h, dense_mse_grad(w, h, y)), 1e-10);
  expect_same_state(layer, before, 0.0);
}

TEST(MinibatchUpdate, TrajectoryMatchesNaive) {
  std::mt19937_64 gen(12);
  FactoredOutputLayer layer(40, 8, {VInit::kRandom, 4, 0.2});
  NaiveOutputLayer naive(layer.materialize_w());
  for (int step = 0; step < 25; ++step) {
    const DenseMat h = random_matrix(gen, 8, 4);
    const KSparseMat y = random_sparse(gen, 40, 4, 3, 3);
    const UpdateResult<double> r = layer.minibatch_mse_update(h, y, 0.02);
    const UpdateResult<double> n = naive.mse_step(h, y, 0.02);
    EXPECT_LE(std::abs(r.loss - n.loss), 1e-9 * std::max(1.0, n.loss));
    EXPECT_LE(relative_frobenius_diff(r.grad_h, n.grad_h), 1e-9);
    EXPECT_LE(relative_frobenius_diff(layer.materialize_w(), naive.w()), 1e-8);
  }
}

TEST(MinibatchUpdate, WideBatchUsesDirectInverse) {
  std::mt19937_64 gen(13);
  FactoredOutputLayer layer = random_layer(gen, 25, 3);
  NaiveOutputLayer naive(layer.materialize_w());
  for (int step = 0; step < 30; ++step) {
    const DenseMat h = random_matrix(gen, 3, 7, -0.5, 0.5);
    const KSparseMat y = random_sparse(gen, 25, 7, 2);
    layer.minibatch_mse_update(h, y, 0.02);
    naive.mse_step(h, y, 0.02);
    ASSERT_LE(relative_frobenius_diff(layer.materialize_w(), naive.w()), 1e-8);
    ASSERT_LE(layer.inverse_residual(), 1e-10);
  }
  expect_bookkeeping(layer, 1e-10);
}

TEST(MinibatchUpdate, SingularSystemIsRejected) {
  FactoredOutputLayer layer(6, 3, {VInit::kRandom, 2, 0.5});
  const FactoredOutputLayer before = layer;
  const DenseMat h(3, 1, std::vector<double>{0.5, -1.0, 2.0});
  try {
    layer.minibatch_mse_update(h, KSparseMat(6, {0, 1}, {2}, {1.0}),
                               1.0 / (2.0 * 5.25));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kSingularUpdate);
  }
  expect_same_state(layer, before, 0.0);
  EXPECT_EQ(layer.update_count(), 0u);
}

TEST(SphericalUpdate, MatchesFrozenAutodiffOracleForSumDependentLoss) {
  FactoredOutputLayer layer =
      FactoredOutputLayer::from_weights(from_array(5, 3, oracle::kSphW));
  const DenseMat h = from_array(3, 2, oracle::kSphH);
  const KSparseMat y = testing::sparse_from_entries(5, 2, oracle::kSphY);
  const UpdateResult<double> r =
      layer.spherical_update(h, y, oracle::kSphEta, testing::SumDependentLoss());
  EXPECT_NEAR(r.loss, oracle::kSphLoss, 1e-12);
  EXPECT_LE(testing::max_abs_diff(r.grad_h.values(), oracle::kSphGradH), 1e-12);
  EXPECT_LE(testing::max_abs_diff(layer.materialize_w().values(), oracle::kSphWNew),
            1e-12);
  expect_bookkeeping(layer, 1e-12);
}

TEST(SphericalUpdate, ZeroStepSquaredErrorLoss) {
  std::mt19937_64 gen(14);
  FactoredOutputLayer layer = random_layer(gen, 16, 4);
  const FactoredOutputLayer before = layer;
  const DenseMat h = random_matrix(gen, 4, 3);
  const KSparseMat y = random_sparse(gen, 16, 3, 3);
  const UpdateResult<double> r = layer.spherical_update(h, y, 0.0, SquaredErrorLoss());
  EXPECT_NEAR(r.loss, dense_loss(before.materialize_w(), h, y), 1e-10);
  expect_same_state(layer, before, 0.0);
}

TEST(SphericalUpdate, SquaredErrorCollapsesToMsePath) {
  std::mt19937_64 gen(15);
  FactoredOutputLayer mse(30, 6, {VInit::kRandom, 6, 0.3});
  FactoredOutputLayer sph = mse;
  for (int step = 0; step < 50; ++step) {
    const DenseMat h = random_matrix(gen, 6, 3);
    const KSparseMat y = random_sparse(gen, 30, 3, 3);
    const UpdateResult<double> a = mse.minibatch_mse_update(h, y, 0.02);
    const UpdateResult<double> b = sph.spherical_update(h, y, 0.02, SquaredErrorLoss());
    EXPECT_NEAR(a.loss, b.loss, 1e-10);
    EXPECT_LE(max_abs_diff(a.grad_h, b.grad_h), 1e-10);
    expect_same_state(mse, sph, 1e-10);
  }
}

TEST(SphericalUpdate, SumDependentTrajectoryMatchesNaive) {
  std::mt19937_64 gen(16);
  FactoredOutputLayer layer = random_layer(gen, 20, 5, 0.1);
  NaiveOutputLayer naive(layer.materialize_w());
  const testing::SumDependentLoss loss;
  for (int step = 0; step < 60; ++step) {
    const DenseMat h = random_matrix(gen, 5, 3, -0.5, 0.5);
    const KSparseMat y = random_sparse(gen, 20, 3, 3);
    const UpdateResult<double> r = layer.spherical_update(h, y, 0.002, loss);
    const UpdateResult<double> n = naive.spherical_step(h, y, 0.002, loss);
    ASSERT_LE(std::abs(r.loss - n.loss), 1e-9 * std::max(1.0, std::abs(n.loss)));
    ASSERT_LE(relative_frobenius_diff(r.grad_h, n.grad_h), 1e-9);
    ASSERT_LE(relative_frobenius_diff(layer.materialize_w(), naive.w()), 1e-9);
    expect_bookkeeping(layer);
  }
}

void expect_gradient_matches_differences(const SphericalLoss& loss, int seed) {
  std::mt19937_64 gen(seed);
  FactoredOutputLayer layer = random_layer(gen, 20, 4);
  DenseMat h = random_matrix(gen, 4, 3);
  const KSparseMat y = random_sparse(gen, 20, 3, 3, 1);
  const UpdateResult<double> r = layer.spherical_update(h, y, 0.0, loss);
  for (Index k = 0; k < h.size(); ++k) {
    auto total = [&] { return layer.spherical_update(h, y, 0.0, loss).loss; };
    const double fd = testing::central_difference(total, h.data()[k]);
    EXPECT_LE(testing::relative_error(r.grad_h.data()[k], fd), 1e-5) << k;
  }
}

TEST(SphericalUpdate, GradientMatchesDifferencesForSquaredError) {
  expect_gradient_matches_differences(SquaredErrorLoss(), 17);
}

TEST(SphericalUpdate, GradientMatchesDifferencesForSumDependentLoss) {
  expect_gradient_matches_differences(testing::SumDependentLoss(), 18);
}

TEST(MinibatchUpdate, GradientMatchesDifferences) {
  std::mt19937_64 gen(19);
  FactoredOutputLayer layer = random_layer(gen, 20, 4);
  DenseMat h = random_matrix(gen, 4, 3);
  const KSparseMat y = random_sparse(gen, 20, 3, 3, 1);
  const UpdateResult<double> r = layer.minibatch_mse_update(h, y, 0.0);
  for (Index k = 0; k < h.size(); ++k) {
    auto total = [&] { return layer.minibatch_mse_update(h, y, 0.0).loss; };
    EXPECT_LE(testing::relative_error(r.grad_h.data()[k],
                                      testing::central_difference(total, h.data()[k])),
              1e-5);
  }
}

// Rows of V outside the target support must not be written.
TEST(FactoredUpdates, TouchOnlyTargetRowsOfV) {
  std::mt19937_64 gen(20);
  FactoredOutputLayer layer(200, 6, {VInit::kRandom, 8, 0.3});
  for (int step = 0; step < 30; ++step) {
    const DenseMat before = layer.v();
    const DenseMat h = random_matrix(gen, 6, 4);
    const KSparseMat y = random_sparse(gen, 200, 4, 3);
    if (step % 2 == 0)
      layer.minibatch_mse_update(h, y, 0.02);
    else
      layer.spherical_update(h, y, 0.002, testing::SumDependentLoss());
    std::vector<bool> touched(200, false);
    for (Index r : y.indices()) touched[r] = true;
    Index written = 0;
    for (Index r = 0; r < 200; ++r) {
      const bool same = std::memcmp(layer.v().row(r).data(), before.row(r).data(),
                                    6 * sizeof(double)) == 0;
      if (!same) ++written;
      if (!touched[r]) EXPECT_TRUE(same) << r;
    }
    EXPECT_LE(written, y.nnz());
  }
}

struct TrajectoryCase {
  Index big_d, d, m, k;
  double eta;
  bool spherical;
};

TEST(FactoredUpdates, RandomTrajectoriesStayExact) {
  std::mt19937_64 gen(21);
  auto pick = [&](Index lo, Index hi) {
    return std::uniform_int_distribution<Index>(lo, hi)(gen);
  };
  for (int trial = 0; trial < 8; ++trial) {
    const Index d = pick(2, 10);
    const TrajectoryCase c{pick(d + 1, 60), d, pick(1, 8), pick(1, 3),
                           std::uniform_real_distribution<double>(0.001, 0.05)(gen),
                           trial % 2 == 1};
    FactoredOutputLayer layer(c.big_d, c.d, {VInit::kRandom, Index(trial), 0.2});
    NaiveOutputLayer naive(layer.materialize_w());
    const SquaredErrorLoss loss;
    for (int step = 0; step < 200; ++step) {
      const DenseMat h = random_matrix(gen, c.d, c.m, -0.5, 0.5);
      const KSparseMat y = random_sparse(gen, c.big_d, c.m, c.k);
      const UpdateResult<double> r =
          c.spherical ? layer.spherical_update(h, y, c.eta, loss)
                      : layer.minibatch_mse_update(h, y, c.eta);
      const UpdateResult<double> n = naive.mse_step(h, y, c.eta);
      ASSERT_LE(std::abs(r.loss - n.loss), 1e-9 * std::max(1.0, n.loss)) << trial;
      ASSERT_LE(relative_frobenius_diff(r.grad_h, n.grad_h), 1e-9) << trial;
      ASSERT_LE(relative_frobenius_diff(layer.materialize_w(), naive.w()), 1e-8)
          << trial << " step " << step;
      const Bookkeeping b = bookkeeping(layer);
      ASSERT_LE(b.q, 1e-8);
      ASSERT_LE(b.wbar, 1e-8);
      ASSERT_LE(b.inverse, 1e-6);
    }
    EXPECT_EQ(layer.update_count(), 200u);
  }
}

TEST(RefreshInverse, SimpleCases) {
  FactoredOutputLayer layer(4, 3);
  layer.refresh_inverse();
  EXPECT_EQ(layer.u_inv_t(), DenseMat::identity(3));

  DenseMat u = DenseMat::identity(3);
  for (Index i = 0; i < 3; ++i) u(i, i) = 2.0;
  FactoredOutputLayer scaled = FactoredOutputLayer::from_state(
      DenseMat(4, 3), u, {0, 0, 0}, DenseMat(3, 3), DenseMat::identity(3), {0, 0, 0});
  EXPECT_GT(scaled.inverse_residual(), 0.5);
  scaled.refresh_inverse();
  for (Index i = 0; i < 3; ++i) EXPECT_EQ(scaled.u_inv_t()(i, i), 0.5);
  EXPECT_EQ(scaled.inverse_residual(), 0.0);
}

TEST(RefreshInverse, RestoresResidualAfterLongRun) {
  std::mt19937_64 gen(22);
  FactoredOutputLayer layer(30, 5, {VInit::kRandom, 10, 0.3});
  for (int step = 0; step < 500; ++step) {
    const DenseMat h = random_matrix(gen, 5, 1, -0.5, 0.5);
    layer.online_mse_update(h.values(), random_sparse(gen, 30, 1, 2, 1).column_vector(0),
                            0.05);
  }
  const double drifted = layer.inverse_residual();
  EXPECT_LE(drifted, 1e-6);
  layer.refresh_inverse();
  EXPECT_LE(layer.inverse_residual(), 1e-10);
  EXPECT_LE(layer.inverse_residual(), std::max(drifted, 1e-10));
}

TEST(RefreshInverse, SingularUIsReported) {
  const DenseMat i2 = DenseMat::identity(2);
  FactoredOutputLayer layer = FactoredOutputLayer::from_state(
      DenseMat(3, 2), DenseMat(2, 2, 1.0), {0, 0}, DenseMat(2, 2), i2, {0, 0});
  try {
    layer.refresh_inverse();
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kSingularMatrix);
  }
}

TEST(FactoredSinglePrecision, TracksDoublePrecisionTrajectory) {
  std::mt19937_64 gen(23);
  FactoredOutputLayer ref(50, 8, {VInit::kRandom, 11, 0.2});
  BasicFactoredLayer<float> lo = BasicFactoredLayer<float>::from_weights(
      ref.materialize_w().cast<float>());
  for (int step = 0; step < 20; ++step) {
    const DenseMat h = random_matrix(gen, 8, 4);
    const KSparseMat y = random_sparse(gen, 50, 4, 2);
    const UpdateResult<double> a = ref.minibatch_mse_update(h, y, 0.01);
    const UpdateResult<float> b = lo.spherical_update(h.cast<float>(), y, 0.01f,
                                                      SquaredErrorLoss());
    EXPECT_LE(std::abs(a.loss - b.loss), 1e-3 * std::max(1.0, a.loss));
  }
  EXPECT_LE(relative_frobenius_diff(lo.materialize_w().cast<double>(), ref.materialize_w()),
            1e-4);
}

}  // namespace
}  // namespace lst
