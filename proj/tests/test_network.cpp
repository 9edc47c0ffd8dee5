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
#include <filesystem>
#include <fstream>
#include <random>

#include "lst/kernels.hpp"
#include "lst/network.hpp"
#include "test_support.hpp"
#include "twin_networks.hpp"

namespace lst {
namespace {

using testing::random_matrix;
using testing::random_sparse;

SparseInputLayer random_input_layer(std::mt19937_64& gen, Index rows, Index width) {
  SparseInputLayer layer{random_matrix(gen, rows, width), {}};
  const DenseMat b = random_matrix(gen, 1, width);
  layer.b.assign(b.values().begin(), b.values().end());
  return layer;
}

TEST(SparseInputForward, SelectorAndZeroInput) {
  std::mt19937_64 gen(1);
  const SparseInputLayer layer = random_input_layer(gen, 10, 4);
  const DenseMat a = sparse_input_forward(layer, KSparseMat(10, {0, 1, 1}, {6}, {1.0}));
  for (Index i = 0; i < 4; ++i) {
    EXPECT_EQ(a(i, 0), layer.w(6, i) + layer.b[i]);
    EXPECT_EQ(a(i, 1), layer.b[i]);
  }
  EXPECT_THROW(sparse_input_forward(layer, KSparseMat(9, {0, 0}, {}, {})), Error);
}

TEST(SparseInputForward, MatchesDensifiedProduct) {
  std::mt19937_64 gen(2);
  for (int c = 0; c < 200; ++c) {
    const Index rows = std::uniform_int_distribution<Index>(3, 80)(gen);
    const Index width = std::uniform_int_distribution<Index>(1, 12)(gen);
    const SparseInputLayer layer = random_input_layer(gen, rows, width);
    const KSparseMat x = random_sparse(gen, rows, 5, 3);
    DenseMat want = testing::triple_product(layer.w.transposed(), x.densify());
    for (Index i = 0; i < width; ++i)
      for (Index j = 0; j < 5; ++j) want(i, j) += layer.b[i];
    EXPECT_LE(max_abs_diff(sparse_input_forward(layer, x), want), 1e-14);
  }
}

TEST(SparseInputUpdate, ZeroStepAndSelector) {
  std::mt19937_64 gen(3);
  SparseInputLayer layer = random_input_layer(gen, 10, 4);
  const SparseInputLayer before = layer;
  const KSparseMat x(10, {0, 1}, {2}, {1.0});
  const DenseMat g = random_matrix(gen, 4, 1);
  sparse_input_update(layer, x, g, 0.0);
  EXPECT_EQ(layer.w, before.w);
  EXPECT_EQ(layer.b, before.b);

  sparse_input_update(layer, x, g, 0.1);
  for (Index r = 0; r < 10; ++r) {
    const bool same = std::memcmp(layer.w.row(r).data(), before.w.row(r).data(),
                                  4 * sizeof(double)) == 0;
    EXPECT_EQ(same, r != 2) << r;
  }
  EXPECT_THROW(sparse_input_update(layer, x, DenseMat(3, 1), 0.1), Error);
}

TEST(SparseInputUpdate, MatchesDenseRankUpdate) {
  std::mt19937_64 gen(4);
  for (int c = 0; c < 200; ++c) {
    const Index rows = std::uniform_int_distribution<Index>(3, 80)(gen);
    const Index width = std::uniform_int_distribution<Index>(1, 12)(gen);
    SparseInputLayer layer = random_input_layer(gen, rows, width);
    const SparseInputLayer before = layer;
    const KSparseMat x = random_sparse(gen, rows, 4, 3);
    const DenseMat g = random_matrix(gen, width, 4);
    const double eta = 0.3;
    sparse_input_update(layer, x, g, eta);

    DenseMat want = testing::triple_product(x.densify(), g.transposed());
    for (Index k = 0; k < want.size(); ++k)
      want.data()[k] = before.w.data()[k] - eta * want.data()[k];
    EXPECT_LE(max_abs_diff(layer.w, want), 1e-14);
    for (Index i = 0; i < width; ++i) {
      double sum = 0.0;
      for (Index j = 0; j < 4; ++j) sum += g(i, j);
      EXPECT_NEAR(layer.b[i], before.b[i] - eta * sum, 1e-14);
    }
    std::vector<bool> touched(rows, false);
    for (Index r : x.indices()) touched[r] = true;
    for (Index r = 0; r < rows; ++r)
      if (!touched[r])
        EXPECT_EQ(std::memcmp(layer.w.row(r).data(), before.w.row(r).data(),
                              width * sizeof(double)),
                  0);
  }
}

NetworkConfig small_config(OutputKind output, Activation act = Activation::kTanh) {
  NetworkConfig cfg;
  cfg.input_dim = 12;
  cfg.hidden = {6, 5};
  cfg.activation = act;
  cfg.output_dim = 9;
  cfg.output = output;
  cfg.seed = 5;
  cfg.output_init_scale = 0.3;
  return cfg;
}

TEST(NetworkConfig, Validation) {
  NetworkConfig cfg = small_config(OutputKind::kFactored);
  cfg.hidden.clear();
  EXPECT_THROW(Network{cfg}, Error);
  cfg = small_config(OutputKind::kFactored);
  cfg.hidden = {4, 0};
  EXPECT_THROW(Network{cfg}, Error);
  EXPECT_EQ(activation_from_string(to_string(Activation::kIdentity)), Activation::kIdentity);
  EXPECT_THROW(activation_from_string("relu6"), Error);
}

TEST(Network, ShapesAndBiasRow) {
  Network net(small_config(OutputKind::kFactored));
  EXPECT_EQ(net.factored_output().hidden_dim(), 6u);
  EXPECT_THROW(net.naive_output(), Error);
  std::mt19937_64 gen(6);
  const KSparseMat x = random_sparse(gen, 12, 3, 2, 1);
  const DenseMat h = net.output_input(x);
  ASSERT_EQ(h.rows(), 6u);
  for (Index j = 0; j < 3; ++j) EXPECT_EQ(h(5, j), 1.0);
  EXPECT_THROW(net.train_step(x, random_sparse(gen, 9, 2, 1), 0.1), Error);
}

TEST(Network, ZeroStepOnlyEvaluates) {
  std::mt19937_64 gen(7);
  Network net(small_config(OutputKind::kFactored));
  const DenseMat w1 = net.input_layer().w;
  const DenseMat out = net.output_weights();
  const KSparseMat x = random_sparse(gen, 12, 4, 2, 1);
  const KSparseMat y = random_sparse(gen, 9, 4, 1, 1);
  const double l = net.train_step(x, y, 0.0);
  EXPECT_EQ(l, net.evaluate(x, y));
  EXPECT_EQ(net.input_layer().w, w1);
  EXPECT_EQ(net.output_weights(), out);
}

TEST(Network, NaiveTwinStartsFromSameWeights) {
  const Network a(small_config(OutputKind::kFactored));
  const Network b(small_config(OutputKind::kNaive));
  EXPECT_EQ(a.output_weights(), b.output_weights());
  EXPECT_EQ(a.input_layer().w, b.input_layer().w);
  EXPECT_EQ(a.hidden_layers()[0].w, b.hidden_layers()[0].w);
}

// d(loss)/d(W1) recovered from one SGD step against central differences.
void expect_input_gradient_matches(OutputKind kind, const SphericalLoss* loss) {
  std::mt19937_64 gen(8);
  Network net(small_config(kind));
  const KSparseMat x = random_sparse(gen, 12, 3, 2, 1);
  const KSparseMat y = random_sparse(gen, 9, 3, 2, 1);
  std::vector<Index> rows;
  for (Index r : x.indices()) rows.push_back(r);

  const double eta = 1e-3;
  Network stepped = net;
  const DenseMat before = net.input_layer().w;
  stepped.train_step(x, y, eta, loss);
  int checked = 0;
  for (Index k = 0; k < 5; ++k) {
    const Index r = rows[k % rows.size()], c = k % 6;
    const double analytic = (before(r, c) - stepped.input_layer().w(r, c)) / eta;
    double& entry = net.input_layer().w(r, c);
    auto total = [&] { return net.evaluate(x, y, loss); };
    EXPECT_LE(testing::relative_error(analytic, testing::central_difference(total, entry)),
              1e-5);
    ++checked;
  }
  EXPECT_EQ(checked, 5);
}

TEST(Network, InputGradientMatchesDifferencesFactored) {
  expect_input_gradient_matches(OutputKind::kFactored, nullptr);
}

TEST(Network, InputGradientMatchesDifferencesNaiveSumDependent) {
  const testing::SumDependentLoss loss;
  expect_input_gradient_matches(OutputKind::kNaive, &loss);
}

TEST(Network, TwinsFollowTheSameCurveLinear) {
  const testing::TwinRun run = testing::run_twin_networks(500, Activation::kIdentity, 3, 200, 15);
  for (Index i = 0; i < run.factored.size(); ++i)
    ASSERT_LE(std::abs(run.factored[i] - run.naive[i]), 1e-9) << i;
  EXPECT_LE(run.max_weight_gap, 1e-9);
}

TEST(Network, TwinsFollowTheSameCurveTanh) {
  const testing::TwinRun run = testing::run_twin_networks(500, Activation::kTanh, 4, 200, 15);
  EXPECT_LE(run.max_abs_gap, 1e-6);
  double first = 0.0, last = 0.0;
  for (Index i = 0; i < 50; ++i) first += run.naive[i], last += run.naive[450 + i];
  EXPECT_LT(last, first);
}

TEST(Network, CheckpointRoundTripResumesExactly) {
  const auto dir = std::filesystem::temp_directory_path() / "lst_network_test";
  std::filesystem::create_directories(dir);
  std::mt19937_64 gen(9);
  for (OutputKind kind : {OutputKind::kFactored, OutputKind::kNaive}) {
    NetworkConfig cfg = small_config(kind);
    StabilizeConfig stab;
    stab.n_check = 7;
    cfg.stabilization = stab;
    Network net(cfg);
    for (int s = 0; s < 5; ++s)
      net.train_step(random_sparse(gen, 12, 3, 2, 1), random_sparse(gen, 9, 3, 1, 1), 0.05);
    const std::string path = (dir / "model.lsta").string();
    net.save(path);
    Network back = Network::load(path);
    EXPECT_EQ(back.output_weights(), net.output_weights());
    EXPECT_EQ(back.config().hidden, net.config().hidden);
    EXPECT_EQ(back.has_factored_output(), net.has_factored_output());
    for (int s = 0; s < 5; ++s) {
      const KSparseMat x = random_sparse(gen, 12, 3, 2, 1);
      const KSparseMat y = random_sparse(gen, 9, 3, 1, 1);
      EXPECT_EQ(net.train_step(x, y, 0.05), back.train_step(x, y, 0.05));
    }
  }
  const std::string junk = (dir / "junk.lsta").string();
  { std::ofstream(junk) << "LSTAxxxxxxxx"; }
  EXPECT_THROW(Network::load(junk), Error);
  std::filesystem::remove_all(dir);
}

}  // namespace
}  // namespace lst
