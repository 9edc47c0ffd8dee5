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

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "bench_report.hpp"

namespace lstcli {

enum ExitCode { kExitOk = 0, kExitFailure = 1, kExitUsage = 2 };

struct EquivalenceOptions {
  std::size_t big_d = 60;
  std::size_t d = 8;
  std::size_t m = 4;
  std::size_t k = 3;
  std::size_t steps = 100;
  double eta = 0.01;
  std::uint64_t seed = 7;
  std::string loss = "mse";  // mse | spherical-mse
  double tol = 1e-8;
};

struct StepDeviation {
  double w = 0.0;     // relative Frobenius distance of the two W
  double loss = 0.0;  // |dL| / max(1, |L|)
  double grad = 0.0;  // max |d grad H| / max(1, max |grad H|)
};

struct EquivalenceResult {
  std::vector<StepDeviation> steps;
  StepDeviation overall;

  bool within(double tol) const {
    return overall.w <= tol && overall.loss <= tol && overall.grad <= tol;
  }
};

// Runs the factored and naive layers side by side on one synthetic stream.
// Per-step rows go to per_step when it is non-null.
EquivalenceResult run_equivalence(const EquivalenceOptions& opt,
                                  std::ostream* per_step);
int cmd_equivalence(const EquivalenceOptions& opt, std::ostream& out,
                    std::ostream& err);

struct BenchOptions {
  std::string impl = "factored";  // factored | naive
  std::size_t d = 64;
  std::size_t m = 128;
  std::size_t k = 1;
  std::vector<std::size_t> d_list{50000, 200000, 800000};
  std::size_t reps = 5;
  std::size_t warmup = 2;
  std::uint64_t seed = 1;
  std::string precision = "f32";  // f32 | f64
  double eta = 1e-4;
  std::string out_path;  // empty: stdout
};

// Times one full output-layer update per rep. Rows are also streamed to
// csv_out (header first) when it is non-null.
BenchReport run_bench(const BenchOptions& opt, std::ostream* csv_out);
int cmd_bench(const BenchOptions& opt, std::ostream& out, std::ostream& err);

struct TrainOptions {
  std::string data = "synthetic";  // synthetic | path to text or .lstd cache
  std::size_t ngram = 3;
  std::size_t vocab_cap = 1000;
  std::vector<std::size_t> layers{32};
  std::string output = "factored";  // factored | naive
  std::string activation = "tanh";  // tanh | identity
  std::string loss = "mse";         // mse | spherical-mse
  double eta = 0.01;
  std::size_t epochs = 2;
  std::size_t batch = 16;
  std::uint64_t seed = 1;
  std::size_t stabilize_every = 10;  // 0 disables periodic stabilization
  std::string checkpoint;
  std::size_t synthetic_d = 500;
  std::size_t synthetic_examples = 2000;
};

struct TrainLogRow {
  std::size_t epoch = 0;
  std::size_t iteration = 0;
  double mean_loss = 0.0;
};

// Log lines "epoch,iteration,mean_loss" go to log when it is non-null.
std::vector<TrainLogRow> run_train(const TrainOptions& opt, std::ostream* log);
int cmd_train(const TrainOptions& opt, std::ostream& out, std::ostream& err);

struct StabilizeDemoOptions {
  std::size_t big_d = 50;
  std::size_t d = 8;
  std::size_t steps = 6;
  double eta_large = 0.4975;
  std::string strategy = "power_scan";  // power_scan | full_svd
  std::uint64_t seed = 3;
};

struct StabilizeDemoResult {
  double cond_before = 1.0;
  double cond_after = 1.0;
  double sigma_min_after = 1.0;
  double sigma_max_after = 1.0;
  double w_drift = 0.0;
  std::vector<double> fixed_before;
  std::vector<double> fixed_after;
  bool in_range = true;
};

StabilizeDemoResult run_stabilize_demo(const StabilizeDemoOptions& opt);
int cmd_stabilize_demo(const StabilizeDemoOptions& opt, std::ostream& out,
                       std::ostream& err);

// Full command-line entry point; returns the process exit code.
int run_cli(int argc, const char* const* argv, std::ostream& out,
            std::ostream& err);

}  // namespace lstcli
