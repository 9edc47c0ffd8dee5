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

#include "commands.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <limits>
#include <sstream>

#include <CLI11.hpp>

#include "handles.hpp"

namespace lstcli {

namespace {

using Buffer = std::vector<double>;

double rel_frobenius(const Buffer& a, const Buffer& b) {
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    num += (a[i] - b[i]) * (a[i] - b[i]);
    den += b[i] * b[i];
  }
  return den > 0.0 ? std::sqrt(num / den) : std::sqrt(num);
}

double max_abs(const Buffer& a) {
  double m = 0.0;
  for (double v : a) m = std::max(m, std::abs(v));
  return m;
}

double scaled_max_diff(const Buffer& a, const Buffer& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m / std::max(1.0, max_abs(b));
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3e", v);
  return buf;
}

lst_precision precision_from(const std::string& p) {
  return p == "f32" ? LST_F32 : LST_F64;
}

}  // namespace

// ---- equivalence --------------------------------------------------------

EquivalenceResult run_equivalence(const EquivalenceOptions& opt,
                                  std::ostream* per_step) {
  EquivalenceResult result;
  if (per_step) *per_step << "step,w_rel_dev,loss_dev,grad_dev\n";
  if (opt.steps == 0) return result;

  const bool spherical = opt.loss == "spherical-mse";
  LossPtr loss;
  if (spherical) {
    lst_loss* l = nullptr;
    check(lst_loss_squared_error(&l), "lst_loss_squared_error");
    loss.reset(l);
  }

  lst_factored* f = nullptr;
  check(lst_factored_create(opt.big_d, opt.d, LST_F64, LST_INIT_RANDOM, opt.seed,
                            0.1, &f),
        "lst_factored_create");
  FactoredPtr fact(f);
  Buffer wf(opt.big_d * opt.d), wn(opt.big_d * opt.d);
  check(lst_factored_materialize(fact.get(), wf.data()), "materialize");
  lst_naive* n = nullptr;
  check(lst_naive_from_weights(opt.big_d, opt.d, wf.data(), &n),
        "lst_naive_from_weights");
  NaivePtr naive(n);

  lst_synthetic_spec spec{opt.big_d, opt.big_d, opt.d, opt.k, opt.m,
                          opt.steps, opt.seed, LST_VALUES_GAUSSIAN};
  lst_synthetic* s = nullptr;
  check(lst_synthetic_create(&spec, &s), "lst_synthetic_create");
  SyntheticPtr stream(s);

  Buffer gf(opt.d * opt.m), gn(opt.d * opt.m);
  lst_batch_view batch{};
  int has = 0;
  for (std::size_t step = 1;; ++step) {
    check(lst_synthetic_next(stream.get(), &batch, &has), "lst_synthetic_next");
    if (!has) break;
    double lf = 0.0, ln = 0.0;
    if (spherical) {
      check(lst_factored_spherical_update(fact.get(), batch.h, opt.m, &batch.y,
                                          opt.eta, loss.get(), &lf, gf.data()),
            "lst_factored_spherical_update");
      check(lst_naive_spherical_step(naive.get(), batch.h, opt.m, &batch.y,
                                     opt.eta, loss.get(), &ln, gn.data()),
            "lst_naive_spherical_step");
    } else {
      check(lst_factored_mse_update(fact.get(), batch.h, opt.m, &batch.y,
                                    opt.eta, &lf, gf.data()),
            "lst_factored_mse_update");
      check(lst_naive_mse_step(naive.get(), batch.h, opt.m, &batch.y, opt.eta,
                               &ln, gn.data()),
            "lst_naive_mse_step");
    }
    check(lst_factored_materialize(fact.get(), wf.data()), "materialize");
    check(lst_naive_weights(naive.get(), wn.data()), "lst_naive_weights");

    StepDeviation dev;
    dev.w = rel_frobenius(wf, wn);
    dev.loss = std::abs(lf - ln) / std::max(1.0, std::abs(ln));
    dev.grad = scaled_max_diff(gf, gn);
    result.steps.push_back(dev);
    result.overall.w = std::max(result.overall.w, dev.w);
    result.overall.loss = std::max(result.overall.loss, dev.loss);
    result.overall.grad = std::max(result.overall.grad, dev.grad);
    if (per_step) {
      *per_step << step << ',' << fmt(dev.w) << ',' << fmt(dev.loss) << ','
                << fmt(dev.grad) << '\n';
    }
  }
  return result;
}

int cmd_equivalence(const EquivalenceOptions& opt, std::ostream& out,
                    std::ostream& err) {
  if (opt.loss != "mse" && opt.loss != "spherical-mse") {
    err << "equivalence: --loss must be mse or spherical-mse\n";
    return kExitUsage;
  }
  const EquivalenceResult r = run_equivalence(opt, &out);
  out << "overall," << fmt(r.overall.w) << ',' << fmt(r.overall.loss) << ','
      << fmt(r.overall.grad) << '\n';
  const bool ok = r.within(opt.tol);
  out << "max W deviation " << fmt(r.overall.w) << ", max L deviation "
      << fmt(r.overall.loss) << ", max grad H deviation " << fmt(r.overall.grad)
      << " (tol " << fmt(opt.tol) << "): " << (ok ? "PASS" : "FAIL") << '\n';
  return ok ? kExitOk : kExitFailure;
}

// ---- bench --------------------------------------------------------------

namespace {

struct PreparedBatch {
  Buffer h;
  SparseCopy y;
};

std::vector<PreparedBatch> prepare_batches(const BenchOptions& opt,
                                           std::size_t big_d,
                                           std::size_t count) {
  lst_synthetic_spec spec{opt.k, big_d, opt.d, opt.k, opt.m,
                          count, opt.seed, LST_VALUES_UNIT};
  lst_synthetic* s = nullptr;
  check(lst_synthetic_create(&spec, &s), "lst_synthetic_create");
  SyntheticPtr stream(s);
  std::vector<PreparedBatch> out;
  lst_batch_view v{};
  int has = 0;
  while (true) {
    check(lst_synthetic_next(stream.get(), &v, &has), "lst_synthetic_next");
    if (!has) break;
    // keep |h| moderate so the Woodbury system stays far from singular
    Buffer h(v.h, v.h + opt.d * opt.m);
    for (double& x : h) x *= 0.5;
    out.push_back({std::move(h), SparseCopy::of(v.y)});
  }
  return out;
}

class TimedLayer {
 public:
  TimedLayer(const BenchOptions& opt, std::size_t big_d) : opt_(opt) {
    if (opt.impl == "naive") {
      lst_naive* n = nullptr;
      check(lst_naive_create(big_d, opt.d, precision_from(opt.precision), &n),
            "lst_naive_create");
      naive_.reset(n);
    } else {
      lst_factored* f = nullptr;
      check(lst_factored_create(big_d, opt.d, precision_from(opt.precision),
                                LST_INIT_ZEROS, 0, 0.0, &f),
            "lst_factored_create");
      fact_.reset(f);
    }
    grad_.resize(opt.d * opt.m);
  }

  double time_update(const PreparedBatch& b) {
    const lst_sparse_batch y = b.y.view();
    double loss = 0.0;
    const auto t0 = std::chrono::steady_clock::now();
    if (naive_) {
      check(lst_naive_mse_step(naive_.get(), b.h.data(), opt_.m, &y, opt_.eta,
                               &loss, grad_.data()),
            "lst_naive_mse_step");
    } else {
      check(lst_factored_mse_update(fact_.get(), b.h.data(), opt_.m, &y,
                                    opt_.eta, &loss, grad_.data()),
            "lst_factored_mse_update");
    }
    const auto t1 = std::chrono::steady_clock::now();
    return std::chrono::duration<double>(t1 - t0).count();
  }

 private:
  const BenchOptions& opt_;
  NaivePtr naive_;
  FactoredPtr fact_;
  Buffer grad_;
};

}  // namespace

BenchReport run_bench(const BenchOptions& opt, std::ostream* csv_out) {
  struct Target {
    std::size_t big_d;
    std::vector<PreparedBatch> batches;
    std::unique_ptr<TimedLayer> layer;
  };
  std::vector<Target> targets;
  for (std::size_t big_d : opt.d_list) {
    try {
      Target t{big_d, prepare_batches(opt, big_d, opt.warmup + opt.reps), nullptr};
      t.layer = std::make_unique<TimedLayer>(opt, big_d);
      targets.push_back(std::move(t));
    } catch (const ApiError& e) {
      if (e.status() != LST_ERR_OUT_OF_MEMORY) throw;
      throw ApiError(e.status(), "out of memory at D=" + std::to_string(big_d));
    } catch (const std::bad_alloc&) {
      throw ApiError(LST_ERR_OUT_OF_MEMORY,
                     "out of memory at D=" + std::to_string(big_d));
    }
  }

  // Reps run round-robin over D so slow phases of a shared machine hit every
  // size alike instead of skewing one of them.
  for (std::size_t w = 0; w < opt.warmup; ++w)
    for (Target& t : targets) t.layer->time_update(t.batches[w]);
  std::vector<std::vector<double>> secs(targets.size());
  for (std::size_t rep = 0; rep < opt.reps; ++rep)
    for (std::size_t i = 0; i < targets.size(); ++i)
      secs[i].push_back(
          targets[i].layer->time_update(targets[i].batches[opt.warmup + rep]));

  BenchReport report;
  if (csv_out) *csv_out << kBenchHeader << '\n';
  for (std::size_t i = 0; i < targets.size(); ++i) {
    for (std::size_t rep = 0; rep < opt.reps; ++rep) {
      // clock resolution floor keeps every row strictly positive
      BenchRow row{opt.impl, targets[i].big_d, opt.d, opt.m, opt.k, rep,
                   std::max(secs[i][rep], 1e-9)};
      if (csv_out) write_bench_row(*csv_out, row);
      report.rows.push_back(std::move(row));
    }
  }
  return report;
}

int cmd_bench(const BenchOptions& opt, std::ostream& out, std::ostream& err) {
  if (opt.impl != "naive" && opt.impl != "factored") {
    err << "bench: --impl must be naive or factored\n";
    return kExitUsage;
  }
  if (opt.precision != "f32" && opt.precision != "f64") {
    err << "bench: --precision must be f32 or f64\n";
    return kExitUsage;
  }
  if (opt.d_list.empty() || opt.reps < 1 || opt.d < 1 || opt.m < 1 || opt.k < 1) {
    err << "bench: --D-list, --reps, --d, --m and --K must be nonempty / >= 1\n";
    return kExitUsage;
  }
  std::ofstream file;
  std::ostream* csv = &out;
  if (!opt.out_path.empty()) {
    file.open(opt.out_path);
    if (!file) {
      err << "bench: cannot open " << opt.out_path << '\n';
      return kExitFailure;
    }
    csv = &file;
  }
  const BenchReport report = run_bench(opt, csv);
  for (std::size_t big_d : opt.d_list) {
    err << "median impl=" << opt.impl << " D=" << big_d << " update_seconds="
        << report.median_seconds(opt.impl, big_d) << '\n';
  }
  return kExitOk;
}

// ---- train --------------------------------------------------------------

namespace {

struct TrainBatch {
  SparseCopy x;
  SparseCopy y;
};

struct TrainData {
  std::size_t input_dim = 0;
  std::size_t output_dim = 0;
  std::vector<TrainBatch> batches;
};

// Synthetic task: one-hot input i maps to the one-hot target (31 i + 7) mod D.
TrainData synthetic_data(const TrainOptions& opt) {
  TrainData data;
  data.input_dim = data.output_dim = opt.synthetic_d;
  const std::size_t count = (opt.synthetic_examples + opt.batch - 1) / opt.batch;
  lst_synthetic_spec spec{opt.synthetic_d, opt.synthetic_d, 1, 1, opt.batch,
                          count, opt.seed, LST_VALUES_UNIT};
  lst_synthetic* s = nullptr;
  check(lst_synthetic_create(&spec, &s), "lst_synthetic_create");
  SyntheticPtr stream(s);
  lst_batch_view v{};
  int has = 0;
  while (true) {
    check(lst_synthetic_next(stream.get(), &v, &has), "lst_synthetic_next");
    if (!has) break;
    TrainBatch b{SparseCopy::of(v.x), SparseCopy::of(v.x)};
    for (std::size_t& i : b.y.indices) i = (31 * i + 7) % opt.synthetic_d;
    data.batches.push_back(std::move(b));
  }
  return data;
}

bool ends_with(const std::string& s, const std::string& suffix) {
  return s.size() >= suffix.size() &&
         s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
}

TrainData ngram_data(const TrainOptions& opt) {
  lst_ngram* g = nullptr;
  if (ends_with(opt.data, ".lstd")) {
    check(lst_ngram_load_cache(opt.data.c_str(), &g), "lst_ngram_load_cache");
  } else {
    check(lst_ngram_ingest_file(opt.data.c_str(), opt.ngram, opt.vocab_cap, &g),
          "lst_ngram_ingest_file");
  }
  NgramPtr corpus(g);
  lst_ngram_info info{};
  check(lst_ngram_get_info(corpus.get(), &info), "lst_ngram_get_info");
  TrainData data;
  data.input_dim = info.input_dim;
  data.output_dim = info.output_dim;
  for (std::size_t b = 0; b < info.examples; b += opt.batch) {
    const std::size_t count = std::min(opt.batch, info.examples - b);
    lst_sparse_batch x{}, y{};
    check(lst_ngram_batch(corpus.get(), b, count, &x, &y), "lst_ngram_batch");
    data.batches.push_back({SparseCopy::of(x), SparseCopy::of(y)});
  }
  return data;
}

}  // namespace

std::vector<TrainLogRow> run_train(const TrainOptions& opt, std::ostream* log) {
  const TrainData data = opt.data == "synthetic" ? synthetic_data(opt) : ngram_data(opt);

  lst_stabilize_config stab{};
  lst_stabilize_config_default(&stab);
  stab.n_check = opt.stabilize_every;
  const bool factored = opt.output == "factored";

  lst_network_config cfg{};
  cfg.input_dim = data.input_dim;
  cfg.hidden = opt.layers.data();
  cfg.n_hidden = opt.layers.size();
  cfg.activation = opt.activation == "identity" ? LST_ACT_IDENTITY : LST_ACT_TANH;
  cfg.output_dim = data.output_dim;
  cfg.output = factored ? LST_OUTPUT_FACTORED : LST_OUTPUT_NAIVE;
  cfg.seed = opt.seed;
  cfg.stabilize = factored && opt.stabilize_every > 0 ? &stab : nullptr;
  lst_network* n = nullptr;
  check(lst_network_create(&cfg, &n), "lst_network_create");
  NetworkPtr net(n);

  LossPtr loss;
  if (opt.loss == "spherical-mse") {
    lst_loss* l = nullptr;
    check(lst_loss_squared_error(&l), "lst_loss_squared_error");
    loss.reset(l);
  }

  std::vector<TrainLogRow> rows;
  if (log) *log << "epoch,iteration,mean_loss\n";
  std::size_t iteration = 0;
  for (std::size_t epoch = 1; epoch <= opt.epochs; ++epoch) {
    for (const TrainBatch& b : data.batches) {
      const lst_sparse_batch x = b.x.view(), y = b.y.view();
      double total = 0.0;
      check(lst_network_train_step(net.get(), &x, &y, opt.eta, loss.get(), &total),
            "lst_network_train_step");
      TrainLogRow row{epoch, ++iteration, total / static_cast<double>(b.x.cols)};
      if (log) {
        char buf[40];
        std::snprintf(buf, sizeof buf, "%.17g", row.mean_loss);
        *log << row.epoch << ',' << row.iteration << ',' << buf << '\n';
      }
      rows.push_back(row);
    }
  }
  if (!opt.checkpoint.empty()) {
    check(lst_network_save(net.get(), opt.checkpoint.c_str()), "lst_network_save");
  }
  return rows;
}

int cmd_train(const TrainOptions& opt, std::ostream& out, std::ostream& err) {
  if (opt.output != "factored" && opt.output != "naive") {
    err << "train: --output must be factored or naive\n";
    return kExitUsage;
  }
  if (opt.loss != "mse" && opt.loss != "spherical-mse") {
    err << "train: --loss must be mse or spherical-mse\n";
    return kExitUsage;
  }
  if (opt.activation != "tanh" && opt.activation != "identity") {
    err << "train: --activation must be tanh or identity\n";
    return kExitUsage;
  }
  if (opt.batch < 1 || opt.layers.empty()) {
    err << "train: --batch and --layers must be nonempty\n";
    return kExitUsage;
  }
  const auto rows = run_train(opt, &out);
  for (std::size_t e = 1; e <= opt.epochs; ++e) {
    double sum = 0.0;
    std::size_t n = 0;
    for (const auto& r : rows)
      if (r.epoch == e) sum += r.mean_loss, ++n;
    err << "epoch " << e << " mean_loss " << (n ? sum / n : 0.0) << '\n';
  }
  return kExitOk;
}

// ---- stabilize-demo -----------------------------------------------------

StabilizeDemoResult run_stabilize_demo(const StabilizeDemoOptions& opt) {
  StabilizeDemoResult r;
  lst_factored* f = nullptr;
  check(lst_factored_create(opt.big_d, opt.d, LST_F64, LST_INIT_RANDOM, opt.seed,
                            0.5, &f),
        "lst_factored_create");
  FactoredPtr layer(f);

  // Unit h along a couple of fixed directions: each step scales U along that
  // direction by (1 - 2 eta), so a few steps leave U badly conditioned.
  const std::size_t pool = std::min<std::size_t>(2, opt.d);
  Buffer h(opt.d);
  for (std::size_t s = 0; s < opt.steps; ++s) {
    std::fill(h.begin(), h.end(), 0.0);
    h[s % pool] = 1.0;
    const std::size_t target = (7 * s + 1) % opt.big_d;
    const double one = 1.0;
    check(lst_factored_online_update(layer.get(), h.data(), 1, &target, &one,
                                     opt.eta_large, nullptr, nullptr),
          "lst_factored_online_update");
  }

  Buffer w_before(opt.big_d * opt.d), w_after(opt.big_d * opt.d);
  check(lst_factored_materialize(layer.get(), w_before.data()), "materialize");
  check(lst_factored_condition(layer.get(), &r.cond_before), "condition");

  lst_stabilize_config cfg{};
  lst_stabilize_config_default(&cfg);
  cfg.strategy = opt.strategy == "full_svd" ? LST_STRATEGY_FULL_SVD
                                            : LST_STRATEGY_POWER_SCAN;
  lst_stabilize_report report{};
  const std::size_t cap = 8 * opt.d + 32;
  Buffer before(cap), after(cap);
  check(lst_factored_stabilize(layer.get(), &cfg, &report, before.data(),
                               after.data(), cap),
        "lst_factored_stabilize");
  const std::size_t fixed = std::min(report.values_fixed, cap);
  r.fixed_before.assign(before.begin(), before.begin() + fixed);
  r.fixed_after.assign(after.begin(), after.begin() + fixed);

  check(lst_factored_materialize(layer.get(), w_after.data()), "materialize");
  r.w_drift = rel_frobenius(w_after, w_before);
  Buffer sv(opt.d);
  check(lst_factored_singular_values(layer.get(), sv.data()), "singular values");
  r.sigma_max_after = sv.front();
  r.sigma_min_after = sv.back();
  r.cond_after = sv.back() > 0.0 ? sv.front() / sv.back()
                                 : std::numeric_limits<double>::infinity();
  r.in_range = r.sigma_min_after >= cfg.sigma_low && r.sigma_max_after <= cfg.sigma_high;
  return r;
}

int cmd_stabilize_demo(const StabilizeDemoOptions& opt, std::ostream& out,
                       std::ostream& err) {
  if (opt.strategy != "power_scan" && opt.strategy != "full_svd") {
    err << "stabilize-demo: --strategy must be power_scan or full_svd\n";
    return kExitUsage;
  }
  if (opt.d < 1 || opt.big_d < 1 || !(opt.eta_large > 0.0)) {
    err << "stabilize-demo: --d, --D and --eta-large must be positive\n";
    return kExitUsage;
  }
  const StabilizeDemoResult r = run_stabilize_demo(opt);
  out << "condition before: " << fmt(r.cond_before) << '\n';
  if (r.fixed_before.empty()) out << "already stable\n";
  for (std::size_t k = 0; k < r.fixed_before.size(); ++k) {
    char buf[96];
    std::snprintf(buf, sizeof buf, "stabilize fixed σ=%.6g -> %.6g",
                  r.fixed_before[k], r.fixed_after[k]);
    out << buf << '\n';
  }
  out << "condition after: " << fmt(r.cond_after) << " (sigma in ["
      << fmt(r.sigma_min_after) << ", " << fmt(r.sigma_max_after) << "])\n";
  out << "W drift: " << fmt(r.w_drift) << '\n';
  const bool ok = r.w_drift <= 1e-6 && r.in_range;
  out << (ok ? "stabilization ok" : "stabilization FAILED") << '\n';
  return ok ? kExitOk : kExitFailure;
}

// ---- entry point --------------------------------------------------------

int run_cli(int argc, const char* const* argv, std::ostream& out,
            std::ostream& err) {
  CLI::App app{"Exact sparse-target output layer updates"};
  app.require_subcommand(1);

  EquivalenceOptions eq;
  auto* c_eq = app.add_subcommand("equivalence",
                                  "Compare factored and naive layers step by step");
  c_eq->add_option("--D", eq.big_d, "Output dimension")->check(CLI::PositiveNumber);
  c_eq->add_option("--d", eq.d, "Hidden dimension")->check(CLI::PositiveNumber);
  c_eq->add_option("--m", eq.m, "Minibatch size")->check(CLI::PositiveNumber);
  c_eq->add_option("--K", eq.k, "Active targets per example")->check(CLI::PositiveNumber);
  c_eq->add_option("--steps", eq.steps, "Number of updates");
  c_eq->add_option("--eta", eq.eta, "Learning rate");
  c_eq->add_option("--seed", eq.seed, "Random seed");
  c_eq->add_option("--loss", eq.loss, "mse | spherical-mse")
      ->check(CLI::IsMember({"mse", "spherical-mse"}));
  c_eq->add_option("--tol", eq.tol, "Largest accepted deviation");

  BenchOptions bench;
  auto* c_bench = app.add_subcommand("bench", "Time output-layer updates across D");
  c_bench->add_option("--impl", bench.impl, "naive | factored")
      ->check(CLI::IsMember({"naive", "factored"}));
  c_bench->add_option("--d", bench.d)->check(CLI::PositiveNumber);
  c_bench->add_option("--m", bench.m)->check(CLI::PositiveNumber);
  c_bench->add_option("--K", bench.k)->check(CLI::PositiveNumber);
  c_bench->add_option("--D-list", bench.d_list, "Comma-separated output sizes")
      ->delimiter(',');
  c_bench->add_option("--reps", bench.reps)->check(CLI::PositiveNumber);
  c_bench->add_option("--warmup", bench.warmup);
  c_bench->add_option("--seed", bench.seed);
  c_bench->add_option("--precision", bench.precision, "f32 | f64")
      ->check(CLI::IsMember({"f32", "f64"}));
  c_bench->add_option("--eta", bench.eta);
  c_bench->add_option("--out", bench.out_path, "CSV file (default stdout)");

  TrainOptions train;
  auto* c_train = app.add_subcommand("train", "Train a small network");
  c_train->add_option("--data", train.data, "synthetic | text file | .lstd cache");
  c_train->add_option("--ngram", train.ngram)->check(CLI::Range(2, 64));
  c_train->add_option("--vocab-cap", train.vocab_cap)->check(CLI::PositiveNumber);
  c_train->add_option("--layers", train.layers, "Comma-separated hidden widths")
      ->delimiter(',');
  c_train->add_option("--output", train.output, "factored | naive")
      ->check(CLI::IsMember({"factored", "naive"}));
  c_train->add_option("--activation", train.activation)
      ->check(CLI::IsMember({"tanh", "identity"}));
  c_train->add_option("--loss", train.loss)
      ->check(CLI::IsMember({"mse", "spherical-mse"}));
  c_train->add_option("--eta", train.eta);
  c_train->add_option("--epochs", train.epochs);
  c_train->add_option("--batch", train.batch)->check(CLI::PositiveNumber);
  c_train->add_option("--seed", train.seed);
  c_train->add_option("--stabilize-every", train.stabilize_every);
  c_train->add_option("--checkpoint", train.checkpoint);
  c_train->add_option("--synthetic-D", train.synthetic_d)->check(CLI::PositiveNumber);
  c_train->add_option("--synthetic-examples", train.synthetic_examples)
      ->check(CLI::PositiveNumber);

  StabilizeDemoOptions demo;
  auto* c_demo = app.add_subcommand("stabilize-demo",
                                    "Drive U ill-conditioned, then stabilize");
  c_demo->add_option("--D", demo.big_d)->check(CLI::PositiveNumber);
  c_demo->add_option("--d", demo.d)->check(CLI::PositiveNumber);
  c_demo->add_option("--steps", demo.steps);
  c_demo->add_option("--eta-large", demo.eta_large);
  c_demo->add_option("--seed", demo.seed);
  c_demo->add_option("--strategy", demo.strategy, "power_scan | full_svd")
      ->check(CLI::IsMember({"power_scan", "full_svd"}));

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp& e) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << e.what() << '\n' << "run with --help for usage\n";
    return kExitUsage;
  }

  try {
    if (c_eq->parsed()) return cmd_equivalence(eq, out, err);
    if (c_bench->parsed()) return cmd_bench(bench, out, err);
    if (c_train->parsed()) return cmd_train(train, out, err);
    if (c_demo->parsed()) return cmd_stabilize_demo(demo, out, err);
  } catch (const ApiError& e) {
    err << "error: " << e.what() << '\n';
    return e.status() == LST_ERR_INVALID_ARGUMENT ||
                   e.status() == LST_ERR_DIMENSION_MISMATCH
               ? kExitUsage
               : kExitFailure;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitFailure;
  }
  return kExitUsage;
}

}  // namespace lstcli
