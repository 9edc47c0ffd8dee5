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

#include "lst/stabilizer.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>

#include "lst/kernels.hpp"

namespace lst {

namespace detail {

struct StabilizerAccess {
  template <typename T>
  static Matrix<T>& v(BasicFactoredLayer<T>& l) { return l.v_; }
  template <typename T>
  static Matrix<T>& u(BasicFactoredLayer<T>& l) { return l.u_; }
  template <typename T>
  static Matrix<T>& u_inv_t(BasicFactoredLayer<T>& l) { return l.u_inv_t_; }
};

}  // namespace detail

namespace {

using Access = detail::StabilizerAccess;

constexpr double kUnitTolerance = 1e-8;

// Rescan cap for power_scan; each pass fixes at most one value.
Index scan_cap(Index d) { return 4 * d + 16; }

double norm2(std::span<const double> x) {
  double acc = 0.0;
  for (double v : x) acc += v * v;
  return std::sqrt(acc);
}

template <typename T>
double measured_value(const BasicFactoredLayer<T>& layer,
                      std::span<const double> u) {
  return norm2(matvec<double>(layer.u().template cast<double>(), u, Trans::kYes));
}

template <typename T>
FixedValue fix_and_measure(BasicFactoredLayer<T>& layer, double sigma,
                           std::span<const double> u) {
  fix_singular_value(layer, sigma, u, 1.0);
  return {sigma, measured_value(layer, u)};
}

bool in_range(double sigma, const StabilizeConfig& c) {
  return sigma >= c.sigma_low && sigma <= c.sigma_high;
}

template <typename T>
StabilizeReport full_svd_pass(BasicFactoredLayer<T>& layer,
                              const StabilizeConfig& config) {
  StabilizeReport report;
  const SvdResult svd = svd_square(layer.u().template cast<double>());
  const Vector& sv = svd.singular_values;
  report.cond_before = sv.back() > 0.0 ? sv.front() / sv.back() : INFINITY;

  const Index d = sv.size();
  std::vector<Index> targets;
  for (Index k = 0; k < d; ++k)
    if (!in_range(sv[k], config)) targets.push_back(k);
  if (targets.empty()) {
    report.cond_after = report.cond_before;
    return report;
  }
  std::vector<Vector> dirs;
  for (Index k : targets) {
    Vector col(d);
    for (Index i = 0; i < d; ++i) col[i] = svd.left(i, k);
    fix_singular_value(layer, sv[k], col, 1.0);
    dirs.push_back(std::move(col));
  }
  for (Index n = 0; n < targets.size(); ++n) {
    report.values_fixed.push_back(
        {sv[targets[n]], measured_value(layer, dirs[n])});
  }
  report.cond_after = condition_number(layer.u().template cast<double>());
  return report;
}

template <typename T>
StabilizeReport power_scan_pass(BasicFactoredLayer<T>& layer,
                                const StabilizeConfig& config) {
  StabilizeReport report;
  const Index cap = scan_cap(layer.hidden_dim());
  for (Index pass = 0;; ++pass) {
    const DenseMat u = layer.u().template cast<double>();
    const DenseMat u_inv = layer.u_inv_t().template cast<double>().transposed();
    const ExtremeSingularPairs ext =
        power_iteration_extremes(u, u_inv, config.power_iters);
    const double cond = ext.sigma_max / ext.sigma_min;
    if (pass == 0) report.cond_before = cond;
    report.cond_after = cond;
    if (pass == cap) break;
    if (!in_range(ext.sigma_min, config)) {
      report.values_fixed.push_back(
          fix_and_measure(layer, ext.sigma_min, ext.u_min));
    } else if (!in_range(ext.sigma_max, config)) {
      report.values_fixed.push_back(
          fix_and_measure(layer, ext.sigma_max, ext.u_max));
    } else {
      break;
    }
  }
  return report;
}

}  // namespace

template <typename T>
void restore_pristine(BasicFactoredLayer<T>& layer) {
  Matrix<T>& v = Access::v(layer);
  Matrix<T>& u = Access::u(layer);
  v = matmul(v, u);
  u = Matrix<T>::identity(layer.hidden_dim());
  Access::u_inv_t(layer) = Matrix<T>::identity(layer.hidden_dim());
}

template <typename T>
void fix_singular_value(BasicFactoredLayer<T>& layer, double sigma,
                        std::span<const double> u, double sigma_target) {
  const Index d = layer.hidden_dim();
  if (u.size() != d) {
    fail(ErrorCode::kDimensionMismatch, "fix_singular_value: direction size");
  }
  if (std::abs(norm2(u) - 1.0) > kUnitTolerance) {
    fail(ErrorCode::kInvalidArgument, "fix_singular_value: direction not unit");
  }
  if (!(sigma > 1e-300) || !std::isfinite(sigma)) {
    fail(ErrorCode::kDegenerateValue, "fix_singular_value: sigma too small");
  }
  const double alpha = (sigma_target - sigma) / sigma;
  if (!(1.0 + alpha > 1e-12)) {
    fail(ErrorCode::kDegenerateValue, "fix_singular_value: 1 + alpha <= 0");
  }
  if (alpha == 0.0) return;
  const double beta = -alpha / (1.0 + alpha);

  Matrix<T>& um = Access::u(layer);
  Matrix<T>& vm = Access::v(layer);
  Matrix<T>& uit = Access::u_inv_t(layer);

  // U^T u and U^{-1} u = (U^{-T})^T u, both from the pre-fix state
  Vector ut_u(d, 0.0), uinv_u(d, 0.0);
  for (Index i = 0; i < d; ++i) {
    for (Index j = 0; j < d; ++j) {
      ut_u[j] += static_cast<double>(um(i, j)) * u[i];
      uinv_u[j] += static_cast<double>(uit(i, j)) * u[i];
    }
  }
  for (Index i = 0; i < d; ++i) {
    for (Index j = 0; j < d; ++j) {
      um(i, j) += static_cast<T>(alpha * u[i] * ut_u[j]);
      uit(i, j) += static_cast<T>(beta * u[i] * uinv_u[j]);
    }
  }
  // V <- V + beta (V u) u^T, row by row
  for (Index r = 0; r < vm.rows(); ++r) {
    T* row = vm.data() + r * d;
    double vu = 0.0;
    for (Index i = 0; i < d; ++i) vu += static_cast<double>(row[i]) * u[i];
    const double c = beta * vu;
    for (Index i = 0; i < d; ++i) row[i] += static_cast<T>(c * u[i]);
  }
}

template <typename T>
StabilizeReport singular_stabilize(BasicFactoredLayer<T>& layer,
                                   const StabilizeConfig& config) {
  config.validate();
  layer.refresh_inverse();
  return config.strategy == StabilizeStrategy::kFullSvd
             ? full_svd_pass(layer, config)
             : power_scan_pass(layer, config);
}

std::string format_report(const StabilizeReport& report) {
  std::ostringstream os;
  char buf[96];
  for (const FixedValue& f : report.values_fixed) {
    std::snprintf(buf, sizeof buf, "stabilize fixed σ=%.6g -> %.6g\n",
                  f.before, f.after);
    os << buf;
  }
  return os.str();
}

template void restore_pristine(BasicFactoredLayer<float>&);
template void restore_pristine(BasicFactoredLayer<double>&);
template void fix_singular_value(BasicFactoredLayer<float>&, double,
                                 std::span<const double>, double);
template void fix_singular_value(BasicFactoredLayer<double>&, double,
                                 std::span<const double>, double);
template StabilizeReport singular_stabilize(BasicFactoredLayer<float>&,
                                            const StabilizeConfig&);
template StabilizeReport singular_stabilize(BasicFactoredLayer<double>&,
                                            const StabilizeConfig&);

}  // namespace lst
