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

#include "lst/loss.hpp"

#include <cmath>
#include <string>

namespace lst {

double SquaredErrorLoss::value(const LossPoint& p) const {
  double at = 0.0, tt = 0.0;
  for (Index k = 0; k < p.a.size(); ++k) {
    at += p.a[k] * p.t[k];
    tt += p.t[k] * p.t[k];
  }
  return p.q - 2.0 * at + tt;
}

LossPartials SquaredErrorLoss::partials(const LossPoint& p,
                                        std::span<double> grad_a) const {
  for (Index k = 0; k < p.t.size(); ++k) grad_a[k] = -2.0 * p.t[k];
  return {1.0, 0.0};
}

std::shared_ptr<const SphericalLoss> squared_error_loss() {
  static const auto instance = std::make_shared<const SquaredErrorLoss>();
  return instance;
}

double LossEvalBatch::total() const {
  double acc = 0.0;
  for (double l : losses) acc += l;
  return acc;
}

LossEvalBatch eval_with_grads(const SphericalLoss& loss,
                              std::span<const double> q,
                              std::span<const double> s,
                              const KSparseMat& targets,
                              std::span<const double> a) {
  const Index m = targets.cols();
  if (q.size() != m || s.size() != m || a.size() != targets.nnz()) {
    fail(ErrorCode::kDimensionMismatch, "eval_with_grads: shapes disagree");
  }
  LossEvalBatch out{Vector(m), Vector(m), Vector(m), Vector(targets.nnz())};
  const auto offsets = targets.col_offsets();
  for (Index j = 0; j < m; ++j) {
    const Index b = offsets[j], e = offsets[j + 1];
    const auto col = targets.column(j);
    const LossPoint p{q[j], s[j], col.indices, a.subspan(b, e - b), col.values};
    out.losses[j] = loss.value(p);
    const LossPartials d =
        loss.partials(p, std::span(out.grad_a).subspan(b, e - b));
    out.grad_q[j] = d.dq;
    out.grad_s[j] = d.ds;
    bool finite = std::isfinite(out.losses[j]) && std::isfinite(d.dq) &&
                  std::isfinite(d.ds);
    for (Index k = b; k < e; ++k) finite = finite && std::isfinite(out.grad_a[k]);
    if (!finite) {
      fail(ErrorCode::kLossDomain, loss.name() +
                                       ": non-finite value or gradient for "
                                       "example " + std::to_string(j));
    }
  }
  return out;
}

}  // namespace lst
