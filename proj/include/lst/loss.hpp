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

#include <memory>
#include <span>
#include <string>
#include <vector>

#include "lst/sparse.hpp"

namespace lst {

// Arguments of a spherical loss for one example: the squared norm q and the
// sum s of the full output vector, plus the outputs `a` and targets `t` at the
// target's active coordinates `active`.
struct LossPoint {
  double q = 0.0;
  double s = 0.0;
  std::span<const Index> active;
  std::span<const double> a;
  std::span<const double> t;
};

struct LossPartials {
  double dq = 0.0;
  double ds = 0.0;
};

// A loss l(q, s, K, a, t) together with its partial derivatives. Implementations
// must be stateless: evaluation is called concurrently and repeatedly.
class SphericalLoss {
 public:
  virtual ~SphericalLoss() = default;

  virtual std::string name() const = 0;
  virtual bool uses_sum_of_outputs() const = 0;
  virtual double value(const LossPoint& p) const = 0;
  // Fills grad_a[k] = dl/da_k and returns (dl/dq, dl/ds).
  virtual LossPartials partials(const LossPoint& p,
                                std::span<double> grad_a) const = 0;
};

// l = q - 2 a.t + |t|^2, i.e. |o - y|^2 rewritten on the target support.
class SquaredErrorLoss final : public SphericalLoss {
 public:
  std::string name() const override { return "squared_error"; }
  bool uses_sum_of_outputs() const override { return false; }
  double value(const LossPoint& p) const override;
  LossPartials partials(const LossPoint& p,
                        std::span<double> grad_a) const override;
};

std::shared_ptr<const SphericalLoss> squared_error_loss();

// Per-example losses and gradients for a minibatch. `grad_a` has one entry per
// stored target entry, in the target matrix's storage order.
struct LossEvalBatch {
  Vector losses;
  Vector grad_q;
  Vector grad_s;
  Vector grad_a;

  double total() const;
};

// Evaluates the loss column by column. `a` holds the outputs at the targets'
// stored entries (same layout as targets.values()).
LossEvalBatch eval_with_grads(const SphericalLoss& loss,
                              std::span<const double> q,
                              std::span<const double> s,
                              const KSparseMat& targets,
                              std::span<const double> a);

}  // namespace lst
