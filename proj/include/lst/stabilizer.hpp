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
#include <string>
#include <vector>

#include "lst/factored_layer.hpp"
#include "lst/stabilize_config.hpp"

namespace lst {

struct FixedValue {
  double before = 0.0;
  double after = 0.0;
};

struct StabilizeReport {
  std::vector<FixedValue> values_fixed;
  double cond_before = 1.0;
  double cond_after = 1.0;
};

// V <- V U, U <- I, U^{-T} <- I. O(D d^2); W, Q and wbar are unchanged.
template <typename T>
void restore_pristine(BasicFactoredLayer<T>& layer);

// Moves the singular value `sigma` of U along unit left singular vector `u`
// to `sigma_target`, compensating in V so that V U is unchanged. O(D d).
template <typename T>
void fix_singular_value(BasicFactoredLayer<T>& layer, double sigma,
                        std::span<const double> u, double sigma_target);

// Refreshes U^{-T}, then brings every singular value of U that lies outside
// [sigma_low, sigma_high] back to 1.
template <typename T>
StabilizeReport singular_stabilize(BasicFactoredLayer<T>& layer,
                                   const StabilizeConfig& config);

// One "stabilize fixed σ=<before> -> <after>" line per fixed value.
std::string format_report(const StabilizeReport& report);

}  // namespace lst
