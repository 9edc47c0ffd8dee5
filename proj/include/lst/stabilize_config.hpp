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

#include <cstdint>

#include "lst/matrix.hpp"

namespace lst {

enum class StabilizeStrategy { kFullSvd, kPowerScan };

// Safe range and cadence for keeping U well conditioned.
struct StabilizeConfig {
  double sigma_low = 0.001;
  double sigma_high = 100.0;
  Index n_check = 100;
  Index power_iters = 100;
  StabilizeStrategy strategy = StabilizeStrategy::kPowerScan;

  void validate() const {
    if (!(sigma_low > 0.0 && sigma_low < 1.0 && sigma_high > 1.0)) {
      fail(ErrorCode::kInvalidArgument,
           "stabilize config: need 0 < sigma_low < 1 < sigma_high");
    }
    if (n_check < 1 || power_iters < 1) {
      fail(ErrorCode::kInvalidArgument,
           "stabilize config: n_check and power_iters must be >= 1");
    }
  }
};

}  // namespace lst
