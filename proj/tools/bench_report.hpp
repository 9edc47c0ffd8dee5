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
#include <iosfwd>
#include <string>
#include <vector>

namespace lstcli {

inline constexpr const char* kBenchHeader = "impl,D,d,m,K,rep,update_seconds";

struct BenchRow {
  std::string impl;
  std::size_t big_d = 0;
  std::size_t d = 0;
  std::size_t m = 0;
  std::size_t k = 0;
  std::size_t rep = 0;
  double update_seconds = 0.0;

  bool operator==(const BenchRow&) const = default;
};

struct BenchReport {
  std::vector<BenchRow> rows;

  bool operator==(const BenchReport&) const = default;

  // Median update time over the rows for one (impl, D); NaN when absent.
  double median_seconds(const std::string& impl, std::size_t big_d) const;
};

// Seconds are printed with enough digits to parse back bit-exactly.
void write_bench_csv(std::ostream& out, const BenchReport& report);
void write_bench_row(std::ostream& out, const BenchRow& row);

// Throws std::runtime_error on a bad header, a malformed row or a
// nonpositive time.
BenchReport parse_bench_csv(std::istream& in);

double median(std::vector<double> values);

}  // namespace lstcli
