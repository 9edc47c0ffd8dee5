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

#include "bench_report.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace lstcli {

double median(std::vector<double> values) {
  if (values.empty()) return std::numeric_limits<double>::quiet_NaN();
  std::sort(values.begin(), values.end());
  const std::size_t n = values.size();
  return n % 2 ? values[n / 2] : 0.5 * (values[n / 2 - 1] + values[n / 2]);
}

double BenchReport::median_seconds(const std::string& impl,
                                   std::size_t big_d) const {
  std::vector<double> t;
  for (const BenchRow& r : rows)
    if (r.impl == impl && r.big_d == big_d) t.push_back(r.update_seconds);
  return median(std::move(t));
}

void write_bench_row(std::ostream& out, const BenchRow& r) {
  char secs[40];
  std::snprintf(secs, sizeof secs, "%.17g", r.update_seconds);
  out << r.impl << ',' << r.big_d << ',' << r.d << ',' << r.m << ',' << r.k
      << ',' << r.rep << ',' << secs << '\n';
}

void write_bench_csv(std::ostream& out, const BenchReport& report) {
  out << kBenchHeader << '\n';
  for (const BenchRow& r : report.rows) write_bench_row(out, r);
}

namespace {

std::size_t parse_count(const std::string& s, std::size_t line) {
  std::size_t v = 0;
  const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || p != s.data() + s.size()) {
    throw std::runtime_error("bench csv line " + std::to_string(line) +
                             ": bad count '" + s + "'");
  }
  return v;
}

}  // namespace

BenchReport parse_bench_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line != kBenchHeader) {
    throw std::runtime_error("bench csv: missing or wrong header");
  }
  BenchReport report;
  std::size_t n = 1;
  while (std::getline(in, line)) {
    ++n;
    if (line.empty()) continue;
    std::vector<std::string> f;
    std::stringstream ss(line);
    for (std::string cell; std::getline(ss, cell, ',');) f.push_back(cell);
    if (f.size() != 7) {
      throw std::runtime_error("bench csv line " + std::to_string(n) +
                               ": expected 7 fields");
    }
    BenchRow r;
    r.impl = f[0];
    r.big_d = parse_count(f[1], n);
    r.d = parse_count(f[2], n);
    r.m = parse_count(f[3], n);
    r.k = parse_count(f[4], n);
    r.rep = parse_count(f[5], n);
    char* end = nullptr;
    r.update_seconds = std::strtod(f[6].c_str(), &end);
    if (end != f[6].c_str() + f[6].size() || !(r.update_seconds > 0.0) ||
        !std::isfinite(r.update_seconds)) {
      throw std::runtime_error("bench csv line " + std::to_string(n) +
                               ": update_seconds must be a positive number");
    }
    report.rows.push_back(std::move(r));
  }
  return report;
}

}  // namespace lstcli
