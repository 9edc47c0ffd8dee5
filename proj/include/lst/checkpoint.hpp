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
#include <iosfwd>
#include <span>
#include <string>

#include "lst/factored_layer.hpp"
#include "lst/matrix.hpp"
#include "lst/naive_layer.hpp"

namespace lst {

// Layer checkpoints are flat little-endian containers:
//   magic[4] | version u64 | D u64 | d u64 | payload as row-major f64
// "LSTF" payload: V, U, omega, Q, U^{-T}, wbar.  "LSTN" payload: W.
inline constexpr std::uint64_t kCheckpointVersion = 1;

void write_factored(std::ostream& out, const FactoredOutputLayer& layer);
FactoredOutputLayer read_factored(std::istream& in);

void write_naive(std::ostream& out, const NaiveOutputLayer& layer);
NaiveOutputLayer read_naive(std::istream& in);

void save_factored(const std::string& path, const FactoredOutputLayer& layer);
FactoredOutputLayer load_factored(const std::string& path);

void save_naive(const std::string& path, const NaiveOutputLayer& layer);
NaiveOutputLayer load_naive(const std::string& path);

namespace io {

void write_magic(std::ostream& out, const char (&magic)[5]);
void expect_magic(std::istream& in, const char (&magic)[5]);
void write_u64(std::ostream& out, std::uint64_t v);
std::uint64_t read_u64(std::istream& in);
void write_u32(std::ostream& out, std::uint32_t v);
std::uint32_t read_u32(std::istream& in);
void write_f64s(std::ostream& out, std::span<const double> values);
void read_f64s(std::istream& in, std::span<double> values);
void write_bytes(std::ostream& out, const std::string& bytes);
std::string read_bytes(std::istream& in, std::size_t count);

// rows u64 | cols u64 | entries
void write_matrix(std::ostream& out, const DenseMat& m);
DenseMat read_matrix(std::istream& in);

}  // namespace io

}  // namespace lst
