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

#include "lst/checkpoint.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>

namespace lst {

namespace io {

namespace {

template <typename U>
void put_le(std::ostream& out, U v) {
  char buf[sizeof(U)];
  for (std::size_t i = 0; i < sizeof(U); ++i) {
    buf[i] = static_cast<char>((v >> (8 * i)) & 0xff);
  }
  out.write(buf, sizeof buf);
}

template <typename U>
U get_le(std::istream& in) {
  unsigned char buf[sizeof(U)];
  if (!in.read(reinterpret_cast<char*>(buf), sizeof buf)) {
    fail(ErrorCode::kFormat, "checkpoint truncated");
  }
  U v = 0;
  for (std::size_t i = 0; i < sizeof(U); ++i) v |= static_cast<U>(buf[i]) << (8 * i);
  return v;
}

// Largest element count accepted from a header before allocating.
constexpr std::uint64_t kMaxEntries = std::uint64_t{1} << 36;

}  // namespace

void write_magic(std::ostream& out, const char (&magic)[5]) {
  out.write(magic, 4);
}

void expect_magic(std::istream& in, const char (&magic)[5]) {
  char got[4] = {};
  if (!in.read(got, 4) || std::memcmp(got, magic, 4) != 0) {
    fail(ErrorCode::kFormat, std::string("expected magic ") + magic);
  }
}

void write_u64(std::ostream& out, std::uint64_t v) { put_le(out, v); }
std::uint64_t read_u64(std::istream& in) { return get_le<std::uint64_t>(in); }
void write_u32(std::ostream& out, std::uint32_t v) { put_le(out, v); }
std::uint32_t read_u32(std::istream& in) { return get_le<std::uint32_t>(in); }

void write_f64s(std::ostream& out, std::span<const double> values) {
  for (double v : values) put_le(out, std::bit_cast<std::uint64_t>(v));
}

void read_f64s(std::istream& in, std::span<double> values) {
  for (double& v : values) v = std::bit_cast<double>(get_le<std::uint64_t>(in));
}

void write_bytes(std::ostream& out, const std::string& bytes) {
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
}

std::string read_bytes(std::istream& in, std::size_t count) {
  std::string s(count, '\0');
  if (count && !in.read(s.data(), static_cast<std::streamsize>(count))) {
    fail(ErrorCode::kFormat, "checkpoint truncated");
  }
  return s;
}

void write_matrix(std::ostream& out, const DenseMat& m) {
  write_u64(out, m.rows());
  write_u64(out, m.cols());
  write_f64s(out, m.values());
}

DenseMat read_matrix(std::istream& in) {
  const std::uint64_t rows = read_u64(in);
  const std::uint64_t cols = read_u64(in);
  if (rows > kMaxEntries || cols > kMaxEntries ||
      (rows && cols > kMaxEntries / rows)) {
    fail(ErrorCode::kFormat, "matrix dimensions out of range");
  }
  DenseMat m(rows, cols);
  read_f64s(in, m.values());
  return m;
}

}  // namespace io

namespace {

struct Header {
  Index big_d = 0;
  Index d = 0;
};

void write_header(std::ostream& out, const char (&magic)[5], Index big_d,
                  Index d) {
  io::write_magic(out, magic);
  io::write_u64(out, kCheckpointVersion);
  io::write_u64(out, big_d);
  io::write_u64(out, d);
}

Header read_header(std::istream& in, const char (&magic)[5]) {
  io::expect_magic(in, magic);
  const std::uint64_t version = io::read_u64(in);
  if (version != kCheckpointVersion) {
    fail(ErrorCode::kFormat,
         "unsupported checkpoint version " + std::to_string(version));
  }
  Header h{io::read_u64(in), io::read_u64(in)};
  if (h.big_d < 1 || h.d < 1 || h.d > (1u << 20) || h.big_d > (Index{1} << 36) / h.d) {
    fail(ErrorCode::kFormat, "checkpoint dimensions out of range");
  }
  return h;
}

void check_stream(const std::ios& s, const std::string& what) {
  if (!s) fail(ErrorCode::kIo, what);
}

DenseMat read_block(std::istream& in, Index rows, Index cols) {
  DenseMat m(rows, cols);
  io::read_f64s(in, m.values());
  return m;
}

Vector read_vector(std::istream& in, Index n) {
  Vector v(n);
  io::read_f64s(in, v);
  return v;
}

}  // namespace

void write_factored(std::ostream& out, const FactoredOutputLayer& layer) {
  write_header(out, "LSTF", layer.output_dim(), layer.hidden_dim());
  io::write_f64s(out, layer.v().values());
  io::write_f64s(out, layer.u().values());
  io::write_f64s(out, layer.omega());
  io::write_f64s(out, layer.q().values());
  io::write_f64s(out, layer.u_inv_t().values());
  io::write_f64s(out, layer.wbar());
  check_stream(out, "checkpoint write failed");
}

FactoredOutputLayer read_factored(std::istream& in) {
  const Header h = read_header(in, "LSTF");
  DenseMat v = read_block(in, h.big_d, h.d);
  DenseMat u = read_block(in, h.d, h.d);
  Vector omega = read_vector(in, h.d);
  DenseMat q = read_block(in, h.d, h.d);
  DenseMat u_inv_t = read_block(in, h.d, h.d);
  Vector wbar = read_vector(in, h.d);
  return FactoredOutputLayer::from_state(std::move(v), std::move(u),
                                         std::move(omega), std::move(q),
                                         std::move(u_inv_t), std::move(wbar));
}

void write_naive(std::ostream& out, const NaiveOutputLayer& layer) {
  write_header(out, "LSTN", layer.output_dim(), layer.hidden_dim());
  io::write_f64s(out, layer.w().values());
  check_stream(out, "checkpoint write failed");
}

NaiveOutputLayer read_naive(std::istream& in) {
  const Header h = read_header(in, "LSTN");
  return NaiveOutputLayer(read_block(in, h.big_d, h.d));
}

void save_factored(const std::string& path, const FactoredOutputLayer& layer) {
  std::ofstream out(path, std::ios::binary);
  check_stream(out, "cannot open " + path + " for writing");
  write_factored(out, layer);
}

FactoredOutputLayer load_factored(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  check_stream(in, "cannot open " + path);
  return read_factored(in);
}

void save_naive(const std::string& path, const NaiveOutputLayer& layer) {
  std::ofstream out(path, std::ios::binary);
  check_stream(out, "cannot open " + path + " for writing");
  write_naive(out, layer);
}

NaiveOutputLayer load_naive(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  check_stream(in, "cannot open " + path);
  return read_naive(in);
}

}  // namespace lst
