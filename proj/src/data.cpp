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

#include "lst/data.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "lst/checkpoint.hpp"

namespace lst {

void SyntheticSpec::validate() const {
  if (input_dim < 1 || output_dim < 1 || hidden_dim < 1 || k < 1 ||
      batch < 1 || count < 1) {
    fail(ErrorCode::kInvalidArgument, "synthetic spec: counts must be >= 1");
  }
  if (k > output_dim || k > input_dim) {
    fail(ErrorCode::kInvalidArgument, "synthetic spec: K exceeds a dimension");
  }
}

std::vector<Index> sample_without_replacement(std::mt19937_64& gen, Index n,
                                              Index k) {
  if (k > n) fail(ErrorCode::kInvalidArgument, "sample: k > n");
  std::set<Index> picked;
  for (Index j = n - k; j < n; ++j) {
    const Index t = std::uniform_int_distribution<Index>(0, j)(gen);
    if (!picked.insert(t).second) picked.insert(j);
  }
  return {picked.begin(), picked.end()};
}

SyntheticStream::SyntheticStream(SyntheticSpec spec)
    : spec_(spec), gen_(spec.seed) {
  spec_.validate();
}

void SyntheticStream::reset() {
  gen_.seed(spec_.seed);
  produced_ = 0;
}

KSparseMat SyntheticStream::draw_sparse(Index rows) {
  std::vector<Index> offsets{0};
  std::vector<Index> indices;
  std::vector<double> values;
  std::normal_distribution<double> normal(0.0, 1.0);
  for (Index j = 0; j < spec_.batch; ++j) {
    for (Index i : sample_without_replacement(gen_, rows, spec_.k)) {
      indices.push_back(i);
      values.push_back(spec_.dist == ValueDist::kUnit ? 1.0 : normal(gen_));
    }
    offsets.push_back(indices.size());
  }
  return KSparseMat(rows, std::move(offsets), std::move(indices),
                    std::move(values));
}

bool SyntheticStream::next(SyntheticBatch& out) {
  if (produced_ >= spec_.count) return false;
  out.x = draw_sparse(spec_.input_dim);
  out.y = draw_sparse(spec_.output_dim);
  out.h = DenseMat(spec_.hidden_dim, spec_.batch);
  std::uniform_real_distribution<double> unif(-1.0, 1.0);
  for (double& v : out.h.values()) v = unif(gen_);
  ++produced_;
  return true;
}

std::uint32_t Vocabulary::id(const std::string& token) const {
  const auto it = ids.find(token);
  return it == ids.end() ? 0 : it->second;
}

namespace {

std::vector<std::string> split_ascii_whitespace(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : line) {
    if (c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' ||
        c == '\v') {
      if (!cur.empty()) out.push_back(std::move(cur)), cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  if (!cur.empty()) out.push_back(std::move(cur));
  return out;
}

KSparseMat one_hot_columns(Index rows, std::vector<Index> indices) {
  std::vector<Index> offsets(indices.size() + 1);
  for (Index j = 0; j <= indices.size(); ++j) offsets[j] = j;
  std::vector<double> values(indices.size(), 1.0);
  return KSparseMat(rows, std::move(offsets), std::move(indices),
                    std::move(values));
}

void check_range(const NgramDataset& d, Index begin, Index count) {
  if (begin > d.examples.size() || count > d.examples.size() - begin) {
    fail(ErrorCode::kIndexOutOfRange, "ngram dataset: example range");
  }
}

}  // namespace

KSparseMat NgramDataset::inputs(Index begin, Index count) const {
  check_range(*this, begin, count);
  std::vector<Index> offsets{0};
  std::vector<Index> indices;
  for (Index e = begin; e < begin + count; ++e) {
    const auto& ctx = examples[e].context;
    for (Index p = 0; p < ctx.size(); ++p) indices.push_back(ctx[p] + p * vocab_cap);
    offsets.push_back(indices.size());
  }
  std::vector<double> values(indices.size(), 1.0);
  return KSparseMat(input_dim(), std::move(offsets), std::move(indices),
                    std::move(values));
}

KSparseMat NgramDataset::targets(Index begin, Index count) const {
  check_range(*this, begin, count);
  std::vector<Index> indices;
  for (Index e = begin; e < begin + count; ++e) indices.push_back(examples[e].target);
  return one_hot_columns(vocab_cap, std::move(indices));
}

NgramDataset ingest_ngrams(std::istream& text, Index n, Index vocab_cap) {
  if (n < 2) fail(ErrorCode::kInvalidArgument, "ingest_ngrams: n must be >= 2");
  if (vocab_cap < 1) fail(ErrorCode::kInvalidArgument, "ingest_ngrams: cap < 1");

  std::vector<std::vector<std::string>> lines;
  std::map<std::string, Index> freq;
  Index total = 0;
  for (std::string line; std::getline(text, line);) {
    auto toks = split_ascii_whitespace(line);
    for (const auto& t : toks) ++freq[t];
    total += toks.size();
    lines.push_back(std::move(toks));
  }
  if (total == 0) fail(ErrorCode::kEmptyCorpus, "ingest_ngrams: no tokens");

  // map order gives the lexicographic tie-break; stable sort keeps it
  std::vector<std::pair<std::string, Index>> ranked(freq.begin(), freq.end());
  std::stable_sort(ranked.begin(), ranked.end(),
                   [](const auto& a, const auto& b) { return a.second > b.second; });

  NgramDataset out;
  out.n = n;
  out.vocab_cap = vocab_cap;
  out.vocab.tokens.push_back(kUnknownToken);
  for (const auto& [tok, count] : ranked) {
    if (out.vocab.tokens.size() >= vocab_cap) break;
    out.vocab.ids.emplace(tok, static_cast<std::uint32_t>(out.vocab.tokens.size()));
    out.vocab.tokens.push_back(tok);
  }

  for (const auto& toks : lines) {
    if (toks.size() < n) continue;
    std::vector<std::uint32_t> ids(toks.size());
    for (Index i = 0; i < toks.size(); ++i) ids[i] = out.vocab.id(toks[i]);
    for (Index i = 0; i + n <= ids.size(); ++i) {
      NgramExample ex;
      ex.context.assign(ids.begin() + i, ids.begin() + i + n - 1);
      ex.target = ids[i + n - 1];
      out.examples.push_back(std::move(ex));
    }
  }
  return out;
}

NgramDataset ingest_ngrams_file(const std::string& path, Index n,
                                Index vocab_cap) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::kIo, "cannot open " + path);
  return ingest_ngrams(in, n, vocab_cap);
}

namespace {
constexpr std::uint32_t kDatasetCacheVersion = 1;
}

void save_dataset_cache(const std::string& path, const NgramDataset& data) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorCode::kIo, "cannot open " + path + " for writing");
  io::write_magic(out, "LSTD");
  io::write_u32(out, kDatasetCacheVersion);
  io::write_u32(out, static_cast<std::uint32_t>(data.n));
  io::write_u32(out, static_cast<std::uint32_t>(data.vocab_cap));
  io::write_u32(out, static_cast<std::uint32_t>(data.vocab.size()));
  for (const auto& tok : data.vocab.tokens) {
    io::write_u32(out, static_cast<std::uint32_t>(tok.size()));
    io::write_bytes(out, tok);
  }
  io::write_u64(out, data.examples.size());
  for (const auto& ex : data.examples) {
    for (std::uint32_t id : ex.context) io::write_u32(out, id);
    io::write_u32(out, ex.target);
  }
  if (!out) fail(ErrorCode::kIo, "dataset cache write failed");
}

NgramDataset load_dataset_cache(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::kIo, "cannot open " + path);
  io::expect_magic(in, "LSTD");
  if (io::read_u32(in) != kDatasetCacheVersion) {
    fail(ErrorCode::kFormat, "unsupported dataset cache version");
  }
  NgramDataset out;
  out.n = io::read_u32(in);
  out.vocab_cap = io::read_u32(in);
  const std::uint32_t vsize = io::read_u32(in);
  if (out.n < 2 || out.vocab_cap < 1 || vsize < 1 || vsize > out.vocab_cap) {
    fail(ErrorCode::kFormat, "dataset cache header out of range");
  }
  for (std::uint32_t i = 0; i < vsize; ++i) {
    const std::uint32_t len = io::read_u32(in);
    if (len > (1u << 20)) fail(ErrorCode::kFormat, "token length out of range");
    std::string tok = io::read_bytes(in, len);
    if (i > 0) out.vocab.ids.emplace(tok, i);
    out.vocab.tokens.push_back(std::move(tok));
  }
  const std::uint64_t count = io::read_u64(in);
  for (std::uint64_t e = 0; e < count; ++e) {
    NgramExample ex;
    ex.context.resize(out.n - 1);
    for (auto& id : ex.context) id = io::read_u32(in);
    ex.target = io::read_u32(in);
    for (auto id : ex.context)
      if (id >= out.vocab_cap) fail(ErrorCode::kFormat, "id out of range");
    if (ex.target >= out.vocab_cap) fail(ErrorCode::kFormat, "id out of range");
    out.examples.push_back(std::move(ex));
  }
  return out;
}

}  // namespace lst
