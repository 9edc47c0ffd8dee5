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
#include <random>
#include <string>
#include <unordered_map>
#include <vector>

#include "lst/matrix.hpp"
#include "lst/sparse.hpp"

namespace lst {

enum class ValueDist { kGaussian, kUnit };

struct SyntheticSpec {
  Index input_dim = 1;   // D_in
  Index output_dim = 1;  // D
  Index hidden_dim = 1;  // rows of the dense H handed to bare output layers
  Index k = 1;           // active entries per column of X and Y
  Index batch = 1;       // m
  Index count = 1;       // number of minibatches in the stream
  std::uint64_t seed = 0;
  ValueDist dist = ValueDist::kGaussian;

  void validate() const;
};

struct SyntheticBatch {
  KSparseMat x;  // D_in x m
  KSparseMat y;  // D x m
  DenseMat h;    // hidden_dim x m, uniform in [-1, 1]
};

// Deterministic for a fixed spec: the same seed yields bit-identical batches.
class SyntheticStream {
 public:
  explicit SyntheticStream(SyntheticSpec spec);

  const SyntheticSpec& spec() const noexcept { return spec_; }
  Index produced() const noexcept { return produced_; }

  // False once spec.count batches have been produced.
  bool next(SyntheticBatch& out);
  void reset();

 private:
  KSparseMat draw_sparse(Index rows);

  SyntheticSpec spec_;
  std::mt19937_64 gen_;
  Index produced_ = 0;
};

// Uniform K-subset of [0, n) (Floyd's algorithm), sorted.
std::vector<Index> sample_without_replacement(std::mt19937_64& gen, Index n,
                                              Index k);

struct Vocabulary {
  std::vector<std::string> tokens;  // id -> token; id 0 is the unknown token
  std::unordered_map<std::string, std::uint32_t> ids;

  std::uint32_t id(const std::string& token) const;  // 0 when absent
  Index size() const noexcept { return tokens.size(); }
};

struct NgramExample {
  std::vector<std::uint32_t> context;  // n - 1 ids, oldest first
  std::uint32_t target = 0;
};

struct NgramDataset {
  Index n = 2;
  Index vocab_cap = 1;  // D; ids live in [0, vocab_cap)
  Vocabulary vocab;
  std::vector<NgramExample> examples;

  Index input_dim() const noexcept { return (n - 1) * vocab_cap; }
  Index output_dim() const noexcept { return vocab_cap; }

  // Context position p of token id t is input coordinate t + p * vocab_cap.
  KSparseMat inputs(Index begin, Index count) const;
  KSparseMat targets(Index begin, Index count) const;
};

inline constexpr const char* kUnknownToken = "<unk>";

NgramDataset ingest_ngrams(std::istream& text, Index n, Index vocab_cap);
NgramDataset ingest_ngrams_file(const std::string& path, Index n,
                                Index vocab_cap);

// Binary dump: "LSTD" | version u32 | header u32s | vocabulary | ids u32 LE.
void save_dataset_cache(const std::string& path, const NgramDataset& data);
NgramDataset load_dataset_cache(const std::string& path);

}  // namespace lst
