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
#include <stdexcept>
#include <string>
#include <vector>

#include "lst/lst.h"

namespace lstcli {

// A failed library call. Carries the C status so commands can map it to an
// exit code or a specific message (out of memory during bench, for example).
class ApiError : public std::runtime_error {
 public:
  ApiError(lst_status status, const std::string& what)
      : std::runtime_error(what), status_(status) {}
  lst_status status() const noexcept { return status_; }

 private:
  lst_status status_;
};

inline void check(lst_status s, const char* call) {
  if (s != LST_OK) {
    throw ApiError(s, std::string(call) + ": " + lst_status_string(s) + ": " +
                          lst_last_error());
  }
}

template <typename H, void (*Destroy)(H*)>
struct Deleter {
  void operator()(H* h) const noexcept { Destroy(h); }
};

using FactoredPtr = std::unique_ptr<lst_factored, Deleter<lst_factored, lst_factored_destroy>>;
using NaivePtr = std::unique_ptr<lst_naive, Deleter<lst_naive, lst_naive_destroy>>;
using LossPtr = std::unique_ptr<lst_loss, Deleter<lst_loss, lst_loss_destroy>>;
using SyntheticPtr = std::unique_ptr<lst_synthetic, Deleter<lst_synthetic, lst_synthetic_destroy>>;
using NgramPtr = std::unique_ptr<lst_ngram, Deleter<lst_ngram, lst_ngram_destroy>>;
using NetworkPtr = std::unique_ptr<lst_network, Deleter<lst_network, lst_network_destroy>>;

// Owning copy of a sparse batch whose view can outlive the source handle.
struct SparseCopy {
  size_t rows = 0;
  size_t cols = 0;
  std::vector<size_t> offsets{0};
  std::vector<size_t> indices;
  std::vector<double> values;

  static SparseCopy of(const lst_sparse_batch& b) {
    SparseCopy c;
    c.rows = b.rows;
    c.cols = b.cols;
    c.offsets.assign(b.col_offsets, b.col_offsets + b.cols + 1);
    const size_t nnz = c.offsets.back();
    c.indices.assign(b.indices, b.indices + nnz);
    c.values.assign(b.values, b.values + nnz);
    return c;
  }

  lst_sparse_batch view() const {
    return {rows, cols, offsets.data(), indices.data(), values.data()};
  }
};

}  // namespace lstcli
