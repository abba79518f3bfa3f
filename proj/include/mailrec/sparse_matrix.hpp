// Copyright 2026 The mailrec Authors.
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
#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "mailrec/kernels.hpp"

namespace mailrec {

struct Triplet {
  std::size_t row = 0;
  std::size_t col = 0;
  double value = 0.0;
};

enum class DuplicatePolicy { kSum, kMax };

// Weighted matrix in compressed-row form. Column indices are sorted and
// unique within each row and every stored value is finite. Selection
// graphs (KNN) may keep zero-weight entries so that the chosen neighbor set
// stays observable; prune_nonpositive() removes them.
class SparseMatrix {
 public:
  SparseMatrix() = default;
  SparseMatrix(std::size_t rows, std::size_t cols);
  SparseMatrix(std::size_t rows, std::size_t cols,
               std::vector<std::uint64_t> row_ptr,
               std::vector<std::uint32_t> col_idx, std::vector<double> values);

  static SparseMatrix from_triplets(std::size_t rows, std::size_t cols,
                                    std::vector<Triplet> triplets,
                                    DuplicatePolicy policy = DuplicatePolicy::kSum);
  static SparseMatrix identity(std::size_t n);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  std::size_t nnz() const { return values_.size(); }

  std::span<const std::uint64_t> row_ptr() const { return row_ptr_; }
  std::span<const std::uint32_t> col_idx() const { return col_idx_; }
  std::span<const double> values() const { return values_; }
  std::span<const std::uint32_t> row_cols(std::size_t r) const;
  std::span<const double> row_values(std::size_t r) const;

  // Stored value at (r, c), or 0 when absent.
  double at(std::size_t r, std::size_t c) const;

  SparseMatrix transpose() const;
  // Elementwise max(W, W^T), treating absent entries as zero.
  SparseMatrix symmetrize_max() const;
  // Drops every entry <= 0.
  SparseMatrix prune_nonpositive() const;
  bool is_symmetric() const;
  std::vector<double> to_dense() const;
  std::vector<Triplet> triplets() const;

  kernels::CsrView view() const {
    return {rows_, cols_, row_ptr_, col_idx_, values_};
  }

  bool operator==(const SparseMatrix&) const = default;

 private:
  void validate() const;

  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<std::uint64_t> row_ptr_{0};
  std::vector<std::uint32_t> col_idx_;
  std::vector<double> values_;
};

// MGR1 graph file: magic, rows/cols/nnz as u64, then (rows + 1) u64 row
// offsets, nnz u32 column indices and nnz float32 values, all little-endian.
void save_graph(const SparseMatrix& graph, const std::filesystem::path& path);
SparseMatrix load_graph(const std::filesystem::path& path);

}  // namespace mailrec
