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

#include "mailrec/sparse_matrix.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "mailrec/binary_io.hpp"
#include "mailrec/errors.hpp"

namespace mailrec {

namespace {

constexpr io::Magic kGraphMagic{'M', 'G', 'R', '1'};

}  // namespace

SparseMatrix::SparseMatrix(std::size_t rows, std::size_t cols)
    : rows_(rows), cols_(cols), row_ptr_(rows + 1, 0) {}

SparseMatrix::SparseMatrix(std::size_t rows, std::size_t cols,
                           std::vector<std::uint64_t> row_ptr,
                           std::vector<std::uint32_t> col_idx,
                           std::vector<double> values)
    : rows_(rows),
      cols_(cols),
      row_ptr_(std::move(row_ptr)),
      col_idx_(std::move(col_idx)),
      values_(std::move(values)) {
  validate();
}

void SparseMatrix::validate() const {
  if (cols_ > std::numeric_limits<std::uint32_t>::max()) {
    throw ShapeError("sparse matrix: too many columns");
  }
  if (row_ptr_.size() != rows_ + 1 || row_ptr_.front() != 0 ||
      row_ptr_.back() != col_idx_.size() || col_idx_.size() != values_.size()) {
    throw FormatError("sparse matrix: inconsistent compressed-row arrays");
  }
  for (std::size_t r = 0; r < rows_; ++r) {
    if (row_ptr_[r] > row_ptr_[r + 1]) {
      throw FormatError("sparse matrix: row offsets not monotone at row " +
                        std::to_string(r));
    }
    for (std::uint64_t k = row_ptr_[r]; k < row_ptr_[r + 1]; ++k) {
      if (col_idx_[k] >= cols_) {
        throw FormatError("sparse matrix: column out of range in row " +
                          std::to_string(r));
      }
      if (k > row_ptr_[r] && col_idx_[k] <= col_idx_[k - 1]) {
        throw FormatError("sparse matrix: columns not sorted/unique in row " +
                          std::to_string(r));
      }
      if (!std::isfinite(values_[k])) {
        throw NumericsError("sparse matrix: non-finite value in row " +
                            std::to_string(r));
      }
    }
  }
}

SparseMatrix SparseMatrix::from_triplets(std::size_t rows, std::size_t cols,
                                         std::vector<Triplet> triplets,
                                         DuplicatePolicy policy) {
  for (const Triplet& t : triplets) {
    if (t.row >= rows || t.col >= cols) {
      throw ShapeError("triplet (" + std::to_string(t.row) + ", " +
                       std::to_string(t.col) + ") outside " +
                       std::to_string(rows) + "x" + std::to_string(cols));
    }
  }
  std::stable_sort(triplets.begin(), triplets.end(),
                   [](const Triplet& a, const Triplet& b) {
                     return a.row < b.row || (a.row == b.row && a.col < b.col);
                   });
  std::vector<std::uint64_t> row_ptr(rows + 1, 0);
  std::vector<std::uint32_t> col_idx;
  std::vector<double> values;
  col_idx.reserve(triplets.size());
  values.reserve(triplets.size());
  for (std::size_t k = 0; k < triplets.size(); ++k) {
    const Triplet& t = triplets[k];
    if (k > 0 && triplets[k - 1].row == t.row && triplets[k - 1].col == t.col) {
      double& last = values.back();
      last = policy == DuplicatePolicy::kSum ? last + t.value
                                             : std::max(last, t.value);
      continue;
    }
    col_idx.push_back(static_cast<std::uint32_t>(t.col));
    values.push_back(t.value);
    ++row_ptr[t.row + 1];
  }
  for (std::size_t r = 0; r < rows; ++r) row_ptr[r + 1] += row_ptr[r];
  return SparseMatrix(rows, cols, std::move(row_ptr), std::move(col_idx),
                      std::move(values));
}

SparseMatrix SparseMatrix::identity(std::size_t n) {
  std::vector<std::uint64_t> row_ptr(n + 1);
  std::vector<std::uint32_t> col_idx(n);
  for (std::size_t i = 0; i < n; ++i) {
    row_ptr[i + 1] = i + 1;
    col_idx[i] = static_cast<std::uint32_t>(i);
  }
  return SparseMatrix(n, n, std::move(row_ptr), std::move(col_idx),
                      std::vector<double>(n, 1.0));
}

std::span<const std::uint32_t> SparseMatrix::row_cols(std::size_t r) const {
  return std::span<const std::uint32_t>(col_idx_).subspan(
      row_ptr_[r], row_ptr_[r + 1] - row_ptr_[r]);
}

std::span<const double> SparseMatrix::row_values(std::size_t r) const {
  return std::span<const double>(values_).subspan(
      row_ptr_[r], row_ptr_[r + 1] - row_ptr_[r]);
}

double SparseMatrix::at(std::size_t r, std::size_t c) const {
  const auto cols = row_cols(r);
  const auto it = std::lower_bound(cols.begin(), cols.end(), c);
  if (it == cols.end() || *it != c) return 0.0;
  return values_[row_ptr_[r] + static_cast<std::size_t>(it - cols.begin())];
}

SparseMatrix SparseMatrix::transpose() const {
  std::vector<std::uint64_t> row_ptr(cols_ + 1, 0);
  for (std::uint32_t c : col_idx_) ++row_ptr[c + 1];
  for (std::size_t c = 0; c < cols_; ++c) row_ptr[c + 1] += row_ptr[c];
  std::vector<std::uint64_t> cursor(row_ptr.begin(), row_ptr.end() - 1);
  std::vector<std::uint32_t> col_idx(nnz());
  std::vector<double> values(nnz());
  // Rows are visited in ascending order, so each output row comes out sorted.
  for (std::size_t r = 0; r < rows_; ++r) {
    for (std::uint64_t k = row_ptr_[r]; k < row_ptr_[r + 1]; ++k) {
      const std::uint64_t dst = cursor[col_idx_[k]]++;
      col_idx[dst] = static_cast<std::uint32_t>(r);
      values[dst] = values_[k];
    }
  }
  return SparseMatrix(cols_, rows_, std::move(row_ptr), std::move(col_idx),
                      std::move(values));
}

SparseMatrix SparseMatrix::symmetrize_max() const {
  if (rows_ != cols_) throw ShapeError("symmetrize: matrix is not square");
  const SparseMatrix t = transpose();
  std::vector<Triplet> merged;
  merged.reserve(2 * nnz());
  for (std::size_t r = 0; r < rows_; ++r) {
    const auto ac = row_cols(r);
    const auto av = row_values(r);
    const auto bc = t.row_cols(r);
    const auto bv = t.row_values(r);
    std::size_t i = 0;
    std::size_t j = 0;
    // Absent entries count as zero on either side.
    while (i < ac.size() || j < bc.size()) {
      if (j == bc.size() || (i < ac.size() && ac[i] < bc[j])) {
        merged.push_back({r, ac[i], std::max(av[i], 0.0)});
        ++i;
      } else if (i == ac.size() || bc[j] < ac[i]) {
        merged.push_back({r, bc[j], std::max(bv[j], 0.0)});
        ++j;
      } else {
        merged.push_back({r, ac[i], std::max(av[i], bv[j])});
        ++i;
        ++j;
      }
    }
  }
  return from_triplets(rows_, cols_, std::move(merged));
}

SparseMatrix SparseMatrix::prune_nonpositive() const {
  std::vector<Triplet> kept;
  kept.reserve(nnz());
  for (std::size_t r = 0; r < rows_; ++r) {
    for (std::uint64_t k = row_ptr_[r]; k < row_ptr_[r + 1]; ++k) {
      if (values_[k] > 0.0) kept.push_back({r, col_idx_[k], values_[k]});
    }
  }
  return from_triplets(rows_, cols_, std::move(kept));
}

bool SparseMatrix::is_symmetric() const {
  if (rows_ != cols_) return false;
  return transpose() == *this;
}

std::vector<double> SparseMatrix::to_dense() const {
  std::vector<double> dense(rows_ * cols_, 0.0);
  for (std::size_t r = 0; r < rows_; ++r) {
    for (std::uint64_t k = row_ptr_[r]; k < row_ptr_[r + 1]; ++k) {
      dense[r * cols_ + col_idx_[k]] = values_[k];
    }
  }
  return dense;
}

std::vector<Triplet> SparseMatrix::triplets() const {
  std::vector<Triplet> out;
  out.reserve(nnz());
  for (std::size_t r = 0; r < rows_; ++r) {
    for (std::uint64_t k = row_ptr_[r]; k < row_ptr_[r + 1]; ++k) {
      out.push_back({r, col_idx_[k], values_[k]});
    }
  }
  return out;
}

void save_graph(const SparseMatrix& graph, const std::filesystem::path& path) {
  io::BinaryWriter out(path);
  out.magic(kGraphMagic);
  out.u64(graph.rows());
  out.u64(graph.cols());
  out.u64(graph.nnz());
  for (std::uint64_t p : graph.row_ptr()) out.u64(p);
  for (std::uint32_t c : graph.col_idx()) out.u32(c);
  out.f32_array(graph.values());
  out.close();
}

SparseMatrix load_graph(const std::filesystem::path& path) {
  io::BinaryReader in(path);
  in.expect_magic(kGraphMagic);
  const std::uint64_t rows = in.u64();
  const std::uint64_t cols = in.u64();
  const std::uint64_t nnz = in.u64();
  const std::uint64_t expected = (rows + 1) * 8 + nnz * 8;
  if (in.remaining() != expected) {
    throw FormatError(path.string() + ": payload size does not match header");
  }
  std::vector<std::uint64_t> row_ptr(rows + 1);
  for (auto& p : row_ptr) p = in.u64();
  std::vector<std::uint32_t> col_idx(nnz);
  for (auto& c : col_idx) c = in.u32();
  std::vector<double> values = in.f32_array(nnz);
  try {
    return SparseMatrix(rows, cols, std::move(row_ptr), std::move(col_idx),
                        std::move(values));
  } catch (const Error& e) {
    throw FormatError(path.string() + ": " + e.what());
  }
}

}  // namespace mailrec
