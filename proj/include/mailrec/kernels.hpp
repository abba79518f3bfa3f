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

// Data-parallel numeric kernels used by the autodiff engine, the graph
// builder and the evaluator.
//
// Two implementations share one signature set:
//   kernels::serial    plain loops, the reference the tests compare against
//   kernels::parallel  OpenMP row-parallel versions used by the library
//
// Every kernel accumulates each output element in the same index order in
// both namespaces, so results are bit-identical regardless of thread count.

#include <cstddef>
#include <cstdint>
#include <limits>
#include <span>

namespace mailrec::kernels {

enum class Trans { kNo, kYes };

struct ConstMatrixView {
  const double* data = nullptr;
  std::size_t rows = 0;
  std::size_t cols = 0;

  double operator()(std::size_t r, std::size_t c) const {
    return data[r * cols + c];
  }
};

struct MatrixView {
  double* data = nullptr;
  std::size_t rows = 0;
  std::size_t cols = 0;

  double& operator()(std::size_t r, std::size_t c) const {
    return data[r * cols + c];
  }
  operator ConstMatrixView() const { return {data, rows, cols}; }
};

// Compressed sparse row view; columns sorted within each row.
struct CsrView {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::span<const std::uint64_t> row_ptr;
  std::span<const std::uint32_t> col_idx;
  std::span<const double> values;
};

inline constexpr std::uint32_t kNoIndex =
    std::numeric_limits<std::uint32_t>::max();
inline constexpr double kCosineStabilizer = 1e-12;

namespace serial {

// c = op(a) * op(b), or c += op(a) * op(b) when accumulate is set. With
// accumulation the product is summed first and then added to c.
void gemm(ConstMatrixView a, Trans ta, ConstMatrixView b, Trans tb,
          MatrixView c, bool accumulate = false);

// y = a * x (or y += a * x).
void spmm(const CsrView& a, ConstMatrixView x, MatrixView y,
          bool accumulate = false);

// Euclidean norm of every row.
void row_norms(ConstMatrixView h, std::span<double> out);

// Cosine similarity of rows [row_begin, row_end) against every row of h,
// s_ij = <h_i, h_j> / (|h_i| |h_j| + 1e-12). The diagonal is set to -inf.
// out holds (row_end - row_begin) x h.rows values.
void cosine_rows(ConstMatrixView h, std::span<const double> norms,
                 std::size_t row_begin, std::size_t row_end,
                 std::span<double> out);

// For each row, the k column indices with the largest scores, ordered by
// score descending and then by index ascending. Entries equal to -inf are
// never selected; missing slots are filled with kNoIndex.
void topk_rows(ConstMatrixView scores, std::size_t k,
               std::span<std::uint32_t> out);

}  // namespace serial

namespace parallel {

void gemm(ConstMatrixView a, Trans ta, ConstMatrixView b, Trans tb,
          MatrixView c, bool accumulate = false);
void spmm(const CsrView& a, ConstMatrixView x, MatrixView y,
          bool accumulate = false);
void row_norms(ConstMatrixView h, std::span<double> out);
void cosine_rows(ConstMatrixView h, std::span<const double> norms,
                 std::size_t row_begin, std::size_t row_end,
                 std::span<double> out);
void topk_rows(ConstMatrixView scores, std::size_t k,
               std::span<std::uint32_t> out);

}  // namespace parallel

// Shape check shared by both gemm implementations; throws ShapeError.
void check_gemm_shapes(ConstMatrixView a, Trans ta, ConstMatrixView b,
                       Trans tb, MatrixView c);

}  // namespace mailrec::kernels
