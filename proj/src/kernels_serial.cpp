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

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>
#include <vector>

#include "mailrec/errors.hpp"
#include "mailrec/kernels.hpp"

namespace mailrec::kernels {

namespace {

std::size_t op_rows(ConstMatrixView m, Trans t) {
  return t == Trans::kNo ? m.rows : m.cols;
}
std::size_t op_cols(ConstMatrixView m, Trans t) {
  return t == Trans::kNo ? m.cols : m.rows;
}
double op_at(ConstMatrixView m, Trans t, std::size_t r, std::size_t c) {
  return t == Trans::kNo ? m(r, c) : m(c, r);
}

}  // namespace

void check_gemm_shapes(ConstMatrixView a, Trans ta, ConstMatrixView b,
                       Trans tb, MatrixView c) {
  if (op_cols(a, ta) != op_rows(b, tb) || c.rows != op_rows(a, ta) ||
      c.cols != op_cols(b, tb)) {
    throw ShapeError("gemm: (" + std::to_string(op_rows(a, ta)) + "x" +
                     std::to_string(op_cols(a, ta)) + ") * (" +
                     std::to_string(op_rows(b, tb)) + "x" +
                     std::to_string(op_cols(b, tb)) + ") -> (" +
                     std::to_string(c.rows) + "x" + std::to_string(c.cols) +
                     ")");
  }
}

namespace serial {

void gemm(ConstMatrixView a, Trans ta, ConstMatrixView b, Trans tb,
          MatrixView c, bool accumulate) {
  check_gemm_shapes(a, ta, b, tb, c);
  const std::size_t inner = op_cols(a, ta);
  for (std::size_t i = 0; i < c.rows; ++i) {
    for (std::size_t j = 0; j < c.cols; ++j) {
      double s = 0.0;
      for (std::size_t p = 0; p < inner; ++p) {
        s += op_at(a, ta, i, p) * op_at(b, tb, p, j);
      }
      c(i, j) = accumulate ? c(i, j) + s : s;
    }
  }
}

void spmm(const CsrView& a, ConstMatrixView x, MatrixView y,
          bool accumulate) {
  if (a.cols != x.rows || y.rows != a.rows || y.cols != x.cols) {
    throw ShapeError("spmm: sparse " + std::to_string(a.rows) + "x" +
                     std::to_string(a.cols) + " times dense " +
                     std::to_string(x.rows) + "x" + std::to_string(x.cols));
  }
  for (std::size_t i = 0; i < a.rows; ++i) {
    for (std::size_t j = 0; j < x.cols; ++j) {
      double s = 0.0;
      for (std::uint64_t nz = a.row_ptr[i]; nz < a.row_ptr[i + 1]; ++nz) {
        s += a.values[nz] * x(a.col_idx[nz], j);
      }
      y(i, j) = accumulate ? y(i, j) + s : s;
    }
  }
}

void row_norms(ConstMatrixView h, std::span<double> out) {
  for (std::size_t i = 0; i < h.rows; ++i) {
    double s = 0.0;
    for (std::size_t k = 0; k < h.cols; ++k) s += h(i, k) * h(i, k);
    out[i] = std::sqrt(s);
  }
}

void cosine_rows(ConstMatrixView h, std::span<const double> norms,
                 std::size_t row_begin, std::size_t row_end,
                 std::span<double> out) {
  const std::size_t n = h.rows;
  for (std::size_t i = row_begin; i < row_end; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      double& dst = out[(i - row_begin) * n + j];
      if (i == j) {
        dst = -std::numeric_limits<double>::infinity();
        continue;
      }
      double dot = 0.0;
      for (std::size_t k = 0; k < h.cols; ++k) dot += h(i, k) * h(j, k);
      dst = dot / (norms[i] * norms[j] + kCosineStabilizer);
    }
  }
}

void topk_rows(ConstMatrixView scores, std::size_t k,
               std::span<std::uint32_t> out) {
  std::vector<std::uint32_t> order(scores.cols);
  for (std::size_t r = 0; r < scores.rows; ++r) {
    std::iota(order.begin(), order.end(), 0u);
    std::sort(order.begin(), order.end(),
              [&](std::uint32_t x, std::uint32_t y) {
                const double sx = scores(r, x);
                const double sy = scores(r, y);
                return sx > sy || (sx == sy && x < y);
              });
    for (std::size_t slot = 0; slot < k; ++slot) {
      const bool valid = slot < order.size() &&
                         scores(r, order[slot]) !=
                             -std::numeric_limits<double>::infinity();
      out[r * k + slot] = valid ? order[slot] : kNoIndex;
    }
  }
}

}  // namespace serial
}  // namespace mailrec::kernels
