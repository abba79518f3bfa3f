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

#include <omp.h>

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "mailrec/errors.hpp"
#include "mailrec/kernels.hpp"

namespace mailrec::kernels::parallel {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// Signed loop index for OpenMP.
using Row = std::int64_t;

}  // namespace

void gemm(ConstMatrixView a, Trans ta, ConstMatrixView b, Trans tb,
          MatrixView c, bool accumulate) {
  check_gemm_shapes(a, ta, b, tb, c);
  const std::size_t inner = ta == Trans::kNo ? a.cols : a.rows;
  const std::size_t n = c.cols;
  const Row m = static_cast<Row>(c.rows);

  if (tb == Trans::kYes) {
    // Dot-product form: both operands are walked along contiguous rows when
    // a is not transposed.
#pragma omp parallel for schedule(static)
    for (Row i = 0; i < m; ++i) {
      for (std::size_t j = 0; j < n; ++j) {
        const double* brow = b.data + j * b.cols;
        double s = 0.0;
        if (ta == Trans::kNo) {
          const double* arow = a.data + static_cast<std::size_t>(i) * a.cols;
          for (std::size_t p = 0; p < inner; ++p) s += arow[p] * brow[p];
        } else {
          for (std::size_t p = 0; p < inner; ++p) {
            s += a.data[p * a.cols + static_cast<std::size_t>(i)] * brow[p];
          }
        }
        double& dst = c(static_cast<std::size_t>(i), j);
        dst = accumulate ? dst + s : s;
      }
    }
    return;
  }

  // Axpy form over rows of b into a per-row scratch buffer.
#pragma omp parallel
  {
    std::vector<double> acc(n);
#pragma omp for schedule(static)
    for (Row i = 0; i < m; ++i) {
      std::fill(acc.begin(), acc.end(), 0.0);
      const std::size_t row = static_cast<std::size_t>(i);
      for (std::size_t p = 0; p < inner; ++p) {
        const double av =
            ta == Trans::kNo ? a.data[row * a.cols + p] : a.data[p * a.cols + row];
        const double* brow = b.data + p * b.cols;
        for (std::size_t j = 0; j < n; ++j) acc[j] += av * brow[j];
      }
      double* crow = c.data + row * n;
      if (accumulate) {
        for (std::size_t j = 0; j < n; ++j) crow[j] += acc[j];
      } else {
        std::copy(acc.begin(), acc.end(), crow);
      }
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
  const std::size_t n = x.cols;
  const Row m = static_cast<Row>(a.rows);
#pragma omp parallel
  {
    std::vector<double> acc(n);
#pragma omp for schedule(dynamic, 64)
    for (Row i = 0; i < m; ++i) {
      const std::size_t row = static_cast<std::size_t>(i);
      std::fill(acc.begin(), acc.end(), 0.0);
      for (std::uint64_t nz = a.row_ptr[row]; nz < a.row_ptr[row + 1]; ++nz) {
        const double w = a.values[nz];
        const double* xrow = x.data + a.col_idx[nz] * n;
        for (std::size_t j = 0; j < n; ++j) acc[j] += w * xrow[j];
      }
      double* yrow = y.data + row * n;
      if (accumulate) {
        for (std::size_t j = 0; j < n; ++j) yrow[j] += acc[j];
      } else {
        std::copy(acc.begin(), acc.end(), yrow);
      }
    }
  }
}

void row_norms(ConstMatrixView h, std::span<double> out) {
  const Row m = static_cast<Row>(h.rows);
#pragma omp parallel for schedule(static)
  for (Row i = 0; i < m; ++i) {
    const double* row = h.data + static_cast<std::size_t>(i) * h.cols;
    double s = 0.0;
    for (std::size_t k = 0; k < h.cols; ++k) s += row[k] * row[k];
    out[static_cast<std::size_t>(i)] = std::sqrt(s);
  }
}

void cosine_rows(ConstMatrixView h, std::span<const double> norms,
                 std::size_t row_begin, std::size_t row_end,
                 std::span<double> out) {
  const std::size_t n = h.rows;
  const std::size_t d = h.cols;
  const Row begin = static_cast<Row>(row_begin);
  const Row end = static_cast<Row>(row_end);
#pragma omp parallel for schedule(dynamic, 8)
  for (Row ii = begin; ii < end; ++ii) {
    const std::size_t i = static_cast<std::size_t>(ii);
    const double* hi = h.data + i * d;
    double* dst = out.data() + (i - row_begin) * n;
    for (std::size_t j = 0; j < n; ++j) {
      if (j == i) {
        dst[j] = kNegInf;
        continue;
      }
      const double* hj = h.data + j * d;
      double dot = 0.0;
      for (std::size_t k = 0; k < d; ++k) dot += hi[k] * hj[k];
      dst[j] = dot / (norms[i] * norms[j] + kCosineStabilizer);
    }
  }
}

void topk_rows(ConstMatrixView scores, std::size_t k,
               std::span<std::uint32_t> out) {
  const Row m = static_cast<Row>(scores.rows);
#pragma omp parallel
  {
    std::vector<std::uint32_t> cand;
    cand.reserve(scores.cols);
#pragma omp for schedule(dynamic, 16)
    for (Row rr = 0; rr < m; ++rr) {
      const std::size_t r = static_cast<std::size_t>(rr);
      const double* row = scores.data + r * scores.cols;
      cand.clear();
      for (std::uint32_t j = 0; j < scores.cols; ++j) {
        if (row[j] != kNegInf) cand.push_back(j);
      }
      const std::size_t take = std::min(k, cand.size());
      std::partial_sort(cand.begin(), cand.begin() + static_cast<std::ptrdiff_t>(take),
                        cand.end(), [row](std::uint32_t x, std::uint32_t y) {
                          return row[x] > row[y] || (row[x] == row[y] && x < y);
                        });
      for (std::size_t slot = 0; slot < k; ++slot) {
        out[r * k + slot] = slot < take ? cand[slot] : kNoIndex;
      }
    }
  }
}

}  // namespace mailrec::kernels::parallel
