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

// Differentiable primitives. Every model equation is composed from this
// closed set; there is no general broadcasting.

#include <cstddef>
#include <span>
#include <vector>

#include "mailrec/kernels.hpp"
#include "mailrec/sparse_matrix.hpp"
#include "mailrec/tape.hpp"

namespace mailrec::ad {

inline constexpr double kLayerNormEps = 1e-5;
inline constexpr double kNormStabilizer = 1e-12;

using kernels::Trans;

// a (m x k) times b (k x n), or times b^T when b is (n x k) and tb is kYes.
Var matmul(Var a, Var b, Trans tb = Trans::kNo);

// a + b / a - b. b is either the same shape as a, a 1 x cols row that is
// repeated down the rows, or a rows x 1 column repeated across the columns.
Var add(Var a, Var b);
Var sub(Var a, Var b);

Var elementwise_mul(Var a, Var b);
Var scalar_mul(Var a, double c);

Var tanh(Var a);
Var sigmoid(Var a);
Var exp(Var a);
Var log(Var a);

// Per-row normalization over the last axis without affine parameters.
Var layer_norm(Var a);

// Sum of every entry, 1 x 1.
Var sum(Var a);
// Column means over the rows, 1 x cols.
Var mean_rows(Var a);
// x / max(|x|, 1e-12) per row.
Var l2_normalize_rows(Var a);
// Row-wise log(sum(exp(x))), rows x 1, evaluated with max-shift.
Var logsumexp_rows(Var a);

Var concat_rows(std::span<const Var> parts);
Var gather_rows(Var a, std::span<const std::size_t> rows);
// Same values, new extents with identical element count.
Var reshape(Var a, Shape shape);

// Constant sparse matrix times a dense tensor. The matrix must outlive the
// tape.
Var sparse_dense_matmul(const SparseMatrix& a, Var x);

}  // namespace mailrec::ad
