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

#include "mailrec/ops.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <string>

#include "mailrec/errors.hpp"

namespace mailrec::ad {

namespace {

namespace pk = kernels::parallel;

Tape& tape_of(Var a) {
  if (!a.valid()) throw ContractError("operation on an empty Var");
  return *a.tape();
}

kernels::MatrixView mview(std::span<double> data, Shape s) {
  return {data.data(), s.rows, s.cols};
}
kernels::ConstMatrixView cview(std::span<const double> data, Shape s) {
  return {data.data(), s.rows, s.cols};
}

enum class Broadcast { kNone, kRow, kColumn };

Broadcast broadcast_rule(const Shape& a, const Shape& b, const char* op) {
  if (a == b) return Broadcast::kNone;
  if (b.rows == 1 && b.cols == a.cols) return Broadcast::kRow;
  if (b.cols == 1 && b.rows == a.rows) return Broadcast::kColumn;
  throw ShapeError(std::string(op) + ": cannot combine " + a.str() + " with " +
                   b.str());
}

Var add_or_sub(Var a, Var b, double sign, const char* op) {
  const Shape sa = a.shape();
  const Shape sb = b.shape();
  const Broadcast rule = broadcast_rule(sa, sb, op);
  const auto av = a.value().values();
  const auto bv = b.value().values();
  std::vector<double> out(sa.size());
  for (std::size_t i = 0; i < sa.rows; ++i) {
    for (std::size_t j = 0; j < sa.cols; ++j) {
      const std::size_t k = i * sa.cols + j;
      const double rhs = rule == Broadcast::kNone  ? bv[k]
                         : rule == Broadcast::kRow ? bv[j]
                                                   : bv[i];
      out[k] = sign > 0 ? av[k] + rhs : av[k] - rhs;
    }
  }
  return tape_of(a).record(
      Tensor(sa, std::move(out)), {a, b},
      [sa, rule, sign](const BackwardArgs& g) {
        if (!g.in_grads[0].empty()) {
          for (std::size_t k = 0; k < sa.size(); ++k) {
            g.in_grads[0][k] += g.out_grad[k];
          }
        }
        if (!g.in_grads[1].empty()) {
          auto gb = g.in_grads[1];
          for (std::size_t i = 0; i < sa.rows; ++i) {
            for (std::size_t j = 0; j < sa.cols; ++j) {
              const double v = sign * g.out_grad[i * sa.cols + j];
              switch (rule) {
                case Broadcast::kNone: gb[i * sa.cols + j] += v; break;
                case Broadcast::kRow: gb[j] += v; break;
                case Broadcast::kColumn: gb[i] += v; break;
              }
            }
          }
        }
      },
      op);
}

template <typename F, typename DF>
Var unary(Var a, const char* op, F f, DF derivative) {
  const auto av = a.value().values();
  std::vector<double> out(av.size());
  for (std::size_t k = 0; k < av.size(); ++k) out[k] = f(av[k]);
  return tape_of(a).record(
      Tensor(a.shape(), std::move(out)), {a},
      [a, derivative](const BackwardArgs& g) {
        const auto x = a.value().values();
        for (std::size_t k = 0; k < x.size(); ++k) {
          g.in_grads[0][k] += g.out_grad[k] * derivative(x[k]);
        }
      },
      op);
}

}  // namespace

Var matmul(Var a, Var b, Trans tb) {
  const Shape sa = a.shape();
  const Shape sb = b.shape();
  const Shape out{sa.rows, tb == Trans::kNo ? sb.cols : sb.rows};
  std::vector<double> values(out.size());
  pk::gemm(a.value().view(), Trans::kNo, b.value().view(), tb,
           mview(values, out));
  return tape_of(a).record(
      Tensor(out, std::move(values)), {a, b},
      [a, b, tb, out](const BackwardArgs& g) {
        const auto grad = cview(g.out_grad, out);
        if (!g.in_grads[0].empty()) {
          // dA = G op(B)^T
          pk::gemm(grad, Trans::kNo, b.value().view(),
                   tb == Trans::kNo ? Trans::kYes : Trans::kNo,
                   mview(g.in_grads[0], a.shape()), true);
        }
        if (!g.in_grads[1].empty()) {
          if (tb == Trans::kNo) {
            pk::gemm(a.value().view(), Trans::kYes, grad, Trans::kNo,
                     mview(g.in_grads[1], b.shape()), true);
          } else {
            pk::gemm(grad, Trans::kYes, a.value().view(), Trans::kNo,
                     mview(g.in_grads[1], b.shape()), true);
          }
        }
      },
      "matmul");
}

Var add(Var a, Var b) { return add_or_sub(a, b, 1.0, "add"); }
Var sub(Var a, Var b) { return add_or_sub(a, b, -1.0, "sub"); }

Var elementwise_mul(Var a, Var b) {
  if (a.shape() != b.shape()) {
    throw ShapeError("elementwise_mul: " + a.shape().str() + " vs " +
                     b.shape().str());
  }
  const auto av = a.value().values();
  const auto bv = b.value().values();
  std::vector<double> out(av.size());
  for (std::size_t k = 0; k < av.size(); ++k) out[k] = av[k] * bv[k];
  return tape_of(a).record(
      Tensor(a.shape(), std::move(out)), {a, b},
      [a, b](const BackwardArgs& g) {
        const auto av = a.value().values();
        const auto bv = b.value().values();
        if (!g.in_grads[0].empty()) {
          for (std::size_t k = 0; k < av.size(); ++k) {
            g.in_grads[0][k] += g.out_grad[k] * bv[k];
          }
        }
        if (!g.in_grads[1].empty()) {
          for (std::size_t k = 0; k < av.size(); ++k) {
            g.in_grads[1][k] += g.out_grad[k] * av[k];
          }
        }
      },
      "elementwise_mul");
}

Var scalar_mul(Var a, double c) {
  const auto av = a.value().values();
  std::vector<double> out(av.size());
  for (std::size_t k = 0; k < av.size(); ++k) out[k] = c * av[k];
  return tape_of(a).record(
      Tensor(a.shape(), std::move(out)), {a},
      [c](const BackwardArgs& g) {
        for (std::size_t k = 0; k < g.out_grad.size(); ++k) {
          g.in_grads[0][k] += c * g.out_grad[k];
        }
      },
      "scalar_mul");
}

Var tanh(Var a) {
  return unary(
      a, "tanh", [](double x) { return std::tanh(x); },
      [](double x) {
        const double y = std::tanh(x);
        return 1.0 - y * y;
      });
}

Var sigmoid(Var a) {
  auto sig = [](double x) {
    // Split by sign so exp never overflows.
    if (x >= 0) return 1.0 / (1.0 + std::exp(-x));
    const double e = std::exp(x);
    return e / (1.0 + e);
  };
  return unary(a, "sigmoid", sig, [sig](double x) {
    const double y = sig(x);
    return y * (1.0 - y);
  });
}

Var exp(Var a) {
  return unary(
      a, "exp", [](double x) { return std::exp(x); },
      [](double x) { return std::exp(x); });
}

Var log(Var a) {
  return unary(
      a, "log", [](double x) { return std::log(x); },
      [](double x) { return 1.0 / x; });
}

Var layer_norm(Var a) {
  const Shape s = a.shape();
  const auto av = a.value().values();
  std::vector<double> out(s.size());
  std::vector<double> inv_std(s.rows);
  for (std::size_t i = 0; i < s.rows; ++i) {
    const double* x = av.data() + i * s.cols;
    double mean = 0.0;
    for (std::size_t j = 0; j < s.cols; ++j) mean += x[j];
    mean /= static_cast<double>(s.cols);
    double var = 0.0;
    for (std::size_t j = 0; j < s.cols; ++j) var += (x[j] - mean) * (x[j] - mean);
    var /= static_cast<double>(s.cols);
    inv_std[i] = 1.0 / std::sqrt(var + kLayerNormEps);
    for (std::size_t j = 0; j < s.cols; ++j) {
      out[i * s.cols + j] = (x[j] - mean) * inv_std[i];
    }
  }
  auto normalized = std::make_shared<std::vector<double>>(out);
  return tape_of(a).record(
      Tensor(s, std::move(out)), {a},
      [s, normalized, inv_std = std::move(inv_std)](const BackwardArgs& g) {
        const double n = static_cast<double>(s.cols);
        for (std::size_t i = 0; i < s.rows; ++i) {
          const double* dy = g.out_grad.data() + i * s.cols;
          const double* y = normalized->data() + i * s.cols;
          double mean_dy = 0.0;
          double mean_dy_y = 0.0;
          for (std::size_t j = 0; j < s.cols; ++j) {
            mean_dy += dy[j];
            mean_dy_y += dy[j] * y[j];
          }
          mean_dy /= n;
          mean_dy_y /= n;
          for (std::size_t j = 0; j < s.cols; ++j) {
            g.in_grads[0][i * s.cols + j] +=
                inv_std[i] * (dy[j] - mean_dy - y[j] * mean_dy_y);
          }
        }
      },
      "layer_norm");
}

Var sum(Var a) {
  double total = 0.0;
  for (double v : a.value().values()) total += v;
  return tape_of(a).record(
      Tensor::scalar(total), {a},
      [](const BackwardArgs& g) {
        for (double& v : g.in_grads[0]) v += g.out_grad[0];
      },
      "sum");
}

Var mean_rows(Var a) {
  const Shape s = a.shape();
  if (s.rows == 0) throw ShapeError("mean_rows: no rows");
  const auto av = a.value().values();
  std::vector<double> out(s.cols, 0.0);
  for (std::size_t i = 0; i < s.rows; ++i) {
    for (std::size_t j = 0; j < s.cols; ++j) out[j] += av[i * s.cols + j];
  }
  const double inv = 1.0 / static_cast<double>(s.rows);
  for (double& v : out) v *= inv;
  return tape_of(a).record(
      Tensor({1, s.cols}, std::move(out)), {a},
      [s, inv](const BackwardArgs& g) {
        for (std::size_t i = 0; i < s.rows; ++i) {
          for (std::size_t j = 0; j < s.cols; ++j) {
            g.in_grads[0][i * s.cols + j] += g.out_grad[j] * inv;
          }
        }
      },
      "mean_rows");
}

Var l2_normalize_rows(Var a) {
  const Shape s = a.shape();
  const auto av = a.value().values();
  std::vector<double> out(s.size());
  std::vector<double> norms(s.rows);
  for (std::size_t i = 0; i < s.rows; ++i) {
    double sq = 0.0;
    for (std::size_t j = 0; j < s.cols; ++j) sq += av[i * s.cols + j] * av[i * s.cols + j];
    norms[i] = std::sqrt(sq);
    const double denom = std::max(norms[i], kNormStabilizer);
    for (std::size_t j = 0; j < s.cols; ++j) {
      out[i * s.cols + j] = av[i * s.cols + j] / denom;
    }
  }
  auto y_copy = std::make_shared<std::vector<double>>(out);
  return tape_of(a).record(
      Tensor(s, std::move(out)), {a},
      [s, y_copy, norms = std::move(norms)](const BackwardArgs& g) {
        const auto& y = *y_copy;
        for (std::size_t i = 0; i < s.rows; ++i) {
          const double* dy = g.out_grad.data() + i * s.cols;
          double* dx = g.in_grads[0].data() + i * s.cols;
          if (norms[i] <= kNormStabilizer) {
            for (std::size_t j = 0; j < s.cols; ++j) dx[j] += dy[j] / kNormStabilizer;
            continue;
          }
          double dot = 0.0;
          for (std::size_t j = 0; j < s.cols; ++j) dot += y[i * s.cols + j] * dy[j];
          for (std::size_t j = 0; j < s.cols; ++j) {
            dx[j] += (dy[j] - y[i * s.cols + j] * dot) / norms[i];
          }
        }
      },
      "l2_normalize_rows");
}

Var logsumexp_rows(Var a) {
  const Shape s = a.shape();
  if (s.cols == 0) throw ShapeError("logsumexp_rows: no columns");
  const auto av = a.value().values();
  std::vector<double> out(s.rows);
  auto softmax = std::make_shared<std::vector<double>>(s.size());
  for (std::size_t i = 0; i < s.rows; ++i) {
    const double* x = av.data() + i * s.cols;
    const double m = *std::max_element(x, x + s.cols);
    double total = 0.0;
    for (std::size_t j = 0; j < s.cols; ++j) {
      const double e = std::exp(x[j] - m);
      (*softmax)[i * s.cols + j] = e;
      total += e;
    }
    for (std::size_t j = 0; j < s.cols; ++j) (*softmax)[i * s.cols + j] /= total;
    out[i] = m + std::log(total);
  }
  return tape_of(a).record(
      Tensor({s.rows, 1}, std::move(out)), {a},
      [s, softmax](const BackwardArgs& g) {
        for (std::size_t i = 0; i < s.rows; ++i) {
          for (std::size_t j = 0; j < s.cols; ++j) {
            g.in_grads[0][i * s.cols + j] +=
                g.out_grad[i] * (*softmax)[i * s.cols + j];
          }
        }
      },
      "logsumexp_rows");
}

Var concat_rows(std::span<const Var> parts) {
  if (parts.empty()) throw ShapeError("concat_rows: no inputs");
  const std::size_t cols = parts.front().shape().cols;
  std::size_t rows = 0;
  for (const Var& p : parts) {
    if (p.shape().cols != cols) {
      throw ShapeError("concat_rows: column mismatch " + p.shape().str());
    }
    rows += p.shape().rows;
  }
  std::vector<double> out;
  out.reserve(rows * cols);
  std::vector<std::size_t> sizes;
  for (const Var& p : parts) {
    const auto v = p.value().values();
    out.insert(out.end(), v.begin(), v.end());
    sizes.push_back(v.size());
  }
  return tape_of(parts.front())
      .record(
          Tensor({rows, cols}, std::move(out)),
          std::vector<Var>(parts.begin(), parts.end()),
          [sizes = std::move(sizes)](const BackwardArgs& g) {
            std::size_t offset = 0;
            for (std::size_t k = 0; k < sizes.size(); ++k) {
              if (!g.in_grads[k].empty()) {
                for (std::size_t t = 0; t < sizes[k]; ++t) {
                  g.in_grads[k][t] += g.out_grad[offset + t];
                }
              }
              offset += sizes[k];
            }
          },
          "concat_rows");
}

Var gather_rows(Var a, std::span<const std::size_t> rows) {
  const Shape s = a.shape();
  const auto av = a.value().values();
  std::vector<double> out(rows.size() * s.cols);
  for (std::size_t k = 0; k < rows.size(); ++k) {
    if (rows[k] >= s.rows) {
      throw ShapeError("gather_rows: index " + std::to_string(rows[k]) +
                       " outside " + s.str());
    }
    std::copy_n(av.data() + rows[k] * s.cols, s.cols, out.data() + k * s.cols);
  }
  return tape_of(a).record(
      Tensor({rows.size(), s.cols}, std::move(out)), {a},
      [s, idx = std::vector<std::size_t>(rows.begin(), rows.end())](
          const BackwardArgs& g) {
        for (std::size_t k = 0; k < idx.size(); ++k) {
          for (std::size_t j = 0; j < s.cols; ++j) {
            g.in_grads[0][idx[k] * s.cols + j] += g.out_grad[k * s.cols + j];
          }
        }
      },
      "gather_rows");
}

Var reshape(Var a, Shape shape) {
  if (shape.size() != a.shape().size()) {
    throw ShapeError("reshape: " + a.shape().str() + " to " + shape.str());
  }
  const auto av = a.value().values();
  return tape_of(a).record(
      Tensor(shape, std::vector<double>(av.begin(), av.end())), {a},
      [](const BackwardArgs& g) {
        for (std::size_t k = 0; k < g.out_grad.size(); ++k) {
          g.in_grads[0][k] += g.out_grad[k];
        }
      },
      "reshape");
}

Var sparse_dense_matmul(const SparseMatrix& a, Var x) {
  const Shape sx = x.shape();
  if (a.cols() != sx.rows) {
    throw ShapeError("sparse_dense_matmul: sparse " + std::to_string(a.rows()) +
                     "x" + std::to_string(a.cols()) + " times " + sx.str());
  }
  const Shape out{a.rows(), sx.cols};
  std::vector<double> values(out.size());
  pk::spmm(a.view(), x.value().view(), mview(values, out));
  return tape_of(x).record(
      Tensor(out, std::move(values)), {x},
      [&a, sx, out](const BackwardArgs& g) {
        // dX = A^T G
        const SparseMatrix at = a.transpose();
        pk::spmm(at.view(), cview(g.out_grad, out), mview(g.in_grads[0], sx),
                 true);
      },
      "sparse_dense_matmul");
}

}  // namespace mailrec::ad
