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
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "mailrec/kernels.hpp"

namespace mailrec::ad {

// Extents of a row-major matrix. Vectors are 1 x n or n x 1, scalars 1 x 1.
struct Shape {
  std::size_t rows = 0;
  std::size_t cols = 0;

  std::size_t size() const { return rows * cols; }
  bool operator==(const Shape&) const = default;
  std::string str() const;
};

// Dense real-valued matrix. Values are validated finite at construction;
// the gradient buffer, when present, has the same shape as the values.
class Tensor {
 public:
  Tensor() = default;
  Tensor(Shape shape, std::vector<double> values, bool requires_grad = false);

  static Tensor zeros(Shape shape, bool requires_grad = false);
  static Tensor filled(Shape shape, double value);
  static Tensor scalar(double value);

  const Shape& shape() const { return shape_; }
  std::size_t rows() const { return shape_.rows; }
  std::size_t cols() const { return shape_.cols; }
  std::size_t size() const { return values_.size(); }

  std::span<const double> values() const { return values_; }
  // Mutable access for optimizers and checkpoint loading only.
  std::span<double> mutable_values() { return values_; }
  double operator()(std::size_t r, std::size_t c) const {
    return values_[r * shape_.cols + c];
  }
  double item() const;

  bool requires_grad() const { return requires_grad_; }
  void set_requires_grad(bool on) { requires_grad_ = on; }

  bool has_grad() const { return grad_.has_value(); }
  std::span<const double> grad() const;
  void accumulate_grad(std::span<const double> g);
  void zero_grad();
  void clear_grad() { grad_.reset(); }

  kernels::ConstMatrixView view() const {
    return {values_.data(), shape_.rows, shape_.cols};
  }

 private:
  Shape shape_;
  std::vector<double> values_;
  bool requires_grad_ = false;
  std::optional<std::vector<double>> grad_;
};

// Throws NumericsError naming `what` if any entry is NaN or infinite.
void check_finite(std::span<const double> values, const std::string& what);

// A tensor bound to a stable name, used by checkpoints and gradient checks.
struct NamedTensor {
  std::string name;
  Tensor* tensor = nullptr;
};

}  // namespace mailrec::ad
