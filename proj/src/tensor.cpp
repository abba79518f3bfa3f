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

#include "mailrec/tensor.hpp"

#include <cmath>

#include "mailrec/errors.hpp"

namespace mailrec::ad {

std::string Shape::str() const {
  return "(" + std::to_string(rows) + "x" + std::to_string(cols) + ")";
}

void check_finite(std::span<const double> values, const std::string& what) {
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (!std::isfinite(values[i])) {
      throw NumericsError(what + ": non-finite value at flat index " +
                          std::to_string(i));
    }
  }
}

Tensor::Tensor(Shape shape, std::vector<double> values, bool requires_grad)
    : shape_(shape), values_(std::move(values)), requires_grad_(requires_grad) {
  if (shape_.size() != values_.size()) {
    throw ShapeError("tensor shape " + shape_.str() + " holds " +
                     std::to_string(shape_.size()) + " values, got " +
                     std::to_string(values_.size()));
  }
  check_finite(values_, "tensor creation");
}

Tensor Tensor::zeros(Shape shape, bool requires_grad) {
  return Tensor(shape, std::vector<double>(shape.size(), 0.0), requires_grad);
}

Tensor Tensor::filled(Shape shape, double value) {
  return Tensor(shape, std::vector<double>(shape.size(), value));
}

Tensor Tensor::scalar(double value) { return Tensor({1, 1}, {value}); }

double Tensor::item() const {
  if (values_.size() != 1) {
    throw ShapeError("item() on non-scalar tensor " + shape_.str());
  }
  return values_[0];
}

std::span<const double> Tensor::grad() const {
  if (!grad_) throw ContractError("tensor has no gradient");
  return *grad_;
}

void Tensor::accumulate_grad(std::span<const double> g) {
  if (g.size() != values_.size()) {
    throw ShapeError("gradient size mismatch for tensor " + shape_.str());
  }
  if (!grad_) grad_.emplace(values_.size(), 0.0);
  for (std::size_t i = 0; i < g.size(); ++i) (*grad_)[i] += g[i];
}

void Tensor::zero_grad() {
  if (grad_) {
    std::fill(grad_->begin(), grad_->end(), 0.0);
  } else {
    grad_.emplace(values_.size(), 0.0);
  }
}

}  // namespace mailrec::ad
