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
#include <deque>
#include <functional>
#include <span>
#include <vector>

#include "mailrec/tensor.hpp"

namespace mailrec::ad {

class Tape;

// Handle to a value recorded on a tape. Cheap to copy; valid for the
// lifetime of its tape.
class Var {
 public:
  Var() = default;

  const Tensor& value() const;
  const Shape& shape() const { return value().shape(); }
  bool needs_grad() const;
  Tape* tape() const { return tape_; }
  std::size_t id() const { return id_; }
  bool valid() const { return tape_ != nullptr; }

 private:
  friend class Tape;
  Var(Tape* tape, std::size_t id) : tape_(tape), id_(id) {}

  Tape* tape_ = nullptr;
  std::size_t id_ = 0;
};

// Arguments handed to a backward rule. in_grads[k] is empty when input k
// does not participate in differentiation; rules add into the spans.
struct BackwardArgs {
  std::span<const double> out_grad;
  std::vector<std::span<double>> in_grads;
};
using BackwardFn = std::function<void(const BackwardArgs&)>;

struct TapeOptions {
  // Reject NaN/Inf after every recorded operation.
  bool check_finite = true;
};

// Append-only record of one forward pass. Nodes are stored in creation
// order, which is a topological order by construction.
class Tape {
 public:
  explicit Tape(TapeOptions options = {});
  Tape(const Tape&) = delete;
  Tape& operator=(const Tape&) = delete;

  // Leaf bound to an external tensor. If the tensor requires grad, backward()
  // adds d(root)/d(tensor) into its gradient buffer. The tensor must outlive
  // the tape and stay unmodified while the tape is in use.
  Var parameter(Tensor& tensor);
  Var constant(Tensor value);
  // Constant leaf that refers to an external tensor without copying it.
  Var constant_ref(const Tensor& value);

  // Records an operation output. The backward rule is only kept when at
  // least one input needs a gradient.
  Var record(Tensor value, std::vector<Var> inputs, BackwardFn backward,
             const char* op_name);

  // Reverse sweep from a scalar root. Visits every node once, newest first.
  void backward(Var root);

  std::size_t size() const { return nodes_.size(); }
  const TapeOptions& options() const { return options_; }

 private:
  friend class Var;

  struct Node {
    Tensor owned;
    Tensor* bound = nullptr;
    const Tensor* referenced = nullptr;
    std::vector<std::size_t> inputs;
    BackwardFn backward;
    bool needs_grad = false;

    const Tensor& value() const {
      if (bound) return *bound;
      return referenced ? *referenced : owned;
    }
  };

  TapeOptions options_;
  std::deque<Node> nodes_;
};

}  // namespace mailrec::ad
