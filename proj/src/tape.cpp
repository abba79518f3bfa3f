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

#include "mailrec/tape.hpp"

#include <string>

#include "mailrec/errors.hpp"

namespace mailrec::ad {

const Tensor& Var::value() const {
  if (!tape_) throw ContractError("use of an empty Var");
  return tape_->nodes_[id_].value();
}

bool Var::needs_grad() const {
  return tape_ != nullptr && tape_->nodes_[id_].needs_grad;
}

Tape::Tape(TapeOptions options) : options_(options) {}

Var Tape::parameter(Tensor& tensor) {
  Node node;
  node.bound = &tensor;
  node.needs_grad = tensor.requires_grad();
  nodes_.push_back(std::move(node));
  return Var(this, nodes_.size() - 1);
}

Var Tape::constant(Tensor value) {
  Node node;
  node.owned = std::move(value);
  nodes_.push_back(std::move(node));
  return Var(this, nodes_.size() - 1);
}

Var Tape::constant_ref(const Tensor& value) {
  Node node;
  node.referenced = &value;
  nodes_.push_back(std::move(node));
  return Var(this, nodes_.size() - 1);
}

Var Tape::record(Tensor value, std::vector<Var> inputs, BackwardFn backward,
                 const char* op_name) {
  if (options_.check_finite) check_finite(value.values(), op_name);
  Node node;
  node.owned = std::move(value);
  node.inputs.reserve(inputs.size());
  for (const Var& in : inputs) {
    if (in.tape_ != this) {
      throw ContractError(std::string(op_name) +
                          ": input recorded on a different tape");
    }
    node.inputs.push_back(in.id_);
    node.needs_grad = node.needs_grad || nodes_[in.id_].needs_grad;
  }
  if (node.needs_grad) node.backward = std::move(backward);
  nodes_.push_back(std::move(node));
  return Var(this, nodes_.size() - 1);
}

void Tape::backward(Var root) {
  if (root.tape_ != this) {
    throw ContractError("backward: root belongs to another tape");
  }
  if (root.value().size() != 1) {
    throw ContractError("backward: root must be scalar, got shape " +
                        root.shape().str());
  }
  if (!nodes_[root.id_].needs_grad) return;

  std::vector<std::vector<double>> adjoint(nodes_.size());
  adjoint[root.id_].assign(1, 1.0);

  for (std::size_t k = root.id_ + 1; k-- > 0;) {
    Node& node = nodes_[k];
    if (adjoint[k].empty() || !node.needs_grad) continue;
    if (node.bound) {
      node.bound->accumulate_grad(adjoint[k]);
      continue;
    }
    if (!node.backward) continue;
    BackwardArgs args;
    args.out_grad = adjoint[k];
    args.in_grads.reserve(node.inputs.size());
    for (std::size_t in : node.inputs) {
      if (!nodes_[in].needs_grad) {
        args.in_grads.emplace_back();
        continue;
      }
      if (adjoint[in].empty()) {
        adjoint[in].assign(nodes_[in].value().size(), 0.0);
      }
      args.in_grads.emplace_back(adjoint[in]);
    }
    node.backward(args);
    // The adjoint of an intermediate is dead once its rule has run.
    std::vector<double>().swap(adjoint[k]);
  }
}

}  // namespace mailrec::ad
