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
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "mailrec/tape.hpp"
#include "mailrec/tensor.hpp"

namespace mailrec::ad {

// Builds a scalar loss on the given tape, reading parameters through
// tape.parameter(). Must be deterministic.
using LossFn = std::function<Var(Tape&)>;

struct ParamCheck {
  std::string name;
  std::size_t entries_checked = 0;
  std::size_t worst_index = 0;
  double max_rel_error = 0.0;
  double analytic = 0.0;  // at worst_index
  double numeric = 0.0;   // at worst_index
  bool passed = true;
};

struct GradCheckReport {
  std::vector<ParamCheck> params;
  double max_rel_error = 0.0;
  bool passed = true;
};

// |a - n| / max(|a|, |n|, 1e-8)
double relative_error(double analytic, double numeric);

// Compares reverse-mode gradients against central differences
// (f(x + h) - f(x - h)) / 2h for every entry of every parameter, or for
// `max_entries` evenly spaced entries per parameter when non-zero.
// Throws ContractError if step <= 0 or the loss is not reproducible.
GradCheckReport grad_check(const LossFn& loss_fn,
                           std::span<const NamedTensor> params, double step,
                           double rel_tol, std::size_t max_entries = 0);

}  // namespace mailrec::ad
