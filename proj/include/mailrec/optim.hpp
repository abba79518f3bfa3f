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

#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "mailrec/tensor.hpp"

namespace mailrec::train {

enum class ParamKind { kWeight, kBias };

// Weights (fan_in x fan_out) are drawn uniformly from
// +-sqrt(6 / (fan_in + fan_out)); biases start at zero. The stream is a pure
// function of (shape, seed, name).
ad::Tensor xavier_init(ad::Shape shape, ParamKind kind, std::uint64_t seed,
                       std::string_view name);
double xavier_bound(std::size_t fan_in, std::size_t fan_out);

struct AdamConfig {
  double lr = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;

  // Throws ConfigError unless lr > 0 and 0 <= beta < 1.
  void validate() const;
};

struct OptimizerState {
  std::vector<std::vector<double>> first_moment;
  std::vector<std::vector<double>> second_moment;
  std::uint64_t step = 0;
};

// One bias-corrected Adam update over all parameters using their gradient
// buffers (a missing buffer counts as zero). Throws NumericsError, leaving
// parameters and state untouched, if any gradient entry is non-finite.
void adam_step(std::span<const ad::NamedTensor> params, OptimizerState& state,
               const AdamConfig& config);

}  // namespace mailrec::train
