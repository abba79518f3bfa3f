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

#include "mailrec/optim.hpp"

#include <cmath>
#include <random>
#include <string>

#include "mailrec/binary_io.hpp"
#include "mailrec/errors.hpp"

namespace mailrec::train {

double xavier_bound(std::size_t fan_in, std::size_t fan_out) {
  return std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
}

ad::Tensor xavier_init(ad::Shape shape, ParamKind kind, std::uint64_t seed,
                       std::string_view name) {
  if (kind == ParamKind::kBias) return ad::Tensor::zeros(shape, true);
  if (shape.rows == 0 || shape.cols == 0) {
    throw ShapeError("xavier_init: empty weight shape " + shape.str());
  }
  const double bound = xavier_bound(shape.rows, shape.cols);
  std::seed_seq seq{static_cast<std::uint32_t>(seed),
                    static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(io::fnv1a(name)),
                    static_cast<std::uint32_t>(io::fnv1a(name) >> 32),
                    static_cast<std::uint32_t>(shape.rows),
                    static_cast<std::uint32_t>(shape.cols)};
  std::mt19937_64 rng(seq);
  std::uniform_real_distribution<double> dist(-bound, bound);
  std::vector<double> values(shape.size());
  // Stored at float32 precision so checkpoints round-trip exactly.
  for (double& v : values) {
    float f = static_cast<float>(dist(rng));
    if (std::abs(static_cast<double>(f)) > bound) f = std::nextafter(f, 0.0f);
    v = f;
  }
  return ad::Tensor(shape, std::move(values), true);
}

void AdamConfig::validate() const {
  if (!(lr > 0.0)) throw ConfigError("adam: lr must be > 0");
  if (!(beta1 >= 0.0 && beta1 < 1.0) || !(beta2 >= 0.0 && beta2 < 1.0)) {
    throw ConfigError("adam: betas must lie in [0, 1)");
  }
  if (!(eps > 0.0)) throw ConfigError("adam: eps must be > 0");
}

void adam_step(std::span<const ad::NamedTensor> params, OptimizerState& state,
               const AdamConfig& config) {
  for (const auto& p : params) {
    if (!p.tensor->has_grad()) continue;
    for (double g : p.tensor->grad()) {
      if (!std::isfinite(g)) {
        throw NumericsError("adam: non-finite gradient for '" + p.name + "'");
      }
    }
  }
  if (state.first_moment.empty()) {
    for (const auto& p : params) {
      state.first_moment.emplace_back(p.tensor->size(), 0.0);
      state.second_moment.emplace_back(p.tensor->size(), 0.0);
    }
  }
  if (state.first_moment.size() != params.size()) {
    throw ContractError("adam: optimizer state does not match parameters");
  }

  ++state.step;
  const double t = static_cast<double>(state.step);
  const double correction1 = 1.0 - std::pow(config.beta1, t);
  const double correction2 = 1.0 - std::pow(config.beta2, t);
  for (std::size_t k = 0; k < params.size(); ++k) {
    ad::Tensor& param = *params[k].tensor;
    auto& m = state.first_moment[k];
    auto& v = state.second_moment[k];
    if (m.size() != param.size()) {
      throw ContractError("adam: moment shape mismatch for '" + params[k].name + "'");
    }
    if (!param.has_grad()) continue;
    const auto grad = param.grad();
    auto theta = param.mutable_values();
    for (std::size_t i = 0; i < theta.size(); ++i) {
      m[i] = config.beta1 * m[i] + (1.0 - config.beta1) * grad[i];
      v[i] = config.beta2 * v[i] + (1.0 - config.beta2) * grad[i] * grad[i];
      const double m_hat = m[i] / correction1;
      const double v_hat = v[i] / correction2;
      theta[i] -= config.lr * m_hat / (std::sqrt(v_hat) + config.eps);
    }
  }
}

}  // namespace mailrec::train
