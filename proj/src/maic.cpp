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

#include "mailrec/maic.hpp"

#include <cmath>

#include "mailrec/errors.hpp"
#include "mailrec/ops.hpp"
#include "mailrec/optim.hpp"

namespace mailrec::maic {

namespace {

// a + w (b - a), which returns a bit-exactly whenever a == b.
ad::Var mix(ad::Var a, ad::Var b, double w) {
  return ad::add(a, ad::scalar_mul(ad::sub(b, a), w));
}

void check_unit_interval(double v, const char* name) {
  if (!(v >= 0.0 && v <= 1.0)) {
    throw ConfigError(std::string(name) + " must lie in [0, 1], got " +
                      std::to_string(v));
  }
}

}  // namespace

std::vector<ad::NamedTensor> ProjectionParams::named() {
  return {{"text.proj.weight", &text.weight},
          {"text.proj.bias", &text.bias},
          {"visual.proj.weight", &visual.weight},
          {"visual.proj.bias", &visual.bias},
          {"text.gate.weight", &text_gate.weight},
          {"text.gate.bias", &text_gate.bias},
          {"visual.gate.weight", &visual_gate.weight},
          {"visual.gate.bias", &visual_gate.bias}};
}

ProjectionParams init_params(std::size_t text_dim, std::size_t visual_dim,
                             std::size_t dim, std::uint64_t seed) {
  using train::ParamKind;
  using train::xavier_init;
  ProjectionParams p;
  p.text.weight = xavier_init({text_dim, dim}, ParamKind::kWeight, seed, "text.proj.weight");
  p.text.bias = xavier_init({1, dim}, ParamKind::kBias, seed, "text.proj.bias");
  p.visual.weight = xavier_init({visual_dim, dim}, ParamKind::kWeight, seed, "visual.proj.weight");
  p.visual.bias = xavier_init({1, dim}, ParamKind::kBias, seed, "visual.proj.bias");
  p.text_gate.weight = xavier_init({dim, dim}, ParamKind::kWeight, seed, "text.gate.weight");
  p.text_gate.bias = xavier_init({1, dim}, ParamKind::kBias, seed, "text.gate.bias");
  p.visual_gate.weight = xavier_init({dim, dim}, ParamKind::kWeight, seed, "visual.gate.weight");
  p.visual_gate.bias = xavier_init({1, dim}, ParamKind::kBias, seed, "visual.gate.bias");
  return p;
}

void MaicConfig::validate() const {
  if (dim == 0 || dim % 2 != 0) {
    throw ConfigError("embedding dimension must be a positive even number");
  }
  check_unit_interval(alpha_p, "alpha_p");
  check_unit_interval(alpha_m, "alpha_m");
}

ad::Var project_modality(ad::Var features, ad::Var weight, ad::Var bias) {
  if (features.shape().cols != weight.shape().rows) {
    throw ShapeError("project_modality: features " + features.shape().str() +
                     " do not match projection " + weight.shape().str());
  }
  return ad::layer_norm(ad::tanh(ad::add(ad::matmul(features, weight), bias)));
}

ad::Tensor build_user_features(const data::Dataset& dataset,
                               const data::FeatureMatrix& features) {
  const std::size_t dim = features.dim;
  std::vector<double> out(dataset.user_count() * dim, 0.0);
  for (std::size_t u = 0; u < dataset.user_count(); ++u) {
    const auto items = dataset.items_of(u, data::Split::kTrain);
    if (items.empty()) {
      throw ContractError("user " + dataset.interactions().user_name(u) +
                          " has no training interactions");
    }
    double* row = out.data() + u * dim;
    for (std::size_t i : items) {
      const auto f = features.row(i);
      for (std::size_t k = 0; k < dim; ++k) row[k] += f[k];
    }
    const double inv = 1.0 / static_cast<double>(items.size());
    for (std::size_t k = 0; k < dim; ++k) row[k] *= inv;
  }
  return ad::Tensor({dataset.user_count(), dim}, std::move(out));
}

NodeFeatures build_node_features(const data::Dataset& dataset) {
  auto stack = [&](const data::FeatureMatrix& items) {
    ad::Tensor users = build_user_features(dataset, items);
    std::vector<double> values(users.values().begin(), users.values().end());
    values.insert(values.end(), items.values.begin(), items.values.end());
    return ad::Tensor({dataset.node_count(), items.dim}, std::move(values));
  };
  NodeFeatures out;
  out.text = stack(dataset.features(data::Modality::kText));
  out.visual = stack(dataset.features(data::Modality::kVisual));
  out.user_count = dataset.user_count();
  out.item_count = dataset.item_count();
  return out;
}

ad::Tensor positional_encoding(std::size_t nodes, std::size_t dim) {
  if (dim == 0 || dim % 2 != 0) {
    throw ConfigError("positional encoding needs an even dimension, got " +
                      std::to_string(dim));
  }
  std::vector<double> rates(dim / 2);
  for (std::size_t k = 0; k < dim / 2; ++k) {
    rates[k] = std::pow(10000.0, -2.0 * static_cast<double>(k) /
                                     static_cast<double>(dim));
  }
  std::vector<double> values(nodes * dim);
  for (std::size_t pos = 0; pos < nodes; ++pos) {
    for (std::size_t k = 0; k < dim / 2; ++k) {
      const double angle = static_cast<double>(pos) * rates[k];
      values[pos * dim + 2 * k] = std::sin(angle);
      values[pos * dim + 2 * k + 1] = std::cos(angle);
    }
  }
  return ad::Tensor({nodes, dim}, std::move(values));
}

Gates modality_gates(ad::Var z_text, ad::Var z_visual, ad::Var text_weight,
                     ad::Var text_bias, ad::Var visual_weight,
                     ad::Var visual_bias) {
  return {ad::sigmoid(ad::add(ad::matmul(z_text, text_weight), text_bias)),
          ad::sigmoid(ad::add(ad::matmul(z_visual, visual_weight), visual_bias))};
}

ModulatedEncoding modulate_pe(ad::Var gamma_text, ad::Var gamma_visual,
                              ad::Var positional, double alpha_p) {
  check_unit_interval(alpha_p, "alpha_p");
  if (gamma_text.shape() != positional.shape() ||
      gamma_visual.shape() != positional.shape()) {
    throw ShapeError("modulate_pe: gate and encoding shapes differ");
  }
  ad::Var gate = mix(gamma_visual, gamma_text, alpha_p);
  return {gate, ad::elementwise_mul(gate, positional)};
}

ad::Var build_identity(ad::Var z_text, ad::Var z_visual, ad::Var encoding,
                       double alpha_m) {
  check_unit_interval(alpha_m, "alpha_m");
  return ad::add(mix(z_visual, z_text, alpha_m), encoding);
}

double semantic_alignment_score(const ad::Tensor& identities,
                                const ad::Tensor& anchors) {
  if (identities.shape() != anchors.shape()) {
    throw ShapeError("alignment score: " + identities.shape().str() + " vs " +
                     anchors.shape().str());
  }
  if (identities.rows() == 0) throw EmptyDataError("alignment score: no rows");
  double total = 0.0;
  for (std::size_t i = 0; i < identities.rows(); ++i) {
    double dot = 0.0;
    double na = 0.0;
    double nb = 0.0;
    for (std::size_t k = 0; k < identities.cols(); ++k) {
      dot += identities(i, k) * anchors(i, k);
      na += identities(i, k) * identities(i, k);
      nb += anchors(i, k) * anchors(i, k);
    }
    total += dot / std::max(std::sqrt(na) * std::sqrt(nb), 1e-12);
  }
  return total / static_cast<double>(identities.rows());
}

IdentityState construct_identity(ad::Tape& tape, ProjectionParams& params,
                                 const NodeFeatures& features,
                                 const ad::Tensor& positional,
                                 const MaicConfig& config) {
  IdentityState s;
  s.z_text = project_modality(tape.constant_ref(features.text),
                              tape.parameter(params.text.weight),
                              tape.parameter(params.text.bias));
  s.z_visual = project_modality(tape.constant_ref(features.visual),
                                tape.parameter(params.visual.weight),
                                tape.parameter(params.visual.bias));
  ad::Var p = tape.constant_ref(positional);
  if (config.modality_gates) {
    const Gates gates = modality_gates(
        s.z_text, s.z_visual, tape.parameter(params.text_gate.weight),
        tape.parameter(params.text_gate.bias),
        tape.parameter(params.visual_gate.weight),
        tape.parameter(params.visual_gate.bias));
    const ModulatedEncoding mod = modulate_pe(gates.text, gates.visual, p,
                                              config.alpha_p);
    s.gate = mod.gate;
    s.encoding = mod.encoding;
  } else {
    s.encoding = p;
  }
  s.identity = build_identity(s.z_text, s.z_visual, s.encoding, config.alpha_m);
  return s;
}

}  // namespace mailrec::maic
