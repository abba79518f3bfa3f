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

#include "mailrec/trainer.hpp"

#include <algorithm>
#include <cmath>

#include <spdlog/spdlog.h>

#include "mailrec/errors.hpp"
#include "mailrec/metrics.hpp"

namespace mailrec::train {

namespace {

std::vector<std::vector<double>> snapshot(std::span<const ad::NamedTensor> params) {
  std::vector<std::vector<double>> out;
  for (const auto& p : params) {
    std::vector<double> v(p.tensor->values().begin(), p.tensor->values().end());
    for (double& x : v) x = static_cast<double>(static_cast<float>(x));
    out.push_back(std::move(v));
  }
  return out;
}

void load_snapshot(std::span<const ad::NamedTensor> params,
                   const std::vector<std::vector<double>>& snap) {
  for (std::size_t k = 0; k < params.size(); ++k) {
    auto dst = params[k].tensor->mutable_values();
    std::copy(snap[k].begin(), snap[k].end(), dst.begin());
  }
}

}  // namespace

void TrainerConfig::validate() const {
  adam.validate();
  if (batch_size == 0) throw ConfigError("batch_size must be >= 1");
  if (patience == 0) throw ConfigError("patience must be >= 1");
  if (eval_every == 0) throw ConfigError("eval_every must be >= 1");
}

nlohmann::json EpochRecord::to_json() const {
  nlohmann::json j{{"epoch", epoch}, {"batches", batches}, {"loss", loss},
                   {"rec", rec},     {"mm", mm},           {"sce", sce}};
  if (valid_recall) j["valid_recall@20"] = *valid_recall;
  if (valid_ndcg) j["valid_ndcg@20"] = *valid_ndcg;
  j["improved"] = improved;
  return j;
}

std::size_t max_train_degree(const data::Dataset& dataset) {
  std::size_t m = 0;
  for (std::size_t u = 0; u < dataset.user_count(); ++u) {
    m = std::max(m, dataset.items_of(u, data::Split::kTrain).size());
  }
  return m;
}

void check_negative_budget(const data::Dataset& dataset, std::size_t n_neg) {
  const std::size_t deg = max_train_degree(dataset);
  if (n_neg == 0 || n_neg + deg > dataset.item_count()) {
    throw ConfigError("n_neg = " + std::to_string(n_neg) +
                      " exceeds the items available to the busiest user (" +
                      std::to_string(dataset.item_count() - deg) + ")");
  }
}

std::vector<std::size_t> sample_negatives(const data::Dataset& dataset,
                                          std::size_t user, std::size_t n_neg,
                                          std::mt19937_64& rng) {
  const auto pos = dataset.items_of(user, data::Split::kTrain);
  const std::size_t ni = dataset.item_count();
  const std::size_t available = ni - pos.size();
  if (n_neg > available) {
    throw ConfigError("not enough negative items for user " +
                      std::to_string(user));
  }
  std::vector<std::size_t> out;
  out.reserve(n_neg);
  if (available <= 2 * n_neg) {
    std::vector<std::size_t> pool;
    for (std::size_t i = 0; i < ni; ++i) {
      if (!std::binary_search(pos.begin(), pos.end(), i)) pool.push_back(i);
    }
    for (std::size_t k = 0; k < n_neg; ++k) {
      std::uniform_int_distribution<std::size_t> pick(k, pool.size() - 1);
      std::swap(pool[k], pool[pick(rng)]);
      out.push_back(pool[k]);
    }
    return out;
  }
  std::uniform_int_distribution<std::size_t> pick(0, ni - 1);
  while (out.size() < n_neg) {
    const std::size_t i = pick(rng);
    if (std::binary_search(pos.begin(), pos.end(), i)) continue;
    if (std::find(out.begin(), out.end(), i) != out.end()) continue;
    out.push_back(i);
  }
  return out;
}

std::vector<std::pair<std::size_t, std::size_t>> shuffle_into_batches(
    std::vector<data::Edge>& pairs, std::size_t batch_size, std::mt19937_64& rng) {
  if (batch_size == 0) throw ConfigError("batch_size must be >= 1");
  std::shuffle(pairs.begin(), pairs.end(), rng);
  std::vector<std::pair<std::size_t, std::size_t>> out;
  for (std::size_t begin = 0; begin < pairs.size(); begin += batch_size) {
    out.emplace_back(begin, std::min(pairs.size(), begin + batch_size));
  }
  return out;
}

RunResult train(const data::Dataset& dataset, model::MailModel& model,
                const TrainerConfig& config, const EpochCallback& on_epoch) {
  config.validate();
  const std::size_t n_neg = model.config().weights.n_neg;
  check_negative_budget(dataset, n_neg);
  const auto params = model.named_params();
  const bool can_validate = dataset.edge_count(data::Split::kValid) > 0;
  if (!can_validate && config.max_epochs > 0) {
    spdlog::warn("validation split is empty; early stopping disabled");
  }

  std::seed_seq seq{static_cast<std::uint32_t>(config.seed),
                    static_cast<std::uint32_t>(config.seed >> 32), 0x7452u};
  std::mt19937_64 rng(seq);
  std::vector<data::Edge> pairs = dataset.edges(data::Split::kTrain);
  OptimizerState state;
  RunResult result;
  std::optional<std::vector<std::vector<double>>> best;
  std::size_t stale = 0;
  const std::size_t ks[] = {20};

  for (std::size_t epoch = 1; epoch <= config.max_epochs; ++epoch) {
    const auto ranges = shuffle_into_batches(pairs, config.batch_size, rng);
    EpochRecord rec;
    rec.epoch = epoch;
    for (const auto& [begin, end] : ranges) {
      const std::span<const data::Edge> batch(pairs.data() + begin, end - begin);
      model::RankingBatch rb;
      rb.n_neg = n_neg;
      for (const auto& e : batch) {
        rb.users.push_back(e.user);
        rb.positives.push_back(e.item);
        const auto negs = sample_negatives(dataset, e.user, n_neg, rng);
        rb.negatives.insert(rb.negatives.end(), negs.begin(), negs.end());
      }
      for (const auto& p : params) p.tensor->clear_grad();
      try {
        ad::Tape tape;
        const auto parts = model.forward(tape, batch, rb, &dataset);
        tape.backward(parts.total);
        adam_step(params, state, config.adam);
        const double w = static_cast<double>(batch.size());
        rec.loss += w * parts.total.value().item();
        rec.rec += w * parts.rec.value().item();
        rec.mm += w * parts.mm.value().item();
        rec.sce += w * parts.sce.value().item();
      } catch (const NumericsError& e) {
        spdlog::error("numerical failure at epoch {} batch {}: {}", epoch,
                      rec.batches + 1, e.what());
        throw;
      }
      ++rec.batches;
    }
    const double n = static_cast<double>(pairs.size());
    rec.loss /= n;
    rec.rec /= n;
    rec.mm /= n;
    rec.sce /= n;

    bool stop = false;
    if (can_validate && epoch % config.eval_every == 0) {
      const auto report =
          eval::evaluate(model.embed(), dataset, data::Split::kValid, ks);
      rec.valid_recall = report.recall.at(20);
      rec.valid_ndcg = report.ndcg.at(20);
      if (!best || *rec.valid_recall > result.best_recall) {
        rec.improved = true;
        result.best_recall = *rec.valid_recall;
        result.best_epoch = epoch;
        best = snapshot(params);
        stale = 0;
      } else if (++stale >= config.patience) {
        stop = true;
      }
    }
    spdlog::info("epoch {} loss {:.6f} rec {:.6f} mm {:.6f} sce {:.6f}{}", epoch,
                 rec.loss, rec.rec, rec.mm, rec.sce,
                 rec.valid_recall
                     ? fmt::format(" valid R@20 {:.4f}", *rec.valid_recall)
                     : std::string());
    result.history.push_back(rec);
    if (on_epoch) on_epoch(rec);
    if (stop) {
      result.early_stopped = true;
      break;
    }
  }
  if (best) {
    load_snapshot(params, *best);
  } else if (config.max_epochs > 0) {
    load_snapshot(params, snapshot(params));
  }
  for (const auto& p : params) p.tensor->clear_grad();
  return result;
}

Variant parse_variant(const std::string& name) {
  if (name == "full") return Variant::kFull;
  if (name == "no_maic") return Variant::kNoMaic;
  if (name == "no_cna") return Variant::kNoCna;
  if (name == "no_sce") return Variant::kNoSce;
  if (name == "no_mm") return Variant::kNoMm;
  throw ConfigError("unknown ablation variant '" + name + "'");
}

const char* to_string(Variant v) {
  switch (v) {
    case Variant::kFull: return "full";
    case Variant::kNoMaic: return "no_maic";
    case Variant::kNoCna: return "no_cna";
    case Variant::kNoSce: return "no_sce";
    case Variant::kNoMm: return "no_mm";
  }
  return "full";
}

void ablation_config(Variant v, model::ModelConfig& model_config,
                     graph::GraphConfig& graph_config) {
  switch (v) {
    case Variant::kFull:
    case Variant::kNoMm:
      break;
    case Variant::kNoMaic:
      model_config.maic.modality_gates = false;
      break;
    case Variant::kNoCna:
      graph_config.eta = 0.0;
      break;
    case Variant::kNoSce:
      model_config.weights.lambda_s = 0.0;
      break;
  }
}

void randomize_features(data::Dataset& dataset, std::uint64_t seed) {
  for (auto m : {data::Modality::kText, data::Modality::kVisual}) {
    const auto& src = dataset.features(m);
    std::seed_seq seq{static_cast<std::uint32_t>(seed),
                      static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(m == data::Modality::kText ? 1 : 2)};
    std::mt19937_64 rng(seq);
    std::normal_distribution<double> gauss(0.0, 1.0);
    data::FeatureMatrix out = src;
    for (std::size_t r = 0; r < out.rows; ++r) {
      double sq = 0.0;
      double* row = out.values.data() + r * out.dim;
      for (std::size_t k = 0; k < out.dim; ++k) {
        row[k] = gauss(rng);
        sq += row[k] * row[k];
      }
      const double inv = 1.0 / std::sqrt(sq);
      for (std::size_t k = 0; k < out.dim; ++k) row[k] *= inv;
    }
    out.checksum = 0;
    dataset.set_features(std::move(out));
  }
}

}  // namespace mailrec::train
