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

#include "commands.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <unordered_map>
#include <vector>

#include <spdlog/spdlog.h>

#include "CLI11.hpp"
#include "json.hpp"
#include "mailrec/checkpoint.hpp"
#include "mailrec/config.hpp"
#include "mailrec/errors.hpp"
#include "mailrec/graph.hpp"
#include "mailrec/metrics.hpp"
#include "mailrec/model.hpp"
#include "mailrec/trainer.hpp"

namespace mailrec::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr const char* kGraphSpaceNote =
    "graphs are built once from l2-normalized raw text/visual features "
    "weighted by alpha_m, independent of trainable parameters";
constexpr const char* kNoMmNote =
    "no_mm replaces both feature matrices with seeded random unit-norm rows";

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open for writing: " + path.string());
  out << text;
  if (!out) throw IoError("write failed: " + path.string());
}

void write_json(const fs::path& path, const json& j) {
  write_text(path, j.dump(2) + "\n");
}

json read_json(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open: " + path.string());
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw FormatError(path.string() + ": " + e.what());
  }
}

void ensure_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create directory " + dir.string());
}

std::string flag_name(std::string key) {
  std::replace(key.begin(), key.end(), '_', '-');
  return "--" + key;
}

void add_config_options(CLI::App* app, RunConfig& cfg) {
  cfg.visit([&](const char* key, auto& field) {
    std::string names = flag_name(key);
    if (std::string(key) == "k_cf") names += ",--kcf";
    if (std::string(key) == "k_base") names += ",--knn-k";
    auto* opt = app->add_option(names, field);
    if constexpr (requires { field.push_back(0); }) opt->delimiter(',');
  });
}

// Value following `flag` in argv (either "--flag v" or "--flag=v").
std::optional<std::string> prescan(int argc, const char* const* argv,
                                   const std::string& flag) {
  for (int i = 1; i < argc; ++i) {
    const std::string a = argv[i];
    if (a == flag && i + 1 < argc) return std::string(argv[i + 1]);
    if (a.rfind(flag + "=", 0) == 0) return a.substr(flag.size() + 1);
  }
  return std::nullopt;
}

// defaults < run manifest (when --run is given) < --config file < flags.
RunConfig initial_config(int argc, const char* const* argv) {
  RunConfig cfg;
  if (auto run = prescan(argc, argv, "--run")) {
    const fs::path manifest = fs::path(*run) / "manifest.json";
    if (fs::exists(manifest)) {
      const json m = read_json(manifest);
      if (m.contains("config")) cfg.merge_json(m.at("config"));
    }
  }
  if (auto path = prescan(argc, argv, "--config")) {
    std::ifstream in(*path);
    if (!in) throw IoError("cannot open config file " + *path);
    json j;
    try {
      in >> j;
    } catch (const json::exception& e) {
      throw ConfigError("config file " + *path + " is not valid JSON: " + e.what());
    }
    cfg.merge_json(j);
  }
  return cfg;
}

RunConfig resolved(RunConfig cfg) {
  cfg.sync();
  cfg.validate();
  return cfg;
}

void save_prepared(const data::Dataset& ds, const fs::path& dir) {
  ensure_dir(dir);
  const auto& t = ds.interactions();
  std::ostringstream split;
  for (std::size_t e = 0; e < t.edges.size(); ++e) {
    split << t.edges[e].user << '\t' << t.edges[e].item << '\t'
          << data::to_string(ds.split()[e]) << '\n';
  }
  write_text(dir / "split.tsv", split.str());
  data::write_id_map(t.user_ids, dir / "users.tsv");
  data::write_id_map(t.item_ids, dir / "items.tsv");
  std::ostringstream pop;
  const auto p = data::compute_popularity(ds);
  pop.precision(17);
  for (std::size_t j = 0; j < ds.item_count(); ++j) {
    pop << j << '\t' << ds.item_pop()[j] << '\t' << p[j] << '\n';
  }
  write_text(dir / "popularity.tsv", pop.str());
  data::save_features(ds.features(data::Modality::kText), dir / "text.mmf");
  data::save_features(ds.features(data::Modality::kVisual), dir / "visual.mmf");
}

data::Dataset load_for_run(const fs::path& dir, const RunConfig& cfg) {
  data::Dataset ds = load_prepared(dir);
  if (train::parse_variant(cfg.variant) == train::Variant::kNoMm) {
    train::randomize_features(ds, cfg.trainer.seed);
  }
  return ds;
}

SparseMatrix load_graph_for(const fs::path& path, const data::Dataset& ds) {
  SparseMatrix g = load_graph(path);
  if (g.rows() != ds.node_count() || g.cols() != ds.node_count()) {
    throw FormatError(path.string() + ": graph has " + std::to_string(g.rows()) +
                      " nodes but the dataset has " +
                      std::to_string(ds.node_count()));
  }
  return g;
}

void restore_checkpoint(model::MailModel& m, const fs::path& path) {
  const auto params = m.named_params();
  ckpt::restore(params, ckpt::load_checkpoint(path));
}

json base_manifest(const char* command, const RunConfig& cfg) {
  json m;
  m["command"] = command;
  m["config"] = cfg.to_json();
  m["seed"] = cfg.trainer.seed;
  m["notes"]["graph_space"] = kGraphSpaceNote;
  if (cfg.variant == "no_mm") m["notes"]["no_mm"] = kNoMmNote;
  return m;
}

// Number of counterfactual edges also present in the base graph.
std::size_t shared_edges(const SparseMatrix& a, const SparseMatrix& b) {
  std::size_t n = 0;
  for (std::size_t r = 0; r < a.rows(); ++r) {
    const auto ca = a.row_cols(r);
    const auto cb = b.row_cols(r);
    std::vector<std::uint32_t> both;
    std::set_intersection(ca.begin(), ca.end(), cb.begin(), cb.end(),
                          std::back_inserter(both));
    n += both.size();
  }
  return n;
}

json bias_json(const graph::GraphArtifacts& g, const data::Dataset& ds,
               double tail_quantile) {
  json j;
  j["base"] = eval::to_json(eval::graph_bias_stats(g.base, ds.item_pop(), tail_quantile));
  j["counterfactual"] = eval::to_json(
      eval::graph_bias_stats(g.counterfactual, ds.item_pop(), tail_quantile));
  return j;
}

json build_graph_step(const data::Dataset& ds, const RunConfig& cfg,
                      const fs::path& graph_path, const fs::path& stats_path) {
  const auto g = graph::build_graphs(ds, cfg.effective_graph());
  save_graph(g.normalized, graph_path);
  json stats = base_manifest("build-graph", cfg);
  stats["graph_bias"] = bias_json(g, ds, cfg.tail_quantile);
  stats["nnz"] = {{"base", g.base.nnz()},
                  {"counterfactual", g.counterfactual.nnz()},
                  {"item_graph", g.item_graph.nnz()},
                  {"user_graph", g.user_graph.nnz()},
                  {"adjacency", g.adjacency.nnz()}};
  stats["cf_edges_shared_with_base"] = shared_edges(g.counterfactual, g.base);
  stats["graph"] = graph_path.string();
  write_json(stats_path, stats);
  spdlog::info("graph written to {} ({} nonzeros)", graph_path.string(),
               g.normalized.nnz());
  return stats;
}

json train_step(const data::Dataset& ds, const RunConfig& cfg,
                const fs::path& graph_path, const fs::path& run_dir) {
  ensure_dir(run_dir);
  train::check_negative_budget(ds, cfg.model.weights.n_neg);
  model::MailModel m(ds, load_graph_for(graph_path, ds), cfg.effective_model(),
                     cfg.trainer.seed);
  std::ofstream log(run_dir / "metrics.jsonl", std::ios::trunc);
  if (!log) throw IoError("cannot open for writing: " + (run_dir / "metrics.jsonl").string());
  const auto result = train::train(ds, m, cfg.trainer, [&](const train::EpochRecord& r) {
    log << r.to_json().dump() << '\n';
    log.flush();
  });
  const auto params = m.named_params();
  ckpt::save_checkpoint(run_dir / "checkpoint.mck", params);

  json manifest = base_manifest("train", cfg);
  manifest["graph"] = graph_path.string();
  manifest["epochs_run"] = result.history.size();
  manifest["best_epoch"] = result.best_epoch;
  manifest["best_valid_recall@20"] = result.best_recall;
  manifest["early_stopped"] = result.early_stopped;
  write_json(run_dir / "manifest.json", manifest);
  return manifest;
}

eval::MetricsReport eval_step(const data::Dataset& ds, const RunConfig& cfg,
                              model::MailModel& m, data::Split split) {
  const ad::Tensor emb = m.embed();
  auto report = eval::evaluate(emb, ds, split, cfg.ks);
  report.groups = eval::evaluate_per_group(emb, ds, split, cfg.sparsity_boundaries);
  return report;
}

std::vector<ckpt::StoredTensor> split_nodes(const std::string& name,
                                            const ad::Tensor& t,
                                            std::size_t users) {
  const std::size_t d = t.cols();
  const auto v = t.values();
  return {{"users." + name,
           ad::Tensor({users, d}, {v.begin(), v.begin() + users * d})},
          {"items." + name,
           ad::Tensor({t.rows() - users, d}, {v.begin() + users * d, v.end()})}};
}

// ---- commands -------------------------------------------------------------

struct PrepareArgs {
  std::string interactions;
  std::string text;
  std::string visual;
  std::string feature_ids;
  std::string out;
  bool header = false;
};

int cmd_prepare(const PrepareArgs& a, const RunConfig& cfg) {
  data::TsvFormat fmt;
  fmt.has_header = a.header;
  const auto raw = data::load_interactions(a.interactions, fmt);
  auto table = data::k_core_filter(raw, cfg.k_core);
  spdlog::info("{}-core: {} users, {} items, {} interactions", cfg.k_core,
               table.user_count, table.item_count, table.edges.size());

  // Feature row of every raw item id.
  std::vector<std::string> row_ids = raw.item_ids;
  if (!a.feature_ids.empty()) row_ids = data::read_id_map(a.feature_ids);
  std::unordered_map<std::string, std::size_t> row_of;
  for (std::size_t r = 0; r < row_ids.size(); ++r) row_of.emplace(row_ids[r], r);
  std::vector<std::size_t> rows;
  for (const auto& id : table.item_ids) {
    auto it = row_of.find(id);
    if (it == row_of.end()) {
      throw ShapeError("no feature row for item '" + id + "'");
    }
    rows.push_back(it->second);
  }
  auto ds = data::split_dataset(table, {}, cfg.trainer.seed);
  for (auto [m, path] : {std::pair{data::Modality::kText, a.text},
                         std::pair{data::Modality::kVisual, a.visual}}) {
    const auto full = data::load_features(path, row_ids.size(), m);
    ds.set_features(data::select_rows(full, rows));
  }
  save_prepared(ds, a.out);

  json manifest = base_manifest("prepare", cfg);
  manifest["inputs"] = {{"interactions", a.interactions},
                        {"text_features", a.text},
                        {"visual_features", a.visual}};
  manifest["counts"] = {{"users", ds.user_count()},
                        {"items", ds.item_count()},
                        {"train", ds.edge_count(data::Split::kTrain)},
                        {"valid", ds.edge_count(data::Split::kValid)},
                        {"test", ds.edge_count(data::Split::kTest)}};
  manifest["feature_checksums"] = {
      {"text", ds.features(data::Modality::kText).checksum},
      {"visual", ds.features(data::Modality::kVisual).checksum}};
  write_json(fs::path(a.out) / "manifest.json", manifest);
  std::cout << manifest["counts"].dump() << std::endl;
  return kExitOk;
}

int cmd_eval(const std::string& data_dir, const std::string& graph_path,
             const std::string& run_dir, std::string checkpoint,
             const std::string& split_name, const std::string& out,
             const std::string& export_path, const RunConfig& cfg) {
  const auto split = data::parse_split(split_name);
  const auto ds = load_for_run(data_dir, cfg);
  if (checkpoint.empty()) checkpoint = (fs::path(run_dir) / "checkpoint.mck").string();
  model::MailModel m(ds, load_graph_for(graph_path, ds), cfg.effective_model(),
                     cfg.trainer.seed);
  restore_checkpoint(m, checkpoint);
  const auto report = eval_step(ds, cfg, m, split);
  json j = report.to_json();
  const fs::path target = !out.empty() ? fs::path(out)
                          : !run_dir.empty()
                              ? fs::path(run_dir) / ("report_" + split_name + ".json")
                              : fs::path();
  if (!target.empty()) write_json(target, j);
  if (!export_path.empty()) {
    auto tensors = split_nodes("final", m.embed(), ds.user_count());
    for (auto& t : split_nodes("identity", m.identity(cfg.effective_model().maic.modality_gates),
                               ds.user_count())) {
      tensors.push_back(std::move(t));
    }
    ckpt::save_embeddings(export_path, tensors);
  }
  std::cout << j.dump() << std::endl;
  return kExitOk;
}

int cmd_diagnose(const std::string& data_dir, const std::string& run_dir,
                 const std::string& graph_path, const std::string& out,
                 const std::string& export_path, const RunConfig& cfg) {
  const auto ds = load_for_run(data_dir, cfg);
  const auto g = graph::build_graphs(ds, cfg.effective_graph());
  SparseMatrix adjacency =
      graph_path.empty() ? g.normalized : load_graph_for(graph_path, ds);
  model::MailModel m(ds, std::move(adjacency), cfg.effective_model(),
                     cfg.trainer.seed);
  const bool trained = !run_dir.empty();
  if (trained) restore_checkpoint(m, fs::path(run_dir) / "checkpoint.mck");

  const std::size_t nu = ds.user_count();
  auto items_of = [&](const ad::Tensor& t) {
    return split_nodes("x", t, nu)[1].tensor;
  };
  const ad::Tensor anchors = items_of(m.fused_semantics());
  const ad::Tensor static_pe = items_of(m.identity(false));
  const ad::Tensor gated = items_of(m.identity(true));

  eval::MetricsReport report;
  report.split = "none";
  report.semantic_alignment["static_pe"] =
      maic::semantic_alignment_score(static_pe, anchors);
  report.semantic_alignment["maic"] = maic::semantic_alignment_score(gated, anchors);
  report.graph_bias["base"] =
      eval::graph_bias_stats(g.base, ds.item_pop(), cfg.tail_quantile);
  report.graph_bias["counterfactual"] =
      eval::graph_bias_stats(g.counterfactual, ds.item_pop(), cfg.tail_quantile);
  json j = report.to_json();
  j.erase("split");
  j.erase("users_evaluated");
  j["trained"] = trained;
  if (!out.empty()) write_json(out, j);
  if (!export_path.empty()) {
    ckpt::save_embeddings(export_path,
                          std::vector<ckpt::StoredTensor>{{"items.anchor", anchors},
                                                          {"items.static_pe", static_pe},
                                                          {"items.maic", gated}});
  }
  std::cout << j.dump() << std::endl;
  return kExitOk;
}

json parse_grid_value(const std::string& s) {
  try {
    return json::parse(s);
  } catch (const json::exception&) {
    return s;
  }
}

int cmd_sweep(const std::string& data_dir, const std::string& out,
              const std::vector<std::string>& grid, const RunConfig& base) {
  std::vector<std::pair<std::string, std::vector<json>>> axes;
  for (const auto& spec : grid) {
    const auto eq = spec.find('=');
    if (eq == std::string::npos || eq == 0 || eq + 1 == spec.size()) {
      throw ConfigError("grid entry '" + spec + "' must look like key=v1,v2");
    }
    std::vector<json> values;
    std::stringstream ss(spec.substr(eq + 1));
    for (std::string v; std::getline(ss, v, ',');) values.push_back(parse_grid_value(v));
    axes.emplace_back(spec.substr(0, eq), std::move(values));
  }
  std::size_t cells = 1;
  for (const auto& a : axes) cells *= a.second.size();

  // Validate every cell before running any of them.
  std::vector<std::pair<RunConfig, json>> plan;
  for (std::size_t c = 0; c < cells; ++c) {
    json overrides = json::object();
    std::size_t rest = c;
    for (std::size_t k = axes.size(); k-- > 0;) {
      const auto& values = axes[k].second;
      overrides[axes[k].first] = values[rest % values.size()];
      rest /= values.size();
    }
    RunConfig cfg = base;
    cfg.merge_json(overrides);
    plan.emplace_back(resolved(cfg), overrides);
  }

  ensure_dir(out);
  std::ofstream summary(fs::path(out) / "summary.jsonl", std::ios::trunc);
  for (std::size_t c = 0; c < plan.size(); ++c) {
    const auto& [cfg, overrides] = plan[c];
    char name[32];
    std::snprintf(name, sizeof(name), "cell_%03zu", c);
    const fs::path dir = fs::path(out) / name;
    ensure_dir(dir);
    spdlog::info("sweep cell {} / {}: {}", c + 1, plan.size(), overrides.dump());
    const auto ds = load_for_run(data_dir, cfg);
    build_graph_step(ds, cfg, dir / "graph.mgr", dir / "graph_stats.json");
    json manifest = train_step(ds, cfg, dir / "graph.mgr", dir);
    model::MailModel m(ds, load_graph_for(dir / "graph.mgr", ds),
                       cfg.effective_model(), cfg.trainer.seed);
    restore_checkpoint(m, dir / "checkpoint.mck");
    const json report = eval_step(ds, cfg, m, data::Split::kTest).to_json();
    write_json(dir / "report_test.json", report);
    manifest["command"] = "sweep";
    manifest["overrides"] = overrides;
    manifest["test"] = report;
    write_json(dir / "manifest.json", manifest);
    summary << json{{"cell", name}, {"overrides", overrides}, {"test", report}}.dump()
            << '\n';
  }
  std::cout << json{{"cells", plan.size()}, {"out", out}}.dump() << std::endl;
  return kExitOk;
}

int dispatch(int argc, const char* const* argv) {
  CLI::App app{"mail: ID-free multimodal recommender engine"};
  app.require_subcommand(1);
  std::string log_level = "info";
  app.add_option("--log-level", log_level, "trace, debug, info, warn, error, off");

  RunConfig cfg = initial_config(argc, argv);
  std::string config_path;
  auto with_config = [&](CLI::App* sub) {
    sub->add_option("--config", config_path, "JSON config file");
    add_config_options(sub, cfg);
  };

  PrepareArgs prep;
  auto* prepare = app.add_subcommand("prepare", "filter, split and store a dataset");
  prepare->add_option("--interactions", prep.interactions)->required();
  prepare->add_option("--text-features", prep.text)->required();
  prepare->add_option("--visual-features", prep.visual)->required();
  prepare->add_option("--feature-ids", prep.feature_ids,
                      "item ids in feature-row order (id<TAB>row per line)");
  prepare->add_option("--out", prep.out)->required();
  prepare->add_flag("--header", prep.header, "interactions file has a header row");
  with_config(prepare);

  std::string data_dir, graph_path, out, run_dir, checkpoint, split = "test",
      export_path, stats_path;
  std::vector<std::string> grid;

  auto* build = app.add_subcommand("build-graph", "build the normalized augmented graph");
  build->add_option("--data", data_dir)->required();
  build->add_option("--out", graph_path, "graph file (default <data>/graph.mgr)");
  build->add_option("--stats", stats_path, "stats JSON (default next to the graph)");
  with_config(build);

  auto* trn = app.add_subcommand("train", "train a model");
  trn->add_option("--data", data_dir)->required();
  trn->add_option("--graph", graph_path, "graph file (default <data>/graph.mgr)");
  trn->add_option("--out", run_dir, "run directory")->required();
  with_config(trn);

  auto* evl = app.add_subcommand("eval", "evaluate a checkpoint");
  evl->add_option("--data", data_dir)->required();
  evl->add_option("--graph", graph_path, "graph file (default <data>/graph.mgr)");
  evl->add_option("--run", run_dir, "run directory with manifest and checkpoint");
  evl->add_option("--checkpoint", checkpoint);
  evl->add_option("--split", split)->check(CLI::IsMember({"train", "valid", "test"}));
  evl->add_option("--out", out, "report JSON path");
  evl->add_option("--export-embeddings", export_path, "MEM1 embedding export");
  with_config(evl);

  auto* diag = app.add_subcommand("diagnose", "alignment and graph bias diagnostics");
  diag->add_option("--data", data_dir)->required();
  diag->add_option("--run", run_dir, "trained run directory (untrained if absent)");
  diag->add_option("--graph", graph_path);
  diag->add_option("--out", out, "report JSON path");
  diag->add_option("--export-embeddings", export_path, "MEM1 embedding export");
  with_config(diag);

  auto* sweep = app.add_subcommand("sweep", "cartesian grid of build-graph/train/eval runs");
  sweep->add_option("--data", data_dir)->required();
  sweep->add_option("--out", out)->required();
  sweep->add_option("--grid", grid, "key=v1,v2 (repeatable)")->required()->allow_extra_args(false);
  with_config(sweep);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUser;
  }
  spdlog::set_level(spdlog::level::from_str(log_level));

  cfg = resolved(cfg);
  const fs::path data(data_dir);
  if (graph_path.empty() && !data_dir.empty()) graph_path = (data / "graph.mgr").string();

  if (prepare->parsed()) return cmd_prepare(prep, cfg);
  if (build->parsed()) {
    const auto ds = load_for_run(data, cfg);
    if (stats_path.empty()) {
      stats_path = (fs::path(graph_path).parent_path() / "graph_stats.json").string();
    }
    const json stats = build_graph_step(ds, cfg, graph_path, stats_path);
    std::cout << json{{"graph", graph_path}, {"graph_bias", stats["graph_bias"]}}.dump()
              << std::endl;
    return kExitOk;
  }
  if (trn->parsed()) {
    const auto ds = load_for_run(data, cfg);
    const json m = train_step(ds, cfg, graph_path, run_dir);
    std::cout << json{{"run", run_dir},
                      {"best_epoch", m["best_epoch"]},
                      {"best_valid_recall@20", m["best_valid_recall@20"]}}
                     .dump()
              << std::endl;
    return kExitOk;
  }
  if (evl->parsed()) {
    if (run_dir.empty() && checkpoint.empty()) {
      throw ConfigError("eval needs --run or --checkpoint");
    }
    return cmd_eval(data_dir, graph_path, run_dir, checkpoint, split, out,
                    export_path, cfg);
  }
  if (diag->parsed()) {
    return cmd_diagnose(data_dir, run_dir,
                        diag->count("--graph") ? graph_path : std::string(), out,
                        export_path, cfg);
  }
  return cmd_sweep(data_dir, out, grid, cfg);
}

}  // namespace

data::Dataset load_prepared(const fs::path& dir) {
  auto users = data::read_id_map(dir / "users.tsv");
  auto items = data::read_id_map(dir / "items.tsv");
  std::ifstream in(dir / "split.tsv");
  if (!in) throw IoError("cannot open: " + (dir / "split.tsv").string());
  std::vector<std::pair<data::Edge, data::Split>> rows;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::istringstream ss(line);
    std::size_t u = 0, i = 0;
    std::string s;
    if (!(ss >> u >> i >> s) || u >= users.size() || i >= items.size()) {
      throw FormatError((dir / "split.tsv").string() + ":" +
                        std::to_string(line_no) + ": malformed row");
    }
    try {
      rows.push_back({{u, i}, data::parse_split(s)});
    } catch (const Error&) {
      throw FormatError((dir / "split.tsv").string() + ":" +
                        std::to_string(line_no) + ": unknown split '" + s + "'");
    }
  }
  std::sort(rows.begin(), rows.end());
  std::vector<data::Edge> edges;
  std::vector<data::Split> labels;
  for (const auto& [e, s] : rows) {
    edges.push_back(e);
    labels.push_back(s);
  }
  auto table = data::make_table(users.size(), items.size(), std::move(edges));
  table.user_ids = std::move(users);
  table.item_ids = std::move(items);
  data::Dataset ds(std::move(table), std::move(labels));
  const std::size_t ni = ds.item_count();
  ds.set_features(data::load_features(dir / "text.mmf", ni, data::Modality::kText));
  ds.set_features(data::load_features(dir / "visual.mmf", ni, data::Modality::kVisual));
  return ds;
}

int run_cli(int argc, const char* const* argv) {
  try {
    return dispatch(argc, argv);
  } catch (const ConfigError& e) {
    spdlog::error("config error: {}", e.what());
    return kExitUser;
  } catch (const SplitError& e) {
    spdlog::error("split error: {}", e.what());
    return kExitUser;
  } catch (const EmptyDataError& e) {
    spdlog::error("empty data: {}", e.what());
    return kExitUser;
  } catch (const IoError& e) {
    spdlog::error("{}", e.what());
    return kExitUser;
  } catch (const ShapeError& e) {
    spdlog::error("shape error: {}", e.what());
    return kExitUser;
  } catch (const FormatError& e) {
    spdlog::error("format error: {}", e.what());
    return kExitArtifact;
  } catch (const NumericsError& e) {
    spdlog::error("numerical failure: {}", e.what());
    return kExitNumerics;
  } catch (const std::exception& e) {
    spdlog::error("internal error: {}", e.what());
    return kExitInternal;
  }
}

}  // namespace mailrec::cli
