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

#include "mailrec/interactions.hpp"

#include <spdlog/spdlog.h>

#include <algorithm>
#include <deque>
#include <fstream>
#include <sstream>
#include <unordered_map>

#include "mailrec/errors.hpp"

namespace mailrec::data {

void InteractionTable::validate() const {
  for (std::size_t k = 0; k < edges.size(); ++k) {
    const Edge& e = edges[k];
    if (e.user >= user_count || e.item >= item_count) {
      throw ContractError("interaction (" + std::to_string(e.user) + ", " +
                          std::to_string(e.item) + ") outside " +
                          std::to_string(user_count) + " x " +
                          std::to_string(item_count));
    }
    if (k > 0 && !(edges[k - 1] < e)) {
      throw ContractError("interaction edges must be sorted and unique");
    }
  }
  if (!user_ids.empty() && user_ids.size() != user_count) {
    throw ContractError("user id map size mismatch");
  }
  if (!item_ids.empty() && item_ids.size() != item_count) {
    throw ContractError("item id map size mismatch");
  }
}

std::string InteractionTable::user_name(std::size_t u) const {
  return u < user_ids.size() ? user_ids[u] : "#" + std::to_string(u);
}

InteractionTable make_table(std::size_t user_count, std::size_t item_count,
                            std::vector<Edge> edges) {
  std::sort(edges.begin(), edges.end());
  edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
  InteractionTable table;
  table.user_count = user_count;
  table.item_count = item_count;
  table.edges = std::move(edges);
  table.validate();
  return table;
}

InteractionTable load_interactions(const std::filesystem::path& path,
                                   const TsvFormat& format) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open interactions file: " + path.string());

  std::unordered_map<std::string, std::size_t> users;
  std::unordered_map<std::string, std::size_t> items;
  InteractionTable table;
  std::vector<Edge> edges;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line_no == 1 && format.has_header) continue;
    if (line.find_first_not_of(" \t") == std::string::npos) continue;

    const std::size_t first = line.find(format.delimiter);
    if (first == std::string::npos || first == 0) {
      throw FormatError(path.string() + ":" + std::to_string(line_no) +
                        ": expected <user_id> <item_id>");
    }
    std::size_t second = line.find(format.delimiter, first + 1);
    if (second == std::string::npos) second = line.size();
    if (second == first + 1) {
      throw FormatError(path.string() + ":" + std::to_string(line_no) +
                        ": empty item id");
    }
    std::string user = line.substr(0, first);
    std::string item = line.substr(first + 1, second - first - 1);

    auto [uit, unew] = users.try_emplace(user, table.user_ids.size());
    if (unew) table.user_ids.push_back(std::move(user));
    auto [iit, inew] = items.try_emplace(item, table.item_ids.size());
    if (inew) table.item_ids.push_back(std::move(item));
    edges.push_back({uit->second, iit->second});
  }
  if (edges.empty()) {
    throw EmptyDataError("no interactions in " + path.string());
  }
  auto ids_u = std::move(table.user_ids);
  auto ids_i = std::move(table.item_ids);
  table = make_table(ids_u.size(), ids_i.size(), std::move(edges));
  table.user_ids = std::move(ids_u);
  table.item_ids = std::move(ids_i);
  spdlog::info("loaded {} interactions ({} users, {} items) from {}",
               table.edges.size(), table.user_count, table.item_count,
               path.string());
  return table;
}

InteractionTable k_core_filter(const InteractionTable& table, std::size_t k) {
  if (k < 1) throw ConfigError("k-core requires k >= 1");
  std::vector<std::size_t> user_deg(table.user_count, 0);
  std::vector<std::size_t> item_deg(table.item_count, 0);
  std::vector<std::vector<std::size_t>> user_edges(table.user_count);
  std::vector<std::vector<std::size_t>> item_edges(table.item_count);
  for (std::size_t e = 0; e < table.edges.size(); ++e) {
    const Edge& edge = table.edges[e];
    ++user_deg[edge.user];
    ++item_deg[edge.item];
    user_edges[edge.user].push_back(e);
    item_edges[edge.item].push_back(e);
  }

  std::vector<bool> user_gone(table.user_count, false);
  std::vector<bool> item_gone(table.item_count, false);
  std::vector<bool> edge_gone(table.edges.size(), false);
  // Queue entries: (is_user, index).
  std::deque<std::pair<bool, std::size_t>> queue;
  for (std::size_t u = 0; u < table.user_count; ++u) {
    if (user_deg[u] < k) {
      user_gone[u] = true;
      queue.emplace_back(true, u);
    }
  }
  for (std::size_t i = 0; i < table.item_count; ++i) {
    if (item_deg[i] < k) {
      item_gone[i] = true;
      queue.emplace_back(false, i);
    }
  }
  while (!queue.empty()) {
    const auto [is_user, node] = queue.front();
    queue.pop_front();
    for (std::size_t e : is_user ? user_edges[node] : item_edges[node]) {
      if (edge_gone[e]) continue;
      edge_gone[e] = true;
      const Edge& edge = table.edges[e];
      if (is_user) {
        if (--item_deg[edge.item] < k && !item_gone[edge.item]) {
          item_gone[edge.item] = true;
          queue.emplace_back(false, edge.item);
        }
      } else {
        if (--user_deg[edge.user] < k && !user_gone[edge.user]) {
          user_gone[edge.user] = true;
          queue.emplace_back(true, edge.user);
        }
      }
    }
  }

  auto compact = [](const std::vector<bool>& gone, std::vector<std::size_t>& remap) {
    std::size_t next = 0;
    remap.assign(gone.size(), 0);
    for (std::size_t x = 0; x < gone.size(); ++x) {
      if (!gone[x]) remap[x] = next++;
    }
    return next;
  };
  std::vector<std::size_t> user_map;
  std::vector<std::size_t> item_map;
  const std::size_t users = compact(user_gone, user_map);
  const std::size_t items = compact(item_gone, item_map);
  if (users == 0 || items == 0) {
    throw EmptyDataError(std::to_string(k) +
                         "-core filtering removed every interaction");
  }

  std::vector<Edge> kept;
  for (std::size_t e = 0; e < table.edges.size(); ++e) {
    if (edge_gone[e]) continue;
    kept.push_back({user_map[table.edges[e].user], item_map[table.edges[e].item]});
  }
  InteractionTable out = make_table(users, items, std::move(kept));
  for (std::size_t u = 0; u < table.user_ids.size(); ++u) {
    if (!user_gone[u]) out.user_ids.push_back(table.user_ids[u]);
  }
  for (std::size_t i = 0; i < table.item_ids.size(); ++i) {
    if (!item_gone[i]) out.item_ids.push_back(table.item_ids[i]);
  }
  return out;
}

void write_id_map(const std::vector<std::string>& ids,
                  const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw IoError("cannot open for writing: " + path.string());
  for (std::size_t k = 0; k < ids.size(); ++k) out << ids[k] << '\t' << k << '\n';
  if (!out) throw IoError("write failed: " + path.string());
}

std::vector<std::string> read_id_map(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open id map: " + path.string());
  std::vector<std::string> ids;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const std::size_t tab = line.rfind('\t');
    if (tab == std::string::npos) {
      throw FormatError(path.string() + ":" + std::to_string(line_no) +
                        ": expected <original_id> <dense_index>");
    }
    std::size_t index = 0;
    try {
      index = std::stoull(line.substr(tab + 1));
    } catch (const std::exception&) {
      throw FormatError(path.string() + ":" + std::to_string(line_no) +
                        ": bad dense index");
    }
    if (index != ids.size()) {
      throw FormatError(path.string() + ":" + std::to_string(line_no) +
                        ": dense indices must be consecutive");
    }
    ids.push_back(line.substr(0, tab));
  }
  return ids;
}

}  // namespace mailrec::data
