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

#include <compare>
#include <cstddef>
#include <filesystem>
#include <string>
#include <vector>

namespace mailrec::data {

struct Edge {
  std::size_t user = 0;
  std::size_t item = 0;

  auto operator<=>(const Edge&) const = default;
};

// Deduplicated user-item interactions with dense indices. Edges are kept
// sorted by (user, item). user_ids/item_ids map dense indices back to the
// identifiers found in the source file; they are empty for synthetic data.
struct InteractionTable {
  std::size_t user_count = 0;
  std::size_t item_count = 0;
  std::vector<Edge> edges;
  std::vector<std::string> user_ids;
  std::vector<std::string> item_ids;

  // Throws ContractError on out-of-range indices or duplicate pairs.
  void validate() const;
  std::string user_name(std::size_t u) const;
};

// Sorts, deduplicates and validates.
InteractionTable make_table(std::size_t user_count, std::size_t item_count,
                            std::vector<Edge> edges);

struct TsvFormat {
  bool has_header = false;
  char delimiter = '\t';
};

// Reads <user_id, item_id, ...> rows; extra columns are ignored and blank
// lines skipped. Identifiers get dense indices in order of first appearance.
// Throws FormatError (with line number) on short rows, EmptyDataError if no
// interactions were read.
InteractionTable load_interactions(const std::filesystem::path& path,
                                   const TsvFormat& format = {});

// Removes users and items with fewer than k edges until a fixed point and
// re-densifies indices, preserving their relative order.
InteractionTable k_core_filter(const InteractionTable& table, std::size_t k);

// Sidecar TSV: original_id <TAB> dense_index, one line per index.
void write_id_map(const std::vector<std::string>& ids,
                  const std::filesystem::path& path);
std::vector<std::string> read_id_map(const std::filesystem::path& path);

}  // namespace mailrec::data
