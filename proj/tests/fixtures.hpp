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

// Synthetic datasets and helpers shared by the unit and acceptance tests.

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "mailrec/dataset.hpp"
#include "mailrec/tensor.hpp"

namespace mailrec::testing {

class TempDir {
 public:
  explicit TempDir(const std::string& tag = "mailrec");
  ~TempDir();
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;
  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const {
    return path_ / name;
  }

 private:
  std::filesystem::path path_;
};

ad::Tensor random_tensor(std::size_t rows, std::size_t cols, std::uint64_t seed,
                         double scale = 1.0, bool requires_grad = false);

// Rows drawn from a standard normal and scaled to unit length.
ad::Tensor random_unit_rows(std::size_t rows, std::size_t cols,
                            std::uint64_t seed);

// n_j = ceil(1000 * rank^-exponent) with ranks randomly permuted.
std::vector<std::size_t> zipf_counts(std::size_t items, double exponent,
                                     std::uint64_t seed);

struct PlantedSpec {
  std::size_t users = 50;
  std::size_t items = 40;
  std::size_t blocks = 4;
  std::size_t per_user = 7;
  double noise = 0.1;
  std::size_t text_dim = 8;
  std::size_t visual_dim = 6;
};

// Users prefer exactly one block of items; item features are the block
// indicator plus Gaussian noise. Split 8:1:1 per user with the same seed.
data::Dataset planted_dataset(std::uint64_t seed, const PlantedSpec& spec = {});
std::size_t planted_block(std::size_t item, const PlantedSpec& spec = {});

// Random interactions where every user has at least min_per_user items and
// every item at least one interaction, with random features.
data::Dataset random_dataset(std::size_t users, std::size_t items,
                             std::size_t min_per_user, std::uint64_t seed,
                             std::size_t text_dim = 5,
                             std::size_t visual_dim = 4);

// Writes interactions.tsv, text.mmf and visual.mmf in the raw input format
// expected by `prepare`.
void write_raw_inputs(const data::Dataset& dataset,
                      const std::filesystem::path& dir);

std::vector<std::uint8_t> read_bytes(const std::filesystem::path& path);

}  // namespace mailrec::testing
