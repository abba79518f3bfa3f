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
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "mailrec/tensor.hpp"

namespace mailrec::data {

enum class Modality { kText, kVisual };

std::string to_string(Modality m);

// Precomputed per-item features for one modality, row-major.
struct FeatureMatrix {
  Modality modality = Modality::kText;
  std::size_t rows = 0;
  std::size_t dim = 0;
  std::vector<double> values;
  // FNV-1a of the little-endian float32 payload as stored on disk.
  std::uint64_t checksum = 0;

  std::span<const double> row(std::size_t r) const {
    return std::span<const double>(values).subspan(r * dim, dim);
  }
  ad::Tensor to_tensor() const;
};

// "MMF1" + u32 rows + u32 dim + rows*dim little-endian float32 values.
// Throws FormatError on magic/size problems, ShapeError if rows differs from
// expected_rows, NumericsError on NaN/Inf payload values.
FeatureMatrix load_features(const std::filesystem::path& path,
                            std::size_t expected_rows, Modality modality);
void save_features(const FeatureMatrix& features,
                   const std::filesystem::path& path);

// Rows picked in the given order.
FeatureMatrix select_rows(const FeatureMatrix& features,
                          std::span<const std::size_t> rows);

}  // namespace mailrec::data
