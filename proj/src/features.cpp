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

#include "mailrec/features.hpp"

#include <spdlog/spdlog.h>

#include <cmath>

#include "mailrec/binary_io.hpp"
#include "mailrec/errors.hpp"

namespace mailrec::data {

namespace {

constexpr io::Magic kFeatureMagic{'M', 'M', 'F', '1'};

}  // namespace

std::string to_string(Modality m) {
  return m == Modality::kText ? "text" : "visual";
}

ad::Tensor FeatureMatrix::to_tensor() const {
  return ad::Tensor({rows, dim}, values);
}

FeatureMatrix load_features(const std::filesystem::path& path,
                            std::size_t expected_rows, Modality modality) {
  io::BinaryReader in(path);
  in.expect_magic(kFeatureMagic);
  const std::uint32_t rows = in.u32();
  const std::uint32_t dim = in.u32();
  if (rows != expected_rows) {
    throw ShapeError(path.string() + ": declares " + std::to_string(rows) +
                     " rows, expected " + std::to_string(expected_rows));
  }
  const std::uint64_t payload = std::uint64_t{rows} * dim * 4;
  if (in.remaining() != payload) {
    throw FormatError(path.string() + ": payload is " +
                      std::to_string(in.remaining()) + " bytes, header implies " +
                      std::to_string(payload));
  }
  const auto bytes = in.raw(payload);

  FeatureMatrix out;
  out.modality = modality;
  out.rows = rows;
  out.dim = dim;
  out.values.resize(std::size_t{rows} * dim);
  for (std::size_t k = 0; k < out.values.size(); ++k) {
    const double v = io::decode_f32(&bytes[4 * k]);
    if (!std::isfinite(v)) {
      throw NumericsError(path.string() + ": non-finite feature at row " +
                          std::to_string(k / dim) + ", column " +
                          std::to_string(k % dim));
    }
    out.values[k] = v;
  }
  out.checksum = io::fnv1a(bytes);
  spdlog::info("{} features {}: {} x {}, checksum {:016x}", to_string(modality),
               path.string(), rows, dim, out.checksum);
  return out;
}

void save_features(const FeatureMatrix& features,
                   const std::filesystem::path& path) {
  io::BinaryWriter out(path);
  out.magic(kFeatureMagic);
  out.u32(static_cast<std::uint32_t>(features.rows));
  out.u32(static_cast<std::uint32_t>(features.dim));
  out.f32_array(features.values);
  out.close();
}

FeatureMatrix select_rows(const FeatureMatrix& features,
                          std::span<const std::size_t> rows) {
  FeatureMatrix out;
  out.modality = features.modality;
  out.rows = rows.size();
  out.dim = features.dim;
  out.values.reserve(rows.size() * features.dim);
  for (std::size_t r : rows) {
    if (r >= features.rows) throw ShapeError("select_rows: row out of range");
    const auto src = features.row(r);
    out.values.insert(out.values.end(), src.begin(), src.end());
  }
  return out;
}

}  // namespace mailrec::data
