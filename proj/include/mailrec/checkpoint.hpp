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

// Named tensor files. MCK1 holds model parameters, MEM1 holds exported
// embedding matrices; both share one layout:
//   magic, u64 count, then per tensor u64 name length, name bytes,
//   u64 rank, rank x u64 extents, float32 payload.

#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "mailrec/tensor.hpp"

namespace mailrec::ckpt {

struct StoredTensor {
  std::string name;
  ad::Tensor tensor;
};

void save_checkpoint(const std::filesystem::path& path,
                     std::span<const ad::NamedTensor> params);
std::vector<StoredTensor> load_checkpoint(const std::filesystem::path& path);

// Copies stored values into params. Names and shapes must match exactly,
// otherwise FormatError.
void restore(std::span<const ad::NamedTensor> params,
             const std::vector<StoredTensor>& stored);

void save_embeddings(const std::filesystem::path& path,
                     std::span<const StoredTensor> matrices);
std::vector<StoredTensor> load_embeddings(const std::filesystem::path& path);

}  // namespace mailrec::ckpt
