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

#include "mailrec/checkpoint.hpp"

#include "mailrec/binary_io.hpp"
#include "mailrec/errors.hpp"

namespace mailrec::ckpt {

namespace {

constexpr io::Magic kCheckpointMagic{'M', 'C', 'K', '1'};
constexpr io::Magic kEmbeddingMagic{'M', 'E', 'M', '1'};
constexpr std::uint64_t kMaxName = 4096;

void write_tensors(const std::filesystem::path& path, const io::Magic& magic,
                   std::span<const StoredTensor> tensors) {
  io::BinaryWriter w(path);
  w.magic(magic);
  w.u64(tensors.size());
  for (const auto& t : tensors) {
    w.u64(t.name.size());
    w.bytes(t.name);
    w.u64(2);
    w.u64(t.tensor.rows());
    w.u64(t.tensor.cols());
    w.f32_array(t.tensor.values());
  }
  w.close();
}

std::vector<StoredTensor> read_tensors(const std::filesystem::path& path,
                                       const io::Magic& magic) {
  io::BinaryReader r(path);
  r.expect_magic(magic);
  const std::uint64_t count = r.u64();
  std::vector<StoredTensor> out;
  for (std::uint64_t n = 0; n < count; ++n) {
    const std::uint64_t len = r.u64();
    if (len > kMaxName) {
      throw FormatError(path.string() + ": tensor name too long");
    }
    StoredTensor t;
    t.name = r.bytes(len);
    const std::uint64_t rank = r.u64();
    if (rank != 2) {
      throw FormatError(path.string() + ": tensor '" + t.name + "' has rank " +
                        std::to_string(rank) + ", expected 2");
    }
    const std::uint64_t rows = r.u64();
    const std::uint64_t cols = r.u64();
    if (cols != 0 && rows > r.remaining() / 4 / cols) {
      throw FormatError(path.string() + ": tensor '" + t.name + "' is truncated");
    }
    t.tensor = ad::Tensor({rows, cols}, r.f32_array(rows * cols));
    out.push_back(std::move(t));
  }
  if (r.remaining() != 0) {
    throw FormatError(path.string() + ": trailing bytes after last tensor");
  }
  return out;
}

std::vector<StoredTensor> copy_named(std::span<const ad::NamedTensor> params) {
  std::vector<StoredTensor> out;
  for (const auto& p : params) out.push_back({p.name, ad::Tensor(*p.tensor)});
  return out;
}

}  // namespace

void save_checkpoint(const std::filesystem::path& path,
                     std::span<const ad::NamedTensor> params) {
  const auto tensors = copy_named(params);
  write_tensors(path, kCheckpointMagic, tensors);
}

std::vector<StoredTensor> load_checkpoint(const std::filesystem::path& path) {
  return read_tensors(path, kCheckpointMagic);
}

void restore(std::span<const ad::NamedTensor> params,
             const std::vector<StoredTensor>& stored) {
  if (stored.size() != params.size()) {
    throw FormatError("checkpoint holds " + std::to_string(stored.size()) +
                      " tensors, model expects " + std::to_string(params.size()));
  }
  for (std::size_t k = 0; k < params.size(); ++k) {
    const auto& p = params[k];
    const auto& s = stored[k];
    if (s.name != p.name || s.tensor.shape() != p.tensor->shape()) {
      throw FormatError("checkpoint tensor '" + s.name + "' " +
                        s.tensor.shape().str() + " does not match '" + p.name +
                        "' " + p.tensor->shape().str());
    }
  }
  for (std::size_t k = 0; k < params.size(); ++k) {
    const auto src = stored[k].tensor.values();
    auto dst = params[k].tensor->mutable_values();
    std::copy(src.begin(), src.end(), dst.begin());
    params[k].tensor->clear_grad();
  }
}

void save_embeddings(const std::filesystem::path& path,
                     std::span<const StoredTensor> matrices) {
  write_tensors(path, kEmbeddingMagic, matrices);
}

std::vector<StoredTensor> load_embeddings(const std::filesystem::path& path) {
  return read_tensors(path, kEmbeddingMagic);
}

}  // namespace mailrec::ckpt
