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

// Little-endian primitives shared by the binary file formats (MMF1 features,
// MGR1 graphs, MCK1 checkpoints, MEM1 embedding exports).

#include <array>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace mailrec::io {

using Magic = std::array<char, 4>;

class BinaryWriter {
 public:
  explicit BinaryWriter(const std::filesystem::path& path);

  void magic(const Magic& m);
  void u32(std::uint32_t v);
  void u64(std::uint64_t v);
  void f32(float v);
  void bytes(std::string_view s);
  // Writes every value rounded to 32-bit float.
  void f32_array(std::span<const double> values);
  void close();

 private:
  std::filesystem::path path_;
  std::ofstream out_;
};

class BinaryReader {
 public:
  explicit BinaryReader(const std::filesystem::path& path);

  // Throws FormatError if the next four bytes differ from `expected`.
  void expect_magic(const Magic& expected);
  std::uint32_t u32();
  std::uint64_t u64();
  float f32();
  std::string bytes(std::size_t n);
  std::vector<double> f32_array(std::size_t count);
  // Raw little-endian payload bytes of `count` 32-bit reals.
  std::vector<unsigned char> raw(std::size_t n);
  std::uint64_t remaining();
  const std::filesystem::path& path() const { return path_; }

 private:
  void read_exact(char* dst, std::size_t n);

  std::filesystem::path path_;
  std::ifstream in_;
};

// 64-bit FNV-1a over a byte range.
std::uint64_t fnv1a(std::span<const unsigned char> data,
                    std::uint64_t seed = 14695981039346656037ull);
std::uint64_t fnv1a(std::string_view text,
                    std::uint64_t seed = 14695981039346656037ull);

// Decodes little-endian float32 payload bytes.
float decode_f32(const unsigned char* p);

}  // namespace mailrec::io
