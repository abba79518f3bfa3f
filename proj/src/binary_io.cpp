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

#include "mailrec/binary_io.hpp"

#include <bit>
#include <cstring>

#include "mailrec/errors.hpp"

namespace mailrec::io {

namespace {

template <typename U>
void put_le(std::ofstream& out, U v) {
  unsigned char buf[sizeof(U)];
  for (std::size_t i = 0; i < sizeof(U); ++i) {
    buf[i] = static_cast<unsigned char>((v >> (8 * i)) & 0xFFu);
  }
  out.write(reinterpret_cast<const char*>(buf), sizeof(U));
}

template <typename U>
U get_le(const unsigned char* p) {
  U v = 0;
  for (std::size_t i = 0; i < sizeof(U); ++i) {
    v |= static_cast<U>(p[i]) << (8 * i);
  }
  return v;
}

}  // namespace

BinaryWriter::BinaryWriter(const std::filesystem::path& path)
    : path_(path), out_(path, std::ios::binary | std::ios::trunc) {
  if (!out_) throw IoError("cannot open for writing: " + path.string());
}

void BinaryWriter::magic(const Magic& m) { out_.write(m.data(), 4); }
void BinaryWriter::u32(std::uint32_t v) { put_le(out_, v); }
void BinaryWriter::u64(std::uint64_t v) { put_le(out_, v); }
void BinaryWriter::f32(float v) { put_le(out_, std::bit_cast<std::uint32_t>(v)); }
void BinaryWriter::bytes(std::string_view s) {
  out_.write(s.data(), static_cast<std::streamsize>(s.size()));
}

void BinaryWriter::f32_array(std::span<const double> values) {
  for (double v : values) f32(static_cast<float>(v));
}

void BinaryWriter::close() {
  out_.flush();
  if (!out_) throw IoError("write failed: " + path_.string());
  out_.close();
}

BinaryReader::BinaryReader(const std::filesystem::path& path)
    : path_(path), in_(path, std::ios::binary) {
  if (!in_) throw IoError("cannot open: " + path.string());
}

void BinaryReader::read_exact(char* dst, std::size_t n) {
  in_.read(dst, static_cast<std::streamsize>(n));
  if (static_cast<std::size_t>(in_.gcount()) != n) {
    throw FormatError(path_.string() + ": truncated file");
  }
}

void BinaryReader::expect_magic(const Magic& expected) {
  char got[4] = {0, 0, 0, 0};
  in_.read(got, 4);
  if (in_.gcount() != 4 || std::memcmp(got, expected.data(), 4) != 0) {
    throw FormatError(path_.string() + ": bad magic, expected \"" +
                      std::string(expected.data(), 4) + "\"");
  }
}

std::uint32_t BinaryReader::u32() {
  unsigned char buf[4];
  read_exact(reinterpret_cast<char*>(buf), 4);
  return get_le<std::uint32_t>(buf);
}

std::uint64_t BinaryReader::u64() {
  unsigned char buf[8];
  read_exact(reinterpret_cast<char*>(buf), 8);
  return get_le<std::uint64_t>(buf);
}

float BinaryReader::f32() { return std::bit_cast<float>(u32()); }

std::string BinaryReader::bytes(std::size_t n) {
  if (n > remaining()) throw FormatError(path_.string() + ": truncated file");
  std::string s(n, '\0');
  read_exact(s.data(), n);
  return s;
}

std::vector<unsigned char> BinaryReader::raw(std::size_t n) {
  if (n > remaining()) throw FormatError(path_.string() + ": truncated file");
  std::vector<unsigned char> buf(n);
  read_exact(reinterpret_cast<char*>(buf.data()), n);
  return buf;
}

std::vector<double> BinaryReader::f32_array(std::size_t count) {
  const auto buf = raw(count * 4);
  std::vector<double> out(count);
  for (std::size_t i = 0; i < count; ++i) out[i] = decode_f32(&buf[4 * i]);
  return out;
}

std::uint64_t BinaryReader::remaining() {
  const auto pos = in_.tellg();
  in_.seekg(0, std::ios::end);
  const auto end = in_.tellg();
  in_.seekg(pos);
  return static_cast<std::uint64_t>(end - pos);
}

float decode_f32(const unsigned char* p) {
  return std::bit_cast<float>(get_le<std::uint32_t>(p));
}

std::uint64_t fnv1a(std::span<const unsigned char> data, std::uint64_t seed) {
  std::uint64_t h = seed;
  for (unsigned char c : data) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

std::uint64_t fnv1a(std::string_view text, std::uint64_t seed) {
  return fnv1a(std::span<const unsigned char>(
                   reinterpret_cast<const unsigned char*>(text.data()),
                   text.size()),
               seed);
}

}  // namespace mailrec::io
