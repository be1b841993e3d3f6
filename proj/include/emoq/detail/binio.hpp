// Copyright 2026 The Emoq Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef EMOQ_DETAIL_BINIO_HPP_
#define EMOQ_DETAIL_BINIO_HPP_

#include <bit>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "emoq/common.hpp"

namespace emoq::detail {

static_assert(std::endian::native == std::endian::little,
              "file formats are little-endian; big-endian hosts unsupported");

class BinWriter {
 public:
  explicit BinWriter(const std::filesystem::path& path)
      : path_(path), out_(path, std::ios::binary | std::ios::trunc) {
    if (!out_) throw DataError("cannot open '" + path.string() + "' for write");
  }

  void bytes(const void* data, std::size_t size) {
    out_.write(static_cast<const char*>(data),
               static_cast<std::streamsize>(size));
  }
  void u8(std::uint8_t v) { bytes(&v, 1); }
  void u16(std::uint16_t v) { bytes(&v, 2); }
  void u32(std::uint32_t v) { bytes(&v, 4); }
  void u64(std::uint64_t v) { bytes(&v, 8); }
  void f32(float v) { bytes(&v, 4); }
  void magic(const char tag[5]) { bytes(tag, 4); }

  void close() {
    out_.flush();
    if (!out_) throw DataError("write failed for '" + path_.string() + "'");
    out_.close();
  }

 private:
  std::filesystem::path path_;
  std::ofstream out_;
};

class BinReader {
 public:
  explicit BinReader(const std::filesystem::path& path)
      : path_(path), in_(path, std::ios::binary) {
    if (!in_) throw DataError("cannot open '" + path.string() + "' for read");
    in_.seekg(0, std::ios::end);
    size_ = static_cast<std::uint64_t>(in_.tellg());
    in_.seekg(0, std::ios::beg);
  }

  std::uint64_t size() const { return size_; }
  std::uint64_t offset() const { return offset_; }

  void bytes(void* data, std::size_t size) {
    if (offset_ + size > size_) {
      throw DataError("truncated file '" + path_.string() + "': need " +
                      std::to_string(size) + " bytes at offset " +
                      std::to_string(offset_) + ", file has " +
                      std::to_string(size_));
    }
    in_.read(static_cast<char*>(data), static_cast<std::streamsize>(size));
    if (!in_) throw DataError("read failed for '" + path_.string() + "'");
    offset_ += size;
  }
  std::uint8_t u8() { std::uint8_t v; bytes(&v, 1); return v; }
  std::uint16_t u16() { std::uint16_t v; bytes(&v, 2); return v; }
  std::uint32_t u32() { std::uint32_t v; bytes(&v, 4); return v; }
  std::uint64_t u64() { std::uint64_t v; bytes(&v, 8); return v; }
  float f32() { float v; bytes(&v, 4); return v; }

  void expect_magic(const char tag[5]) {
    char got[4];
    bytes(got, 4);
    if (std::memcmp(got, tag, 4) != 0) {
      throw DataError("bad magic in '" + path_.string() + "' at offset 0: expected " +
                      std::string(tag, 4));
    }
  }

  void expect_exhausted() {
    if (offset_ != size_) {
      throw DataError("trailing bytes in '" + path_.string() + "' at offset " +
                      std::to_string(offset_) + ": file has " +
                      std::to_string(size_) + " bytes");
    }
  }

 private:
  std::filesystem::path path_;
  std::ifstream in_;
  std::uint64_t size_ = 0;
  std::uint64_t offset_ = 0;
};

}  // namespace emoq::detail

#endif  // EMOQ_DETAIL_BINIO_HPP_
