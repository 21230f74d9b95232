// Copyright 2026 The sedkit Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace sed {

// Reads a whole file; throws kIo if it cannot be opened.
std::string ReadFileBytes(const std::filesystem::path& path);

// Writes to a sibling temp file and renames it over `path`.
void WriteFileAtomic(const std::filesystem::path& path, std::string_view bytes);

// Little-endian byte sink.
class ByteWriter {
 public:
  void U8(uint8_t v) { buf_.push_back(static_cast<char>(v)); }
  void U16(uint16_t v);
  void U32(uint32_t v);
  void F32(float v);
  void F64(double v);
  void Bytes(std::string_view s) { buf_.append(s); }
  const std::string& str() const { return buf_; }

 private:
  std::string buf_;
};

// Little-endian byte source over a borrowed buffer. Throws kFormat on
// truncation; `what` names the structure for the message.
class ByteReader {
 public:
  ByteReader(std::string_view data, std::string what)
      : data_(data), what_(std::move(what)) {}
  uint8_t U8();
  uint16_t U16();
  uint32_t U32();
  float F32();
  double F64();
  std::string_view Bytes(size_t n);
  size_t remaining() const { return data_.size() - pos_; }
  size_t position() const { return pos_; }

 private:
  void Need(size_t n);
  std::string_view data_;
  std::string what_;
  size_t pos_ = 0;
};

// Sorted regular files in `dir` with the given extension (".wav").
std::vector<std::filesystem::path> ListFiles(const std::filesystem::path& dir,
                                             std::string_view extension);

}  // namespace sed
