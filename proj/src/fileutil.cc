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

#include "sed/fileutil.h"

#include <algorithm>
#include <bit>
#include <cstring>
#include <fstream>
#include <sstream>

#include "sed/error.h"

namespace sed {

namespace fs = std::filesystem;

static_assert(std::endian::native == std::endian::little,
              "binary formats assume a little-endian host");

std::string ReadFileBytes(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) Fail(ErrorKind::kIo, "cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  if (in.bad()) Fail(ErrorKind::kIo, "read failed for " + path.string());
  return ss.str();
}

void WriteFileAtomic(const fs::path& path, std::string_view bytes) {
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) Fail(ErrorKind::kIo, "cannot write " + path.string());
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!out) Fail(ErrorKind::kIo, "write failed for " + path.string());
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) {
    fs::remove(tmp, ec);
    Fail(ErrorKind::kIo, "cannot rename into " + path.string());
  }
}

namespace {
template <typename T>
void AppendRaw(std::string& buf, T v) {
  char bytes[sizeof(T)];
  std::memcpy(bytes, &v, sizeof(T));
  buf.append(bytes, sizeof(T));
}
}  // namespace

void ByteWriter::U16(uint16_t v) { AppendRaw(buf_, v); }
void ByteWriter::U32(uint32_t v) { AppendRaw(buf_, v); }
void ByteWriter::F32(float v) { AppendRaw(buf_, v); }
void ByteWriter::F64(double v) { AppendRaw(buf_, v); }

void ByteReader::Need(size_t n) {
  if (remaining() < n) {
    Fail(ErrorKind::kFormat, what_ + ": truncated at byte " +
                                 std::to_string(pos_));
  }
}

namespace {
template <typename T>
T ReadRaw(std::string_view data, size_t pos) {
  T v;
  std::memcpy(&v, data.data() + pos, sizeof(T));
  return v;
}
}  // namespace

uint8_t ByteReader::U8() {
  Need(1);
  return static_cast<uint8_t>(data_[pos_++]);
}
uint16_t ByteReader::U16() {
  Need(2);
  auto v = ReadRaw<uint16_t>(data_, pos_);
  pos_ += 2;
  return v;
}
uint32_t ByteReader::U32() {
  Need(4);
  auto v = ReadRaw<uint32_t>(data_, pos_);
  pos_ += 4;
  return v;
}
float ByteReader::F32() {
  Need(4);
  auto v = ReadRaw<float>(data_, pos_);
  pos_ += 4;
  return v;
}
double ByteReader::F64() {
  Need(8);
  auto v = ReadRaw<double>(data_, pos_);
  pos_ += 8;
  return v;
}
std::string_view ByteReader::Bytes(size_t n) {
  Need(n);
  auto v = data_.substr(pos_, n);
  pos_ += n;
  return v;
}

std::vector<fs::path> ListFiles(const fs::path& dir,
                                std::string_view extension) {
  std::error_code ec;
  if (!fs::is_directory(dir, ec)) {
    Fail(ErrorKind::kIo, "not a directory: " + dir.string());
  }
  std::vector<fs::path> out;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (entry.is_regular_file() && entry.path().extension() == extension) {
      out.push_back(entry.path());
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace sed
