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

#include "sed/audio_io.h"

#include <algorithm>
#include <cmath>
#include <cstdint>

#include "sed/error.h"
#include "sed/fileutil.h"

namespace sed {

void ValidateClip(const AudioClip& clip) {
  if (clip.sample_rate <= 0) {
    Fail(ErrorKind::kConfig, "sample rate must be positive");
  }
  for (double s : clip.samples) {
    if (!std::isfinite(s)) Fail(ErrorKind::kConfig, "non-finite sample");
  }
}

AudioClip DecodeWav(std::string_view bytes) {
  ByteReader rd(bytes, "WAV");
  if (rd.remaining() < 12 || rd.Bytes(4) != "RIFF") {
    Fail(ErrorKind::kFormat, "missing RIFF magic");
  }
  rd.U32();  // RIFF size; often wrong in the wild, so chunks drive parsing
  if (rd.Bytes(4) != "WAVE") Fail(ErrorKind::kFormat, "missing WAVE tag");

  bool have_fmt = false;
  uint16_t channels = 0;
  uint32_t rate = 0;
  uint16_t bits = 0;
  while (rd.remaining() >= 8) {
    std::string_view id = rd.Bytes(4);
    uint32_t size = rd.U32();
    if (id == "fmt ") {
      if (size < 16) Fail(ErrorKind::kFormat, "fmt chunk too short");
      ByteReader fmt(rd.Bytes(size), "WAV fmt chunk");
      uint16_t tag = fmt.U16();
      channels = fmt.U16();
      rate = fmt.U32();
      fmt.U32();  // byte rate
      fmt.U16();  // block align
      bits = fmt.U16();
      if (tag == 0xFFFE && size >= 40) {
        fmt.U16();  // cbSize
        fmt.U16();  // valid bits
        fmt.U32();  // channel mask
        tag = fmt.U16();  // first two bytes of the subformat GUID
      }
      if (tag != 1) {
        Fail(ErrorKind::kUnsupported,
             "only PCM is supported (format tag " + std::to_string(tag) + ")");
      }
      if (bits != 16) {
        Fail(ErrorKind::kUnsupported,
             "only 16-bit samples are supported, got " + std::to_string(bits));
      }
      if (channels != 1 && channels != 2) {
        Fail(ErrorKind::kUnsupported,
             std::to_string(channels) + " channels not supported");
      }
      if (rate == 0) Fail(ErrorKind::kFormat, "zero sample rate");
      have_fmt = true;
      if (size % 2 == 1 && rd.remaining() > 0) rd.U8();
    } else if (id == "data") {
      if (!have_fmt) Fail(ErrorKind::kFormat, "data chunk before fmt chunk");
      if (size > rd.remaining()) Fail(ErrorKind::kFormat, "truncated data chunk");
      size_t frame_bytes = 2u * channels;
      size_t frames = size / frame_bytes;
      ByteReader data(rd.Bytes(size), "WAV data chunk");
      AudioClip clip;
      clip.sample_rate = static_cast<int>(rate);
      clip.samples.resize(frames);
      for (size_t i = 0; i < frames; ++i) {
        double acc = 0.0;
        for (uint16_t c = 0; c < channels; ++c) {
          acc += static_cast<int16_t>(data.U16()) / 32768.0;
        }
        clip.samples[i] = acc / channels;
      }
      return clip;
    } else {
      rd.Bytes(std::min<size_t>(size + (size % 2), rd.remaining()));
    }
  }
  Fail(ErrorKind::kFormat, have_fmt ? "no data chunk" : "no fmt chunk");
}

AudioClip ReadWav(const std::filesystem::path& path) {
  try {
    return DecodeWav(ReadFileBytes(path));
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::kIo) throw;
    throw Error(e.kind(), path.string() + ": " + e.what());
  }
}

std::string EncodeWav(const AudioClip& clip) {
  ValidateClip(clip);
  const uint32_t data_bytes = static_cast<uint32_t>(clip.samples.size() * 2);
  ByteWriter w;
  w.Bytes("RIFF");
  w.U32(36 + data_bytes);
  w.Bytes("WAVE");
  w.Bytes("fmt ");
  w.U32(16);
  w.U16(1);
  w.U16(1);
  w.U32(static_cast<uint32_t>(clip.sample_rate));
  w.U32(static_cast<uint32_t>(clip.sample_rate) * 2);
  w.U16(2);
  w.U16(16);
  w.Bytes("data");
  w.U32(data_bytes);
  for (double s : clip.samples) {
    // Scaling by 32768 (the read-side divisor) keeps the round-trip error
    // within one quantization step; +1.0 saturates at 32767.
    double v = std::round(std::clamp(s, -1.0, 1.0) * 32768.0);
    v = std::clamp(v, -32768.0, 32767.0);
    w.U16(static_cast<uint16_t>(static_cast<int16_t>(v)));
  }
  return w.str();
}

void WriteWav(const AudioClip& clip, const std::filesystem::path& path) {
  WriteFileAtomic(path, EncodeWav(clip));
}

}  // namespace sed
