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

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace sed {

// Mono signal. Samples are nominally in [-1, 1].
struct AudioClip {
  std::vector<double> samples;
  int sample_rate = 16000;

  double duration_s() const {
    return static_cast<double>(samples.size()) / sample_rate;
  }
};

// Throws kConfig if the sample rate is not positive or a sample is not
// finite.
void ValidateClip(const AudioClip& clip);

// RIFF/WAVE PCM-16, mono or stereo (stereo is averaged per frame).
AudioClip DecodeWav(std::string_view bytes);
AudioClip ReadWav(const std::filesystem::path& path);

// PCM-16 mono; samples are clamped to [-1, 1], scaled by 32768 and
// saturated to the int16 range (so +1.0 is stored as 32767).
std::string EncodeWav(const AudioClip& clip);
void WriteWav(const AudioClip& clip, const std::filesystem::path& path);

}  // namespace sed
