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
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "sed/audio_io.h"
#include "sed/matrix.h"

namespace sed {

struct FeatureConfig {
  double window_len_s = 0.040;
  double hop_len_s = 0.020;
  int n_mels = 40;
  double fmin = 0.0;
  std::optional<double> fmax;  // unset means Nyquist
  double log_floor = 1e-10;

  double FmaxFor(int sample_rate) const {
    return fmax.value_or(sample_rate / 2.0);
  }
  int WindowSamples(int sample_rate) const;
  int HopSamples(int sample_rate) const;
  void Validate(int sample_rate) const;
};

// Log-mel energies: values(t, b) for frame t and band b.
struct FeatureMatrix {
  Matrix values;
  double hop_len_s = 0.020;
  double window_len_s = 0.040;

  size_t num_frames() const { return values.rows; }
  size_t num_bands() const { return values.cols; }
};

struct MelFilterbank {
  Matrix weights;  // bands x (n_fft/2 + 1)
  std::vector<double> band_centers_hz;
};

// mel(f) = 1000/ln2 * ln(1 + f/1000). 1000 Hz maps to 1000 mel.
double HzToMel(double hz);
double MelToHz(double mel);

// Hann-windowed, unpadded frames; returns T x (W/2 + 1) power |X(k)|^2.
Matrix PowerSpectrogram(const AudioClip& clip, double window_len_s,
                        double hop_len_s);

MelFilterbank BuildMelFilterbank(const FeatureConfig& cfg, int n_fft,
                                 int sample_rate);

FeatureMatrix LogMel(const AudioClip& clip, const FeatureConfig& cfg);

// "SEDF" container: magic, u32 version, u32 T, u32 B, f64 hop, f64 window,
// then T*B f32 values frame-major.
std::string EncodeSedf(const FeatureMatrix& features);
FeatureMatrix DecodeSedf(std::string_view bytes);
void WriteSedf(const FeatureMatrix& features, const std::filesystem::path& path);
FeatureMatrix ReadSedf(const std::filesystem::path& path);

}  // namespace sed
