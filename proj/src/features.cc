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

#include "sed/features.h"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <memory>
#include <mutex>
#include <numbers>

#include "sed/error.h"
#include "sed/fileutil.h"

namespace sed {

namespace {

constexpr double kMelScale = 1000.0 / std::numbers::ln2;

// FFTW's planner is not reentrant.
std::mutex& PlannerMutex() {
  static std::mutex m;
  return m;
}

class RealFft {
 public:
  explicit RealFft(int n) : n_(n) {
    in_ = static_cast<double*>(fftw_malloc(sizeof(double) * n));
    out_ = static_cast<fftw_complex*>(
        fftw_malloc(sizeof(fftw_complex) * (n / 2 + 1)));
    std::lock_guard<std::mutex> lock(PlannerMutex());
    plan_ = fftw_plan_dft_r2c_1d(n, in_, out_, FFTW_ESTIMATE);
  }
  ~RealFft() {
    {
      std::lock_guard<std::mutex> lock(PlannerMutex());
      fftw_destroy_plan(plan_);
    }
    fftw_free(in_);
    fftw_free(out_);
  }
  RealFft(const RealFft&) = delete;
  RealFft& operator=(const RealFft&) = delete;

  double* input() { return in_; }
  void PowerInto(double* dst) {
    fftw_execute(plan_);
    for (int k = 0; k <= n_ / 2; ++k) {
      dst[k] = out_[k][0] * out_[k][0] + out_[k][1] * out_[k][1];
    }
  }

 private:
  int n_;
  double* in_;
  fftw_complex* out_;
  fftw_plan plan_;
};

}  // namespace

int FeatureConfig::WindowSamples(int sample_rate) const {
  return static_cast<int>(std::lround(window_len_s * sample_rate));
}

int FeatureConfig::HopSamples(int sample_rate) const {
  return static_cast<int>(std::lround(hop_len_s * sample_rate));
}

void FeatureConfig::Validate(int sample_rate) const {
  if (!(hop_len_s > 0.0) || hop_len_s > window_len_s) {
    Fail(ErrorKind::kConfig, "need 0 < hop_len_s <= window_len_s");
  }
  if (n_mels < 1) Fail(ErrorKind::kConfig, "n_mels must be >= 1");
  const double hi = FmaxFor(sample_rate);
  if (fmin < 0.0 || !(fmin < hi) || hi > sample_rate / 2.0) {
    Fail(ErrorKind::kConfig, "need 0 <= fmin < fmax <= sample_rate/2");
  }
  if (!(log_floor > 0.0)) Fail(ErrorKind::kConfig, "log_floor must be > 0");
  if (WindowSamples(sample_rate) < 2 || HopSamples(sample_rate) < 1) {
    Fail(ErrorKind::kConfig, "window shorter than two samples");
  }
}

double HzToMel(double hz) {
  if (hz < 0.0 || std::isnan(hz)) {
    Fail(ErrorKind::kDomain, "negative frequency");
  }
  return kMelScale * std::log1p(hz / 1000.0);
}

double MelToHz(double mel) {
  if (mel < 0.0 || std::isnan(mel)) Fail(ErrorKind::kDomain, "negative mel");
  return 1000.0 * std::expm1(mel / kMelScale);
}

Matrix PowerSpectrogram(const AudioClip& clip, double window_len_s,
                        double hop_len_s) {
  const int win = static_cast<int>(std::lround(window_len_s * clip.sample_rate));
  const int hop = static_cast<int>(std::lround(hop_len_s * clip.sample_rate));
  if (win < 2 || hop < 1) Fail(ErrorKind::kConfig, "window/hop too short");
  const size_t n = clip.samples.size();
  if (n < static_cast<size_t>(win)) {
    Fail(ErrorKind::kEmpty, "clip of " + std::to_string(n) +
                                " samples is shorter than one window (" +
                                std::to_string(win) + ")");
  }
  const size_t frames = (n - win) / hop + 1;
  const size_t bins = win / 2 + 1;

  std::vector<double> window(win);
  for (int i = 0; i < win; ++i) {
    window[i] = 0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * i / win);
  }

  Matrix power(frames, bins);
  RealFft fft(win);
  for (size_t t = 0; t < frames; ++t) {
    const double* src = clip.samples.data() + t * hop;
    double* in = fft.input();
    for (int i = 0; i < win; ++i) in[i] = src[i] * window[i];
    fft.PowerInto(power.row(t));
  }
  return power;
}

MelFilterbank BuildMelFilterbank(const FeatureConfig& cfg, int n_fft,
                                 int sample_rate) {
  cfg.Validate(sample_rate);
  const int bands = cfg.n_mels;
  const size_t bins = n_fft / 2 + 1;
  const double mel_lo = HzToMel(cfg.fmin);
  const double mel_hi = HzToMel(cfg.FmaxFor(sample_rate));

  std::vector<double> edges(bands + 2);
  for (int i = 0; i < bands + 2; ++i) {
    edges[i] = MelToHz(mel_lo + (mel_hi - mel_lo) * i / (bands + 1));
  }

  MelFilterbank fb;
  fb.weights = Matrix(bands, bins);
  fb.band_centers_hz.assign(edges.begin() + 1, edges.end() - 1);
  for (int b = 0; b < bands; ++b) {
    const double lo = edges[b], peak = edges[b + 1], hi = edges[b + 2];
    bool any = false;
    for (size_t k = 0; k < bins; ++k) {
      const double f = static_cast<double>(k) * sample_rate / n_fft;
      double w = 0.0;
      if (f > lo && f <= peak) {
        w = (f - lo) / (peak - lo);
      } else if (f > peak && f < hi) {
        w = (hi - f) / (hi - peak);
      }
      fb.weights(b, k) = w;
      any = any || w > 0.0;
    }
    if (!any) {
      Fail(ErrorKind::kConfig,
           "mel band " + std::to_string(b) + " has no spectral bins; reduce "
           "n_mels or lengthen the window");
    }
  }
  return fb;
}

FeatureMatrix LogMel(const AudioClip& clip, const FeatureConfig& cfg) {
  cfg.Validate(clip.sample_rate);
  const int win = cfg.WindowSamples(clip.sample_rate);
  const Matrix power = PowerSpectrogram(clip, cfg.window_len_s, cfg.hop_len_s);
  const MelFilterbank fb = BuildMelFilterbank(cfg, win, clip.sample_rate);

  FeatureMatrix out;
  out.hop_len_s = cfg.hop_len_s;
  out.window_len_s = cfg.window_len_s;
  out.values = Matrix(power.rows, fb.weights.rows);
  for (size_t t = 0; t < power.rows; ++t) {
    const double* p = power.row(t);
    for (size_t b = 0; b < fb.weights.rows; ++b) {
      const double* w = fb.weights.row(b);
      double acc = 0.0;
      for (size_t k = 0; k < power.cols; ++k) acc += w[k] * p[k];
      out.values(t, b) = std::log(std::max(acc, cfg.log_floor));
    }
  }
  return out;
}

std::string EncodeSedf(const FeatureMatrix& features) {
  ByteWriter w;
  w.Bytes("SEDF");
  w.U32(1);
  w.U32(static_cast<uint32_t>(features.num_frames()));
  w.U32(static_cast<uint32_t>(features.num_bands()));
  w.F64(features.hop_len_s);
  w.F64(features.window_len_s);
  for (double v : features.values.data) w.F32(static_cast<float>(v));
  return w.str();
}

FeatureMatrix DecodeSedf(std::string_view bytes) {
  ByteReader rd(bytes, "SEDF");
  if (rd.remaining() < 4 || rd.Bytes(4) != "SEDF") {
    Fail(ErrorKind::kFormat, "missing SEDF magic");
  }
  const uint32_t version = rd.U32();
  if (version != 1) {
    Fail(ErrorKind::kUnsupported, "SEDF version " + std::to_string(version));
  }
  const uint32_t frames = rd.U32();
  const uint32_t bands = rd.U32();
  FeatureMatrix out;
  out.hop_len_s = rd.F64();
  out.window_len_s = rd.F64();
  const uint64_t count = static_cast<uint64_t>(frames) * bands;
  if (rd.remaining() != count * 4) {
    Fail(ErrorKind::kFormat, "SEDF payload size does not match header");
  }
  out.values = Matrix(frames, bands);
  for (auto& v : out.values.data) v = rd.F32();
  return out;
}

void WriteSedf(const FeatureMatrix& features,
               const std::filesystem::path& path) {
  WriteFileAtomic(path, EncodeSedf(features));
}

FeatureMatrix ReadSedf(const std::filesystem::path& path) {
  return DecodeSedf(ReadFileBytes(path));
}

}  // namespace sed
