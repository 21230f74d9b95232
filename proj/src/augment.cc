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

#include "sed/augment.h"

#include <algorithm>
#include <cmath>
#include <map>

#include "sed/error.h"

namespace sed {

SoftTargetMatrix RollToSoftTargets(const EventRoll& roll) {
  SoftTargetMatrix y(roll.num_classes(), roll.num_segments);
  for (size_t i = 0; i < roll.activity.size(); ++i) y.data[i] = roll.activity[i];
  return y;
}

std::pair<AudioClip, EventList> TimeStretch(const AudioClip& clip,
                                            const EventList& events,
                                            double factor) {
  if (!(factor > 0.0) || !std::isfinite(factor)) {
    Fail(ErrorKind::kDomain, "stretch factor must be positive");
  }
  AudioClip out;
  out.sample_rate = clip.sample_rate;
  const size_t n = clip.samples.size();
  const size_t m =
      static_cast<size_t>(std::llround(static_cast<double>(n) * factor));
  out.samples.resize(n == 0 ? 0 : m);
  for (size_t i = 0; i < out.samples.size(); ++i) {
    const double pos = static_cast<double>(i) / factor;
    const size_t i0 = std::min(static_cast<size_t>(pos), n - 1);
    const size_t i1 = std::min(i0 + 1, n - 1);
    const double frac = std::clamp(pos - static_cast<double>(i0), 0.0, 1.0);
    out.samples[i] = frac == 0.0 ? clip.samples[i0]
                                 : (1.0 - frac) * clip.samples[i0] +
                                       frac * clip.samples[i1];
  }
  EventList stretched = events;
  for (auto& e : stretched) {
    e.onset_s *= factor;
    e.offset_s *= factor;
  }
  return {std::move(out), std::move(stretched)};
}

std::pair<AudioClip, EventRoll> BlockMix(const AudioClip& clip_a,
                                         const EventRoll& roll_a,
                                         const AudioClip& clip_b,
                                         const EventRoll& roll_b) {
  if (clip_a.samples.size() != clip_b.samples.size() ||
      clip_a.sample_rate != clip_b.sample_rate) {
    Fail(ErrorKind::kDimension, "block mix needs equal length and rate");
  }
  if (!roll_a.SameShape(roll_b)) {
    Fail(ErrorKind::kDimension, "block mix needs identical roll shapes");
  }
  AudioClip mixed;
  mixed.sample_rate = clip_a.sample_rate;
  mixed.samples.resize(clip_a.samples.size());
  for (size_t i = 0; i < mixed.samples.size(); ++i) {
    mixed.samples[i] = 0.5 * (clip_a.samples[i] + clip_b.samples[i]);
  }
  EventRoll roll = roll_a;
  for (size_t i = 0; i < roll.activity.size(); ++i) {
    roll.activity[i] = roll_a.activity[i] | roll_b.activity[i];
  }
  return {std::move(mixed), std::move(roll)};
}

EventList UnionEvents(const EventList& a, const EventList& b) {
  std::map<std::string, EventList> by_label;
  for (const auto* list : {&a, &b}) {
    for (const auto& e : *list) by_label[e.label].push_back(e);
  }
  EventList out;
  for (auto& [label, evs] : by_label) {
    SortEvents(evs);
    EventInstance cur = evs.front();
    for (size_t i = 1; i < evs.size(); ++i) {
      if (evs[i].onset_s <= cur.offset_s) {
        cur.offset_s = std::max(cur.offset_s, evs[i].offset_s);
      } else {
        out.push_back(cur);
        cur = evs[i];
      }
    }
    out.push_back(cur);
  }
  SortEvents(out);
  return out;
}

std::pair<FeatureMatrix, SoftTargetMatrix> Mixup(const FeatureMatrix& x_a,
                                                 const SoftTargetMatrix& y_a,
                                                 const FeatureMatrix& x_b,
                                                 const SoftTargetMatrix& y_b,
                                                 double lambda) {
  if (x_a.values.rows != x_b.values.rows || x_a.values.cols != x_b.values.cols ||
      y_a.rows != y_b.rows || y_a.cols != y_b.cols) {
    Fail(ErrorKind::kDimension, "mixup operands differ in shape");
  }
  if (!(lambda >= 0.0 && lambda <= 1.0)) {
    Fail(ErrorKind::kDomain, "mixup lambda must be in [0, 1]");
  }
  const double mu = 1.0 - lambda;
  FeatureMatrix x = x_a;
  for (size_t i = 0; i < x.values.data.size(); ++i) {
    x.values.data[i] = lambda * x_a.values.data[i] + mu * x_b.values.data[i];
  }
  SoftTargetMatrix y = y_a;
  for (size_t i = 0; i < y.data.size(); ++i) {
    y.data[i] = lambda * y_a.data[i] + mu * y_b.data[i];
  }
  return {std::move(x), std::move(y)};
}

double MeanSquare(const double* samples, size_t n) {
  if (n == 0) return 0.0;
  double acc = 0.0;
  for (size_t i = 0; i < n; ++i) acc += samples[i] * samples[i];
  return acc / static_cast<double>(n);
}

AudioClip AddNoiseAtSnr(const AudioClip& clip, const AudioClip& noise,
                        double snr_db) {
  if (clip.sample_rate != noise.sample_rate) {
    Fail(ErrorKind::kConfig, "noise sample rate differs from clip");
  }
  const size_t n = clip.samples.size();
  if (noise.samples.size() < n) {
    Fail(ErrorKind::kConfig, "noise shorter than clip");
  }
  if (std::isinf(snr_db) && snr_db > 0.0) return clip;
  const double p_clip = MeanSquare(clip.samples.data(), n);
  const double p_noise = MeanSquare(noise.samples.data(), n);
  if (!(p_clip > 0.0) || !(p_noise > 0.0)) {
    Fail(ErrorKind::kDegenerate, "clip and noise need nonzero power");
  }
  const double gain = std::sqrt(p_clip / (p_noise * std::pow(10.0, snr_db / 10.0)));
  AudioClip out = clip;
  for (size_t i = 0; i < n; ++i) out.samples[i] += gain * noise.samples[i];
  return out;
}

double SampleBeta(double alpha, double beta, std::mt19937_64& rng) {
  std::gamma_distribution<double> ga(alpha, 1.0), gb(beta, 1.0);
  const double x = ga(rng);
  const double y = gb(rng);
  if (x + y == 0.0) return 0.5;
  return x / (x + y);
}

}  // namespace sed
