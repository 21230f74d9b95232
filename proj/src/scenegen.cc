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

#include "sed/scenegen.h"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "sed/augment.h"
#include "sed/error.h"

namespace sed {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr int kNoiseComponents = 64;
constexpr int kMaxOnsetRetries = 1000;

void ApplyRamps(std::vector<double>& x, double attack_s, double release_s,
                int sample_rate) {
  const size_t n = x.size();
  const size_t a = std::min(n, static_cast<size_t>(std::lround(attack_s * sample_rate)));
  const size_t r = std::min(n, static_cast<size_t>(std::lround(release_s * sample_rate)));
  for (size_t i = 0; i < a; ++i) x[i] *= static_cast<double>(i) / a;
  for (size_t i = 0; i < r; ++i) x[n - 1 - i] *= static_cast<double>(i) / r;
}

void NormalizePeak(std::vector<double>& x, double peak) {
  double m = 0.0;
  for (double v : x) m = std::max(m, std::abs(v));
  if (m > 0.0) {
    for (double& v : x) v *= peak / m;
  }
}

AudioClip LoadSnippet(const std::filesystem::path& path, size_t n,
                      int sample_rate) {
  AudioClip src = ReadWav(path);
  if (src.sample_rate != sample_rate) {
    Fail(ErrorKind::kConfig, path.string() + ": sample rate " +
                                 std::to_string(src.sample_rate) +
                                 " differs from scene rate");
  }
  if (src.samples.empty()) Fail(ErrorKind::kConfig, path.string() + " is empty");
  AudioClip out;
  out.sample_rate = sample_rate;
  out.samples.resize(n);
  for (size_t i = 0; i < n; ++i) out.samples[i] = src.samples[i % src.samples.size()];
  return out;
}

}  // namespace

uint64_t MixSeed(uint64_t seed, uint64_t stream) {
  uint64_t z = seed + 0x9E3779B97F4A7C15ull * (stream + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

TemplateKind ParseTemplateKind(const std::string& name) {
  if (name == "tone_burst") return TemplateKind::kToneBurst;
  if (name == "chirp") return TemplateKind::kChirp;
  if (name == "noise_burst") return TemplateKind::kNoiseBurst;
  if (name == "click_train") return TemplateKind::kClickTrain;
  if (name == "wav_snippet") return TemplateKind::kWavSnippet;
  Fail(ErrorKind::kConfig, "unknown template kind '" + name + "'");
}

const char* TemplateKindName(TemplateKind kind) {
  switch (kind) {
    case TemplateKind::kToneBurst: return "tone_burst";
    case TemplateKind::kChirp: return "chirp";
    case TemplateKind::kNoiseBurst: return "noise_burst";
    case TemplateKind::kClickTrain: return "click_train";
    case TemplateKind::kWavSnippet: return "wav_snippet";
  }
  return "?";
}

Catalog::Catalog(std::vector<EventTemplate> templates)
    : templates_(std::move(templates)) {
  for (size_t i = 0; i < templates_.size(); ++i) {
    if (templates_[i].id.empty()) Fail(ErrorKind::kConfig, "template without id");
    if (templates_[i].label.empty()) {
      Fail(ErrorKind::kConfig, "template '" + templates_[i].id + "' has no label");
    }
    for (size_t j = 0; j < i; ++j) {
      if (templates_[j].id == templates_[i].id) {
        Fail(ErrorKind::kConfig, "duplicate template id '" + templates_[i].id + "'");
      }
    }
  }
}

const EventTemplate& Catalog::Get(const std::string& id) const {
  for (const auto& t : templates_) {
    if (t.id == id) return t;
  }
  Fail(ErrorKind::kConfig, "unknown template id '" + id + "'");
}

Vocabulary Catalog::MakeVocabulary() const {
  std::vector<std::string> labels;
  for (const auto& t : templates_) {
    if (std::find(labels.begin(), labels.end(), t.label) == labels.end()) {
      labels.push_back(t.label);
    }
  }
  return Vocabulary(std::move(labels));
}

void ValidateTemplate(const EventTemplate& t, int sample_rate) {
  const double nyquist = sample_rate / 2.0;
  const std::string who = "template '" + t.id + "': ";
  if (!(t.duration_s > 0.0)) Fail(ErrorKind::kConfig, who + "duration must be > 0");
  if (t.attack_s < 0.0 || t.release_s < 0.0 ||
      t.attack_s + t.release_s > t.duration_s) {
    Fail(ErrorKind::kConfig, who + "ramps must fit inside the duration");
  }
  auto check_freq = [&](double f, const char* name) {
    if (!(f > 0.0) || f >= nyquist) {
      Fail(ErrorKind::kConfig, who + name + " must be in (0, Nyquist)");
    }
  };
  switch (t.kind) {
    case TemplateKind::kToneBurst:
    case TemplateKind::kClickTrain:
      check_freq(t.frequency_hz, "frequency_hz");
      break;
    case TemplateKind::kChirp:
      check_freq(t.frequency_hz, "frequency_hz");
      check_freq(t.end_frequency_hz, "end_frequency_hz");
      break;
    case TemplateKind::kNoiseBurst:
      if (t.bandwidth_hz < 0.0) Fail(ErrorKind::kConfig, who + "negative bandwidth");
      if (t.bandwidth_hz > 0.0) {
        check_freq(t.frequency_hz, "frequency_hz");
        if (t.frequency_hz + t.bandwidth_hz / 2.0 >= nyquist) {
          Fail(ErrorKind::kConfig, who + "noise band reaches Nyquist");
        }
      }
      break;
    case TemplateKind::kWavSnippet:
      if (t.wav_path.empty()) Fail(ErrorKind::kConfig, who + "wav_path missing");
      break;
  }
}

AudioClip RenderTemplate(const EventTemplate& t, int sample_rate,
                         std::mt19937_64& rng) {
  ValidateTemplate(t, sample_rate);
  const size_t n = static_cast<size_t>(std::lround(t.duration_s * sample_rate));
  if (n == 0) Fail(ErrorKind::kConfig, "template '" + t.id + "' is shorter than a sample");
  const double sr = sample_rate;
  AudioClip out;
  out.sample_rate = sample_rate;
  auto& x = out.samples;
  x.assign(n, 0.0);
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  switch (t.kind) {
    case TemplateKind::kToneBurst:
      for (size_t i = 0; i < n; ++i) x[i] = std::sin(kTwoPi * t.frequency_hz * i / sr);
      break;
    case TemplateKind::kChirp: {
      const double rate = (t.end_frequency_hz - t.frequency_hz) / t.duration_s;
      for (size_t i = 0; i < n; ++i) {
        const double time = i / sr;
        x[i] = std::sin(kTwoPi * (t.frequency_hz * time + 0.5 * rate * time * time));
      }
      break;
    }
    case TemplateKind::kNoiseBurst:
      if (t.bandwidth_hz == 0.0) {
        std::normal_distribution<double> gauss(0.0, 1.0);
        for (auto& v : x) v = gauss(rng);
      } else {
        const double lo = std::max(1.0, t.frequency_hz - t.bandwidth_hz / 2.0);
        const double hi = t.frequency_hz + t.bandwidth_hz / 2.0;
        for (int c = 0; c < kNoiseComponents; ++c) {
          const double f = lo + (hi - lo) * unit(rng);
          const double phase = kTwoPi * unit(rng);
          for (size_t i = 0; i < n; ++i) x[i] += std::sin(kTwoPi * f * i / sr + phase);
        }
      }
      break;
    case TemplateKind::kClickTrain: {
      // Each click is a 5 ms exponentially decaying noise impulse.
      std::normal_distribution<double> gauss(0.0, 1.0);
      const size_t period = std::max<size_t>(1, std::lround(sr / t.frequency_hz));
      const size_t click = std::max<size_t>(1, std::lround(0.005 * sr));
      for (size_t start = 0; start < n; start += period) {
        for (size_t j = 0; j < click && start + j < n; ++j) {
          x[start + j] += gauss(rng) * std::exp(-5.0 * j / click);
        }
      }
      break;
    }
    case TemplateKind::kWavSnippet:
      x = LoadSnippet(t.wav_path, n, sample_rate).samples;
      break;
  }
  NormalizePeak(x, 0.5);
  ApplyRamps(x, t.attack_s, t.release_s, sample_rate);
  return out;
}

EventList PlacementEvents(const SceneSpec& spec, const Catalog& catalog) {
  EventList events;
  for (const auto& p : spec.placements) {
    const auto& t = catalog.Get(p.template_id);
    events.push_back({p.onset_s, p.onset_s + t.duration_s, t.label});
  }
  SortEvents(events);
  return events;
}

SceneStems RenderSceneStems(const SceneSpec& spec, const Catalog& catalog) {
  if (!(spec.duration_s > 0.0) || spec.sample_rate <= 0) {
    Fail(ErrorKind::kConfig, "scene needs positive duration and sample rate");
  }
  if (!(spec.background.level > 0.0)) {
    Fail(ErrorKind::kConfig, "background level must be > 0 for SNR scaling");
  }
  const size_t n = static_cast<size_t>(std::lround(spec.duration_s * spec.sample_rate));
  SceneStems stems;

  std::mt19937_64 bg_rng(MixSeed(spec.seed, 0));
  if (spec.background.kind == Background::Kind::kWhiteNoise) {
    stems.background.sample_rate = spec.sample_rate;
    stems.background.samples.resize(n);
    std::normal_distribution<double> gauss(0.0, 1.0);
    for (auto& v : stems.background.samples) v = gauss(bg_rng);
  } else {
    stems.background = LoadSnippet(spec.background.wav_path, n, spec.sample_rate);
  }
  {
    auto& bg = stems.background.samples;
    const double rms = std::sqrt(MeanSquare(bg.data(), bg.size()));
    if (!(rms > 0.0)) Fail(ErrorKind::kDegenerate, "silent background");
    for (auto& v : bg) v *= spec.background.level / rms;
  }

  for (size_t i = 0; i < spec.placements.size(); ++i) {
    const Placement& p = spec.placements[i];
    const EventTemplate& t = catalog.Get(p.template_id);
    if (p.onset_s < 0.0 || p.onset_s + t.duration_s > spec.duration_s + 1e-9) {
      Fail(ErrorKind::kConfig, "placement " + std::to_string(i) + " ('" +
                                   p.template_id + "' at " +
                                   std::to_string(p.onset_s) +
                                   " s) exceeds the scene duration");
    }
    std::mt19937_64 ev_rng(MixSeed(spec.seed, i + 1));
    AudioClip ev = RenderTemplate(t, spec.sample_rate, ev_rng);
    const size_t start = std::min(
        n, static_cast<size_t>(std::lround(p.onset_s * spec.sample_rate)));
    if (start + ev.samples.size() > n) ev.samples.resize(n - start);
    if (ev.samples.empty()) Fail(ErrorKind::kConfig, "placement renders no samples");

    const double p_event = MeanSquare(ev.samples.data(), ev.samples.size());
    const double p_bg =
        MeanSquare(stems.background.samples.data() + start, ev.samples.size());
    if (!(p_event > 0.0)) {
      Fail(ErrorKind::kDegenerate, "template '" + t.id + "' renders silence");
    }
    const double gain = std::sqrt(p_bg * std::pow(10.0, p.snr_db / 10.0) / p_event);
    for (auto& v : ev.samples) v *= gain;
    stems.events.push_back(std::move(ev));
    stems.onset_samples.push_back(start);
  }
  return stems;
}

Scene SynthesizeScene(const SceneSpec& spec, const Catalog& catalog) {
  SceneStems stems = RenderSceneStems(spec, catalog);
  Scene scene;
  scene.audio = std::move(stems.background);
  auto& mix = scene.audio.samples;
  for (size_t i = 0; i < stems.events.size(); ++i) {
    const auto& ev = stems.events[i].samples;
    for (size_t j = 0; j < ev.size(); ++j) mix[stems.onset_samples[i] + j] += ev[j];
  }
  double peak = 0.0;
  for (double v : mix) peak = std::max(peak, std::abs(v));
  if (peak > 0.0) {
    scene.normalization_gain = 0.99 / peak;
    for (double& v : mix) v *= scene.normalization_gain;
  }
  scene.events = PlacementEvents(spec, catalog);
  return scene;
}

int MaxPolyphony(const EventList& events) {
  std::vector<std::pair<double, int>> edges;
  for (const auto& e : events) {
    edges.emplace_back(e.onset_s, +1);
    edges.emplace_back(e.offset_s, -1);
  }
  // Offsets sort before onsets at equal times: touching events do not overlap.
  std::sort(edges.begin(), edges.end());
  int cur = 0, best = 0;
  for (const auto& [time, delta] : edges) {
    cur += delta;
    best = std::max(best, cur);
  }
  return best;
}

SceneSpec SampleSceneSpec(std::mt19937_64& rng, const Catalog& catalog,
                          const SceneSamplingParams& params) {
  if (params.min_events < 0 || params.max_events < params.min_events) {
    Fail(ErrorKind::kConfig, "need 0 <= min_events <= max_events");
  }
  if (params.max_polyphony < 1) Fail(ErrorKind::kConfig, "max_polyphony must be >= 1");
  if (params.snr_max_db < params.snr_min_db) Fail(ErrorKind::kConfig, "empty SNR range");
  if (params.max_events > 0 && catalog.templates().empty()) {
    Fail(ErrorKind::kConfig, "empty catalog");
  }
  for (const auto& t : catalog.templates()) {
    if (t.duration_s > params.duration_s) {
      Fail(ErrorKind::kConfig, "template '" + t.id + "' is longer than the scene");
    }
  }

  SceneSpec spec;
  spec.duration_s = params.duration_s;
  spec.sample_rate = params.sample_rate;
  spec.background = params.background;
  spec.seed = rng();

  std::uniform_int_distribution<int> count_dist(params.min_events, params.max_events);
  const int count = count_dist(rng);
  EventList placed;
  for (int i = 0; i < count; ++i) {
    std::uniform_int_distribution<size_t> pick(0, catalog.templates().size() - 1);
    const EventTemplate& t = catalog.templates()[pick(rng)];
    std::uniform_real_distribution<double> snr(params.snr_min_db, params.snr_max_db);
    const double snr_db = snr(rng);
    const long max_ms = static_cast<long>(
        std::floor((params.duration_s - t.duration_s) * 1000.0 + 1e-6));
    std::uniform_int_distribution<long> onset_ms(0, std::max(0L, max_ms));
    bool ok = false;
    for (int attempt = 0; attempt < kMaxOnsetRetries && !ok; ++attempt) {
      const double onset = static_cast<double>(onset_ms(rng)) / 1000.0;
      EventList trial = placed;
      trial.push_back({onset, onset + t.duration_s, t.label});
      if (MaxPolyphony(trial) <= params.max_polyphony) {
        placed = std::move(trial);
        spec.placements.push_back({t.id, onset, snr_db});
        ok = true;
      }
    }
    if (!ok) {
      Fail(ErrorKind::kSampling, "could not place event " + std::to_string(i) +
                                     " within polyphony " +
                                     std::to_string(params.max_polyphony) +
                                     " after " + std::to_string(kMaxOnsetRetries) +
                                     " retries");
    }
  }
  return spec;
}

}  // namespace sed
