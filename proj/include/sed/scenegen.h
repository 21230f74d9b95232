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
#include <random>
#include <string>
#include <vector>

#include "sed/annotations.h"
#include "sed/audio_io.h"

namespace sed {

enum class TemplateKind { kToneBurst, kChirp, kNoiseBurst, kClickTrain, kWavSnippet };

TemplateKind ParseTemplateKind(const std::string& name);
const char* TemplateKindName(TemplateKind kind);

// Parametric event source. Field use by kind:
//   tone_burst   frequency_hz
//   chirp        frequency_hz -> end_frequency_hz (linear sweep)
//   noise_burst  frequency_hz +- bandwidth_hz/2; bandwidth 0 means white
//   click_train  frequency_hz is the click rate
//   wav_snippet  wav_path, first duration_s seconds
struct EventTemplate {
  std::string id;
  TemplateKind kind = TemplateKind::kToneBurst;
  std::string label;
  double duration_s = 1.0;
  double frequency_hz = 440.0;
  double end_frequency_hz = 0.0;
  double bandwidth_hz = 0.0;
  double attack_s = 0.01;
  double release_s = 0.01;
  std::filesystem::path wav_path;
};

class Catalog {
 public:
  Catalog() = default;
  explicit Catalog(std::vector<EventTemplate> templates);
  const EventTemplate& Get(const std::string& id) const;
  const std::vector<EventTemplate>& templates() const { return templates_; }
  // Distinct labels in first-appearance order.
  Vocabulary MakeVocabulary() const;

 private:
  std::vector<EventTemplate> templates_;
};

struct Background {
  enum class Kind { kWhiteNoise, kWavSnippet };
  Kind kind = Kind::kWhiteNoise;
  double level = 0.01;  // RMS of the rendered background
  std::filesystem::path wav_path;
};

struct Placement {
  std::string template_id;
  double onset_s = 0.0;
  double snr_db = 10.0;  // event power over background power on its extent
  bool operator==(const Placement&) const = default;
};

struct SceneSpec {
  double duration_s = 10.0;
  int sample_rate = 16000;
  Background background;
  std::vector<Placement> placements;
  uint64_t seed = 0;
};

void ValidateTemplate(const EventTemplate& t, int sample_rate);

// Deterministic for a given rng state; linear attack/release ramps.
AudioClip RenderTemplate(const EventTemplate& t, int sample_rate,
                         std::mt19937_64& rng);

// Scene components before mixing: the background and each placement already
// scaled to its SNR, positioned at its onset sample.
struct SceneStems {
  AudioClip background;
  std::vector<AudioClip> events;        // event-length clips
  std::vector<size_t> onset_samples;
};
SceneStems RenderSceneStems(const SceneSpec& spec, const Catalog& catalog);

struct Scene {
  AudioClip audio;
  EventList events;
  double normalization_gain = 1.0;
};

// Mixes the stems, then scales the mixture to a 0.99 peak.
Scene SynthesizeScene(const SceneSpec& spec, const Catalog& catalog);

struct SceneSamplingParams {
  int min_events = 1;
  int max_events = 4;
  double duration_s = 10.0;
  double snr_min_db = 6.0;
  double snr_max_db = 20.0;
  int max_polyphony = 2;
  int sample_rate = 16000;
  Background background;
};

// Onsets are drawn on a 1 ms grid so annotations survive TSV rounding.
SceneSpec SampleSceneSpec(std::mt19937_64& rng, const Catalog& catalog,
                          const SceneSamplingParams& params);

// Largest number of simultaneously active events.
int MaxPolyphony(const EventList& events);

EventList PlacementEvents(const SceneSpec& spec, const Catalog& catalog);

// splitmix64 step; used to derive independent stream seeds.
uint64_t MixSeed(uint64_t seed, uint64_t stream);

}  // namespace sed
