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

#include "sed/dataset.h"

#include <cmath>
#include <cstdio>

#include "sed/error.h"
#include "sed/fileutil.h"

namespace sed {

namespace fs = std::filesystem;

std::vector<ManifestEntry> ParseManifest(std::string_view text) {
  std::vector<ManifestEntry> out;
  size_t line_no = 0, start = 0;
  while (start < text.size()) {
    size_t end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(start, end - start);
    start = end + 1;
    ++line_no;
    if (line.empty()) continue;
    const size_t tab = line.find('\t');
    if (tab == std::string_view::npos || line.find('\t', tab + 1) != std::string_view::npos) {
      Fail(ErrorKind::kParse, "manifest line " + std::to_string(line_no) +
                                  ": expected 'scene_id<TAB>split'");
    }
    ManifestEntry e{std::string(line.substr(0, tab)), std::string(line.substr(tab + 1))};
    if (e.split != "train" && e.split != "val" && e.split != "test") {
      Fail(ErrorKind::kParse, "manifest line " + std::to_string(line_no) +
                                  ": unknown split '" + e.split + "'");
    }
    out.push_back(std::move(e));
  }
  return out;
}

std::string SerializeManifest(const std::vector<ManifestEntry>& entries) {
  std::string out;
  for (const auto& e : entries) out += e.id + "\t" + e.split + "\n";
  return out;
}

void SplitFractions::Validate() const {
  if (train < 0.0 || val < 0.0 || test < 0.0 ||
      std::abs(train + val + test - 1.0) > 1e-9) {
    Fail(ErrorKind::kConfig, "splits: fractions must be >= 0 and sum to 1");
  }
}

std::string SplitForId(uint64_t seed, std::string_view id, const SplitFractions& f) {
  uint64_t h = 0xcbf29ce484222325ull;
  auto mix = [&](unsigned char c) {
    h ^= c;
    h *= 0x100000001b3ull;
  };
  for (int i = 0; i < 8; ++i) mix(static_cast<unsigned char>(seed >> (8 * i)));
  for (unsigned char c : id) mix(c);
  h = MixSeed(h, 0);
  const double u = static_cast<double>(h >> 11) * 0x1.0p-53;
  if (u < f.train) return "train";
  if (u < f.train + f.val) return "val";
  return "test";
}

void WriteScene(const fs::path& dir, const std::string& id, const AudioClip& audio,
                const EventList& events) {
  fs::create_directories(dir / "audio");
  fs::create_directories(dir / "meta");
  WriteWav(audio, dir / "audio" / (id + ".wav"));
  WriteEventList(events, dir / "meta" / (id + ".tsv"));
}

std::vector<ManifestEntry> ReadManifest(const fs::path& dir) {
  return ParseManifest(ReadFileBytes(dir / "manifest.tsv"));
}

void WriteManifest(const fs::path& dir, const std::vector<ManifestEntry>& entries) {
  WriteFileAtomic(dir / "manifest.tsv", SerializeManifest(entries));
}

void GenerateDataset(const fs::path& dir, const SynthConfig& cfg, int num_scenes,
                     uint64_t seed) {
  if (num_scenes < 0) Fail(ErrorKind::kConfig, "num_scenes must be >= 0");
  cfg.splits.Validate();
  fs::create_directories(dir / "audio");
  fs::create_directories(dir / "meta");
  const Vocabulary vocab = cfg.catalog.MakeVocabulary();
  WriteFileAtomic(dir / "vocabulary.txt", SerializeVocabulary(vocab));
  std::vector<ManifestEntry> manifest;
  for (int i = 0; i < num_scenes; ++i) {
    char id[32];
    std::snprintf(id, sizeof(id), "scene_%04d", i);
    std::mt19937_64 rng(MixSeed(seed, static_cast<uint64_t>(i)));
    const SceneSpec spec = SampleSceneSpec(rng, cfg.catalog, cfg.sampling);
    const Scene scene = SynthesizeScene(spec, cfg.catalog);
    WriteScene(dir, id, scene.audio, scene.events);
    manifest.push_back({id, SplitForId(seed, id, cfg.splits)});
  }
  WriteManifest(dir, manifest);
}

std::vector<LabeledItem> LoadSplit(const fs::path& dir,
                                   const std::vector<ManifestEntry>& manifest,
                                   const std::string& split, const FeatureConfig& cfg) {
  std::vector<LabeledItem> items;
  for (const auto& e : manifest) {
    if (e.split != split) continue;
    LabeledItem item;
    item.id = e.id;
    const AudioClip clip = ReadWav(dir / "audio" / (e.id + ".wav"));
    item.duration_s = clip.duration_s();
    item.features = LogMel(clip, cfg);
    item.events = ReadEventList(dir / "meta" / (e.id + ".tsv"));
    items.push_back(std::move(item));
  }
  return items;
}

}  // namespace sed
