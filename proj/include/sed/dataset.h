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

// On-disk dataset layout:
//   audio/<scene_id>.wav   meta/<scene_id>.tsv   vocabulary.txt
//   manifest.tsv           (scene_id <TAB> train|val|test)

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "sed/annotations.h"
#include "sed/features.h"
#include "sed/scenegen.h"
#include "sed/trainer.h"

namespace sed {

struct ManifestEntry {
  std::string id;
  std::string split;
  bool operator==(const ManifestEntry&) const = default;
};

std::vector<ManifestEntry> ParseManifest(std::string_view text);
std::string SerializeManifest(const std::vector<ManifestEntry>& entries);

struct SplitFractions {
  double train = 0.6;
  double val = 0.2;
  double test = 0.2;
  void Validate() const;
};

// Deterministic split from a seeded FNV-1a hash of the scene id.
std::string SplitForId(uint64_t seed, std::string_view id, const SplitFractions& f);

struct SynthConfig {
  Catalog catalog;
  SceneSamplingParams sampling;
  SplitFractions splits;
};

// Renders num_scenes scenes named scene_0000, ... into `dir`.
void GenerateDataset(const std::filesystem::path& dir, const SynthConfig& cfg,
                     int num_scenes, uint64_t seed);

void WriteScene(const std::filesystem::path& dir, const std::string& id,
                const AudioClip& audio, const EventList& events);

std::vector<ManifestEntry> ReadManifest(const std::filesystem::path& dir);
void WriteManifest(const std::filesystem::path& dir,
                   const std::vector<ManifestEntry>& entries);

// Reads audio and annotations for every manifest entry of `split` and
// computes log-mel features.
std::vector<LabeledItem> LoadSplit(const std::filesystem::path& dir,
                                   const std::vector<ManifestEntry>& manifest,
                                   const std::string& split, const FeatureConfig& cfg);

}  // namespace sed
