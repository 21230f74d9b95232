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

// JSON configuration files. Unknown keys are rejected so typos surface; every
// error names the offending key path.

#include <filesystem>
#include <optional>

#include "json.hpp"
#include "sed/crnn.h"
#include "sed/dataset.h"
#include "sed/features.h"
#include "sed/trainer.h"

namespace sed {

FeatureConfig ParseFeatureConfig(const nlohmann::json& j);
nlohmann::json FeatureConfigToJson(const FeatureConfig& cfg);

SynthConfig ParseSynthConfig(const nlohmann::json& j);

// {"features": {...}, "model": {...}, "train": {...}, "search": {...}};
// every section optional.
struct TrainingSetup {
  FeatureConfig features;
  CrnnConfig model;
  TrainConfig train;
  std::optional<SearchSpace> search;
  int search_trials = 0;
  int search_epochs = 0;
};
TrainingSetup ParseTrainingSetup(const nlohmann::json& j);

// Parses a file; throws kConfig for syntax errors, kIo if unreadable.
nlohmann::json ReadJsonFile(const std::filesystem::path& path);

}  // namespace sed
