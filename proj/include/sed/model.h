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

#include "sed/annotations.h"
#include "sed/augment.h"
#include "sed/crnn.h"
#include "sed/features.h"

namespace sed {

// Per-band standardization applied before the network: (x - mean) / std.
struct InputNormalizer {
  std::vector<double> mean;
  std::vector<double> stddev;

  bool empty() const { return mean.empty(); }
  FeatureMatrix Apply(const FeatureMatrix& features) const;
  // Statistics over every frame of every item; stddev floored at 1e-6.
  // Both are rounded to f32, the checkpoint precision.
  static InputNormalizer Fit(const std::vector<const FeatureMatrix*>& items);
};

// Everything needed to run detection on new audio.
struct Model {
  CrnnConfig config;
  Vocabulary vocab;
  FeatureConfig features;
  InputNormalizer normalizer;
  CrnnParams params;

  // Class probabilities [C x T] for raw (unnormalized) features.
  SoftTargetMatrix Predict(const FeatureMatrix& features) const;
};

// "SEDM" container: magic, u32 version=1, u32 JSON length, JSON (config,
// vocabulary, feature settings), u32 tensor count, then per tensor u16 name
// length, name, u8 rank, u32 dims, f32 data.
std::string EncodeCheckpoint(const Model& model);
Model DecodeCheckpoint(std::string_view bytes);
void WriteCheckpoint(const Model& model, const std::filesystem::path& path);
Model ReadCheckpoint(const std::filesystem::path& path);

// Rounds every parameter through f32, as a checkpoint round trip would.
void QuantizeToFloat(CrnnParams& params);

}  // namespace sed
