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
#include <functional>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "sed/annotations.h"
#include "sed/augment.h"
#include "sed/crnn.h"
#include "sed/features.h"
#include "sed/model.h"
#include "sed/postprocess.h"

namespace sed {

struct TrainConfig {
  int batch_size = 32;
  int max_epochs = 50;
  double initial_lr = 0.5;
  double lr_decay = 0.98;  // per epoch, in (0, 1]
  int early_stop_patience = 10;
  int crop_len_T = 250;
  uint64_t seed = 0;
  // Mixup of example pairs inside a batch, lambda ~ Beta(alpha, alpha).
  double mixup_prob = 0.0;
  double mixup_alpha = 0.2;
  // Validation scoring: segment grid and event post-processing.
  double eval_segment_len_s = 1.0;
  PostprocessConfig post;

  void Validate() const;
  double LearningRate(int epoch) const;
};

struct EpochStats {
  int epoch = 0;
  double train_loss = 0.0;
  double val_loss = 0.0;
  double val_f1 = 0.0;
};

using TrainHistory = std::vector<EpochStats>;

std::string HistoryToTsv(const TrainHistory& history);

// A clip's features with its strong labels.
struct LabeledItem {
  std::string id;
  FeatureMatrix features;
  EventList events;
  double duration_s = 0.0;
};

// Frame-resolution targets: frame t covers [t*hop, (t+1)*hop).
EventRoll FrameTargets(const EventList& events, size_t num_frames, double hop_len_s,
                       const Vocabulary& vocab);

struct Example {
  FeatureMatrix features;
  SoftTargetMatrix targets;  // C x T
};

struct BatchPlan {
  std::vector<std::vector<Example>> batches;
  size_t skipped = 0;  // items shorter than the crop
};

// Shuffles the items, cuts one random crop of crop_len_T frames from each
// (features and targets at identical frames) and groups them into batches.
BatchPlan MakeBatches(const std::vector<std::pair<const FeatureMatrix*, const EventRoll*>>& items,
                      int crop_len_T, int batch_size, std::mt19937_64& rng);

// params -= lr * grads. Throws kNumeric naming the first non-finite gradient.
void SgdStep(CrnnParams& params, const CrnnParams& grads, double lr);

struct TrainData {
  Vocabulary vocab;
  FeatureConfig features;
  std::vector<LabeledItem> train;
  std::vector<LabeledItem> val;
};

struct TrainResult {
  Model model;  // best-validation parameters
  TrainHistory history;
  int best_epoch = -1;
  double best_val_f1 = 0.0;
  double best_val_loss = 0.0;
  bool diverged = false;
  std::string message;
};

struct ValidationScore {
  double loss = 0.0;
  double f1 = 0.0;
};

// Inference-mode loss and pooled segment F1 over the items.
ValidationScore Validate(const Model& model, const std::vector<LabeledItem>& items,
                         const TrainConfig& cfg);

using EpochCallback = std::function<void(const EpochStats&)>;

// Plain SGD with lr = initial_lr * decay^epoch; keeps the parameters with the
// best validation F1 (ties: lower validation loss) and stops after
// early_stop_patience epochs without improvement. Parameters are kept on the
// f32 grid so the checkpoint reproduces them exactly. `init` optionally
// resumes from a trained model (its parameters and input normalization).
TrainResult Train(const CrnnConfig& model_cfg, const TrainData& data,
                  const TrainConfig& cfg, const EpochCallback& on_epoch = nullptr,
                  const Model* init = nullptr);

struct SearchSpace {
  std::pair<double, double> log10_lr = {-1.0, 0.0};
  std::pair<double, double> lr_decay = {0.95, 1.0};
  std::vector<int> batch_sizes = {4, 8, 16};
  std::vector<int> conv_filters = {16, 32};
  std::vector<int> gru_hidden = {16, 32};
  std::pair<double, double> keep_prob = {0.5, 1.0};
};

struct TrialResult {
  int index = 0;
  TrainConfig train;
  CrnnConfig model;
  double val_f1 = 0.0;
  double val_loss = 0.0;
  bool diverged = false;
  std::string message;
};

struct SearchResult {
  TrialResult best;
  std::vector<TrialResult> trials;
};

// Draws n_trials configurations, trains each for at most epochs_per_trial
// epochs, and picks the highest validation F1 (ties: lower loss, then lower
// index). Throws kSearch if every trial diverged.
SearchResult RandomSearch(const CrnnConfig& base_model, const TrainConfig& base_train,
                          const SearchSpace& space, int n_trials, uint64_t seed,
                          int epochs_per_trial, const TrainData& data);

// The sampled configuration for one trial, without training.
std::pair<TrainConfig, CrnnConfig> DrawTrial(const CrnnConfig& base_model,
                                             const TrainConfig& base_train,
                                             const SearchSpace& space,
                                             std::mt19937_64& rng);

}  // namespace sed
