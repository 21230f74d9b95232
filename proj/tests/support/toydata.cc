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

#include "toydata.h"

#include <random>
#include <string>

namespace sedtest {

namespace {
constexpr int kBands = 8;
constexpr double kHop = 0.02;
}  // namespace

sed::LabeledItem ToyItem(uint64_t seed, int frames) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> noise(0.0, 0.3);
  std::uniform_int_distribution<int> start(0, frames - 10);
  std::uniform_int_distribution<int> len(5, frames / 2);
  sed::LabeledItem item;
  item.id = "toy" + std::to_string(seed);
  item.duration_s = frames * kHop;
  item.features.hop_len_s = kHop;
  item.features.window_len_s = 2 * kHop;
  item.features.values = sed::Matrix(frames, kBands);
  for (double& v : item.features.values.data) v = noise(rng);
  const char* labels[] = {"a", "b"};
  for (int c = 0; c < 2; ++c) {
    const int on = start(rng), off = std::min(frames, on + len(rng));
    item.events.push_back({on * kHop, off * kHop, labels[c]});
    for (int t = on; t < off; ++t) {
      for (int b = 4 * c; b < 4 * c + 4; ++b) item.features.values(t, b) += 3.0;
    }
  }
  return item;
}

sed::TrainData ToyTrainData(uint64_t seed, int n_train, int n_val, int frames) {
  sed::TrainData d;
  d.vocab = sed::Vocabulary({"a", "b"});
  d.features.n_mels = kBands;
  d.features.hop_len_s = kHop;
  d.features.window_len_s = 2 * kHop;
  for (int i = 0; i < n_train; ++i) d.train.push_back(ToyItem(seed * 1000 + i, frames));
  for (int i = 0; i < n_val; ++i) d.val.push_back(ToyItem(seed * 1000 + 500 + i, frames));
  return d;
}

sed::CrnnConfig ToyCrnn() {
  sed::CrnnConfig cfg;
  cfg.n_mels = kBands;
  cfg.conv = {{4, 3, 3, 2}, {4, 3, 3, 2}};
  cfg.gru = {6};
  cfg.dense = {};
  cfg.n_classes = 2;
  cfg.keep_prob = 1.0;
  return cfg;
}

sed::TrainConfig ToyTrainConfig() {
  sed::TrainConfig t;
  t.batch_size = 4;
  t.max_epochs = 3;
  t.initial_lr = 0.5;
  t.lr_decay = 0.98;
  t.early_stop_patience = 10;
  t.crop_len_T = 50;
  t.seed = 7;
  t.eval_segment_len_s = 0.2;
  return t;
}

}  // namespace sedtest
