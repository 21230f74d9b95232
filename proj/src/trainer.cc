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

#include "sed/trainer.h"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "sed/error.h"
#include "sed/evaluation.h"
#include "sed/scenegen.h"

namespace sed {

void TrainConfig::Validate() const {
  if (batch_size < 1 || max_epochs < 1 || crop_len_T < 1) {
    Fail(ErrorKind::kConfig, "batch_size, max_epochs and crop_len_T must be >= 1");
  }
  if (!(initial_lr > 0.0)) Fail(ErrorKind::kConfig, "initial_lr must be > 0");
  if (!(lr_decay > 0.0 && lr_decay <= 1.0)) {
    Fail(ErrorKind::kConfig, "lr_decay must be in (0, 1]");
  }
  if (early_stop_patience < 0) Fail(ErrorKind::kConfig, "patience must be >= 0");
  if (!(mixup_prob >= 0.0 && mixup_prob <= 1.0) || !(mixup_alpha > 0.0)) {
    Fail(ErrorKind::kConfig, "mixup_prob in [0, 1] and mixup_alpha > 0 required");
  }
  if (!(eval_segment_len_s > 0.0)) Fail(ErrorKind::kConfig, "eval segment length");
}

double TrainConfig::LearningRate(int epoch) const {
  return initial_lr * std::pow(lr_decay, epoch);
}

std::string HistoryToTsv(const TrainHistory& history) {
  std::string out = "epoch\ttrain_loss\tval_loss\tval_f1\n";
  char buf[128];
  for (const auto& h : history) {
    std::snprintf(buf, sizeof(buf), "%d\t%.6f\t%.6f\t%.6f\n", h.epoch, h.train_loss,
                  h.val_loss, h.val_f1);
    out += buf;
  }
  return out;
}

EventRoll FrameTargets(const EventList& events, size_t num_frames, double hop_len_s,
                       const Vocabulary& vocab) {
  return EventsToRollClipped(events, num_frames, hop_len_s, vocab);
}

BatchPlan MakeBatches(
    const std::vector<std::pair<const FeatureMatrix*, const EventRoll*>>& items,
    int crop_len_T, int batch_size, std::mt19937_64& rng) {
  if (crop_len_T < 1 || batch_size < 1) {
    Fail(ErrorKind::kConfig, "crop length and batch size must be >= 1");
  }
  const size_t crop = static_cast<size_t>(crop_len_T);
  BatchPlan plan;
  std::vector<size_t> order;
  for (size_t i = 0; i < items.size(); ++i) {
    const auto& [feats, roll] = items[i];
    if (feats->num_frames() != roll->num_segments) {
      Fail(ErrorKind::kDimension, "item " + std::to_string(i) +
                                      ": feature frames differ from target frames");
    }
    if (feats->num_frames() < crop) {
      ++plan.skipped;
    } else {
      order.push_back(i);
    }
  }
  std::shuffle(order.begin(), order.end(), rng);

  std::vector<Example> current;
  for (size_t idx : order) {
    const auto& [feats, roll] = items[idx];
    std::uniform_int_distribution<size_t> start_dist(0, feats->num_frames() - crop);
    const size_t start = start_dist(rng);
    Example ex;
    ex.features.hop_len_s = feats->hop_len_s;
    ex.features.window_len_s = feats->window_len_s;
    ex.features.values = Matrix(crop, feats->num_bands());
    std::copy(feats->values.row(start), feats->values.row(start) + crop * feats->num_bands(),
              ex.features.values.data.begin());
    ex.targets = SoftTargetMatrix(roll->num_classes(), crop);
    for (size_t c = 0; c < roll->num_classes(); ++c) {
      for (size_t t = 0; t < crop; ++t) ex.targets(c, t) = roll->at(c, start + t);
    }
    current.push_back(std::move(ex));
    if (current.size() == static_cast<size_t>(batch_size)) {
      plan.batches.push_back(std::move(current));
      current.clear();
    }
  }
  if (!current.empty()) plan.batches.push_back(std::move(current));
  return plan;
}

void SgdStep(CrnnParams& params, const CrnnParams& grads, double lr) {
  std::vector<const Tensor*> g;
  ForEachParam(grads, [&](const std::string&, const Tensor& t) { g.push_back(&t); });
  size_t k = 0;
  // Check everything first so a bad gradient leaves params untouched.
  ForEachParam(params, [&](const std::string& name, Tensor& p) {
    const Tensor& gt = *g.at(k++);
    if (gt.dims != p.dims) Fail(ErrorKind::kDimension, name + ": gradient shape");
    for (size_t i = 0; i < gt.size(); ++i) {
      if (!std::isfinite(gt[i])) {
        Fail(ErrorKind::kNumeric, "non-finite gradient in " + name + "[" +
                                      std::to_string(i) + "]");
      }
    }
  });
  k = 0;
  ForEachParam(params, [&](const std::string&, Tensor& p) {
    const Tensor& gt = *g[k++];
    for (size_t i = 0; i < p.size(); ++i) p[i] -= lr * gt[i];
  });
}

namespace {

void AddScaled(CrnnParams& acc, const CrnnParams& g, double scale) {
  std::vector<const Tensor*> src;
  ForEachParam(g, [&](const std::string&, const Tensor& t) { src.push_back(&t); });
  size_t k = 0;
  ForEachParam(acc, [&](const std::string&, Tensor& t) {
    const Tensor& s = *src[k++];
    for (size_t i = 0; i < t.size(); ++i) t[i] += scale * s[i];
  });
}

Tensor MatrixToTensor(const Matrix& m) {
  Tensor t({m.rows, m.cols});
  t.data = m.data;
  return t;
}

}  // namespace

ValidationScore Validate(const Model& model, const std::vector<LabeledItem>& items,
                         const TrainConfig& cfg) {
  if (items.empty()) Fail(ErrorKind::kConfig, "validation set is empty");
  ValidationScore score;
  SegmentCounts pooled;
  pooled.per_class.resize(model.vocab.size());
  for (const auto& item : items) {
    const SoftTargetMatrix probs = model.Predict(item.features);
    const double hop = item.features.hop_len_s;
    const EventRoll targets =
        FrameTargets(item.events, item.features.num_frames(), hop, model.vocab);
    score.loss += BceLoss(MatrixToTensor(probs), MatrixToTensor(RollToSoftTargets(targets)));

    const EventList detected = ProbsToEvents(probs, model.vocab, hop, cfg.post);
    double duration = item.duration_s;
    for (const auto* l : {&item.events, &detected}) {
      for (const auto& e : *l) duration = std::max(duration, e.offset_s);
    }
    pooled.Accumulate(SegmentBasedCounts(
        EventsToRoll(item.events, duration, cfg.eval_segment_len_s, model.vocab),
        EventsToRoll(detected, duration, cfg.eval_segment_len_s, model.vocab)));
  }
  score.loss /= static_cast<double>(items.size());
  score.f1 = PrecisionRecallF(pooled).f_score;
  return score;
}

TrainResult Train(const CrnnConfig& model_cfg, const TrainData& data,
                  const TrainConfig& cfg, const EpochCallback& on_epoch,
                  const Model* init) {
  cfg.Validate();
  model_cfg.Validate();
  if (data.train.empty()) Fail(ErrorKind::kConfig, "training split is empty");
  if (data.val.empty()) Fail(ErrorKind::kConfig, "validation split is empty");
  if (static_cast<size_t>(model_cfg.n_classes) != data.vocab.size()) {
    Fail(ErrorKind::kConfig, "n_classes differs from the vocabulary size");
  }

  Model model;
  model.config = model_cfg;
  model.vocab = data.vocab;
  model.features = data.features;
  if (init) {
    if (!(init->vocab == data.vocab)) Fail(ErrorKind::kModel, "resume: vocabulary differs");
    CheckParams(model_cfg, init->params);
    model.params = init->params;
    model.normalizer = init->normalizer;
  } else {
    std::vector<const FeatureMatrix*> feats;
    for (const auto& item : data.train) feats.push_back(&item.features);
    model.normalizer = InputNormalizer::Fit(feats);
    model.params = InitParams(model_cfg, MixSeed(cfg.seed, 0));
  }
  QuantizeToFloat(model.params);

  std::vector<FeatureMatrix> train_feats;
  std::vector<EventRoll> train_targets;
  for (const auto& item : data.train) {
    train_feats.push_back(model.normalizer.Apply(item.features));
    train_targets.push_back(FrameTargets(item.events, item.features.num_frames(),
                                         item.features.hop_len_s, data.vocab));
  }
  std::vector<std::pair<const FeatureMatrix*, const EventRoll*>> items;
  for (size_t i = 0; i < train_feats.size(); ++i) {
    items.emplace_back(&train_feats[i], &train_targets[i]);
  }

  std::mt19937_64 batch_rng(MixSeed(cfg.seed, 1));
  std::mt19937_64 dropout_rng(MixSeed(cfg.seed, 2));
  std::mt19937_64 mixup_rng(MixSeed(cfg.seed, 3));

  TrainResult res;
  res.model = model;
  int since_best = 0;
  for (int epoch = 0; epoch < cfg.max_epochs; ++epoch) {
    const double lr = cfg.LearningRate(epoch);
    BatchPlan plan = MakeBatches(items, cfg.crop_len_T, cfg.batch_size, batch_rng);
    if (plan.batches.empty()) {
      Fail(ErrorKind::kConfig, "no training item has " + std::to_string(cfg.crop_len_T) +
                                   " frames");
    }
    double loss_sum = 0.0;
    size_t loss_count = 0;
    try {
      for (auto& batch : plan.batches) {
        if (cfg.mixup_prob > 0.0) {
          std::uniform_real_distribution<double> unit(0.0, 1.0);
          std::uniform_int_distribution<size_t> partner(0, batch.size() - 1);
          std::vector<Example> mixed = batch;
          for (size_t i = 0; i < batch.size(); ++i) {
            if (unit(mixup_rng) >= cfg.mixup_prob) continue;
            const size_t j = partner(mixup_rng);
            const double lambda = SampleBeta(cfg.mixup_alpha, cfg.mixup_alpha, mixup_rng);
            auto [x, y] = Mixup(batch[i].features, batch[i].targets, batch[j].features,
                                batch[j].targets, lambda);
            mixed[i] = {std::move(x), std::move(y)};
          }
          batch = std::move(mixed);
        }
        CrnnParams grad_sum = ZeroLike(model.params);
        for (const auto& ex : batch) {
          CrnnParams g;
          const double loss =
              CrnnLossAndGrad(FeaturesToInput(ex.features), MatrixToTensor(ex.targets),
                              model_cfg, model.params, true, &dropout_rng, &g);
          if (!std::isfinite(loss)) Fail(ErrorKind::kNumeric, "non-finite training loss");
          loss_sum += loss;
          ++loss_count;
          AddScaled(grad_sum, g, 1.0 / static_cast<double>(batch.size()));
        }
        SgdStep(model.params, grad_sum, lr);
        QuantizeToFloat(model.params);
      }
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::kNumeric) throw;
      res.diverged = true;
      res.message = "epoch " + std::to_string(epoch) + ": " + e.what();
      return res;
    }

    EpochStats stats;
    stats.epoch = epoch;
    stats.train_loss = loss_sum / static_cast<double>(loss_count);
    const ValidationScore vs = Validate(model, data.val, cfg);
    stats.val_loss = vs.loss;
    stats.val_f1 = vs.f1;
    if (!std::isfinite(stats.val_loss)) {
      res.diverged = true;
      res.message = "epoch " + std::to_string(epoch) + ": non-finite validation loss";
      return res;
    }
    res.history.push_back(stats);
    if (on_epoch) on_epoch(stats);

    const bool improved = res.best_epoch < 0 || stats.val_f1 > res.best_val_f1 ||
                          (stats.val_f1 == res.best_val_f1 &&
                           stats.val_loss < res.best_val_loss);
    if (improved) {
      res.best_epoch = epoch;
      res.best_val_f1 = stats.val_f1;
      res.best_val_loss = stats.val_loss;
      res.model = model;
      since_best = 0;
    } else {
      ++since_best;
    }
    if (since_best > 0 && since_best >= cfg.early_stop_patience) break;
  }
  return res;
}

std::pair<TrainConfig, CrnnConfig> DrawTrial(const CrnnConfig& base_model,
                                             const TrainConfig& base_train,
                                             const SearchSpace& space,
                                             std::mt19937_64& rng) {
  auto uniform = [&](std::pair<double, double> r) {
    if (r.second < r.first) Fail(ErrorKind::kConfig, "empty search range");
    std::uniform_real_distribution<double> u(r.first, r.second);
    return r.first == r.second ? r.first : u(rng);
  };
  auto choose = [&](const std::vector<int>& options) {
    if (options.empty()) Fail(ErrorKind::kConfig, "empty search choice list");
    std::uniform_int_distribution<size_t> u(0, options.size() - 1);
    return options[u(rng)];
  };
  TrainConfig train = base_train;
  CrnnConfig model = base_model;
  train.initial_lr = std::pow(10.0, uniform(space.log10_lr));
  train.lr_decay = uniform(space.lr_decay);
  train.batch_size = choose(space.batch_sizes);
  const int filters = choose(space.conv_filters);
  for (auto& b : model.conv) b.filters = filters;
  const int hidden = choose(space.gru_hidden);
  for (auto& h : model.gru) h = hidden;
  model.keep_prob = uniform(space.keep_prob);
  return {train, model};
}

SearchResult RandomSearch(const CrnnConfig& base_model, const TrainConfig& base_train,
                          const SearchSpace& space, int n_trials, uint64_t seed,
                          int epochs_per_trial, const TrainData& data) {
  if (n_trials < 1) Fail(ErrorKind::kConfig, "n_trials must be >= 1");
  if (epochs_per_trial < 1) Fail(ErrorKind::kConfig, "epochs_per_trial must be >= 1");
  std::mt19937_64 rng(seed);
  SearchResult out;
  int best = -1;
  for (int i = 0; i < n_trials; ++i) {
    auto [train, model] = DrawTrial(base_model, base_train, space, rng);
    train.max_epochs = epochs_per_trial;
    train.seed = MixSeed(seed, static_cast<uint64_t>(i));
    model.seed = train.seed;
    TrialResult trial;
    trial.index = i;
    trial.train = train;
    trial.model = model;
    const TrainResult r = Train(model, data, train);
    trial.diverged = r.diverged || r.best_epoch < 0;
    trial.message = r.message;
    trial.val_f1 = r.best_val_f1;
    trial.val_loss = r.best_val_loss;
    out.trials.push_back(trial);
    if (trial.diverged) continue;
    if (best < 0) {
      best = i;
      continue;
    }
    const TrialResult& b = out.trials[best];
    if (trial.val_f1 > b.val_f1 || (trial.val_f1 == b.val_f1 && trial.val_loss < b.val_loss)) {
      best = i;
    }
  }
  if (best < 0) {
    std::string diag;
    for (const auto& t : out.trials) {
      diag += "\n  trial " + std::to_string(t.index) + ": " + t.message;
    }
    Fail(ErrorKind::kSearch, "every trial diverged:" + diag);
  }
  out.best = out.trials[best];
  return out;
}

}  // namespace sed
