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

#include "sed/config.h"

#include <set>

#include "sed/error.h"
#include "sed/fileutil.h"

namespace sed {

using nlohmann::json;

namespace {

// Typed access to one JSON object; Finish() rejects keys nobody asked for.
class ObjectReader {
 public:
  ObjectReader(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) Fail(ErrorKind::kConfig, "config key '" + Name() + "' must be an object");
  }

  template <typename T>
  void Get(const char* key, T& out) {
    seen_.insert(key);
    if (!j_.contains(key)) return;
    try {
      out = j_.at(key).get<T>();
    } catch (const json::exception&) {
      Fail(ErrorKind::kConfig, "config key '" + Key(key) + "' has the wrong type");
    }
  }

  template <typename T>
  void Require(const char* key, T& out) {
    if (!j_.contains(key)) Fail(ErrorKind::kConfig, "config key '" + Key(key) + "' is required");
    Get(key, out);
  }

  void Mark(const char* key) { seen_.insert(key); }
  bool Has(const char* key) const { return j_.contains(key); }
  const json& Sub(const char* key) {
    seen_.insert(key);
    return j_.at(key);
  }
  std::string Key(const char* key) const { return path_.empty() ? key : path_ + "." + key; }

  void Finish() const {
    for (auto it = j_.begin(); it != j_.end(); ++it) {
      if (!seen_.count(it.key())) {
        Fail(ErrorKind::kConfig, "unknown config key '" + Key(it.key().c_str()) + "'");
      }
    }
  }

 private:
  std::string Name() const { return path_.empty() ? "<root>" : path_; }
  const json& j_;
  std::string path_;
  std::set<std::string> seen_;
};

void Range(ObjectReader& r, const char* key, double& lo, double& hi) {
  if (!r.Has(key)) return;
  ObjectReader sub(r.Sub(key), r.Key(key));
  sub.Require("min", lo);
  sub.Require("max", hi);
  sub.Finish();
}

void Pair(ObjectReader& r, const char* key, std::pair<double, double>& out) {
  std::vector<double> v;
  r.Get(key, v);
  if (!r.Has(key)) return;
  if (v.size() != 2) Fail(ErrorKind::kConfig, "config key '" + r.Key(key) + "' needs [lo, hi]");
  out = {v[0], v[1]};
}

}  // namespace

FeatureConfig ParseFeatureConfig(const json& j) {
  FeatureConfig cfg;
  ObjectReader r(j, "features");
  r.Get("window_len_s", cfg.window_len_s);
  r.Get("hop_len_s", cfg.hop_len_s);
  r.Get("n_mels", cfg.n_mels);
  r.Get("fmin", cfg.fmin);
  if (r.Has("fmax") && !j.at("fmax").is_null()) {
    double f = 0.0;
    r.Get("fmax", f);
    cfg.fmax = f;
  } else {
    r.Mark("fmax");
  }
  r.Get("log_floor", cfg.log_floor);
  r.Finish();
  return cfg;
}

json FeatureConfigToJson(const FeatureConfig& cfg) {
  json j = {{"window_len_s", cfg.window_len_s}, {"hop_len_s", cfg.hop_len_s},
            {"n_mels", cfg.n_mels},             {"fmin", cfg.fmin},
            {"log_floor", cfg.log_floor}};
  j["fmax"] = cfg.fmax ? json(*cfg.fmax) : json(nullptr);
  return j;
}

SynthConfig ParseSynthConfig(const json& j) {
  SynthConfig cfg;
  ObjectReader r(j, "");
  auto& s = cfg.sampling;
  r.Get("sample_rate", s.sample_rate);
  r.Get("duration_s", s.duration_s);
  r.Get("max_polyphony", s.max_polyphony);
  if (r.Has("events")) {
    ObjectReader ev(r.Sub("events"), "events");
    ev.Get("min", s.min_events);
    ev.Get("max", s.max_events);
    ev.Finish();
  }
  Range(r, "snr_db", s.snr_min_db, s.snr_max_db);
  if (r.Has("background")) {
    ObjectReader bg(r.Sub("background"), "background");
    std::string kind = "white_noise", path;
    bg.Get("kind", kind);
    bg.Get("level", s.background.level);
    bg.Get("wav_path", path);
    bg.Finish();
    if (kind == "white_noise") {
      s.background.kind = Background::Kind::kWhiteNoise;
    } else if (kind == "wav_snippet") {
      s.background.kind = Background::Kind::kWavSnippet;
      if (path.empty()) Fail(ErrorKind::kConfig, "config key 'background.wav_path' is required");
      s.background.wav_path = path;
    } else {
      Fail(ErrorKind::kConfig, "config key 'background.kind': unknown kind '" + kind + "'");
    }
  }
  if (r.Has("splits")) {
    ObjectReader sp(r.Sub("splits"), "splits");
    sp.Get("train", cfg.splits.train);
    sp.Get("val", cfg.splits.val);
    sp.Get("test", cfg.splits.test);
    sp.Finish();
  }
  if (!r.Has("catalog")) Fail(ErrorKind::kConfig, "config key 'catalog' is required");
  const json& cat = r.Sub("catalog");
  if (!cat.is_array()) Fail(ErrorKind::kConfig, "config key 'catalog' must be an array");
  std::vector<EventTemplate> templates;
  for (size_t i = 0; i < cat.size(); ++i) {
    ObjectReader t(cat[i], "catalog[" + std::to_string(i) + "]");
    EventTemplate e;
    std::string kind, path;
    t.Require("id", e.id);
    t.Require("kind", kind);
    t.Require("duration_s", e.duration_s);
    t.Get("label", e.label);
    t.Get("frequency_hz", e.frequency_hz);
    t.Get("end_frequency_hz", e.end_frequency_hz);
    t.Get("bandwidth_hz", e.bandwidth_hz);
    t.Get("attack_s", e.attack_s);
    t.Get("release_s", e.release_s);
    t.Get("wav_path", path);
    t.Finish();
    if (e.label.empty()) e.label = e.id;
    e.wav_path = path;
    try {
      e.kind = ParseTemplateKind(kind);
      ValidateTemplate(e, s.sample_rate);
    } catch (const Error& err) {
      Fail(ErrorKind::kConfig, t.Key("kind") + ": " + err.what());
    }
    templates.push_back(std::move(e));
  }
  cfg.catalog = Catalog(std::move(templates));
  r.Finish();
  cfg.splits.Validate();
  return cfg;
}

TrainingSetup ParseTrainingSetup(const json& j) {
  TrainingSetup setup;
  ObjectReader r(j, "");
  if (r.Has("features")) setup.features = ParseFeatureConfig(r.Sub("features"));
  setup.model.n_mels = setup.features.n_mels;
  if (r.Has("model")) {
    ObjectReader m(r.Sub("model"), "model");
    if (m.Has("conv")) {
      const json& conv = m.Sub("conv");
      if (!conv.is_array()) Fail(ErrorKind::kConfig, "config key 'model.conv' must be an array");
      setup.model.conv.clear();
      for (size_t i = 0; i < conv.size(); ++i) {
        ObjectReader b(conv[i], "model.conv[" + std::to_string(i) + "]");
        ConvBlockConfig block;
        b.Get("filters", block.filters);
        b.Get("kernel_h", block.kernel_h);
        b.Get("kernel_w", block.kernel_w);
        b.Require("freq_pool", block.freq_pool);
        b.Finish();
        setup.model.conv.push_back(block);
      }
    }
    m.Get("gru", setup.model.gru);
    m.Get("dense", setup.model.dense);
    m.Get("keep_prob", setup.model.keep_prob);
    m.Finish();
  }
  if (r.Has("train")) {
    ObjectReader t(r.Sub("train"), "train");
    auto& c = setup.train;
    t.Get("batch_size", c.batch_size);
    t.Get("max_epochs", c.max_epochs);
    t.Get("initial_lr", c.initial_lr);
    t.Get("lr_decay", c.lr_decay);
    t.Get("early_stop_patience", c.early_stop_patience);
    t.Get("crop_len_T", c.crop_len_T);
    t.Get("mixup_prob", c.mixup_prob);
    t.Get("mixup_alpha", c.mixup_alpha);
    t.Get("eval_segment_len_s", c.eval_segment_len_s);
    t.Get("threshold", c.post.threshold);
    t.Get("min_dur_s", c.post.min_dur_s);
    t.Get("max_gap_s", c.post.max_gap_s);
    t.Finish();
  }
  if (r.Has("search")) {
    ObjectReader s(r.Sub("search"), "search");
    SearchSpace space;
    s.Require("n_trials", setup.search_trials);
    s.Require("epochs_per_trial", setup.search_epochs);
    Pair(s, "log10_lr", space.log10_lr);
    Pair(s, "lr_decay", space.lr_decay);
    Pair(s, "keep_prob", space.keep_prob);
    s.Get("batch_sizes", space.batch_sizes);
    s.Get("conv_filters", space.conv_filters);
    s.Get("gru_hidden", space.gru_hidden);
    s.Finish();
    setup.search = space;
  }
  r.Finish();
  setup.train.Validate();
  return setup;
}

json ReadJsonFile(const std::filesystem::path& path) {
  const std::string text = ReadFileBytes(path);
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    Fail(ErrorKind::kConfig, path.string() + ": " + e.what());
  }
}

}  // namespace sed
