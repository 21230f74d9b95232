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

#include "sed/model.h"

#include <cmath>
#include <map>

#include "json.hpp"
#include "sed/error.h"
#include "sed/fileutil.h"

namespace sed {

using nlohmann::json;

FeatureMatrix InputNormalizer::Apply(const FeatureMatrix& features) const {
  if (empty()) return features;
  if (mean.size() != features.num_bands()) {
    Fail(ErrorKind::kDimension, "normalizer has " + std::to_string(mean.size()) +
                                    " bands, features have " +
                                    std::to_string(features.num_bands()));
  }
  FeatureMatrix out = features;
  for (size_t t = 0; t < out.num_frames(); ++t) {
    double* row = out.values.row(t);
    for (size_t b = 0; b < mean.size(); ++b) row[b] = (row[b] - mean[b]) / stddev[b];
  }
  return out;
}

InputNormalizer InputNormalizer::Fit(const std::vector<const FeatureMatrix*>& items) {
  InputNormalizer n;
  if (items.empty()) return n;
  const size_t bands = items.front()->num_bands();
  std::vector<double> sum(bands, 0.0), sq(bands, 0.0);
  double count = 0.0;
  for (const auto* f : items) {
    if (f->num_bands() != bands) Fail(ErrorKind::kDimension, "band count differs");
    for (size_t t = 0; t < f->num_frames(); ++t) {
      const double* row = f->values.row(t);
      for (size_t b = 0; b < bands; ++b) {
        sum[b] += row[b];
        sq[b] += row[b] * row[b];
      }
    }
    count += static_cast<double>(f->num_frames());
  }
  if (count == 0.0) return n;
  n.mean.resize(bands);
  n.stddev.resize(bands);
  for (size_t b = 0; b < bands; ++b) {
    n.mean[b] = sum[b] / count;
    const double var = std::max(0.0, sq[b] / count - n.mean[b] * n.mean[b]);
    // Rounded to f32 here so a reloaded checkpoint normalizes identically.
    n.mean[b] = static_cast<float>(n.mean[b]);
    n.stddev[b] = static_cast<float>(std::max(std::sqrt(var), 1e-6));
  }
  return n;
}

SoftTargetMatrix Model::Predict(const FeatureMatrix& feats) const {
  return CrnnForward(normalizer.Apply(feats), config, params, false, nullptr);
}

namespace {

constexpr const char* kNormMean = "input.mean";
constexpr const char* kNormStd = "input.std";

json ConfigToJson(const Model& m) {
  json conv = json::array();
  for (const auto& b : m.config.conv) {
    conv.push_back({{"filters", b.filters},
                    {"kernel_h", b.kernel_h},
                    {"kernel_w", b.kernel_w},
                    {"freq_pool", b.freq_pool}});
  }
  json feats = {{"window_len_s", m.features.window_len_s},
                {"hop_len_s", m.features.hop_len_s},
                {"n_mels", m.features.n_mels},
                {"fmin", m.features.fmin},
                {"log_floor", m.features.log_floor}};
  feats["fmax"] = m.features.fmax ? json(*m.features.fmax) : json(nullptr);
  return {{"crnn",
           {{"n_mels", m.config.n_mels},
            {"conv", conv},
            {"gru", m.config.gru},
            {"dense", m.config.dense},
            {"n_classes", m.config.n_classes},
            {"keep_prob", m.config.keep_prob},
            {"seed", m.config.seed}}},
          {"vocabulary", m.vocab.classes()},
          {"features", feats}};
}

void ConfigFromJson(const json& j, Model& m) {
  const json& c = j.at("crnn");
  m.config.n_mels = c.at("n_mels").get<int>();
  m.config.conv.clear();
  for (const auto& b : c.at("conv")) {
    m.config.conv.push_back({b.at("filters").get<int>(), b.at("kernel_h").get<int>(),
                             b.at("kernel_w").get<int>(), b.at("freq_pool").get<int>()});
  }
  m.config.gru = c.at("gru").get<std::vector<int>>();
  m.config.dense = c.at("dense").get<std::vector<int>>();
  m.config.n_classes = c.at("n_classes").get<int>();
  m.config.keep_prob = c.at("keep_prob").get<double>();
  m.config.seed = c.at("seed").get<uint64_t>();
  m.vocab = Vocabulary(j.at("vocabulary").get<std::vector<std::string>>());
  const json& f = j.at("features");
  m.features.window_len_s = f.at("window_len_s").get<double>();
  m.features.hop_len_s = f.at("hop_len_s").get<double>();
  m.features.n_mels = f.at("n_mels").get<int>();
  m.features.fmin = f.at("fmin").get<double>();
  m.features.log_floor = f.at("log_floor").get<double>();
  if (f.at("fmax").is_null()) {
    m.features.fmax.reset();
  } else {
    m.features.fmax = f.at("fmax").get<double>();
  }
}

void PutTensor(ByteWriter& w, const std::string& name, const Tensor& t) {
  w.U16(static_cast<uint16_t>(name.size()));
  w.Bytes(name);
  w.U8(static_cast<uint8_t>(t.rank()));
  for (size_t d : t.dims) w.U32(static_cast<uint32_t>(d));
  for (double v : t.data) w.F32(static_cast<float>(v));
}

}  // namespace

std::string EncodeCheckpoint(const Model& model) {
  CheckParams(model.config, model.params);
  if (model.vocab.size() != static_cast<size_t>(model.config.n_classes)) {
    Fail(ErrorKind::kModel, "vocabulary size differs from n_classes");
  }
  ByteWriter w;
  w.Bytes("SEDM");
  w.U32(1);
  const std::string cfg = ConfigToJson(model).dump();
  w.U32(static_cast<uint32_t>(cfg.size()));
  w.Bytes(cfg);
  const uint32_t extra = model.normalizer.empty() ? 0 : 2;
  w.U32(static_cast<uint32_t>(
      (model.params.conv.size() * 2 + model.params.gru.size() * 9 +
       model.params.dense.size() * 2) + extra));
  ForEachParam(model.params,
               [&](const std::string& name, const Tensor& t) { PutTensor(w, name, t); });
  if (extra) {
    Tensor mean({model.normalizer.mean.size()}), sd({model.normalizer.stddev.size()});
    mean.data = model.normalizer.mean;
    sd.data = model.normalizer.stddev;
    PutTensor(w, kNormMean, mean);
    PutTensor(w, kNormStd, sd);
  }
  return w.str();
}

Model DecodeCheckpoint(std::string_view bytes) {
  ByteReader rd(bytes, "SEDM");
  if (rd.remaining() < 4 || rd.Bytes(4) != "SEDM") {
    Fail(ErrorKind::kFormat, "missing SEDM magic");
  }
  const uint32_t version = rd.U32();
  if (version != 1) Fail(ErrorKind::kUnsupported, "SEDM version " + std::to_string(version));
  Model m;
  const uint32_t len = rd.U32();
  try {
    ConfigFromJson(json::parse(rd.Bytes(len)), m);
  } catch (const json::exception& e) {
    Fail(ErrorKind::kFormat, std::string("SEDM config block: ") + e.what());
  } catch (const Error& e) {
    Fail(ErrorKind::kFormat, std::string("SEDM config block: ") + e.what());
  }

  std::map<std::string, Tensor> tensors;
  const uint32_t count = rd.U32();
  for (uint32_t i = 0; i < count; ++i) {
    const uint16_t name_len = rd.U16();
    std::string name(rd.Bytes(name_len));
    const uint8_t rank = rd.U8();
    std::vector<size_t> dims(rank);
    uint64_t n = 1;
    for (auto& d : dims) {
      d = rd.U32();
      n *= d;
    }
    if (n * 4 > rd.remaining()) Fail(ErrorKind::kFormat, "tensor '" + name + "' truncated");
    Tensor t(dims);
    for (auto& v : t.data) v = rd.F32();
    if (!tensors.emplace(name, std::move(t)).second) {
      Fail(ErrorKind::kFormat, "duplicate tensor '" + name + "'");
    }
  }
  if (rd.remaining() != 0) Fail(ErrorKind::kFormat, "trailing bytes after tensors");

  m.params.conv.resize(m.config.conv.size());
  m.params.gru.resize(m.config.gru.size());
  m.params.dense.resize(m.config.dense.size() + 1);
  ForEachParam(m.params, [&](const std::string& name, Tensor& t) {
    auto it = tensors.find(name);
    if (it == tensors.end()) Fail(ErrorKind::kFormat, "missing tensor '" + name + "'");
    t = std::move(it->second);
    tensors.erase(it);
  });
  auto mean = tensors.find(kNormMean), sd = tensors.find(kNormStd);
  if (mean != tensors.end() && sd != tensors.end()) {
    m.normalizer.mean = mean->second.data;
    m.normalizer.stddev = sd->second.data;
    tensors.erase(kNormMean);
    tensors.erase(kNormStd);
  }
  if (!tensors.empty()) {
    Fail(ErrorKind::kFormat, "unexpected tensor '" + tensors.begin()->first + "'");
  }
  try {
    CheckParams(m.config, m.params);
  } catch (const Error& e) {
    Fail(ErrorKind::kFormat, e.what());
  }
  if (m.vocab.size() != static_cast<size_t>(m.config.n_classes)) {
    Fail(ErrorKind::kFormat, "vocabulary size differs from n_classes");
  }
  return m;
}

void WriteCheckpoint(const Model& model, const std::filesystem::path& path) {
  WriteFileAtomic(path, EncodeCheckpoint(model));
}

Model ReadCheckpoint(const std::filesystem::path& path) {
  return DecodeCheckpoint(ReadFileBytes(path));
}

void QuantizeToFloat(CrnnParams& params) {
  ForEachParam(params, [](const std::string&, Tensor& t) {
    for (auto& v : t.data) v = static_cast<float>(v);
  });
}

}  // namespace sed
