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

#include "sed/crnn.h"

#include <cmath>

#include "sed/error.h"

namespace sed {

void CrnnConfig::Validate() const {
  if (n_mels < 1 || n_classes < 1) {
    Fail(ErrorKind::kConfig, "n_mels and n_classes must be >= 1");
  }
  int bands = n_mels;
  for (size_t i = 0; i < conv.size(); ++i) {
    const auto& b = conv[i];
    if (b.filters < 1 || b.kernel_h < 1 || b.kernel_w < 1 || b.freq_pool < 1) {
      Fail(ErrorKind::kConfig, "conv block " + std::to_string(i) +
                                   ": sizes must be >= 1");
    }
    if (bands % b.freq_pool != 0) {
      Fail(ErrorKind::kConfig, "conv block " + std::to_string(i) + ": pool " +
                                   std::to_string(b.freq_pool) +
                                   " does not divide " + std::to_string(bands) +
                                   " bands");
    }
    bands /= b.freq_pool;
  }
  for (int h : gru) {
    if (h < 1) Fail(ErrorKind::kConfig, "GRU sizes must be >= 1");
  }
  for (int d : dense) {
    if (d < 1) Fail(ErrorKind::kConfig, "dense sizes must be >= 1");
  }
  if (!(keep_prob > 0.0 && keep_prob <= 1.0)) {
    Fail(ErrorKind::kConfig, "keep_prob must be in (0, 1]");
  }
}

int CrnnConfig::PooledBands() const {
  int bands = n_mels;
  for (const auto& b : conv) bands /= b.freq_pool;
  return bands;
}

int CrnnConfig::StackedSize() const {
  return PooledBands() * (conv.empty() ? 1 : conv.back().filters);
}

void ForEachParam(CrnnParams& params,
                  const std::function<void(const std::string&, Tensor&)>& fn) {
  for (size_t i = 0; i < params.conv.size(); ++i) {
    const std::string p = "conv" + std::to_string(i) + ".";
    fn(p + "kernels", params.conv[i].kernels);
    fn(p + "bias", params.conv[i].bias);
  }
  for (size_t i = 0; i < params.gru.size(); ++i) {
    const std::string p = "gru" + std::to_string(i) + ".";
    auto& g = params.gru[i];
    fn(p + "w_z", g.w_z);
    fn(p + "w_r", g.w_r);
    fn(p + "w_h", g.w_h);
    fn(p + "u_z", g.u_z);
    fn(p + "u_r", g.u_r);
    fn(p + "u_h", g.u_h);
    fn(p + "b_z", g.b_z);
    fn(p + "b_r", g.b_r);
    fn(p + "b_h", g.b_h);
  }
  for (size_t i = 0; i < params.dense.size(); ++i) {
    const std::string p = "dense" + std::to_string(i) + ".";
    fn(p + "weight", params.dense[i].weight);
    fn(p + "bias", params.dense[i].bias);
  }
}

void ForEachParam(
    const CrnnParams& params,
    const std::function<void(const std::string&, const Tensor&)>& fn) {
  ForEachParam(const_cast<CrnnParams&>(params),
               [&](const std::string& name, Tensor& t) { fn(name, t); });
}

size_t ParamCount(const CrnnParams& params) {
  size_t n = 0;
  ForEachParam(params, [&](const std::string&, const Tensor& t) { n += t.size(); });
  return n;
}

CrnnParams ZeroLike(const CrnnParams& params) {
  CrnnParams z;
  for (const auto& c : params.conv) z.conv.push_back(ZeroLike(c));
  for (const auto& g : params.gru) z.gru.push_back(ZeroLike(g));
  for (const auto& d : params.dense) z.dense.push_back(ZeroLike(d));
  return z;
}

namespace {

// Shapes implied by the config, in ForEachParam order.
std::vector<std::vector<size_t>> ExpectedShapes(const CrnnConfig& cfg) {
  std::vector<std::vector<size_t>> shapes;
  size_t channels = 1;
  for (const auto& b : cfg.conv) {
    shapes.push_back({size_t(b.filters), channels, size_t(b.kernel_h), size_t(b.kernel_w)});
    shapes.push_back({size_t(b.filters)});
    channels = b.filters;
  }
  size_t in = cfg.StackedSize();
  for (int h : cfg.gru) {
    const size_t hs = h;
    for (int k = 0; k < 3; ++k) shapes.push_back({hs, in});
    for (int k = 0; k < 3; ++k) shapes.push_back({hs, hs});
    for (int k = 0; k < 3; ++k) shapes.push_back({hs});
    in = hs;
  }
  for (int d : cfg.dense) {
    shapes.push_back({size_t(d), in});
    shapes.push_back({size_t(d)});
    in = d;
  }
  shapes.push_back({size_t(cfg.n_classes), in});
  shapes.push_back({size_t(cfg.n_classes)});
  return shapes;
}

CrnnParams ShapedParams(const CrnnConfig& cfg) {
  CrnnParams p;
  p.conv.resize(cfg.conv.size());
  p.gru.resize(cfg.gru.size());
  p.dense.resize(cfg.dense.size() + 1);
  const auto shapes = ExpectedShapes(cfg);
  size_t k = 0;
  ForEachParam(p, [&](const std::string&, Tensor& t) { t = Tensor(shapes[k++]); });
  return p;
}

}  // namespace

void CheckParams(const CrnnConfig& cfg, const CrnnParams& params) {
  cfg.Validate();
  if (params.conv.size() != cfg.conv.size() || params.gru.size() != cfg.gru.size() ||
      params.dense.size() != cfg.dense.size() + 1) {
    Fail(ErrorKind::kConfig, "parameter layer counts do not match the config");
  }
  const auto shapes = ExpectedShapes(cfg);
  size_t k = 0;
  ForEachParam(params, [&](const std::string& name, const Tensor& t) {
    if (t.dims != shapes[k]) {
      Fail(ErrorKind::kConfig, name + ": expected " + ShapeString(shapes[k]) +
                                   ", got " + ShapeString(t.dims));
    }
    ++k;
  });
}

CrnnParams InitParams(const CrnnConfig& cfg, uint64_t seed) {
  cfg.Validate();
  CrnnParams p = ShapedParams(cfg);
  std::mt19937_64 rng(seed);
  auto glorot = [&](Tensor& w, double fan_in, double fan_out) {
    const double limit = std::sqrt(6.0 / (fan_in + fan_out));
    std::uniform_real_distribution<double> u(-limit, limit);
    for (auto& v : w.data) v = u(rng);
  };
  for (auto& c : p.conv) {
    const double receptive = double(c.kernels.dim(2) * c.kernels.dim(3));
    glorot(c.kernels, c.kernels.dim(1) * receptive, c.kernels.dim(0) * receptive);
  }
  for (auto& g : p.gru) {
    for (Tensor* w : {&g.w_z, &g.w_r, &g.w_h, &g.u_z, &g.u_r, &g.u_h}) {
      glorot(*w, double(w->dim(1)), double(w->dim(0)));
    }
  }
  for (auto& d : p.dense) glorot(d.weight, double(d.weight.dim(1)), double(d.weight.dim(0)));
  return p;
}

Tensor FeaturesToInput(const FeatureMatrix& features) {
  const size_t t_n = features.num_frames(), b_n = features.num_bands();
  Tensor x({1, b_n, t_n});
  for (size_t t = 0; t < t_n; ++t)
    for (size_t b = 0; b < b_n; ++b) x[b * t_n + t] = features.values(t, b);
  return x;
}

Tensor CrnnForward(const Tensor& input, const CrnnConfig& cfg,
                   const CrnnParams& params, bool training,
                   std::mt19937_64* rng, CrnnCache* cache) {
  CheckParams(cfg, params);
  if (input.rank() != 3 || input.dim(0) != 1 ||
      input.dim(1) != static_cast<size_t>(cfg.n_mels)) {
    Fail(ErrorKind::kConfig, "CRNN input must be [1 x " +
                                 std::to_string(cfg.n_mels) + " x T], got " +
                                 ShapeString(input.dims));
  }
  const bool drop = training && cfg.keep_prob < 1.0;
  if (drop && rng == nullptr) Fail(ErrorKind::kConfig, "training needs an rng");
  std::mt19937_64 unused;
  std::mt19937_64& gen = rng ? *rng : unused;

  CrnnCache local;
  CrnnCache& c = cache ? *cache : local;
  c.conv.assign(cfg.conv.size(), {});
  c.gru.assign(cfg.gru.size(), {});
  c.dense.assign(cfg.dense.size(), {});

  Tensor x = input;
  for (size_t i = 0; i < cfg.conv.size(); ++i) {
    auto& cc = c.conv[i];
    cc.input = std::move(x);
    cc.relu_out = Relu(Conv2dForward(cc.input, params.conv[i]));
    Tensor pooled = MaxPoolFreq(cc.relu_out, cfg.conv[i].freq_pool, &cc.argmax);
    cc.output = Dropout(pooled, cfg.keep_prob, gen, drop, &cc.mask);
    x = cc.output;
  }
  c.stacked = StackFreq(x);
  Tensor seq = c.stacked;
  for (size_t i = 0; i < cfg.gru.size(); ++i) {
    auto& gc = c.gru[i];
    gc.input = std::move(seq);
    Tensor h0({static_cast<size_t>(cfg.gru[i])});
    gc.output = GruForward(gc.input, params.gru[i], h0, &gc.state);
    seq = Dropout(gc.output, cfg.keep_prob, gen, drop, &gc.mask);
  }
  for (size_t i = 0; i < cfg.dense.size(); ++i) {
    auto& dc = c.dense[i];
    dc.input = std::move(seq);
    dc.output = Sigmoid(DenseForward(dc.input, params.dense[i]));
    seq = Dropout(dc.output, cfg.keep_prob, gen, drop, &dc.mask);
  }
  c.output_input = std::move(seq);
  c.probs = Sigmoid(DenseForward(c.output_input, params.dense.back()));
  return c.probs;
}

SoftTargetMatrix CrnnForward(const FeatureMatrix& features, const CrnnConfig& cfg,
                             const CrnnParams& params, bool training,
                             std::mt19937_64* rng) {
  Tensor probs = CrnnForward(FeaturesToInput(features), cfg, params, training, rng);
  SoftTargetMatrix out(probs.dim(0), probs.dim(1));
  out.data = std::move(probs.data);
  return out;
}

CrnnParams CrnnBackward(const CrnnConfig& cfg, const CrnnParams& params,
                        const CrnnCache& c, const Tensor& dlogits,
                        Tensor* dinput) {
  CrnnParams g = ZeroLike(params);
  Tensor d = DenseBackward(c.output_input, params.dense.back(), dlogits, g.dense.back());
  for (size_t i = cfg.dense.size(); i-- > 0;) {
    const auto& dc = c.dense[i];
    d = SigmoidBackward(dc.output, DropoutBackward(dc.mask, d));
    d = DenseBackward(dc.input, params.dense[i], d, g.dense[i]);
  }
  for (size_t i = cfg.gru.size(); i-- > 0;) {
    const auto& gc = c.gru[i];
    d = GruBackward(gc.input, params.gru[i], gc.state, DropoutBackward(gc.mask, d),
                    g.gru[i]);
  }
  if (!cfg.conv.empty()) {
    const auto& last = c.conv.back().output;
    d = UnstackFreq(d, last.dim(0), last.dim(1));
  } else {
    d = UnstackFreq(d, 1, static_cast<size_t>(cfg.n_mels));
  }
  for (size_t i = cfg.conv.size(); i-- > 0;) {
    const auto& cc = c.conv[i];
    d = DropoutBackward(cc.mask, d);
    d = MaxPoolFreqBackward(cc.relu_out.dims, cc.argmax, d);
    d = ReluBackward(cc.relu_out, d);
    d = Conv2dBackward(cc.input, params.conv[i], d, g.conv[i]);
  }
  if (dinput) *dinput = std::move(d);
  return g;
}

double CrnnLossAndGrad(const Tensor& input, const Tensor& target,
                       const CrnnConfig& cfg, const CrnnParams& params,
                       bool training, std::mt19937_64* rng, CrnnParams* grad) {
  CrnnCache cache;
  const Tensor probs = CrnnForward(input, cfg, params, training, rng, &cache);
  const double loss = BceLoss(probs, target);
  if (grad) {
    Tensor dlogits(probs.dims);
    const double inv_n = 1.0 / static_cast<double>(probs.size());
    for (size_t i = 0; i < probs.size(); ++i) {
      dlogits[i] = (probs[i] - target[i]) * inv_n;
    }
    *grad = CrnnBackward(cfg, params, cache, dlogits);
  }
  return loss;
}

}  // namespace sed
