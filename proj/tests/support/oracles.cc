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

#include "oracles.h"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "sed/layers.h"

namespace sedtest {

using sed::Tensor;

BruteCounts BruteSegmentCounts(const sed::EventRoll& ref, const sed::EventRoll& sys) {
  BruteCounts c;
  for (size_t k = 0; k < ref.num_segments; ++k) {
    long fp_k = 0, fn_k = 0;
    for (size_t cl = 0; cl < ref.num_classes(); ++cl) {
      const bool r = ref.at(cl, k) != 0, s = sys.at(cl, k) != 0;
      if (r && s) ++c.tp;
      if (!r && s) ++fp_k;
      if (r && !s) ++fn_k;
      if (!r && !s) ++c.tn;
      if (r) ++c.n;
    }
    c.fp += fp_k;
    c.fn += fn_k;
    const long sub = std::min(fp_k, fn_k);
    c.s += sub;
    c.d += fn_k - sub;
    c.i += fp_k - sub;
  }
  return c;
}

double TrapezoidAuc(const std::vector<double>& scores, const std::vector<int>& labels) {
  std::vector<size_t> order(scores.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](size_t a, size_t b) { return scores[a] > scores[b]; });
  double pos = 0, neg = 0;
  for (int l : labels) (l ? pos : neg) += 1;
  double tp = 0, fp = 0, prev_tpr = 0, prev_fpr = 0, area = 0;
  size_t i = 0;
  while (i < order.size()) {
    const double thr = scores[order[i]];
    while (i < order.size() && scores[order[i]] == thr) {
      (labels[order[i]] ? tp : fp) += 1;
      ++i;
    }
    const double tpr = tp / pos, fpr = fp / neg;
    area += (fpr - prev_fpr) * (tpr + prev_tpr) / 2.0;
    prev_tpr = tpr;
    prev_fpr = fpr;
  }
  return area;
}

sed::EventRoll RandomRoll(std::mt19937_64& rng, const sed::Vocabulary& vocab,
                          size_t segments, double density) {
  sed::EventRoll roll(vocab, 1.0, segments);
  std::bernoulli_distribution bit(density);
  for (auto& a : roll.activity) a = bit(rng) ? 1 : 0;
  return roll;
}

double CentralDiff(const std::function<double()>& f, double& x, double step) {
  const double saved = x;
  x = saved + step;
  const double up = f();
  x = saved - step;
  const double down = f();
  x = saved;
  return (up - down) / (2.0 * step);
}

double RelError(double analytic, double numeric, double floor) {
  const double denom = std::max({std::abs(analytic), std::abs(numeric), floor});
  return std::abs(analytic - numeric) / denom;
}

void CheckTensorGrad(const std::string& name, Tensor& param, const Tensor& analytic,
                     const std::function<double()>& loss, double step, GradReport& report) {
  for (size_t i = 0; i < param.size(); ++i) {
    const double numeric = CentralDiff(loss, param.data[i], step);
    const double err = RelError(analytic.data[i], numeric);
    ++report.checked;
    if (report.worst.empty() || err > report.max_rel_err) {
      report.max_rel_err = err;
      report.worst = name + "[" + std::to_string(i) + "]";
    }
  }
}

Tensor RandomTensor(std::mt19937_64& rng, std::vector<size_t> dims, double lo, double hi) {
  Tensor t(std::move(dims));
  std::uniform_real_distribution<double> u(lo, hi);
  for (auto& v : t.data) v = u(rng);
  return t;
}

namespace {

constexpr double kStep = 1e-5;

// Weighted sum of the entries: a scalar loss whose gradient is `w`.
double Dot(const Tensor& a, const Tensor& w) {
  double s = 0.0;
  for (size_t i = 0; i < a.size(); ++i) s += a.data[i] * w.data[i];
  return s;
}

// Values at least `gap` away from each other and from zero, shuffled.
Tensor SpreadTensor(std::mt19937_64& rng, std::vector<size_t> dims, double gap) {
  Tensor t(std::move(dims));
  std::vector<double> vals(t.size());
  for (size_t i = 0; i < vals.size(); ++i) {
    vals[i] = (static_cast<double>(i) - static_cast<double>(vals.size()) / 2.0 + 0.5) * gap;
  }
  std::shuffle(vals.begin(), vals.end(), rng);
  t.data = vals;
  return t;
}

GradReport ConvCheck(std::mt19937_64& rng) {
  GradReport rep;
  Tensor x = RandomTensor(rng, {2, 5, 6});
  sed::ConvParams p{RandomTensor(rng, {3, 2, 3, 3}), RandomTensor(rng, {3})};
  const Tensor w = RandomTensor(rng, {3, 5, 6});
  auto loss = [&] { return Dot(sed::Conv2dForward(x, p), w); };
  sed::ConvParams g = sed::ZeroLike(p);
  const Tensor dx = sed::Conv2dBackward(x, p, w, g);
  CheckTensorGrad("conv.x", x, dx, loss, kStep, rep);
  CheckTensorGrad("conv.kernels", p.kernels, g.kernels, loss, kStep, rep);
  CheckTensorGrad("conv.bias", p.bias, g.bias, loss, kStep, rep);
  // Even kernel sizes use asymmetric padding.
  sed::ConvParams q{RandomTensor(rng, {2, 2, 2, 4}), RandomTensor(rng, {2})};
  const Tensor w2 = RandomTensor(rng, {2, 5, 6});
  auto loss2 = [&] { return Dot(sed::Conv2dForward(x, q), w2); };
  sed::ConvParams g2 = sed::ZeroLike(q);
  const Tensor dx2 = sed::Conv2dBackward(x, q, w2, g2);
  CheckTensorGrad("conv_even.x", x, dx2, loss2, kStep, rep);
  CheckTensorGrad("conv_even.kernels", q.kernels, g2.kernels, loss2, kStep, rep);
  return rep;
}

GradReport ReluCheck(std::mt19937_64& rng) {
  GradReport rep;
  // Kinks are avoided by keeping every input at least 1e-2 from zero.
  Tensor x = SpreadTensor(rng, {3, 4, 5}, 0.02);
  const Tensor w = RandomTensor(rng, {3, 4, 5});
  auto loss = [&] { return Dot(sed::Relu(x), w); };
  const Tensor dx = sed::ReluBackward(sed::Relu(x), w);
  CheckTensorGrad("relu.x", x, dx, loss, kStep, rep);
  return rep;
}

GradReport PoolCheck(std::mt19937_64& rng) {
  GradReport rep;
  Tensor x = SpreadTensor(rng, {2, 6, 4}, 0.01);
  const Tensor w = RandomTensor(rng, {2, 3, 4});
  auto loss = [&] { return Dot(sed::MaxPoolFreq(x, 2), w); };
  std::vector<uint32_t> argmax;
  sed::MaxPoolFreq(x, 2, &argmax);
  const Tensor dx = sed::MaxPoolFreqBackward(x.dims, argmax, w);
  CheckTensorGrad("pool.x", x, dx, loss, kStep, rep);
  return rep;
}

GradReport GruCheck(std::mt19937_64& rng) {
  GradReport rep;
  const size_t d = 3, h = 4, t = 5;
  Tensor x = RandomTensor(rng, {d, t});
  Tensor h0 = RandomTensor(rng, {h}, -0.5, 0.5);
  sed::GruParams p;
  for (Tensor* m : {&p.w_z, &p.w_r, &p.w_h}) *m = RandomTensor(rng, {h, d});
  for (Tensor* m : {&p.u_z, &p.u_r, &p.u_h}) *m = RandomTensor(rng, {h, h});
  for (Tensor* m : {&p.b_z, &p.b_r, &p.b_h}) *m = RandomTensor(rng, {h}, -0.5, 0.5);
  const Tensor w = RandomTensor(rng, {h, t});
  auto loss = [&] { return Dot(sed::GruForward(x, p, h0), w); };
  sed::GruCache cache;
  sed::GruForward(x, p, h0, &cache);
  sed::GruParams g = sed::ZeroLike(p);
  Tensor dh0;
  const Tensor dx = sed::GruBackward(x, p, cache, w, g, &dh0);
  CheckTensorGrad("gru.x", x, dx, loss, kStep, rep);
  CheckTensorGrad("gru.h0", h0, dh0, loss, kStep, rep);
  const std::pair<const char*, std::pair<Tensor*, Tensor*>> pairs[] = {
      {"gru.w_z", {&p.w_z, &g.w_z}}, {"gru.w_r", {&p.w_r, &g.w_r}},
      {"gru.w_h", {&p.w_h, &g.w_h}}, {"gru.u_z", {&p.u_z, &g.u_z}},
      {"gru.u_r", {&p.u_r, &g.u_r}}, {"gru.u_h", {&p.u_h, &g.u_h}},
      {"gru.b_z", {&p.b_z, &g.b_z}}, {"gru.b_r", {&p.b_r, &g.b_r}},
      {"gru.b_h", {&p.b_h, &g.b_h}}};
  for (const auto& [name, pg] : pairs) CheckTensorGrad(name, *pg.first, *pg.second, loss, kStep, rep);
  return rep;
}

GradReport DenseCheck(std::mt19937_64& rng) {
  GradReport rep;
  Tensor x = RandomTensor(rng, {4, 3});
  sed::DenseParams p{RandomTensor(rng, {5, 4}), RandomTensor(rng, {5})};
  const Tensor w = RandomTensor(rng, {5, 3});
  auto loss = [&] { return Dot(sed::DenseForward(x, p), w); };
  sed::DenseParams g = sed::ZeroLike(p);
  const Tensor dx = sed::DenseBackward(x, p, w, g);
  CheckTensorGrad("dense.x", x, dx, loss, kStep, rep);
  CheckTensorGrad("dense.weight", p.weight, g.weight, loss, kStep, rep);
  CheckTensorGrad("dense.bias", p.bias, g.bias, loss, kStep, rep);
  return rep;
}

GradReport SigmoidCheck(std::mt19937_64& rng) {
  GradReport rep;
  Tensor x = RandomTensor(rng, {3, 4}, -4.0, 4.0);
  const Tensor w = RandomTensor(rng, {3, 4});
  auto loss = [&] { return Dot(sed::Sigmoid(x), w); };
  const Tensor dx = sed::SigmoidBackward(sed::Sigmoid(x), w);
  CheckTensorGrad("sigmoid.x", x, dx, loss, kStep, rep);
  return rep;
}

GradReport SoftmaxCheck(std::mt19937_64& rng) {
  GradReport rep;
  Tensor x = RandomTensor(rng, {4, 3}, -3.0, 3.0);
  const Tensor w = RandomTensor(rng, {4, 3});
  auto loss = [&] { return Dot(sed::Softmax(x), w); };
  const Tensor dx = sed::SoftmaxBackward(sed::Softmax(x), w);
  CheckTensorGrad("softmax.x", x, dx, loss, kStep, rep);
  return rep;
}

GradReport BceCheck(std::mt19937_64& rng) {
  GradReport rep;
  Tensor pred = RandomTensor(rng, {3, 4}, 0.05, 0.95);
  Tensor target = RandomTensor(rng, {3, 4}, 0.0, 1.0);
  auto loss = [&] { return sed::BceLoss(pred, target); };
  const Tensor dp = sed::BceGrad(pred, target);
  CheckTensorGrad("bce.pred", pred, dp, loss, kStep, rep);
  return rep;
}

GradReport CrnnCheck(std::mt19937_64& rng, uint64_t seed) {
  GradReport rep;
  const sed::CrnnConfig cfg = TinyCrnnConfig();
  sed::CrnnParams params = sed::InitParams(cfg, seed);
  // Non-zero biases so every bias gradient is exercised away from symmetry.
  sed::ForEachParam(params, [&](const std::string& name, Tensor& t) {
    if (name.find("bias") != std::string::npos || name.find(".b_") != std::string::npos) {
      t = RandomTensor(rng, t.dims, -0.3, 0.3);
    }
  });
  Tensor input = RandomTensor(rng, {1, static_cast<size_t>(cfg.n_mels), 4}, -2.0, 2.0);
  Tensor target({static_cast<size_t>(cfg.n_classes), 4});
  std::bernoulli_distribution bit(0.5);
  for (auto& v : target.data) v = bit(rng) ? 1.0 : 0.0;

  // Dropout active with a fixed mask: the rng is reseeded for every pass.
  const uint64_t mask_seed = seed ^ 0x5eedull;
  auto loss = [&] {
    std::mt19937_64 drop(mask_seed);
    return sed::CrnnLossAndGrad(input, target, cfg, params, true, &drop, nullptr);
  };
  sed::CrnnParams grad;
  {
    std::mt19937_64 drop(mask_seed);
    sed::CrnnLossAndGrad(input, target, cfg, params, true, &drop, &grad);
  }
  std::vector<Tensor*> analytic;
  sed::ForEachParam(grad, [&](const std::string&, Tensor& t) { analytic.push_back(&t); });
  size_t idx = 0;
  sed::ForEachParam(params, [&](const std::string& name, Tensor& t) {
    CheckTensorGrad("crnn." + name, t, *analytic[idx++], loss, kStep, rep);
  });

  // Input gradient through the whole stack.
  sed::CrnnCache cache;
  std::mt19937_64 drop(mask_seed);
  const Tensor probs = sed::CrnnForward(input, cfg, params, true, &drop, &cache);
  Tensor dlogits(probs.dims);
  for (size_t i = 0; i < probs.size(); ++i) {
    dlogits.data[i] = (probs.data[i] - target.data[i]) / static_cast<double>(probs.size());
  }
  Tensor dinput;
  sed::CrnnBackward(cfg, params, cache, dlogits, &dinput);
  CheckTensorGrad("crnn.input", input, dinput, loss, kStep, rep);
  return rep;
}

}  // namespace

sed::CrnnConfig TinyCrnnConfig() {
  sed::CrnnConfig cfg;
  cfg.n_mels = 2;
  cfg.conv = {{2, 3, 3, 2}};
  cfg.gru = {3};
  cfg.dense = {3};
  cfg.n_classes = 2;
  cfg.keep_prob = 0.8;
  return cfg;
}

std::vector<std::pair<std::string, GradReport>> LayerGradientSuite(uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<std::pair<std::string, GradReport>> out;
  out.emplace_back("conv", ConvCheck(rng));
  out.emplace_back("relu", ReluCheck(rng));
  out.emplace_back("pool", PoolCheck(rng));
  out.emplace_back("gru", GruCheck(rng));
  out.emplace_back("dense", DenseCheck(rng));
  out.emplace_back("sigmoid", SigmoidCheck(rng));
  out.emplace_back("softmax", SoftmaxCheck(rng));
  out.emplace_back("bce", BceCheck(rng));
  out.emplace_back("crnn", CrnnCheck(rng, seed));
  return out;
}

}  // namespace sedtest
