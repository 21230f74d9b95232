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

#include "sed/layers.h"

#include <algorithm>
#include <cmath>

#include "sed/error.h"

namespace sed {

namespace {

Tensor Zeros(const Tensor& like) { return Tensor(like.dims); }

struct Span2 {
  size_t lo, hi;
};

// Output indices i for which i + offset - pad lies inside [0, n).
Span2 ValidRange(size_t n, size_t offset, size_t pad) {
  const long lo = std::max<long>(0, static_cast<long>(pad) - static_cast<long>(offset));
  const long hi = std::min<long>(static_cast<long>(n),
                                 static_cast<long>(n) + static_cast<long>(pad) -
                                     static_cast<long>(offset));
  if (hi <= lo) return {0, 0};
  return {static_cast<size_t>(lo), static_cast<size_t>(hi)};
}

// y[o] += M[o][:] . v for M [rows x cols] row-major.
void MatVecAdd(const double* m, size_t rows, size_t cols, const double* v,
               double* y) {
  for (size_t o = 0; o < rows; ++o) {
    const double* mr = m + o * cols;
    double acc = 0.0;
    for (size_t i = 0; i < cols; ++i) acc += mr[i] * v[i];
    y[o] += acc;
  }
}

// y[i] += sum_o M[o][i] * v[o].
void MatTVecAdd(const double* m, size_t rows, size_t cols, const double* v,
                double* y) {
  for (size_t o = 0; o < rows; ++o) {
    const double* mr = m + o * cols;
    const double vo = v[o];
    if (vo == 0.0) continue;
    for (size_t i = 0; i < cols; ++i) y[i] += mr[i] * vo;
  }
}

// G[o][i] += a[o] * b[i].
void OuterAdd(const double* a, size_t rows, const double* b, size_t cols,
              double* g) {
  for (size_t o = 0; o < rows; ++o) {
    const double ao = a[o];
    if (ao == 0.0) continue;
    double* gr = g + o * cols;
    for (size_t i = 0; i < cols; ++i) gr[i] += ao * b[i];
  }
}

// Uniform double in [0, 1) from the top 53 bits.
double UnitDraw(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

void CheckGru(const Tensor& x, const GruParams& p) {
  const size_t hdim = p.hidden();
  if (x.rank() != 2) Fail(ErrorKind::kDimension, "GRU input must be [D x T]");
  const size_t d = x.dim(0);
  CheckShape(p.w_z, {hdim, d}, "GRU W_z");
  CheckShape(p.w_r, {hdim, d}, "GRU W_r");
  CheckShape(p.w_h, {hdim, d}, "GRU W_h");
  CheckShape(p.u_z, {hdim, hdim}, "GRU U_z");
  CheckShape(p.u_r, {hdim, hdim}, "GRU U_r");
  CheckShape(p.u_h, {hdim, hdim}, "GRU U_h");
  CheckShape(p.b_r, {hdim}, "GRU b_r");
  CheckShape(p.b_h, {hdim}, "GRU b_h");
}

}  // namespace

ConvParams ZeroLike(const ConvParams& p) {
  return {Zeros(p.kernels), Zeros(p.bias)};
}

GruParams ZeroLike(const GruParams& p) {
  return {Zeros(p.w_z), Zeros(p.w_r), Zeros(p.w_h), Zeros(p.u_z), Zeros(p.u_r),
          Zeros(p.u_h), Zeros(p.b_z), Zeros(p.b_r), Zeros(p.b_h)};
}

DenseParams ZeroLike(const DenseParams& p) {
  return {Zeros(p.weight), Zeros(p.bias)};
}

// ---------------------------------------------------------------- conv2d

Tensor Conv2dForward(const Tensor& x, const ConvParams& p) {
  if (x.rank() != 3 || p.kernels.rank() != 4) {
    Fail(ErrorKind::kDimension, "conv2d expects x [F x H x T], kernels rank 4");
  }
  const size_t fo_n = p.kernels.dim(0), fi_n = p.kernels.dim(1);
  const size_t kh = p.kernels.dim(2), kw = p.kernels.dim(3);
  if (x.dim(0) != fi_n) {
    Fail(ErrorKind::kDimension, "conv2d: input has " + std::to_string(x.dim(0)) +
                                    " channels, kernels expect " +
                                    std::to_string(fi_n));
  }
  CheckShape(p.bias, {fo_n}, "conv2d bias");
  const size_t h = x.dim(1), t = x.dim(2);
  const size_t ph = (kh - 1) / 2, pw = (kw - 1) / 2;

  Tensor y({fo_n, h, t});
  for (size_t fo = 0; fo < fo_n; ++fo) {
    double* yf = y.data.data() + fo * h * t;
    std::fill(yf, yf + h * t, p.bias[fo]);
    for (size_t fi = 0; fi < fi_n; ++fi) {
      const double* xf = x.data.data() + fi * h * t;
      for (size_t a = 0; a < kh; ++a) {
        const Span2 rows = ValidRange(h, a, ph);
        for (size_t c = 0; c < kw; ++c) {
          const double w = p.kernels[((fo * fi_n + fi) * kh + a) * kw + c];
          if (w == 0.0) continue;
          const Span2 cols = ValidRange(t, c, pw);
          for (size_t i = rows.lo; i < rows.hi; ++i) {
            double* yr = yf + i * t;
            const double* xr = xf + (i + a - ph) * t + c - pw;
            for (size_t j = cols.lo; j < cols.hi; ++j) yr[j] += w * xr[j];
          }
        }
      }
    }
  }
  return y;
}

Tensor Conv2dBackward(const Tensor& x, const ConvParams& p, const Tensor& dy,
                      ConvParams& grad) {
  const size_t fo_n = p.kernels.dim(0), fi_n = p.kernels.dim(1);
  const size_t kh = p.kernels.dim(2), kw = p.kernels.dim(3);
  const size_t h = x.dim(1), t = x.dim(2);
  const size_t ph = (kh - 1) / 2, pw = (kw - 1) / 2;
  CheckShape(dy, {fo_n, h, t}, "conv2d upstream gradient");

  Tensor dx(x.dims);
  for (size_t fo = 0; fo < fo_n; ++fo) {
    const double* gf = dy.data.data() + fo * h * t;
    double acc = 0.0;
    for (size_t k = 0; k < h * t; ++k) acc += gf[k];
    grad.bias[fo] += acc;
    for (size_t fi = 0; fi < fi_n; ++fi) {
      const double* xf = x.data.data() + fi * h * t;
      double* dxf = dx.data.data() + fi * h * t;
      for (size_t a = 0; a < kh; ++a) {
        const Span2 rows = ValidRange(h, a, ph);
        for (size_t c = 0; c < kw; ++c) {
          const size_t widx = ((fo * fi_n + fi) * kh + a) * kw + c;
          const double w = p.kernels[widx];
          const Span2 cols = ValidRange(t, c, pw);
          double dw = 0.0;
          for (size_t i = rows.lo; i < rows.hi; ++i) {
            const double* gr = gf + i * t;
            const double* xr = xf + (i + a - ph) * t + c - pw;
            double* dxr = dxf + (i + a - ph) * t + c - pw;
            for (size_t j = cols.lo; j < cols.hi; ++j) {
              dw += gr[j] * xr[j];
              dxr[j] += w * gr[j];
            }
          }
          grad.kernels[widx] += dw;
        }
      }
    }
  }
  return dx;
}

// ---------------------------------------------------------------- relu

Tensor Relu(const Tensor& x) {
  Tensor y = x;
  for (auto& v : y.data) v = std::max(0.0, v);
  return y;
}

Tensor ReluBackward(const Tensor& y, const Tensor& dy) {
  CheckShape(dy, y.dims, "relu upstream gradient");
  Tensor dx(y.dims);
  for (size_t i = 0; i < y.size(); ++i) dx[i] = y[i] > 0.0 ? dy[i] : 0.0;
  return dx;
}

// ---------------------------------------------------------------- pooling

Tensor MaxPoolFreq(const Tensor& x, size_t factor,
                   std::vector<uint32_t>* argmax) {
  if (x.rank() != 3) Fail(ErrorKind::kDimension, "pooling expects [F x H x T]");
  if (factor == 0 || x.dim(1) % factor != 0) {
    Fail(ErrorKind::kDimension, "pool factor " + std::to_string(factor) +
                                    " does not divide " +
                                    std::to_string(x.dim(1)) + " bands");
  }
  const size_t f_n = x.dim(0), h = x.dim(1), t = x.dim(2), ho = h / factor;
  Tensor y({f_n, ho, t});
  if (argmax) argmax->assign(y.size(), 0);
  for (size_t f = 0; f < f_n; ++f) {
    for (size_t i = 0; i < ho; ++i) {
      for (size_t j = 0; j < t; ++j) {
        size_t best = (f * h + i * factor) * t + j;
        for (size_t k = 1; k < factor; ++k) {
          const size_t idx = (f * h + i * factor + k) * t + j;
          if (x[idx] > x[best]) best = idx;
        }
        const size_t out = (f * ho + i) * t + j;
        y[out] = x[best];
        if (argmax) (*argmax)[out] = static_cast<uint32_t>(best);
      }
    }
  }
  return y;
}

Tensor MaxPoolFreqBackward(const std::vector<size_t>& input_dims,
                           const std::vector<uint32_t>& argmax,
                           const Tensor& dy) {
  if (argmax.size() != dy.size()) {
    Fail(ErrorKind::kDimension, "pool backward: argmax/gradient size mismatch");
  }
  Tensor dx(input_dims);
  for (size_t k = 0; k < dy.size(); ++k) dx[argmax[k]] += dy[k];
  return dx;
}

// ---------------------------------------------------------------- stacking

Tensor StackFreq(const Tensor& x) {
  if (x.rank() != 3) Fail(ErrorKind::kDimension, "stack expects [F x H x T]");
  Tensor y({x.dim(0) * x.dim(1), x.dim(2)});
  y.data = x.data;  // filter-major, band-minor rows: already contiguous
  return y;
}

Tensor UnstackFreq(const Tensor& y, size_t filters, size_t bands) {
  if (y.rank() != 2 || y.dim(0) != filters * bands) {
    Fail(ErrorKind::kDimension, "unstack: row count mismatch");
  }
  Tensor x({filters, bands, y.dim(1)});
  x.data = y.data;
  return x;
}

// ---------------------------------------------------------------- GRU

Tensor GruForward(const Tensor& x, const GruParams& p, const Tensor& h0,
                  GruCache* cache) {
  CheckGru(x, p);
  const size_t hdim = p.hidden(), d = x.dim(0), t_n = x.dim(1);
  CheckShape(h0, {hdim}, "GRU h0");

  std::vector<double> xt(t_n * d);  // time-major copy
  for (size_t i = 0; i < d; ++i)
    for (size_t t = 0; t < t_n; ++t) xt[t * d + i] = x[i * t_n + t];

  GruCache local;
  GruCache& c = cache ? *cache : local;
  c.h.assign((t_n + 1) * hdim, 0.0);
  c.r.assign(t_n * hdim, 0.0);
  c.z.assign(t_n * hdim, 0.0);
  c.n.assign(t_n * hdim, 0.0);
  std::copy(h0.data.begin(), h0.data.end(), c.h.begin());

  std::vector<double> az(hdim), ar(hdim), an(hdim), rh(hdim);
  for (size_t t = 0; t < t_n; ++t) {
    const double* xv = xt.data() + t * d;
    const double* hp = c.h.data() + t * hdim;
    double* hn = c.h.data() + (t + 1) * hdim;
    double* r = c.r.data() + t * hdim;
    double* z = c.z.data() + t * hdim;
    double* n = c.n.data() + t * hdim;

    std::copy(p.b_z.data.begin(), p.b_z.data.end(), az.begin());
    std::copy(p.b_r.data.begin(), p.b_r.data.end(), ar.begin());
    std::copy(p.b_h.data.begin(), p.b_h.data.end(), an.begin());
    MatVecAdd(p.w_z.data.data(), hdim, d, xv, az.data());
    MatVecAdd(p.w_r.data.data(), hdim, d, xv, ar.data());
    MatVecAdd(p.w_h.data.data(), hdim, d, xv, an.data());
    MatVecAdd(p.u_z.data.data(), hdim, hdim, hp, az.data());
    MatVecAdd(p.u_r.data.data(), hdim, hdim, hp, ar.data());
    for (size_t k = 0; k < hdim; ++k) {
      r[k] = SigmoidScalar(ar[k]);
      z[k] = SigmoidScalar(az[k]);
      rh[k] = r[k] * hp[k];
    }
    MatVecAdd(p.u_h.data.data(), hdim, hdim, rh.data(), an.data());
    for (size_t k = 0; k < hdim; ++k) {
      n[k] = std::tanh(an[k]);
      hn[k] = (1.0 - z[k]) * hp[k] + z[k] * n[k];
    }
  }

  Tensor y({hdim, t_n});
  for (size_t t = 0; t < t_n; ++t)
    for (size_t k = 0; k < hdim; ++k) y[k * t_n + t] = c.h[(t + 1) * hdim + k];
  return y;
}

Tensor GruBackward(const Tensor& x, const GruParams& p, const GruCache& c,
                   const Tensor& dy, GruParams& g, Tensor* dh0) {
  const size_t hdim = p.hidden(), d = x.dim(0), t_n = x.dim(1);
  CheckShape(dy, {hdim, t_n}, "GRU upstream gradient");

  std::vector<double> xt(t_n * d);
  for (size_t i = 0; i < d; ++i)
    for (size_t t = 0; t < t_n; ++t) xt[t * d + i] = x[i * t_n + t];
  std::vector<double> dxt(t_n * d, 0.0);

  std::vector<double> dh(hdim), dh_next(hdim, 0.0), dh_prev(hdim);
  std::vector<double> dan(hdim), daz(hdim), dar(hdim), drh(hdim), rh(hdim);
  for (size_t tt = t_n; tt-- > 0;) {
    const double* xv = xt.data() + tt * d;
    double* dxv = dxt.data() + tt * d;
    const double* hp = c.h.data() + tt * hdim;
    const double* r = c.r.data() + tt * hdim;
    const double* z = c.z.data() + tt * hdim;
    const double* n = c.n.data() + tt * hdim;

    for (size_t k = 0; k < hdim; ++k) {
      dh[k] = dy[k * t_n + tt] + dh_next[k];
      dh_prev[k] = dh[k] * (1.0 - z[k]);
      dan[k] = dh[k] * z[k] * (1.0 - n[k] * n[k]);
      daz[k] = dh[k] * (n[k] - hp[k]) * z[k] * (1.0 - z[k]);
      rh[k] = r[k] * hp[k];
      drh[k] = 0.0;
    }
    // Candidate path.
    OuterAdd(dan.data(), hdim, xv, d, g.w_h.data.data());
    OuterAdd(dan.data(), hdim, rh.data(), hdim, g.u_h.data.data());
    MatTVecAdd(p.u_h.data.data(), hdim, hdim, dan.data(), drh.data());
    MatTVecAdd(p.w_h.data.data(), hdim, d, dan.data(), dxv);
    for (size_t k = 0; k < hdim; ++k) {
      g.b_h[k] += dan[k];
      dh_prev[k] += drh[k] * r[k];
      dar[k] = drh[k] * hp[k] * r[k] * (1.0 - r[k]);
    }
    // Update gate.
    OuterAdd(daz.data(), hdim, xv, d, g.w_z.data.data());
    OuterAdd(daz.data(), hdim, hp, hdim, g.u_z.data.data());
    MatTVecAdd(p.u_z.data.data(), hdim, hdim, daz.data(), dh_prev.data());
    MatTVecAdd(p.w_z.data.data(), hdim, d, daz.data(), dxv);
    // Reset gate.
    OuterAdd(dar.data(), hdim, xv, d, g.w_r.data.data());
    OuterAdd(dar.data(), hdim, hp, hdim, g.u_r.data.data());
    MatTVecAdd(p.u_r.data.data(), hdim, hdim, dar.data(), dh_prev.data());
    MatTVecAdd(p.w_r.data.data(), hdim, d, dar.data(), dxv);
    for (size_t k = 0; k < hdim; ++k) {
      g.b_z[k] += daz[k];
      g.b_r[k] += dar[k];
    }
    dh_next = dh_prev;
  }
  if (dh0) {
    *dh0 = Tensor({hdim});
    dh0->data = dh_next;
  }
  Tensor dx({d, t_n});
  for (size_t i = 0; i < d; ++i)
    for (size_t t = 0; t < t_n; ++t) dx[i * t_n + t] = dxt[t * d + i];
  return dx;
}

// ---------------------------------------------------------------- dense

namespace {
size_t Steps(const Tensor& x) { return x.rank() == 1 ? 1 : x.dim(1); }
}  // namespace

Tensor DenseForward(const Tensor& x, const DenseParams& p) {
  if (p.weight.rank() != 2) Fail(ErrorKind::kDimension, "dense weight must be rank 2");
  const size_t out = p.weight.dim(0), in = p.weight.dim(1);
  if ((x.rank() != 1 && x.rank() != 2) || x.dim(0) != in) {
    Fail(ErrorKind::kDimension, "dense: input " + ShapeString(x.dims) +
                                    " does not match weight " +
                                    ShapeString(p.weight.dims));
  }
  CheckShape(p.bias, {out}, "dense bias");
  const size_t t_n = Steps(x);
  Tensor y = x.rank() == 1 ? Tensor({out}) : Tensor({out, t_n});
  for (size_t o = 0; o < out; ++o) {
    double* yr = y.data.data() + o * t_n;
    std::fill(yr, yr + t_n, p.bias[o]);
    for (size_t i = 0; i < in; ++i) {
      const double w = p.weight[o * in + i];
      if (w == 0.0) continue;
      const double* xr = x.data.data() + i * t_n;
      for (size_t t = 0; t < t_n; ++t) yr[t] += w * xr[t];
    }
  }
  return y;
}

Tensor DenseBackward(const Tensor& x, const DenseParams& p, const Tensor& dy,
                     DenseParams& grad) {
  const size_t out = p.weight.dim(0), in = p.weight.dim(1);
  const size_t t_n = Steps(x);
  if (dy.size() != out * t_n) Fail(ErrorKind::kDimension, "dense upstream gradient");
  Tensor dx(x.dims);
  for (size_t o = 0; o < out; ++o) {
    const double* gr = dy.data.data() + o * t_n;
    double bsum = 0.0;
    for (size_t t = 0; t < t_n; ++t) bsum += gr[t];
    grad.bias[o] += bsum;
    for (size_t i = 0; i < in; ++i) {
      const double* xr = x.data.data() + i * t_n;
      double* dxr = dx.data.data() + i * t_n;
      const double w = p.weight[o * in + i];
      double acc = 0.0;
      for (size_t t = 0; t < t_n; ++t) {
        acc += gr[t] * xr[t];
        dxr[t] += w * gr[t];
      }
      grad.weight[o * in + i] += acc;
    }
  }
  return dx;
}

// ---------------------------------------------------------------- sigmoid/softmax

double SigmoidScalar(double v) {
  if (v >= 0.0) return 1.0 / (1.0 + std::exp(-v));
  const double e = std::exp(v);
  return e / (1.0 + e);
}

Tensor Sigmoid(const Tensor& x) {
  Tensor y = x;
  for (auto& v : y.data) v = SigmoidScalar(v);
  return y;
}

Tensor SigmoidBackward(const Tensor& y, const Tensor& dy) {
  CheckShape(dy, y.dims, "sigmoid upstream gradient");
  Tensor dx(y.dims);
  for (size_t i = 0; i < y.size(); ++i) dx[i] = dy[i] * y[i] * (1.0 - y[i]);
  return dx;
}

Tensor Softmax(const Tensor& x) {
  if (x.rank() != 1 && x.rank() != 2) Fail(ErrorKind::kDimension, "softmax rank");
  const size_t c_n = x.dim(0), t_n = Steps(x);
  Tensor y(x.dims);
  for (size_t t = 0; t < t_n; ++t) {
    double m = -INFINITY;
    for (size_t c = 0; c < c_n; ++c) m = std::max(m, x[c * t_n + t]);
    double sum = 0.0;
    for (size_t c = 0; c < c_n; ++c) {
      const double e = std::exp(x[c * t_n + t] - m);
      y[c * t_n + t] = e;
      sum += e;
    }
    for (size_t c = 0; c < c_n; ++c) y[c * t_n + t] /= sum;
  }
  return y;
}

Tensor SoftmaxBackward(const Tensor& y, const Tensor& dy) {
  CheckShape(dy, y.dims, "softmax upstream gradient");
  const size_t c_n = y.dim(0), t_n = Steps(y);
  Tensor dx(y.dims);
  for (size_t t = 0; t < t_n; ++t) {
    double dot = 0.0;
    for (size_t c = 0; c < c_n; ++c) dot += y[c * t_n + t] * dy[c * t_n + t];
    for (size_t c = 0; c < c_n; ++c) {
      const size_t k = c * t_n + t;
      dx[k] = y[k] * (dy[k] - dot);
    }
  }
  return dx;
}

// ---------------------------------------------------------------- dropout

Tensor Dropout(const Tensor& x, double keep_prob, std::mt19937_64& rng,
               bool training, Tensor* mask) {
  if (!(keep_prob > 0.0 && keep_prob <= 1.0)) {
    Fail(ErrorKind::kDomain, "keep probability must be in (0, 1]");
  }
  if (!training || keep_prob == 1.0) {
    if (mask) *mask = Tensor(x.dims, 1.0);
    return x;
  }
  Tensor m(x.dims);
  const double scale = 1.0 / keep_prob;
  for (auto& v : m.data) v = UnitDraw(rng) < keep_prob ? scale : 0.0;
  Tensor y = x;
  for (size_t i = 0; i < y.size(); ++i) y[i] *= m[i];
  if (mask) *mask = std::move(m);
  return y;
}

Tensor DropoutBackward(const Tensor& mask, const Tensor& dy) {
  CheckShape(dy, mask.dims, "dropout upstream gradient");
  Tensor dx = dy;
  for (size_t i = 0; i < dx.size(); ++i) dx[i] *= mask[i];
  return dx;
}

// ---------------------------------------------------------------- BCE

double BceLoss(const Tensor& pred, const Tensor& target) {
  if (pred.dims != target.dims) {
    Fail(ErrorKind::kDimension, "BCE: prediction " + ShapeString(pred.dims) +
                                    " vs target " + ShapeString(target.dims));
  }
  if (pred.size() == 0) return 0.0;
  double acc = 0.0;
  for (size_t i = 0; i < pred.size(); ++i) {
    const double p = std::clamp(pred[i], kBceClamp, 1.0 - kBceClamp);
    const double t = target[i];
    acc -= t * std::log(p) + (1.0 - t) * std::log(1.0 - p);
  }
  return acc / static_cast<double>(pred.size());
}

Tensor BceGrad(const Tensor& pred, const Tensor& target) {
  if (pred.dims != target.dims) Fail(ErrorKind::kDimension, "BCE shape mismatch");
  Tensor g(pred.dims);
  const double inv_n = 1.0 / static_cast<double>(pred.size());
  for (size_t i = 0; i < pred.size(); ++i) {
    const double p = pred[i];
    if (p < kBceClamp || p > 1.0 - kBceClamp) continue;
    g[i] = (p - target[i]) / (p * (1.0 - p)) * inv_n;
  }
  return g;
}

}  // namespace sed
