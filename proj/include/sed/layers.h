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

// Layer primitives of the CRNN. Every forward has a matching backward that
// takes the upstream gradient, accumulates parameter gradients into a
// caller-owned struct of the same shape as the parameters, and returns the
// gradient with respect to the layer input.
//
// Layouts: conv/pool tensors are [channels x freq x time]; sequence tensors
// are [features x time].

#include <cstdint>
#include <random>
#include <vector>

#include "sed/tensor.h"

namespace sed {

struct ConvParams {
  Tensor kernels;  // [F_out x F_in x kh x kw]
  Tensor bias;     // [F_out]
};

struct GruParams {
  Tensor w_z, w_r, w_h;  // [H x D]
  Tensor u_z, u_r, u_h;  // [H x H]
  Tensor b_z, b_r, b_h;  // [H]

  size_t hidden() const { return b_z.size(); }
  size_t input() const { return w_z.rank() == 2 ? w_z.dim(1) : 0; }
};

struct DenseParams {
  Tensor weight;  // [out x in]
  Tensor bias;    // [out]
};

ConvParams ZeroLike(const ConvParams& p);
GruParams ZeroLike(const GruParams& p);
DenseParams ZeroLike(const DenseParams& p);

// Zero "same" padding: (k-1)/2 before, the rest after. Cross-correlation,
// i.e. convolution with a flipped kernel.
Tensor Conv2dForward(const Tensor& x, const ConvParams& p);
Tensor Conv2dBackward(const Tensor& x, const ConvParams& p, const Tensor& dy,
                      ConvParams& grad);

Tensor Relu(const Tensor& x);
// Uses the forward output: the unit passed gradient iff it was positive.
Tensor ReluBackward(const Tensor& y, const Tensor& dy);

// Non-overlapping max over `factor` adjacent frequency rows. `argmax`
// receives the flat input index of each winner (first maximum on ties).
Tensor MaxPoolFreq(const Tensor& x, size_t factor,
                   std::vector<uint32_t>* argmax = nullptr);
Tensor MaxPoolFreqBackward(const std::vector<size_t>& input_dims,
                           const std::vector<uint32_t>& argmax,
                           const Tensor& dy);

// [F x H x T] -> [(F*H) x T], row index f*H + h.
Tensor StackFreq(const Tensor& x);
Tensor UnstackFreq(const Tensor& y, size_t filters, size_t bands);

struct GruCache {
  std::vector<double> h;  // (T+1) x H, row 0 is h0
  std::vector<double> r, z, n;  // T x H
};

// x [D x T], h0 [H] -> [H x T]:
//   r = sig(W_r x + U_r h + b_r), z = sig(W_z x + U_z h + b_z)
//   n = tanh(W_h x + U_h (r*h) + b_h), h' = (1 - z) * h + z * n
Tensor GruForward(const Tensor& x, const GruParams& p, const Tensor& h0,
                  GruCache* cache = nullptr);
// Returns dx; dh0 (if non-null) receives the gradient of the initial state.
Tensor GruBackward(const Tensor& x, const GruParams& p, const GruCache& cache,
                   const Tensor& dy, GruParams& grad, Tensor* dh0 = nullptr);

// Per time step affine map: x [in x T] -> [out x T]. A rank-1 x is one step.
Tensor DenseForward(const Tensor& x, const DenseParams& p);
Tensor DenseBackward(const Tensor& x, const DenseParams& p, const Tensor& dy,
                     DenseParams& grad);

double SigmoidScalar(double v);
Tensor Sigmoid(const Tensor& x);
Tensor SigmoidBackward(const Tensor& y, const Tensor& dy);

// Normalizes each column of a [C x T] tensor (rank 1 is a single column).
Tensor Softmax(const Tensor& x);
Tensor SoftmaxBackward(const Tensor& y, const Tensor& dy);

// Inverted dropout: kept units are scaled by 1/keep_prob so inference is
// the identity. `mask` receives the per-unit multiplier.
Tensor Dropout(const Tensor& x, double keep_prob, std::mt19937_64& rng,
               bool training, Tensor* mask = nullptr);
Tensor DropoutBackward(const Tensor& mask, const Tensor& dy);

inline constexpr double kBceClamp = 1e-7;

// Mean over all elements of -[t ln p + (1-t) ln(1-p)], p clamped to
// [1e-7, 1 - 1e-7].
double BceLoss(const Tensor& pred, const Tensor& target);
// d loss / d pred; zero where the clamp is active.
Tensor BceGrad(const Tensor& pred, const Tensor& target);

}  // namespace sed
