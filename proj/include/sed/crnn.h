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
#include <vector>

#include "sed/augment.h"
#include "sed/features.h"
#include "sed/layers.h"
#include "sed/tensor.h"

namespace sed {

struct ConvBlockConfig {
  int filters = 128;
  int kernel_h = 3;
  int kernel_w = 3;
  int freq_pool = 2;
  bool operator==(const ConvBlockConfig&) const = default;
};

// Conv blocks (conv -> ReLU -> frequency pooling), stacked into a sequence,
// GRU layers, sigmoid hidden dense layers, sigmoid output per class.
struct CrnnConfig {
  int n_mels = 40;
  std::vector<ConvBlockConfig> conv = {{128, 3, 3, 5}, {128, 3, 3, 2}, {128, 3, 3, 2}};
  std::vector<int> gru = {32, 32};
  std::vector<int> dense = {32};
  int n_classes = 1;
  double keep_prob = 0.5;
  uint64_t seed = 0;

  void Validate() const;
  // Bands left after all pooling, and the stacked feature size.
  int PooledBands() const;
  int StackedSize() const;
  bool operator==(const CrnnConfig&) const = default;
};

struct CrnnParams {
  std::vector<ConvParams> conv;
  std::vector<GruParams> gru;
  std::vector<DenseParams> dense;  // hidden layers then the output layer
};

// Visits every parameter tensor with a stable name ("conv0.kernels",
// "gru1.u_h", "dense1.bias", ...) in a fixed order.
void ForEachParam(CrnnParams& params,
                  const std::function<void(const std::string&, Tensor&)>& fn);
void ForEachParam(const CrnnParams& params,
                  const std::function<void(const std::string&, const Tensor&)>& fn);
size_t ParamCount(const CrnnParams& params);

CrnnParams ZeroLike(const CrnnParams& params);
// Throws kConfig unless every tensor has the shape the config implies.
void CheckParams(const CrnnConfig& cfg, const CrnnParams& params);

// Glorot-uniform weights in +-sqrt(6 / (fan_in + fan_out)), zero biases.
CrnnParams InitParams(const CrnnConfig& cfg, uint64_t seed);

struct CrnnCache {
  struct Conv {
    Tensor input, relu_out, output, mask;
    std::vector<uint32_t> argmax;
  };
  struct Gru {
    Tensor input, output, mask;
    GruCache state;
  };
  struct Dense {
    Tensor input, output, mask;
  };
  std::vector<Conv> conv;
  Tensor stacked;
  std::vector<Gru> gru;
  std::vector<Dense> dense;  // hidden layers only
  Tensor output_input;
  Tensor probs;
};

// [1 x n_mels x T] tensor from a T x B feature matrix.
Tensor FeaturesToInput(const FeatureMatrix& features);

// input [1 x n_mels x T] -> probabilities [C x T]. `rng` drives dropout and
// may be null when not training.
Tensor CrnnForward(const Tensor& input, const CrnnConfig& cfg,
                   const CrnnParams& params, bool training,
                   std::mt19937_64* rng, CrnnCache* cache = nullptr);

SoftTargetMatrix CrnnForward(const FeatureMatrix& features, const CrnnConfig& cfg,
                             const CrnnParams& params, bool training,
                             std::mt19937_64* rng);

// Backpropagates a gradient with respect to the output logits.
CrnnParams CrnnBackward(const CrnnConfig& cfg, const CrnnParams& params,
                        const CrnnCache& cache, const Tensor& dlogits,
                        Tensor* dinput = nullptr);

// Mean BCE of the forward pass; when `grad` is non-null it receives the
// parameter gradient (logit delta (p - t) / n, exact where the clamp is
// inactive).
double CrnnLossAndGrad(const Tensor& input, const Tensor& target,
                       const CrnnConfig& cfg, const CrnnParams& params,
                       bool training, std::mt19937_64* rng, CrnnParams* grad);

}  // namespace sed
