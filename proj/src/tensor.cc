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

#include "sed/tensor.h"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>

#include "sed/error.h"

namespace sed {

Tensor::Tensor(std::vector<size_t> shape, double fill) : dims(std::move(shape)) {
  const size_t n = std::accumulate(dims.begin(), dims.end(), size_t{1},
                                   std::multiplies<size_t>());
  data.assign(n, fill);
}

void Tensor::Fill(double v) { std::fill(data.begin(), data.end(), v); }

bool Tensor::AllFinite() const {
  return std::all_of(data.begin(), data.end(),
                     [](double v) { return std::isfinite(v); });
}

std::string ShapeString(const std::vector<size_t>& dims) {
  std::string s = "[";
  for (size_t i = 0; i < dims.size(); ++i) {
    if (i) s += "x";
    s += std::to_string(dims[i]);
  }
  return s + "]";
}

void CheckShape(const Tensor& t, const std::vector<size_t>& dims,
                const char* what) {
  if (t.dims != dims) {
    Fail(ErrorKind::kDimension, std::string(what) + ": expected " +
                                    ShapeString(dims) + ", got " +
                                    ShapeString(t.dims));
  }
}

}  // namespace sed
