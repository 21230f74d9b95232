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

#include <cstddef>
#include <string>
#include <vector>

namespace sed {

// Dense row-major array of doubles with an explicit shape.
struct Tensor {
  std::vector<size_t> dims;
  std::vector<double> data;

  Tensor() = default;
  explicit Tensor(std::vector<size_t> shape, double fill = 0.0);

  size_t size() const { return data.size(); }
  size_t rank() const { return dims.size(); }
  size_t dim(size_t i) const { return dims[i]; }
  double& operator[](size_t i) { return data[i]; }
  double operator[](size_t i) const { return data[i]; }

  void Fill(double v);
  bool AllFinite() const;
  bool operator==(const Tensor&) const = default;
};

std::string ShapeString(const std::vector<size_t>& dims);

// Throws kDimension with `what` unless the shapes agree.
void CheckShape(const Tensor& t, const std::vector<size_t>& dims,
                const char* what);

}  // namespace sed
