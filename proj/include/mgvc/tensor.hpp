// Copyright 2026 the mgvc authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace mgvc {

/// Dense row-major float tensor of rank 1..4. Network parameters,
/// activations and gradients all use this one representation.
struct Tensor {
  std::vector<int> shape;
  std::vector<float> data;

  Tensor() = default;
  explicit Tensor(std::vector<int> s) : shape(std::move(s)) {
    data.assign(numel_of(shape), 0.0f);
  }

  static std::size_t numel_of(const std::vector<int>& s) {
    std::size_t n = 1;
    for (int d : s) {
      if (d < 0) throw std::invalid_argument("negative tensor dim");
      n *= static_cast<std::size_t>(d);
    }
    return n;
  }

  std::size_t numel() const { return data.size(); }
  int rank() const { return static_cast<int>(shape.size()); }
  int dim(int i) const { return shape[static_cast<std::size_t>(i)]; }
  bool same_shape(const Tensor& o) const { return shape == o.shape; }

  float* ptr() { return data.data(); }
  const float* ptr() const { return data.data(); }

  // 4-d accessors for (N, C, H, W) layouts.
  float& at4(int n, int c, int h, int w) {
    return data[idx4(n, c, h, w)];
  }
  float at4(int n, int c, int h, int w) const {
    return data[idx4(n, c, h, w)];
  }
  std::size_t idx4(int n, int c, int h, int w) const {
    return ((static_cast<std::size_t>(n) * shape[1] + c) * shape[2] + h) *
               shape[3] +
           w;
  }

  void fill(float v) { data.assign(data.size(), v); }
  void zero() { fill(0.0f); }

  Tensor& operator+=(const Tensor& o) {
    require_same_shape(o, "+=");
    for (std::size_t i = 0; i < data.size(); ++i) data[i] += o.data[i];
    return *this;
  }

  void add_scaled(const Tensor& o, float s) {
    require_same_shape(o, "add_scaled");
    for (std::size_t i = 0; i < data.size(); ++i) data[i] += s * o.data[i];
  }

  static Tensor zeros_like(const Tensor& o) { return Tensor(o.shape); }

  std::string shape_str() const {
    std::string s = "(";
    for (std::size_t i = 0; i < shape.size(); ++i) {
      if (i) s += ",";
      s += std::to_string(shape[i]);
    }
    return s + ")";
  }

 private:
  void require_same_shape(const Tensor& o, const char* op) const {
    if (!same_shape(o))
      throw std::invalid_argument(std::string("tensor shape mismatch in ") +
                                  op + ": " + shape_str() + " vs " +
                                  o.shape_str());
  }
};

}  // namespace mgvc
