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

#include <Eigen/Core>
#include <string>
#include <vector>

#include "mgvc/rng.hpp"
#include "mgvc/tensor.hpp"

namespace mgvc {

enum class Mode { kTrain, kEval };

/// Named view of a learnable array and its gradient accumulator.
struct ParamRef {
  std::string name;
  Tensor* value;
  Tensor* grad;
};

/// Named view of persistent non-learnable state (running stats,
/// power-iteration vectors).
struct BufferRef {
  std::string name;
  Tensor* value;
};

namespace nn {

/// Persistent left/right power-iteration vectors for one weight matrix.
struct SpectralNormState {
  Tensor u;  // [rows]
  Tensor v;  // [cols]
};

/// Runs `iters` power-iteration rounds on w (rows x cols), refining the
/// persistent vectors in place. Fresh states are initialized
/// deterministically. A zero matrix leaves the state untouched.
void sn_power_iterate(const Eigen::Ref<const Eigen::MatrixXf>& w,
                      SpectralNormState& state, int iters);

/// Top-singular-value estimate u^T w v with the current state.
float sn_sigma(const Eigen::Ref<const Eigen::MatrixXf>& w,
               const SpectralNormState& state);

/// Divides w by its estimated top singular value after `iters` power
/// iterations. A zero matrix is returned unchanged.
Eigen::MatrixXf spectral_normalize(const Eigen::MatrixXf& w,
                                   SpectralNormState& state, int iters);

/// 2-d convolution with optional spectral normalization of the flattened
/// [out_ch, in_ch*kh*kw] filter. Weights init to N(0, 0.02), biases to 0.
struct Conv2d {
  int in_ch = 0, out_ch = 0, kh = 0, kw = 0, stride = 1, pad = 0;
  bool spectral = false;
  Tensor w;   // [out_ch, in_ch, kh, kw]
  Tensor b;   // [out_ch]
  Tensor gw;
  Tensor gb;
  SpectralNormState sn;

  struct Ctx {
    Tensor x;
    float sigma = 1.0f;
    bool sn_applied = false;
  };

  void build(int in_c, int out_c, int k_h, int k_w, int stride_, int pad_,
             bool spectral_, Rng& rng);
  Tensor forward(const Tensor& x, Ctx* ctx) const;
  /// Returns grad w.r.t. the input; accumulates parameter grads into
  /// gw/gb when `accum_param_grads` is set.
  Tensor backward(const Ctx& ctx, const Tensor& gy, bool accum_param_grads);
  void power_iterate(int iters);
  float sigma() const;
  void zero_grad();

  void collect(const std::string& prefix, std::vector<ParamRef>* params,
               std::vector<BufferRef>* buffers);
};

/// Per-channel batch normalization over (N, H, W). Train mode uses batch
/// statistics and updates running stats; eval mode uses running stats.
struct BatchNorm2d {
  int channels = 0;
  float eps = 1e-5f;
  float momentum = 0.1f;
  Tensor gamma, beta, ggamma, gbeta;
  Tensor run_mean, run_var;

  struct Ctx {
    Tensor xhat;
    std::vector<float> inv_std;
    Mode mode = Mode::kTrain;
  };

  void build(int channels_);
  Tensor forward(const Tensor& x, Mode mode, Ctx* ctx);
  Tensor backward(const Ctx& ctx, const Tensor& gy, bool accum_param_grads);
  void zero_grad();

  void collect(const std::string& prefix, std::vector<ParamRef>* params,
               std::vector<BufferRef>* buffers);
};

/// Affine map on [N, in] rows.
struct Linear {
  int in = 0, out = 0;
  Tensor w;  // [out, in]
  Tensor b;  // [out]
  Tensor gw, gb;

  struct Ctx {
    Tensor x;
  };

  void build(int in_, int out_, Rng& rng);
  Tensor forward(const Tensor& x, Ctx* ctx) const;
  Tensor backward(const Ctx& ctx, const Tensor& gy, bool accum_param_grads);
  void zero_grad();

  void collect(const std::string& prefix, std::vector<ParamRef>* params);
};

// Activations save their own output for the backward pass.
Tensor leaky_relu(const Tensor& x, float slope, Tensor* saved_out);
Tensor leaky_relu_backward(const Tensor& saved_out, const Tensor& gy,
                           float slope);
Tensor tanh_act(const Tensor& x, Tensor* saved_out);
Tensor tanh_backward(const Tensor& saved_out, const Tensor& gy);

/// Periodic shuffle: [N, C*r^2, H, W] -> [N, C, H*r, W*r]. Bijective
/// value rearrangement; throws if channels are not divisible by r^2.
Tensor pixel_shuffle(const Tensor& x, int r);
Tensor pixel_shuffle_backward(const Tensor& gy, int r);

Tensor concat_channels(const Tensor& a, const Tensor& b);
void split_channels(const Tensor& g, int c_first, Tensor* ga, Tensor* gb);

Tensor global_avg_pool(const Tensor& x);  // [N,C,H,W] -> [N,C]
Tensor global_avg_pool_backward(const std::vector<int>& in_shape,
                                const Tensor& gy);

}  // namespace nn
}  // namespace mgvc
