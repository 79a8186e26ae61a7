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

#include <vector>

#include "mgvc/chunker.hpp"
#include "mgvc/nn.hpp"
#include "mgvc/rng.hpp"
#include "mgvc/tensor.hpp"

namespace mgvc {

/// Network architecture settings. kernel_size applies to the generator
/// and siamese convolutions (must be odd); the discriminator uses fixed
/// 4x4 kernels. Siamese channel widths start at g_base_channels / 2.
struct ModelConfig {
  int len_S = 128;
  int g_base_channels = 64;
  int g_depth = 3;
  int d_layers = 4;
  int d_base_channels = 64;
  int s_layers = 4;
  int kernel_size = 3;
  int norm_power_iters = 1;

  /// Validates against the chunk shape (mel_channels x L/2) the generator
  /// will see. Both must divide by 2^g_depth.
  void validate(int chunk_height, int chunk_width) const;
};

/// U-net generator: stride-2 spectrally-normalized encoder convolutions
/// with batch norm, sub-pixel upscaling decoder with channel-concat skip
/// connections, 1-channel output convolution with tanh.
class Generator {
 public:
  Generator() = default;
  Generator(const ModelConfig& cfg, int chunk_height, int chunk_width, Rng& rng);

  struct Ctx {
    std::vector<nn::Conv2d::Ctx> enc_conv;
    std::vector<nn::BatchNorm2d::Ctx> enc_bn;
    std::vector<Tensor> enc_act;  // post-activation, also the skip inputs
    std::vector<nn::Conv2d::Ctx> dec_conv;
    std::vector<nn::BatchNorm2d::Ctx> dec_bn;
    std::vector<Tensor> dec_act;
    nn::Conv2d::Ctx out_conv;
    Tensor out_tanh;
  };

  /// x: [N, 1, M, L/2] in [-1, 1]; returns same shape, values in (-1, 1).
  Tensor forward(const Tensor& x, Mode mode, Ctx* ctx);
  /// Accumulates parameter gradients, returns grad w.r.t. the input.
  Tensor backward(const Ctx& ctx, const Tensor& gy);
  void power_iterate();
  void zero_grad();

  std::vector<ParamRef> parameters();
  std::vector<BufferRef> buffers();
  const ModelConfig& config() const { return cfg_; }

 private:
  ModelConfig cfg_;
  std::vector<nn::Conv2d> enc_;
  std::vector<nn::BatchNorm2d> enc_bn_;
  std::vector<nn::Conv2d> dec_;
  std::vector<nn::BatchNorm2d> dec_bn_;
  nn::Conv2d out_conv_;
};

/// PatchGAN discriminator: stride-2 spectrally-normalized 4x4
/// convolutions (no batch norm), final 1-channel convolution producing
/// unbounded patch logits.
class Discriminator {
 public:
  Discriminator() = default;
  Discriminator(const ModelConfig& cfg, Rng& rng);

  struct Ctx {
    std::vector<nn::Conv2d::Ctx> conv;
    std::vector<Tensor> act;
  };

  /// x: [N, 1, M, L]; returns patch score map [N, 1, Ph, Pw].
  Tensor forward(const Tensor& x, Ctx* ctx) const;
  Tensor backward(const Ctx& ctx, const Tensor& gy, bool accum_param_grads);
  void power_iterate();
  void zero_grad();

  std::vector<ParamRef> parameters();
  std::vector<BufferRef> buffers();
  const ModelConfig& config() const { return cfg_; }

 private:
  ModelConfig cfg_;
  std::vector<nn::Conv2d> layers_;
  nn::Conv2d out_conv_;
};

/// Siamese encoder: stride-2 convolutions with batch norm, global average
/// pooling, affine map to a len_S latent vector.
class SiameseEncoder {
 public:
  SiameseEncoder() = default;
  SiameseEncoder(const ModelConfig& cfg, Rng& rng);

  struct Ctx {
    std::vector<nn::Conv2d::Ctx> conv;
    std::vector<nn::BatchNorm2d::Ctx> bn;
    std::vector<Tensor> act;
    std::vector<int> pool_in_shape;
    nn::Linear::Ctx head;
  };

  /// x: [N, 1, M, L/2]; returns [N, len_S].
  Tensor forward(const Tensor& x, Mode mode, Ctx* ctx);
  Tensor backward(const Ctx& ctx, const Tensor& gy);
  void zero_grad();

  std::vector<ParamRef> parameters();
  std::vector<BufferRef> buffers();
  const ModelConfig& config() const { return cfg_; }

 private:
  ModelConfig cfg_;
  std::vector<nn::Conv2d> convs_;
  std::vector<nn::BatchNorm2d> bns_;
  nn::Linear head_;
};

/// Inference-mode translation of one chunk (batch of one).
Chunk translate_chunk(Generator& g, const Chunk& chunk);

/// Splits an M x L crop, translates each half independently in inference
/// mode and concatenates the results; equals the concatenation of the
/// per-half outputs bit-exactly.
Eigen::MatrixXf g_composite(Generator& g, const TrainingCrop& crop);

/// Sub-pixel upscaling as a standalone operation (periodic shuffle).
Tensor subpixel_upsample(const Tensor& x, int r);

// Batch packing helpers: [N, 1, M, W] <-> chunk lists.
Tensor chunks_to_tensor(const std::vector<Chunk>& chunks);
std::vector<Chunk> tensor_to_chunks(const Tensor& t);
Tensor crops_to_tensor(const std::vector<TrainingCrop>& crops);

}  // namespace mgvc
