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

#include "mgvc/models.hpp"

#include <stdexcept>
#include <string>

namespace mgvc {

namespace {

constexpr float kLeakySlope = 0.2f;

int shifted(int base, int i) { return base << i; }

}  // namespace

void ModelConfig::validate(int chunk_height, int chunk_width) const {
  if (len_S < 1) throw std::invalid_argument("len_S must be >= 1");
  if (g_base_channels < 1 || d_base_channels < 1)
    throw std::invalid_argument("base channel counts must be >= 1");
  if (g_depth < 1) throw std::invalid_argument("g_depth must be >= 1");
  if (d_layers < 1) throw std::invalid_argument("d_layers must be >= 1");
  if (s_layers < 1) throw std::invalid_argument("s_layers must be >= 1");
  if (kernel_size < 1 || kernel_size % 2 == 0)
    throw std::invalid_argument("kernel_size must be odd");
  if (norm_power_iters < 1)
    throw std::invalid_argument("norm_power_iters must be >= 1");
  const int div = 1 << g_depth;
  if (chunk_height % div != 0 || chunk_width % div != 0)
    throw std::invalid_argument(
        "chunk shape " + std::to_string(chunk_height) + "x" +
        std::to_string(chunk_width) + " not divisible by 2^g_depth");
}

// ---------------------------------------------------------------------------
// Generator

Generator::Generator(const ModelConfig& cfg, int chunk_height, int chunk_width,
                     Rng& rng)
    : cfg_(cfg) {
  cfg.validate(chunk_height, chunk_width);
  const int k = cfg.kernel_size;
  const int p = k / 2;
  const int d = cfg.g_depth;

  enc_.resize(static_cast<std::size_t>(d));
  enc_bn_.resize(static_cast<std::size_t>(d));
  int in_c = 1;
  for (int i = 0; i < d; ++i) {
    const int out_c = shifted(cfg.g_base_channels, i);
    enc_[static_cast<std::size_t>(i)].build(in_c, out_c, k, k, 2, p, true, rng);
    enc_bn_[static_cast<std::size_t>(i)].build(out_c);
    in_c = out_c;
  }

  dec_.resize(static_cast<std::size_t>(d));
  dec_bn_.resize(static_cast<std::size_t>(d));
  for (int j = 0; j < d; ++j) {
    const int dec_in = (j == 0) ? shifted(cfg.g_base_channels, d - 1)
                                : 2 * shifted(cfg.g_base_channels, d - 1 - j);
    const int target = (j == d - 1) ? std::max(cfg.g_base_channels / 2, 1)
                                    : shifted(cfg.g_base_channels, d - 2 - j);
    dec_[static_cast<std::size_t>(j)].build(dec_in, target * 4, k, k, 1, p, true,
                                            rng);
    dec_bn_[static_cast<std::size_t>(j)].build(target);
    if (j == d - 1) in_c = target;
  }
  out_conv_.build(in_c, 1, k, k, 1, p, true, rng);
}

Tensor Generator::forward(const Tensor& x, Mode mode, Ctx* ctx) {
  const int d = cfg_.g_depth;
  Ctx local;
  Ctx& c = ctx ? *ctx : local;
  c.enc_conv.resize(static_cast<std::size_t>(d));
  c.enc_bn.resize(static_cast<std::size_t>(d));
  c.enc_act.resize(static_cast<std::size_t>(d));
  c.dec_conv.resize(static_cast<std::size_t>(d));
  c.dec_bn.resize(static_cast<std::size_t>(d));
  c.dec_act.resize(static_cast<std::size_t>(d));

  Tensor h = x;
  for (int i = 0; i < d; ++i) {
    h = enc_[static_cast<std::size_t>(i)].forward(h, &c.enc_conv[static_cast<std::size_t>(i)]);
    h = enc_bn_[static_cast<std::size_t>(i)].forward(h, mode, &c.enc_bn[static_cast<std::size_t>(i)]);
    h = nn::leaky_relu(h, kLeakySlope, &c.enc_act[static_cast<std::size_t>(i)]);
  }
  for (int j = 0; j < d; ++j) {
    h = dec_[static_cast<std::size_t>(j)].forward(h, &c.dec_conv[static_cast<std::size_t>(j)]);
    h = nn::pixel_shuffle(h, 2);
    h = dec_bn_[static_cast<std::size_t>(j)].forward(h, mode, &c.dec_bn[static_cast<std::size_t>(j)]);
    h = nn::leaky_relu(h, 0.0f, &c.dec_act[static_cast<std::size_t>(j)]);
    if (j < d - 1)
      h = nn::concat_channels(h, c.enc_act[static_cast<std::size_t>(d - 2 - j)]);
  }
  h = out_conv_.forward(h, &c.out_conv);
  return nn::tanh_act(h, &c.out_tanh);
}

Tensor Generator::backward(const Ctx& ctx, const Tensor& gy) {
  const int d = cfg_.g_depth;
  std::vector<Tensor> skip_grads(static_cast<std::size_t>(d));

  Tensor g = nn::tanh_backward(ctx.out_tanh, gy);
  g = out_conv_.backward(ctx.out_conv, g, true);

  for (int j = d - 1; j >= 0; --j) {
    if (j < d - 1) {
      Tensor g_main, g_skip;
      const int c_first = ctx.dec_act[static_cast<std::size_t>(j)].dim(1);
      nn::split_channels(g, c_first, &g_main, &g_skip);
      const std::size_t skip_idx = static_cast<std::size_t>(d - 2 - j);
      if (skip_grads[skip_idx].numel() == 0)
        skip_grads[skip_idx] = std::move(g_skip);
      else
        skip_grads[skip_idx] += g_skip;
      g = std::move(g_main);
    }
    g = nn::leaky_relu_backward(ctx.dec_act[static_cast<std::size_t>(j)], g, 0.0f);
    g = dec_bn_[static_cast<std::size_t>(j)].backward(ctx.dec_bn[static_cast<std::size_t>(j)], g, true);
    g = nn::pixel_shuffle_backward(g, 2);
    g = dec_[static_cast<std::size_t>(j)].backward(ctx.dec_conv[static_cast<std::size_t>(j)], g, true);
  }
  for (int i = d - 1; i >= 0; --i) {
    if (skip_grads[static_cast<std::size_t>(i)].numel() != 0)
      g += skip_grads[static_cast<std::size_t>(i)];
    g = nn::leaky_relu_backward(ctx.enc_act[static_cast<std::size_t>(i)], g, kLeakySlope);
    g = enc_bn_[static_cast<std::size_t>(i)].backward(ctx.enc_bn[static_cast<std::size_t>(i)], g, true);
    g = enc_[static_cast<std::size_t>(i)].backward(ctx.enc_conv[static_cast<std::size_t>(i)], g, true);
  }
  return g;
}

void Generator::power_iterate() {
  for (auto& l : enc_) l.power_iterate(cfg_.norm_power_iters);
  for (auto& l : dec_) l.power_iterate(cfg_.norm_power_iters);
  out_conv_.power_iterate(cfg_.norm_power_iters);
}

void Generator::zero_grad() {
  for (auto& l : enc_) l.zero_grad();
  for (auto& l : enc_bn_) l.zero_grad();
  for (auto& l : dec_) l.zero_grad();
  for (auto& l : dec_bn_) l.zero_grad();
  out_conv_.zero_grad();
}

std::vector<ParamRef> Generator::parameters() {
  std::vector<ParamRef> p;
  std::vector<BufferRef> ignored;
  for (std::size_t i = 0; i < enc_.size(); ++i) {
    enc_[i].collect("enc" + std::to_string(i), &p, nullptr);
    enc_bn_[i].collect("enc" + std::to_string(i) + "_bn", &p, nullptr);
  }
  for (std::size_t j = 0; j < dec_.size(); ++j) {
    dec_[j].collect("dec" + std::to_string(j), &p, nullptr);
    dec_bn_[j].collect("dec" + std::to_string(j) + "_bn", &p, nullptr);
  }
  out_conv_.collect("out", &p, nullptr);
  return p;
}

std::vector<BufferRef> Generator::buffers() {
  std::vector<ParamRef> ignored;
  std::vector<BufferRef> b;
  for (std::size_t i = 0; i < enc_.size(); ++i) {
    enc_[i].collect("enc" + std::to_string(i), &ignored, &b);
    enc_bn_[i].collect("enc" + std::to_string(i) + "_bn", &ignored, &b);
  }
  for (std::size_t j = 0; j < dec_.size(); ++j) {
    dec_[j].collect("dec" + std::to_string(j), &ignored, &b);
    dec_bn_[j].collect("dec" + std::to_string(j) + "_bn", &ignored, &b);
  }
  out_conv_.collect("out", &ignored, &b);
  return b;
}

// ---------------------------------------------------------------------------
// Discriminator

Discriminator::Discriminator(const ModelConfig& cfg, Rng& rng) : cfg_(cfg) {
  layers_.resize(static_cast<std::size_t>(cfg.d_layers));
  int in_c = 1;
  for (int i = 0; i < cfg.d_layers; ++i) {
    const int out_c = shifted(cfg.d_base_channels, i);
    layers_[static_cast<std::size_t>(i)].build(in_c, out_c, 4, 4, 2, 1, true, rng);
    in_c = out_c;
  }
  out_conv_.build(in_c, 1, 1, 1, 1, 0, true, rng);
}

Tensor Discriminator::forward(const Tensor& x, Ctx* ctx) const {
  Ctx local;
  Ctx& c = ctx ? *ctx : local;
  c.conv.resize(layers_.size() + 1);  // last slot belongs to out_conv_
  c.act.resize(layers_.size());
  Tensor h = x;
  for (std::size_t i = 0; i < layers_.size(); ++i) {
    h = layers_[i].forward(h, &c.conv[i]);
    h = nn::leaky_relu(h, kLeakySlope, &c.act[i]);
  }
  return out_conv_.forward(h, &c.conv.back());
}

Tensor Discriminator::backward(const Ctx& ctx, const Tensor& gy,
                               bool accum_param_grads) {
  Tensor g = out_conv_.backward(ctx.conv.back(), gy, accum_param_grads);
  for (std::size_t i = layers_.size(); i-- > 0;) {
    g = nn::leaky_relu_backward(ctx.act[i], g, kLeakySlope);
    g = layers_[i].backward(ctx.conv[i], g, accum_param_grads);
  }
  return g;
}

void Discriminator::power_iterate() {
  for (auto& l : layers_) l.power_iterate(cfg_.norm_power_iters);
  out_conv_.power_iterate(cfg_.norm_power_iters);
}

void Discriminator::zero_grad() {
  for (auto& l : layers_) l.zero_grad();
  out_conv_.zero_grad();
}

std::vector<ParamRef> Discriminator::parameters() {
  std::vector<ParamRef> p;
  for (std::size_t i = 0; i < layers_.size(); ++i)
    layers_[i].collect("conv" + std::to_string(i), &p, nullptr);
  out_conv_.collect("out", &p, nullptr);
  return p;
}

std::vector<BufferRef> Discriminator::buffers() {
  std::vector<ParamRef> ignored;
  std::vector<BufferRef> b;
  for (std::size_t i = 0; i < layers_.size(); ++i)
    layers_[i].collect("conv" + std::to_string(i), &ignored, &b);
  out_conv_.collect("out", &ignored, &b);
  return b;
}

// ---------------------------------------------------------------------------
// SiameseEncoder

SiameseEncoder::SiameseEncoder(const ModelConfig& cfg, Rng& rng) : cfg_(cfg) {
  const int k = cfg.kernel_size;
  const int p = k / 2;
  const int base = std::max(cfg.g_base_channels / 2, 1);
  convs_.resize(static_cast<std::size_t>(cfg.s_layers));
  bns_.resize(static_cast<std::size_t>(cfg.s_layers));
  int in_c = 1;
  for (int i = 0; i < cfg.s_layers; ++i) {
    const int out_c = shifted(base, i);
    convs_[static_cast<std::size_t>(i)].build(in_c, out_c, k, k, 2, p, false, rng);
    bns_[static_cast<std::size_t>(i)].build(out_c);
    in_c = out_c;
  }
  head_.build(in_c, cfg.len_S, rng);
}

Tensor SiameseEncoder::forward(const Tensor& x, Mode mode, Ctx* ctx) {
  Ctx local;
  Ctx& c = ctx ? *ctx : local;
  c.conv.resize(convs_.size());
  c.bn.resize(convs_.size());
  c.act.resize(convs_.size());
  Tensor h = x;
  for (std::size_t i = 0; i < convs_.size(); ++i) {
    h = convs_[i].forward(h, &c.conv[i]);
    h = bns_[i].forward(h, mode, &c.bn[i]);
    h = nn::leaky_relu(h, kLeakySlope, &c.act[i]);
  }
  c.pool_in_shape = h.shape;
  h = nn::global_avg_pool(h);
  return head_.forward(h, &c.head);
}

Tensor SiameseEncoder::backward(const Ctx& ctx, const Tensor& gy) {
  Tensor g = head_.backward(ctx.head, gy, true);
  g = nn::global_avg_pool_backward(ctx.pool_in_shape, g);
  for (std::size_t i = convs_.size(); i-- > 0;) {
    g = nn::leaky_relu_backward(ctx.act[i], g, kLeakySlope);
    g = bns_[i].backward(ctx.bn[i], g, true);
    g = convs_[i].backward(ctx.conv[i], g, true);
  }
  return g;
}

void SiameseEncoder::zero_grad() {
  for (auto& l : convs_) l.zero_grad();
  for (auto& l : bns_) l.zero_grad();
  head_.zero_grad();
}

std::vector<ParamRef> SiameseEncoder::parameters() {
  std::vector<ParamRef> p;
  for (std::size_t i = 0; i < convs_.size(); ++i) {
    convs_[i].collect("conv" + std::to_string(i), &p, nullptr);
    bns_[i].collect("conv" + std::to_string(i) + "_bn", &p, nullptr);
  }
  head_.collect("head", &p);
  return p;
}

std::vector<BufferRef> SiameseEncoder::buffers() {
  std::vector<ParamRef> ignored;
  std::vector<BufferRef> b;
  for (std::size_t i = 0; i < convs_.size(); ++i) {
    convs_[i].collect("conv" + std::to_string(i), &ignored, &b);
    bns_[i].collect("conv" + std::to_string(i) + "_bn", &ignored, &b);
  }
  return b;
}

// ---------------------------------------------------------------------------
// Free operations

Chunk translate_chunk(Generator& g, const Chunk& chunk) {
  std::vector<Chunk> one(1);
  one[0] = chunk;
  const Tensor x = chunks_to_tensor(one);
  const Tensor y = g.forward(x, Mode::kEval, nullptr);
  return tensor_to_chunks(y)[0];
}

Eigen::MatrixXf g_composite(Generator& g, const TrainingCrop& crop) {
  const auto [left, right] = split_crop(crop);
  std::vector<Chunk> out(2);
  out[0] = translate_chunk(g, left);
  out[1] = translate_chunk(g, right);
  return concat(out);
}

Tensor subpixel_upsample(const Tensor& x, int r) { return nn::pixel_shuffle(x, r); }

Tensor chunks_to_tensor(const std::vector<Chunk>& chunks) {
  if (chunks.empty()) throw std::invalid_argument("chunks_to_tensor: empty batch");
  const int m = static_cast<int>(chunks[0].values.rows());
  const int w = static_cast<int>(chunks[0].values.cols());
  Tensor t({static_cast<int>(chunks.size()), 1, m, w});
  for (std::size_t n = 0; n < chunks.size(); ++n) {
    if (chunks[n].values.rows() != m || chunks[n].values.cols() != w)
      throw std::invalid_argument("chunks_to_tensor: ragged batch");
    for (int r = 0; r < m; ++r)
      for (int c = 0; c < w; ++c)
        t.at4(static_cast<int>(n), 0, r, c) = chunks[n].values(r, c);
  }
  return t;
}

std::vector<Chunk> tensor_to_chunks(const Tensor& t) {
  if (t.rank() != 4 || t.dim(1) != 1)
    throw std::invalid_argument("tensor_to_chunks: expected [N,1,M,W]");
  std::vector<Chunk> out(static_cast<std::size_t>(t.dim(0)));
  for (int n = 0; n < t.dim(0); ++n) {
    out[static_cast<std::size_t>(n)].values.resize(t.dim(2), t.dim(3));
    for (int r = 0; r < t.dim(2); ++r)
      for (int c = 0; c < t.dim(3); ++c)
        out[static_cast<std::size_t>(n)].values(r, c) = t.at4(n, 0, r, c);
  }
  return out;
}

Tensor crops_to_tensor(const std::vector<TrainingCrop>& crops) {
  if (crops.empty()) throw std::invalid_argument("crops_to_tensor: empty batch");
  std::vector<Chunk> as_chunks(crops.size());
  for (std::size_t i = 0; i < crops.size(); ++i)
    as_chunks[i].values = crops[i].values;
  return chunks_to_tensor(as_chunks);
}

}  // namespace mgvc
