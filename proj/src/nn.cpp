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

#include "mgvc/nn.hpp"

#include <cmath>
#include <stdexcept>

namespace mgvc {
namespace nn {

namespace {

using RowMat =
    Eigen::Matrix<float, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using MapRowMat = Eigen::Map<RowMat>;
using ConstMapRowMat = Eigen::Map<const RowMat>;
using MapVec = Eigen::Map<Eigen::VectorXf>;
using ConstMapVec = Eigen::Map<const Eigen::VectorXf>;

void im2col(const float* x, int c_in, int h, int w, int kh, int kw, int stride,
            int pad, int ho, int wo, float* cols) {
  const std::size_t ohw = static_cast<std::size_t>(ho) * wo;
  std::size_t row = 0;
  for (int c = 0; c < c_in; ++c) {
    for (int dy = 0; dy < kh; ++dy) {
      for (int dx = 0; dx < kw; ++dx, ++row) {
        float* out = cols + row * ohw;
        for (int oh = 0; oh < ho; ++oh) {
          const int ih = oh * stride + dy - pad;
          const float* xr =
              (ih >= 0 && ih < h)
                  ? x + (static_cast<std::size_t>(c) * h + ih) * w
                  : nullptr;
          for (int ow = 0; ow < wo; ++ow) {
            const int iw = ow * stride + dx - pad;
            out[static_cast<std::size_t>(oh) * wo + ow] =
                (xr && iw >= 0 && iw < w) ? xr[iw] : 0.0f;
          }
        }
      }
    }
  }
}

void col2im_add(const float* cols, int c_in, int h, int w, int kh, int kw,
                int stride, int pad, int ho, int wo, float* gx) {
  const std::size_t ohw = static_cast<std::size_t>(ho) * wo;
  std::size_t row = 0;
  for (int c = 0; c < c_in; ++c) {
    for (int dy = 0; dy < kh; ++dy) {
      for (int dx = 0; dx < kw; ++dx, ++row) {
        const float* in = cols + row * ohw;
        for (int oh = 0; oh < ho; ++oh) {
          const int ih = oh * stride + dy - pad;
          if (ih < 0 || ih >= h) continue;
          float* gr = gx + (static_cast<std::size_t>(c) * h + ih) * w;
          for (int ow = 0; ow < wo; ++ow) {
            const int iw = ow * stride + dx - pad;
            if (iw < 0 || iw >= w) continue;
            gr[iw] += in[static_cast<std::size_t>(oh) * wo + ow];
          }
        }
      }
    }
  }
}

constexpr float kSigmaTiny = 1e-12f;

}  // namespace

void sn_power_iterate(const Eigen::Ref<const Eigen::MatrixXf>& w,
                      SpectralNormState& state, int iters) {
  if (iters < 1) throw std::invalid_argument("power iteration needs iters >= 1");
  const auto rows = w.rows(), cols = w.cols();
  if (state.u.numel() != static_cast<std::size_t>(rows)) {
    state.u = Tensor({static_cast<int>(rows)});
    state.u.fill(1.0f / std::sqrt(static_cast<float>(rows)));
  }
  if (state.v.numel() != static_cast<std::size_t>(cols))
    state.v = Tensor({static_cast<int>(cols)});

  MapVec u(state.u.ptr(), rows);
  MapVec v(state.v.ptr(), cols);
  for (int i = 0; i < iters; ++i) {
    Eigen::VectorXf vt = w.transpose() * u;
    const float vn = vt.norm();
    if (!(vn > kSigmaTiny)) return;  // zero matrix: leave state alone
    v = vt / vn;
    Eigen::VectorXf ut = w * v;
    const float un = ut.norm();
    if (!(un > kSigmaTiny)) return;
    u = ut / un;
  }
}

float sn_sigma(const Eigen::Ref<const Eigen::MatrixXf>& w,
               const SpectralNormState& state) {
  if (state.u.numel() != static_cast<std::size_t>(w.rows()) ||
      state.v.numel() != static_cast<std::size_t>(w.cols()))
    return 0.0f;
  ConstMapVec u(state.u.ptr(), w.rows());
  ConstMapVec v(state.v.ptr(), w.cols());
  return u.dot(w * v);
}

Eigen::MatrixXf spectral_normalize(const Eigen::MatrixXf& w,
                                   SpectralNormState& state, int iters) {
  sn_power_iterate(w, state, iters);
  const float sigma = sn_sigma(w, state);
  if (!(sigma > kSigmaTiny)) return w;  // zero matrix is returned unchanged
  return w / sigma;
}

// ---------------------------------------------------------------------------
// Conv2d

void Conv2d::build(int in_c, int out_c, int k_h, int k_w, int stride_, int pad_,
                   bool spectral_, Rng& rng) {
  in_ch = in_c;
  out_ch = out_c;
  kh = k_h;
  kw = k_w;
  stride = stride_;
  pad = pad_;
  spectral = spectral_;
  w = Tensor({out_ch, in_ch, kh, kw});
  b = Tensor({out_ch});
  gw = Tensor::zeros_like(w);
  gb = Tensor::zeros_like(b);
  for (auto& v : w.data) v = static_cast<float>(rng.normal() * 0.02);
  if (spectral) {
    const int cols = in_ch * kh * kw;
    sn.u = Tensor({out_ch});
    for (auto& v : sn.u.data) v = static_cast<float>(rng.normal());
    MapVec u(sn.u.ptr(), out_ch);
    const float n = u.norm();
    if (n > 0) u /= n;
    sn.v = Tensor({cols});
    power_iterate(1);
  }
}

float Conv2d::sigma() const {
  const int cols = in_ch * kh * kw;
  ConstMapRowMat wm(w.ptr(), out_ch, cols);
  return sn_sigma(wm, sn);
}

void Conv2d::power_iterate(int iters) {
  if (!spectral) return;
  const int cols = in_ch * kh * kw;
  ConstMapRowMat wm(w.ptr(), out_ch, cols);
  sn_power_iterate(wm, sn, iters);
}

Tensor Conv2d::forward(const Tensor& x, Ctx* ctx) const {
  if (x.rank() != 4 || x.dim(1) != in_ch)
    throw std::invalid_argument("conv2d: input shape mismatch " + x.shape_str());
  const int n = x.dim(0), h = x.dim(2), wdt = x.dim(3);
  const int ho = (h + 2 * pad - kh) / stride + 1;
  const int wo = (wdt + 2 * pad - kw) / stride + 1;
  if (ho < 1 || wo < 1)
    throw std::invalid_argument("conv2d: output would be empty");
  const int ckk = in_ch * kh * kw;

  ConstMapRowMat wm(w.ptr(), out_ch, ckk);
  float sig = 1.0f;
  bool sn_applied = false;
  RowMat weight;
  if (spectral) {
    sig = sn_sigma(wm, sn);
    sn_applied = sig > kSigmaTiny;
  }
  if (sn_applied) {
    weight = wm / sig;
  } else {
    sig = 1.0f;  // zero weight matrix is used unchanged
    weight = wm;
  }

  Tensor y({n, out_ch, ho, wo});
  RowMat cols(ckk, static_cast<Eigen::Index>(ho) * wo);
  for (int i = 0; i < n; ++i) {
    im2col(x.ptr() + x.idx4(i, 0, 0, 0), in_ch, h, wdt, kh, kw, stride, pad, ho,
           wo, cols.data());
    MapRowMat yn(y.ptr() + y.idx4(i, 0, 0, 0), out_ch,
                 static_cast<Eigen::Index>(ho) * wo);
    yn.noalias() = weight * cols;
    for (int c = 0; c < out_ch; ++c) yn.row(c).array() += b.data[static_cast<std::size_t>(c)];
  }
  if (ctx) {
    ctx->x = x;
    ctx->sigma = sig;
    ctx->sn_applied = sn_applied;
  }
  return y;
}

Tensor Conv2d::backward(const Ctx& ctx, const Tensor& gy, bool accum_param_grads) {
  const Tensor& x = ctx.x;
  const int n = x.dim(0), h = x.dim(2), wdt = x.dim(3);
  const int ho = gy.dim(2), wo = gy.dim(3);
  const int ckk = in_ch * kh * kw;

  ConstMapRowMat wm(w.ptr(), out_ch, ckk);
  RowMat weight;  // weight actually used in forward
  if (ctx.sn_applied) {
    weight = wm / ctx.sigma;
  } else {
    weight = wm;
  }

  Tensor gx(x.shape);
  RowMat cols(ckk, static_cast<Eigen::Index>(ho) * wo);
  RowMat gweight = RowMat::Zero(out_ch, ckk);
  Eigen::VectorXf gbias = Eigen::VectorXf::Zero(out_ch);

  for (int i = 0; i < n; ++i) {
    im2col(x.ptr() + x.idx4(i, 0, 0, 0), in_ch, h, wdt, kh, kw, stride, pad, ho,
           wo, cols.data());
    ConstMapRowMat gyn(gy.ptr() + gy.idx4(i, 0, 0, 0), out_ch,
                       static_cast<Eigen::Index>(ho) * wo);
    if (accum_param_grads) {
      gweight.noalias() += gyn * cols.transpose();
      gbias += gyn.rowwise().sum();
    }
    RowMat gcols = weight.transpose() * gyn;
    col2im_add(gcols.data(), in_ch, h, wdt, kh, kw, stride, pad, ho, wo,
               gx.ptr() + gx.idx4(i, 0, 0, 0));
  }

  if (accum_param_grads) {
    MapRowMat gwm(gw.ptr(), out_ch, ckk);
    if (ctx.sn_applied) {
      // w_hat = w / sigma with sigma = u^T w v (u, v held fixed):
      // g_w = (g_what - <g_what, w_hat> u v^T) / sigma
      ConstMapVec u(sn.u.ptr(), out_ch);
      ConstMapVec v(sn.v.ptr(), ckk);
      const RowMat what = wm / ctx.sigma;
      const float inner = (gweight.array() * what.array()).sum();
      gwm.noalias() += (gweight - inner * (u * v.transpose())) / ctx.sigma;
    } else {
      gwm.noalias() += gweight;
    }
    MapVec gbv(gb.ptr(), out_ch);
    gbv += gbias;
  }
  return gx;
}

void Conv2d::zero_grad() {
  gw.zero();
  gb.zero();
}

void Conv2d::collect(const std::string& prefix, std::vector<ParamRef>* params,
                     std::vector<BufferRef>* buffers) {
  params->push_back({prefix + ".w", &w, &gw});
  params->push_back({prefix + ".b", &b, &gb});
  if (spectral && buffers) {
    buffers->push_back({prefix + ".sn_u", &sn.u});
    buffers->push_back({prefix + ".sn_v", &sn.v});
  }
}

// ---------------------------------------------------------------------------
// BatchNorm2d

void BatchNorm2d::build(int channels_) {
  channels = channels_;
  gamma = Tensor({channels});
  gamma.fill(1.0f);
  beta = Tensor({channels});
  ggamma = Tensor::zeros_like(gamma);
  gbeta = Tensor::zeros_like(beta);
  run_mean = Tensor({channels});
  run_var = Tensor({channels});
  run_var.fill(1.0f);
}

Tensor BatchNorm2d::forward(const Tensor& x, Mode mode, Ctx* ctx) {
  if (x.rank() != 4 || x.dim(1) != channels)
    throw std::invalid_argument("batchnorm: input shape mismatch");
  const int n = x.dim(0), h = x.dim(2), wdt = x.dim(3);
  const std::size_t m = static_cast<std::size_t>(n) * h * wdt;

  Tensor y(x.shape);
  Tensor xhat(x.shape);
  std::vector<float> inv_std(static_cast<std::size_t>(channels));

  for (int c = 0; c < channels; ++c) {
    double mean, var;
    if (mode == Mode::kTrain) {
      double s = 0.0, s2 = 0.0;
      for (int i = 0; i < n; ++i)
        for (int r = 0; r < h; ++r)
          for (int q = 0; q < wdt; ++q) {
            const double v = x.at4(i, c, r, q);
            s += v;
            s2 += v * v;
          }
      mean = s / static_cast<double>(m);
      var = s2 / static_cast<double>(m) - mean * mean;
      if (var < 0.0) var = 0.0;
      run_mean.data[static_cast<std::size_t>(c)] = static_cast<float>(
          (1.0 - momentum) * run_mean.data[static_cast<std::size_t>(c)] +
          momentum * mean);
      run_var.data[static_cast<std::size_t>(c)] = static_cast<float>(
          (1.0 - momentum) * run_var.data[static_cast<std::size_t>(c)] +
          momentum * var);
    } else {
      mean = run_mean.data[static_cast<std::size_t>(c)];
      var = run_var.data[static_cast<std::size_t>(c)];
    }
    const float is = static_cast<float>(1.0 / std::sqrt(var + eps));
    inv_std[static_cast<std::size_t>(c)] = is;
    const float mu = static_cast<float>(mean);
    const float g = gamma.data[static_cast<std::size_t>(c)];
    const float bt = beta.data[static_cast<std::size_t>(c)];
    for (int i = 0; i < n; ++i)
      for (int r = 0; r < h; ++r)
        for (int q = 0; q < wdt; ++q) {
          const float xh = (x.at4(i, c, r, q) - mu) * is;
          xhat.at4(i, c, r, q) = xh;
          y.at4(i, c, r, q) = g * xh + bt;
        }
  }
  if (ctx) {
    ctx->xhat = std::move(xhat);
    ctx->inv_std = std::move(inv_std);
    ctx->mode = mode;
  }
  return y;
}

Tensor BatchNorm2d::backward(const Ctx& ctx, const Tensor& gy,
                             bool accum_param_grads) {
  const Tensor& xhat = ctx.xhat;
  const int n = gy.dim(0), h = gy.dim(2), wdt = gy.dim(3);
  const std::size_t m = static_cast<std::size_t>(n) * h * wdt;
  Tensor gx(gy.shape);

  for (int c = 0; c < channels; ++c) {
    double sum_gy = 0.0, sum_gy_xhat = 0.0;
    for (int i = 0; i < n; ++i)
      for (int r = 0; r < h; ++r)
        for (int q = 0; q < wdt; ++q) {
          const double g = gy.at4(i, c, r, q);
          sum_gy += g;
          sum_gy_xhat += g * xhat.at4(i, c, r, q);
        }
    const float g = gamma.data[static_cast<std::size_t>(c)];
    const float is = ctx.inv_std[static_cast<std::size_t>(c)];
    if (ctx.mode == Mode::kTrain) {
      const float mean_gy = static_cast<float>(sum_gy / static_cast<double>(m));
      const float mean_gy_xhat =
          static_cast<float>(sum_gy_xhat / static_cast<double>(m));
      for (int i = 0; i < n; ++i)
        for (int r = 0; r < h; ++r)
          for (int q = 0; q < wdt; ++q)
            gx.at4(i, c, r, q) =
                g * is *
                (gy.at4(i, c, r, q) - mean_gy -
                 xhat.at4(i, c, r, q) * mean_gy_xhat);
    } else {
      for (int i = 0; i < n; ++i)
        for (int r = 0; r < h; ++r)
          for (int q = 0; q < wdt; ++q)
            gx.at4(i, c, r, q) = g * is * gy.at4(i, c, r, q);
    }
    if (accum_param_grads) {
      ggamma.data[static_cast<std::size_t>(c)] += static_cast<float>(sum_gy_xhat);
      gbeta.data[static_cast<std::size_t>(c)] += static_cast<float>(sum_gy);
    }
  }
  return gx;
}

void BatchNorm2d::zero_grad() {
  ggamma.zero();
  gbeta.zero();
}

void BatchNorm2d::collect(const std::string& prefix,
                          std::vector<ParamRef>* params,
                          std::vector<BufferRef>* buffers) {
  params->push_back({prefix + ".gamma", &gamma, &ggamma});
  params->push_back({prefix + ".beta", &beta, &gbeta});
  if (buffers) {
    buffers->push_back({prefix + ".run_mean", &run_mean});
    buffers->push_back({prefix + ".run_var", &run_var});
  }
}

// ---------------------------------------------------------------------------
// Linear

void Linear::build(int in_, int out_, Rng& rng) {
  in = in_;
  out = out_;
  w = Tensor({out, in});
  b = Tensor({out});
  gw = Tensor::zeros_like(w);
  gb = Tensor::zeros_like(b);
  for (auto& v : w.data) v = static_cast<float>(rng.normal() * 0.02);
}

Tensor Linear::forward(const Tensor& x, Ctx* ctx) const {
  if (x.rank() != 2 || x.dim(1) != in)
    throw std::invalid_argument("linear: input shape mismatch");
  const int n = x.dim(0);
  Tensor y({n, out});
  ConstMapRowMat xm(x.ptr(), n, in);
  ConstMapRowMat wm(w.ptr(), out, in);
  MapRowMat ym(y.ptr(), n, out);
  ym.noalias() = xm * wm.transpose();
  for (int i = 0; i < n; ++i)
    for (int c = 0; c < out; ++c) ym(i, c) += b.data[static_cast<std::size_t>(c)];
  if (ctx) ctx->x = x;
  return y;
}

Tensor Linear::backward(const Ctx& ctx, const Tensor& gy,
                        bool accum_param_grads) {
  const int n = ctx.x.dim(0);
  ConstMapRowMat xm(ctx.x.ptr(), n, in);
  ConstMapRowMat gym(gy.ptr(), n, out);
  ConstMapRowMat wm(w.ptr(), out, in);
  if (accum_param_grads) {
    MapRowMat gwm(gw.ptr(), out, in);
    gwm.noalias() += gym.transpose() * xm;
    MapVec gbv(gb.ptr(), out);
    gbv += gym.colwise().sum();
  }
  Tensor gx({n, in});
  MapRowMat gxm(gx.ptr(), n, in);
  gxm.noalias() = gym * wm;
  return gx;
}

void Linear::zero_grad() {
  gw.zero();
  gb.zero();
}

void Linear::collect(const std::string& prefix, std::vector<ParamRef>* params) {
  params->push_back({prefix + ".w", &w, &gw});
  params->push_back({prefix + ".b", &b, &gb});
}

// ---------------------------------------------------------------------------
// Stateless ops

Tensor leaky_relu(const Tensor& x, float slope, Tensor* saved_out) {
  Tensor y(x.shape);
  for (std::size_t i = 0; i < x.numel(); ++i) {
    const float v = x.data[i];
    y.data[i] = v > 0.0f ? v : slope * v;
  }
  if (saved_out) *saved_out = y;
  return y;
}

Tensor leaky_relu_backward(const Tensor& saved_out, const Tensor& gy,
                           float slope) {
  Tensor gx(gy.shape);
  for (std::size_t i = 0; i < gy.numel(); ++i)
    gx.data[i] = saved_out.data[i] > 0.0f ? gy.data[i] : slope * gy.data[i];
  return gx;
}

Tensor tanh_act(const Tensor& x, Tensor* saved_out) {
  Tensor y(x.shape);
  for (std::size_t i = 0; i < x.numel(); ++i) y.data[i] = std::tanh(x.data[i]);
  if (saved_out) *saved_out = y;
  return y;
}

Tensor tanh_backward(const Tensor& saved_out, const Tensor& gy) {
  Tensor gx(gy.shape);
  for (std::size_t i = 0; i < gy.numel(); ++i) {
    const float t = saved_out.data[i];
    gx.data[i] = gy.data[i] * (1.0f - t * t);
  }
  return gx;
}

Tensor pixel_shuffle(const Tensor& x, int r) {
  if (r < 1) throw std::invalid_argument("pixel_shuffle: factor must be >= 1");
  if (x.rank() != 4 || x.dim(1) % (r * r) != 0)
    throw std::invalid_argument(
        "pixel_shuffle: channels not divisible by r^2");
  if (r == 1) return x;
  const int n = x.dim(0), c_out = x.dim(1) / (r * r), h = x.dim(2), w = x.dim(3);
  Tensor y({n, c_out, h * r, w * r});
  for (int i = 0; i < n; ++i)
    for (int c = 0; c < c_out; ++c)
      for (int dy = 0; dy < r; ++dy)
        for (int dx = 0; dx < r; ++dx) {
          const int cin = c * r * r + dy * r + dx;
          for (int hh = 0; hh < h; ++hh)
            for (int ww = 0; ww < w; ++ww)
              y.at4(i, c, hh * r + dy, ww * r + dx) = x.at4(i, cin, hh, ww);
        }
  return y;
}

Tensor pixel_shuffle_backward(const Tensor& gy, int r) {
  if (r == 1) return gy;
  const int n = gy.dim(0), c_out = gy.dim(1), hr = gy.dim(2), wr = gy.dim(3);
  const int h = hr / r, w = wr / r;
  Tensor gx({n, c_out * r * r, h, w});
  for (int i = 0; i < n; ++i)
    for (int c = 0; c < c_out; ++c)
      for (int dy = 0; dy < r; ++dy)
        for (int dx = 0; dx < r; ++dx) {
          const int cin = c * r * r + dy * r + dx;
          for (int hh = 0; hh < h; ++hh)
            for (int ww = 0; ww < w; ++ww)
              gx.at4(i, cin, hh, ww) = gy.at4(i, c, hh * r + dy, ww * r + dx);
        }
  return gx;
}

Tensor concat_channels(const Tensor& a, const Tensor& b) {
  if (a.rank() != 4 || b.rank() != 4 || a.dim(0) != b.dim(0) ||
      a.dim(2) != b.dim(2) || a.dim(3) != b.dim(3))
    throw std::invalid_argument("concat_channels: shape mismatch");
  const int n = a.dim(0), ca = a.dim(1), cb = b.dim(1), h = a.dim(2), w = a.dim(3);
  Tensor y({n, ca + cb, h, w});
  const std::size_t plane = static_cast<std::size_t>(h) * w;
  for (int i = 0; i < n; ++i) {
    std::copy(a.ptr() + a.idx4(i, 0, 0, 0), a.ptr() + a.idx4(i, 0, 0, 0) + plane * ca,
              y.ptr() + y.idx4(i, 0, 0, 0));
    std::copy(b.ptr() + b.idx4(i, 0, 0, 0), b.ptr() + b.idx4(i, 0, 0, 0) + plane * cb,
              y.ptr() + y.idx4(i, ca, 0, 0));
  }
  return y;
}

void split_channels(const Tensor& g, int c_first, Tensor* ga, Tensor* gb) {
  const int n = g.dim(0), c = g.dim(1), h = g.dim(2), w = g.dim(3);
  const int c_second = c - c_first;
  *ga = Tensor({n, c_first, h, w});
  *gb = Tensor({n, c_second, h, w});
  const std::size_t plane = static_cast<std::size_t>(h) * w;
  for (int i = 0; i < n; ++i) {
    std::copy(g.ptr() + g.idx4(i, 0, 0, 0),
              g.ptr() + g.idx4(i, 0, 0, 0) + plane * c_first,
              ga->ptr() + ga->idx4(i, 0, 0, 0));
    std::copy(g.ptr() + g.idx4(i, c_first, 0, 0),
              g.ptr() + g.idx4(i, c_first, 0, 0) + plane * c_second,
              gb->ptr() + gb->idx4(i, 0, 0, 0));
  }
}

Tensor global_avg_pool(const Tensor& x) {
  const int n = x.dim(0), c = x.dim(1), h = x.dim(2), w = x.dim(3);
  const double m = static_cast<double>(h) * w;
  Tensor y({n, c});
  for (int i = 0; i < n; ++i)
    for (int cc = 0; cc < c; ++cc) {
      double s = 0.0;
      for (int r = 0; r < h; ++r)
        for (int q = 0; q < w; ++q) s += x.at4(i, cc, r, q);
      y.data[static_cast<std::size_t>(i) * c + cc] = static_cast<float>(s / m);
    }
  return y;
}

Tensor global_avg_pool_backward(const std::vector<int>& in_shape,
                                const Tensor& gy) {
  Tensor gx(in_shape);
  const int n = in_shape[0], c = in_shape[1], h = in_shape[2], w = in_shape[3];
  const float inv = 1.0f / (static_cast<float>(h) * w);
  for (int i = 0; i < n; ++i)
    for (int cc = 0; cc < c; ++cc) {
      const float g = gy.data[static_cast<std::size_t>(i) * c + cc] * inv;
      for (int r = 0; r < h; ++r)
        for (int q = 0; q < w; ++q) gx.at4(i, cc, r, q) = g;
    }
  return gx;
}

}  // namespace nn
}  // namespace mgvc
