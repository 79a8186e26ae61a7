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

#include "mgvc/losses.hpp"

#include <cmath>
#include <stdexcept>

namespace mgvc {

namespace {

constexpr double kZeroNorm = 1e-30;

void check_nonempty(const Tensor& t, const char* what) {
  if (t.numel() == 0)
    throw std::invalid_argument(std::string(what) + ": empty batch");
}

}  // namespace

void LossWeights::validate() const {
  if (alpha < 0.0 || beta < 0.0 || gamma < 0.0)
    throw std::invalid_argument("loss weights must be non-negative");
  if (!(delta > 0.0)) throw std::invalid_argument("delta must be positive");
}

double d_hinge_loss(const Tensor& real_scores, const Tensor& fake_scores) {
  return d_hinge_loss_grad(real_scores, fake_scores, nullptr, nullptr);
}

double d_hinge_loss_grad(const Tensor& real_scores, const Tensor& fake_scores,
                         Tensor* g_real, Tensor* g_fake) {
  check_nonempty(real_scores, "d_hinge_loss(real)");
  check_nonempty(fake_scores, "d_hinge_loss(fake)");
  const double nr = static_cast<double>(real_scores.numel());
  const double nf = static_cast<double>(fake_scores.numel());
  if (g_real) *g_real = Tensor(real_scores.shape);
  if (g_fake) *g_fake = Tensor(fake_scores.shape);

  double acc_r = 0.0;
  for (std::size_t i = 0; i < real_scores.numel(); ++i) {
    const double r = real_scores.data[i];
    if (r < 1.0) {
      acc_r += -1.0 + r;
      if (g_real) g_real->data[i] = static_cast<float>(-1.0 / nr);
    }
  }
  double acc_f = 0.0;
  for (std::size_t i = 0; i < fake_scores.numel(); ++i) {
    const double f = fake_scores.data[i];
    if (f > -1.0) {
      acc_f += -1.0 - f;
      if (g_fake) g_fake->data[i] = static_cast<float>(1.0 / nf);
    }
  }
  return -acc_r / nr - acc_f / nf;
}

double g_adv_loss(const Tensor& fake_scores) {
  return g_adv_loss_grad(fake_scores, nullptr);
}

double g_adv_loss_grad(const Tensor& fake_scores, Tensor* g_fake) {
  check_nonempty(fake_scores, "g_adv_loss");
  const double n = static_cast<double>(fake_scores.numel());
  if (g_fake) {
    *g_fake = Tensor(fake_scores.shape);
    g_fake->fill(static_cast<float>(-1.0 / n));
  }
  double acc = 0.0;
  for (const float v : fake_scores.data) acc += v;
  return -acc / n;
}

std::vector<float> transformation_vector(const std::vector<float>& x_i,
                                         const std::vector<float>& x_j) {
  if (x_i.size() != x_j.size())
    throw std::invalid_argument("transformation_vector: length mismatch");
  std::vector<float> t(x_i.size());
  for (std::size_t k = 0; k < t.size(); ++k) t[k] = x_j[k] - x_i[k];
  return t;
}

double travel_loss_encodings(const Tensor& enc_src, const Tensor& enc_tr) {
  return travel_loss_encodings_grad(enc_src, enc_tr, nullptr, nullptr);
}

double travel_loss_encodings_grad(const Tensor& enc_src, const Tensor& enc_tr,
                                  Tensor* g_src, Tensor* g_tr) {
  if (enc_src.rank() != 2 || !enc_src.same_shape(enc_tr))
    throw std::invalid_argument("travel_loss: encoding batches must match");
  const int n = enc_src.dim(0);
  const int dim = enc_src.dim(1);
  if (n < 2) throw std::invalid_argument("travel_loss: batch size must be >= 2");
  const double pairs = static_cast<double>(n) * (n - 1) / 2.0;

  if (g_src) *g_src = Tensor(enc_src.shape);
  if (g_tr) *g_tr = Tensor(enc_tr.shape);

  auto row = [dim](const Tensor& t, int i) { return t.ptr() + static_cast<std::size_t>(i) * dim; };
  auto grow = [dim](Tensor* t, int i) { return t->ptr() + static_cast<std::size_t>(i) * dim; };

  std::vector<double> t_vec(static_cast<std::size_t>(dim));
  std::vector<double> tp_vec(static_cast<std::size_t>(dim));

  double total = 0.0;
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      const float* si = row(enc_src, i);
      const float* sj = row(enc_src, j);
      const float* ti = row(enc_tr, i);
      const float* tj = row(enc_tr, j);
      double dot = 0.0, nt2 = 0.0, np2 = 0.0, dist2 = 0.0;
      for (int k = 0; k < dim; ++k) {
        const double a = static_cast<double>(si[k]) - sj[k];
        const double b = static_cast<double>(ti[k]) - tj[k];
        t_vec[static_cast<std::size_t>(k)] = a;
        tp_vec[static_cast<std::size_t>(k)] = b;
        dot += a * b;
        nt2 += a * a;
        np2 += b * b;
        const double d = a - b;
        dist2 += d * d;
      }
      const double nt = std::sqrt(nt2);
      const double np = std::sqrt(np2);
      const bool degenerate = nt < kZeroNorm || np < kZeroNorm;
      const double cos_term = degenerate ? 1.0 : 1.0 - dot / (nt * np);
      total += cos_term + dist2;

      if (g_src || g_tr) {
        const double w = 1.0 / pairs;
        for (int k = 0; k < dim; ++k) {
          const double a = t_vec[static_cast<std::size_t>(k)];
          const double b = tp_vec[static_cast<std::size_t>(k)];
          // d/dt of -dot/(|t||t'|) and of ||t - t'||^2.
          double d_t = 2.0 * (a - b);
          double d_tp = -2.0 * (a - b);
          if (!degenerate) {
            d_t += -(b / (nt * np)) + dot * a / (nt2 * nt * np);
            d_tp += -(a / (nt * np)) + dot * b / (np2 * np * nt);
          }
          // t = e_i - e_j over both batches.
          if (g_src) {
            grow(g_src, i)[k] += static_cast<float>(w * d_t);
            grow(g_src, j)[k] -= static_cast<float>(w * d_t);
          }
          if (g_tr) {
            grow(g_tr, i)[k] += static_cast<float>(w * d_tp);
            grow(g_tr, j)[k] -= static_cast<float>(w * d_tp);
          }
        }
      }
    }
  }
  return total / pairs;
}

double travel_loss(SiameseEncoder& s, const std::vector<Chunk>& source_chunks,
                   const std::vector<Chunk>& translated_chunks) {
  if (source_chunks.size() != translated_chunks.size())
    throw std::invalid_argument("travel_loss: batch size mismatch");
  if (source_chunks.size() < 2)
    throw std::invalid_argument("travel_loss: batch size must be >= 2");
  const Tensor enc_src =
      s.forward(chunks_to_tensor(source_chunks), Mode::kEval, nullptr);
  const Tensor enc_tr =
      s.forward(chunks_to_tensor(translated_chunks), Mode::kEval, nullptr);
  return travel_loss_encodings(enc_src, enc_tr);
}

double margin_loss(const Tensor& encodings, double delta) {
  return margin_loss_grad(encodings, delta, nullptr);
}

double margin_loss_grad(const Tensor& encodings, double delta, Tensor* g_enc) {
  if (encodings.rank() != 2)
    throw std::invalid_argument("margin_loss: expected [N, len] encodings");
  const int n = encodings.dim(0);
  const int dim = encodings.dim(1);
  if (n < 2) throw std::invalid_argument("margin_loss: batch size must be >= 2");
  if (!(delta > 0.0)) throw std::invalid_argument("margin_loss: delta must be > 0");
  const double pairs = static_cast<double>(n) * (n - 1) / 2.0;
  if (g_enc) *g_enc = Tensor(encodings.shape);

  double total = 0.0;
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      const float* ei = encodings.ptr() + static_cast<std::size_t>(i) * dim;
      const float* ej = encodings.ptr() + static_cast<std::size_t>(j) * dim;
      double d2 = 0.0;
      for (int k = 0; k < dim; ++k) {
        const double d = static_cast<double>(ei[k]) - ej[k];
        d2 += d * d;
      }
      const double dist = std::sqrt(d2);
      if (dist < delta) {
        total += delta - dist;
        if (g_enc && dist > kZeroNorm) {
          float* gi = g_enc->ptr() + static_cast<std::size_t>(i) * dim;
          float* gj = g_enc->ptr() + static_cast<std::size_t>(j) * dim;
          const double w = -1.0 / (pairs * dist);
          for (int k = 0; k < dim; ++k) {
            const double d = static_cast<double>(ei[k]) - ej[k];
            gi[k] += static_cast<float>(w * d);
            gj[k] -= static_cast<float>(w * d);
          }
        }
      }
    }
  }
  return total / pairs;
}

double identity_mse(const Tensor& translated, const Tensor& target) {
  return identity_mse_grad(translated, target, nullptr);
}

double identity_mse_grad(const Tensor& translated, const Tensor& target,
                         Tensor* g_translated) {
  if (!translated.same_shape(target))
    throw std::invalid_argument("identity_mse: shape mismatch");
  check_nonempty(translated, "identity_mse");
  const double n = static_cast<double>(translated.numel());
  if (g_translated) *g_translated = Tensor(translated.shape);
  double acc = 0.0;
  for (std::size_t i = 0; i < translated.numel(); ++i) {
    const double d = static_cast<double>(translated.data[i]) - target.data[i];
    acc += d * d;
    if (g_translated)
      g_translated->data[i] = static_cast<float>(2.0 * d / n);
  }
  return acc / n;
}

double identity_loss(Generator& g, const std::vector<Chunk>& target_chunks) {
  if (target_chunks.empty())
    throw std::invalid_argument("identity_loss: empty batch");
  const Tensor target = chunks_to_tensor(target_chunks);
  Tensor translated = g.forward(target, Mode::kEval, nullptr);
  return identity_mse(translated, target);
}

double total_d_loss(double d_adv) { return d_adv; }

double total_g_loss(double g_adv, double g_id, double travel,
                    const LossWeights& w) {
  w.validate();
  return g_adv + w.alpha * g_id + w.beta * travel;
}

double total_s_loss(double travel, double margin, const LossWeights& w) {
  w.validate();
  return w.beta * travel + w.gamma * margin;
}

}  // namespace mgvc
