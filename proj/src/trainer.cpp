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

#include "mgvc/trainer.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <stdexcept>

namespace mgvc {

namespace {

// Interleaved half-chunks (l0, r0, l1, r1, ...) -> full crops [B,1,M,L].
Tensor pair_halves(const Tensor& halves) {
  const int n2 = halves.dim(0);
  const int m = halves.dim(2), half = halves.dim(3);
  Tensor crops({n2 / 2, 1, m, 2 * half});
  for (int i = 0; i < n2 / 2; ++i)
    for (int r = 0; r < m; ++r)
      for (int c = 0; c < half; ++c) {
        crops.at4(i, 0, r, c) = halves.at4(2 * i, 0, r, c);
        crops.at4(i, 0, r, half + c) = halves.at4(2 * i + 1, 0, r, c);
      }
  return crops;
}

Tensor unpair_halves(const Tensor& crops) {
  const int b = crops.dim(0);
  const int m = crops.dim(2), l = crops.dim(3);
  const int half = l / 2;
  Tensor halves({2 * b, 1, m, half});
  for (int i = 0; i < b; ++i)
    for (int r = 0; r < m; ++r)
      for (int c = 0; c < half; ++c) {
        halves.at4(2 * i, 0, r, c) = crops.at4(i, 0, r, c);
        halves.at4(2 * i + 1, 0, r, c) = crops.at4(i, 0, r, half + c);
      }
  return halves;
}

Tensor scaled(const Tensor& t, double s) {
  Tensor out(t.shape);
  for (std::size_t i = 0; i < t.numel(); ++i)
    out.data[i] = static_cast<float>(s * t.data[i]);
  return out;
}

void require_finite(double v, const char* what) {
  if (!std::isfinite(v))
    throw std::runtime_error(std::string(what) + ": non-finite loss value");
}

void log_scalar(std::ofstream& log, std::uint64_t step, const char* name,
                double value) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.9g", value);
  log << step << '\t' << name << '\t' << buf << '\n';
}

}  // namespace

void TrainConfig::validate() const {
  if (batch_size < 2)
    throw std::invalid_argument("batch_size must be >= 2 (pairwise losses)");
  if (!(lr_d > 0.0) || !(lr_gs > 0.0))
    throw std::invalid_argument("learning rates must be positive");
  if (d_updates_per_gs < 1)
    throw std::invalid_argument("d_updates_per_gs must be >= 1");
  if (!(adam_beta1 >= 0.0 && adam_beta1 < 1.0) ||
      !(adam_beta2 >= 0.0 && adam_beta2 < 1.0))
    throw std::invalid_argument("adam betas must lie in [0, 1)");
}

void Dataset::validate(const ChunkConfig& cc) const {
  if (domain_a.empty() || domain_b.empty())
    throw std::invalid_argument("dataset: both domains must be non-empty");
  for (const auto* dom : {&domain_a, &domain_b})
    for (const auto& spec : *dom)
      if (spec.values.cols() < cc.L)
        throw std::invalid_argument("dataset: spectrogram narrower than L");
}

void Adam::init(const std::vector<ParamRef>& params) {
  m.clear();
  v.clear();
  for (const auto& p : params) {
    m.push_back(Tensor(p.value->shape));
    v.push_back(Tensor(p.value->shape));
  }
  t = 0;
}

void Adam::step(const std::vector<ParamRef>& params, double lr, double beta1,
                double beta2, double eps) {
  if (m.size() != params.size())
    throw std::logic_error("Adam: moment/parameter list mismatch");
  ++t;
  const double bc1 = 1.0 - std::pow(beta1, static_cast<double>(t));
  const double bc2 = 1.0 - std::pow(beta2, static_cast<double>(t));
  for (std::size_t i = 0; i < params.size(); ++i) {
    Tensor& val = *params[i].value;
    const Tensor& grad = *params[i].grad;
    Tensor& mi = m[i];
    Tensor& vi = v[i];
    for (std::size_t j = 0; j < val.numel(); ++j) {
      const double g = grad.data[j];
      const double mj = beta1 * mi.data[j] + (1.0 - beta1) * g;
      const double vj = beta2 * vi.data[j] + (1.0 - beta2) * g * g;
      mi.data[j] = static_cast<float>(mj);
      vi.data[j] = static_cast<float>(vj);
      const double mhat = mj / bc1;
      const double vhat = vj / bc2;
      val.data[j] = static_cast<float>(val.data[j] - lr * mhat / (std::sqrt(vhat) + eps));
    }
  }
}

TrainState make_train_state(const DspConfig& dsp, const ChunkConfig& chunk,
                            const ModelConfig& model, const LossWeights& weights,
                            const NormalizationStats& stats,
                            std::uint64_t seed) {
  dsp.validate();
  chunk.validate();
  weights.validate();
  TrainState st;
  st.dsp = dsp;
  st.chunk = chunk;
  st.model = model;
  st.weights = weights;
  st.stats = stats;
  st.rng = Rng(seed);
  st.g = Generator(model, dsp.mel_channels, chunk.half, st.rng);
  st.d = Discriminator(model, st.rng);
  st.s = SiameseEncoder(model, st.rng);
  st.opt_g.init(st.g.parameters());
  st.opt_d.init(st.d.parameters());
  st.opt_s.init(st.s.parameters());
  st.step = 0;
  return st;
}

Batch sample_training_batch(const Dataset& ds, const TrainConfig& tc,
                            const ChunkConfig& cc, Rng& rng) {
  tc.validate();
  ds.validate(cc);
  Batch b;
  b.crops_a.reserve(static_cast<std::size_t>(tc.batch_size));
  b.crops_b.reserve(static_cast<std::size_t>(tc.batch_size));
  b.id_chunks.reserve(static_cast<std::size_t>(tc.batch_size));
  for (int i = 0; i < tc.batch_size; ++i) {
    const auto idx = rng.uniform_int(ds.domain_a.size());
    TrainingCrop crop = random_crop(ds.domain_a[idx], cc, rng);
    crop.source_id = static_cast<int>(idx);
    b.crops_a.push_back(std::move(crop));
  }
  for (int i = 0; i < tc.batch_size; ++i) {
    const auto idx = rng.uniform_int(ds.domain_b.size());
    TrainingCrop crop = random_crop(ds.domain_b[idx], cc, rng);
    crop.source_id = static_cast<int>(idx);
    b.crops_b.push_back(std::move(crop));
  }
  for (int i = 0; i < tc.batch_size; ++i) {
    const auto idx = rng.uniform_int(ds.domain_b.size());
    const auto& spec = ds.domain_b[idx];
    const int t = static_cast<int>(spec.values.cols());
    const int off = static_cast<int>(
        rng.uniform_int(static_cast<std::uint64_t>(t - cc.half + 1)));
    Chunk c;
    c.values = spec.values.middleCols(off, cc.half);
    b.id_chunks.push_back(std::move(c));
  }
  return b;
}

DStepStats d_step(TrainState& st, const Batch& batch, const TrainConfig& tc) {
  // Translate the A crops with G in inference mode; per-sample compute
  // makes the batched pass equal per-chunk translation bit-exactly.
  std::vector<Chunk> src;
  src.reserve(batch.crops_a.size() * 2);
  for (const auto& crop : batch.crops_a) {
    auto [l, r] = split_crop(crop);
    src.push_back(std::move(l));
    src.push_back(std::move(r));
  }
  const Tensor xa = chunks_to_tensor(src);
  const Tensor fa = st.g.forward(xa, Mode::kEval, nullptr);
  const Tensor fake_crops = pair_halves(fa);
  const Tensor real_crops = crops_to_tensor(batch.crops_b);

  st.d.power_iterate();
  Discriminator::Ctx ctx_real, ctx_fake;
  const Tensor real_scores = st.d.forward(real_crops, &ctx_real);
  const Tensor fake_scores = st.d.forward(fake_crops, &ctx_fake);

  Tensor g_real, g_fake;
  DStepStats stats;
  stats.d_loss = d_hinge_loss_grad(real_scores, fake_scores, &g_real, &g_fake);
  require_finite(stats.d_loss, "d_step");

  st.d.zero_grad();
  st.d.backward(ctx_fake, g_fake, true);
  st.d.backward(ctx_real, g_real, true);
  st.opt_d.step(st.d.parameters(), tc.lr_d, tc.adam_beta1, tc.adam_beta2);
  return stats;
}

GsStepStats gs_step(TrainState& st, const Batch& batch, const TrainConfig& tc) {
  const LossWeights& w = st.weights;

  std::vector<Chunk> src;
  src.reserve(batch.crops_a.size() * 2);
  for (const auto& crop : batch.crops_a) {
    auto [l, r] = split_crop(crop);
    src.push_back(std::move(l));
    src.push_back(std::move(r));
  }
  const Tensor xa = chunks_to_tensor(src);

  st.g.power_iterate();
  Generator::Ctx gctx;
  const Tensor fa = st.g.forward(xa, Mode::kTrain, &gctx);

  const Tensor fake_crops = pair_halves(fa);
  Discriminator::Ctx dctx;
  const Tensor fake_scores = st.d.forward(fake_crops, &dctx);
  Tensor g_scores;
  const double adv = g_adv_loss_grad(fake_scores, &g_scores);

  SiameseEncoder::Ctx sctx_src, sctx_tr;
  const Tensor enc_src = st.s.forward(xa, Mode::kTrain, &sctx_src);
  const Tensor enc_tr = st.s.forward(fa, Mode::kTrain, &sctx_tr);
  Tensor g_enc_src, g_enc_tr;
  const double travel =
      travel_loss_encodings_grad(enc_src, enc_tr, &g_enc_src, &g_enc_tr);
  Tensor g_enc_margin;
  const double margin = margin_loss_grad(enc_src, w.delta, &g_enc_margin);

  double id = 0.0;
  Generator::Ctx gctx_id;
  Tensor xb, g_id_grad;
  const bool use_identity = w.alpha > 0.0;
  if (use_identity) {
    xb = chunks_to_tensor(batch.id_chunks);
    const Tensor pred = st.g.forward(xb, Mode::kTrain, &gctx_id);
    id = identity_mse_grad(pred, xb, &g_id_grad);
  }

  GsStepStats stats;
  stats.g_adv = adv;
  stats.g_id = id;
  stats.travel = travel;
  stats.margin = margin;
  stats.g_total = total_g_loss(adv, id, travel, w);
  stats.s_total = total_s_loss(travel, margin, w);
  require_finite(stats.g_total, "gs_step (generator)");
  require_finite(stats.s_total, "gs_step (siamese)");

  st.g.zero_grad();
  st.s.zero_grad();

  // Adversarial gradient reaches the translated chunks through D without
  // touching D's parameter grads.
  const Tensor g_fake_crops = st.d.backward(dctx, g_scores, false);
  Tensor g_fa = unpair_halves(g_fake_crops);

  // beta-weighted travel gradient through the siamese branch of the
  // translated chunks; the input gradient continues into G.
  if (w.beta > 0.0) {
    const Tensor g_fa_siamese = st.s.backward(sctx_tr, scaled(g_enc_tr, w.beta));
    g_fa += g_fa_siamese;
  }

  // Source-encoding branch: beta * travel + gamma * margin, siamese only.
  Tensor g_src_total(g_enc_src.shape);
  g_src_total.add_scaled(g_enc_src, static_cast<float>(w.beta));
  g_src_total.add_scaled(g_enc_margin, static_cast<float>(w.gamma));
  st.s.backward(sctx_src, g_src_total);

  st.g.backward(gctx, g_fa);
  if (use_identity) st.g.backward(gctx_id, scaled(g_id_grad, w.alpha));

  st.opt_g.step(st.g.parameters(), tc.lr_gs, tc.adam_beta1, tc.adam_beta2);
  st.opt_s.step(st.s.parameters(), tc.lr_gs, tc.adam_beta1, tc.adam_beta2);
  return stats;
}

std::string checkpoint_filename(std::uint64_t step) {
  char buf[48];
  std::snprintf(buf, sizeof(buf), "checkpoint_%08llu.ckpt",
                static_cast<unsigned long long>(step));
  return buf;
}

TrainResult train(TrainState& st, const Dataset& ds, const TrainConfig& tc,
                  const std::string& run_dir, const CheckpointHook& on_checkpoint) {
  tc.validate();
  ds.validate(st.chunk);
  std::filesystem::create_directories(run_dir);
  std::ofstream log(run_dir + "/train_log.tsv", std::ios::app);
  if (!log) throw std::runtime_error("cannot open scalar log in " + run_dir);

  const auto save_at = [&](std::uint64_t step) {
    const std::string path = run_dir + "/" + checkpoint_filename(step);
    save_checkpoint(st, path);
    if (on_checkpoint) on_checkpoint(st, path);
  };

  TrainResult result;
  if (st.step == 0) save_at(0);

  while (st.step < tc.total_steps) {
    for (int i = 0; i < tc.d_updates_per_gs; ++i) {
      const Batch b = sample_training_batch(ds, tc, st.chunk, st.rng);
      result.last_d = d_step(st, b, tc);
      ++result.d_steps;
    }
    const Batch b = sample_training_batch(ds, tc, st.chunk, st.rng);
    result.last_gs = gs_step(st, b, tc);
    ++result.gs_steps;
    ++st.step;

    if (tc.log_every > 0 && st.step % tc.log_every == 0) {
      log_scalar(log, st.step, "d_loss", result.last_d.d_loss);
      log_scalar(log, st.step, "g_adv", result.last_gs.g_adv);
      log_scalar(log, st.step, "g_id", result.last_gs.g_id);
      log_scalar(log, st.step, "travel", result.last_gs.travel);
      log_scalar(log, st.step, "margin", result.last_gs.margin);
      log_scalar(log, st.step, "g_total", result.last_gs.g_total);
      log_scalar(log, st.step, "s_total", result.last_gs.s_total);
      log.flush();
      if (!log) throw std::runtime_error("scalar log write failed");
    }
    if (tc.checkpoint_every > 0 && st.step % tc.checkpoint_every == 0 &&
        st.step != tc.total_steps)
      save_at(st.step);
  }
  save_at(st.step);
  return result;
}

}  // namespace mgvc
