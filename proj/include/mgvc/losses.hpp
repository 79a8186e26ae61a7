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

#include "mgvc/models.hpp"
#include "mgvc/tensor.hpp"

namespace mgvc {

/// Objective weights: total generator loss = adversarial + alpha * identity
/// + beta * travel; total siamese loss = beta * travel + gamma * margin.
/// alpha = 0 disables the identity term entirely (audio style transfer
/// mode); delta is the latent-space margin.
struct LossWeights {
  double alpha = 1.0;
  double beta = 10.0;
  double gamma = 10.0;
  double delta = 10.0;

  void validate() const;
};

/// Hinge discriminator loss:
/// -mean(min(0, -1 + real)) - mean(min(0, -1 - fake)), means taken over
/// batch and patch positions. Always >= 0.
double d_hinge_loss(const Tensor& real_scores, const Tensor& fake_scores);
double d_hinge_loss_grad(const Tensor& real_scores, const Tensor& fake_scores,
                         Tensor* g_real, Tensor* g_fake);

/// Generator adversarial loss: -mean(fake_scores).
double g_adv_loss(const Tensor& fake_scores);
double g_adv_loss_grad(const Tensor& fake_scores, Tensor* g_fake);

/// t(x_i, x_j) = x_j - x_i.
std::vector<float> transformation_vector(const std::vector<float>& x_i,
                                         const std::vector<float>& x_j);

/// Transformation-vector learning term over all unordered pairs of rows:
/// mean of (1 - cos_sim(t, t')) + ||t - t'||^2 with t = e_i - e_j over the
/// source encodings and t' over the translated ones. The angular term is
/// written as 1 - cosine similarity so that minimizing the loss aligns the
/// vectors; a zero t or t' contributes 1 for that term.
double travel_loss_encodings(const Tensor& enc_src, const Tensor& enc_tr);
double travel_loss_encodings_grad(const Tensor& enc_src, const Tensor& enc_tr,
                                  Tensor* g_src, Tensor* g_tr);

/// Spec-level surface: encodes both chunk batches with the siamese network
/// (inference mode) and evaluates the pairwise term above. Batch size must
/// be >= 2 and the batches aligned (translated[i] = G(source[i])).
double travel_loss(SiameseEncoder& s, const std::vector<Chunk>& source_chunks,
                   const std::vector<Chunk>& translated_chunks);

/// Mean over unordered pairs of max(0, delta - ||e_i - e_j||_2); zero iff
/// all pairwise encoding distances are >= delta.
double margin_loss(const Tensor& encodings, double delta);
double margin_loss_grad(const Tensor& encodings, double delta, Tensor* g_enc);

/// Mean squared error between a translated batch and its target batch.
double identity_mse(const Tensor& translated, const Tensor& target);
double identity_mse_grad(const Tensor& translated, const Tensor& target,
                         Tensor* g_translated);

/// Spec-level surface: mean over the batch of mean squared error between
/// G(b) and b, evaluated in inference mode.
double identity_loss(Generator& g, const std::vector<Chunk>& target_chunks);

double total_d_loss(double d_adv);
double total_g_loss(double g_adv, double g_id, double travel,
                    const LossWeights& w);
double total_s_loss(double travel, double margin, const LossWeights& w);

}  // namespace mgvc
