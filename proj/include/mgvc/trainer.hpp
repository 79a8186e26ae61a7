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

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "mgvc/chunker.hpp"
#include "mgvc/dsp.hpp"
#include "mgvc/losses.hpp"
#include "mgvc/models.hpp"
#include "mgvc/rng.hpp"

namespace mgvc {

/// Optimization schedule. The discriminator trains on a 4x larger
/// learning rate than the generator/siamese pair and takes
/// d_updates_per_gs updates per joint update.
struct TrainConfig {
  int batch_size = 16;
  double lr_d = 0.0004;
  double lr_gs = 0.0001;
  int d_updates_per_gs = 2;
  double adam_beta1 = 0.5;
  double adam_beta2 = 0.999;
  std::uint64_t total_steps = 10000;
  std::uint64_t checkpoint_every = 1000;
  std::uint64_t log_every = 10;
  std::uint64_t seed = 1;

  void validate() const;
};

/// Two translation domains sharing one normalization range.
struct Dataset {
  std::vector<MelSpectrogram> domain_a;
  std::vector<MelSpectrogram> domain_b;
  NormalizationStats stats;

  void validate(const ChunkConfig& cc) const;
};

struct Batch {
  std::vector<TrainingCrop> crops_a;
  std::vector<TrainingCrop> crops_b;
  std::vector<Chunk> id_chunks;
};

/// Adam with moments stored parallel to a parameter list.
struct Adam {
  std::vector<Tensor> m;
  std::vector<Tensor> v;
  std::uint64_t t = 0;

  void init(const std::vector<ParamRef>& params);
  void step(const std::vector<ParamRef>& params, double lr, double beta1,
            double beta2, double eps = 1e-8);
};

/// Full training snapshot: everything needed for bit-exact resume.
struct TrainState {
  DspConfig dsp;
  ChunkConfig chunk;
  ModelConfig model;
  LossWeights weights;
  NormalizationStats stats;
  Generator g;
  Discriminator d;
  SiameseEncoder s;
  Adam opt_g, opt_d, opt_s;
  std::uint64_t step = 0;
  Rng rng;
};

TrainState make_train_state(const DspConfig& dsp, const ChunkConfig& chunk,
                            const ModelConfig& model, const LossWeights& weights,
                            const NormalizationStats& stats, std::uint64_t seed);

/// Draws batch_size crops from each domain plus batch_size identity
/// chunks from domain B, consuming the shared RNG in a fixed order.
Batch sample_training_batch(const Dataset& ds, const TrainConfig& tc,
                            const ChunkConfig& cc, Rng& rng);

struct DStepStats {
  double d_loss = 0.0;
};

struct GsStepStats {
  double g_adv = 0.0;
  double g_id = 0.0;
  double travel = 0.0;
  double margin = 0.0;
  double g_total = 0.0;
  double s_total = 0.0;
};

/// One discriminator update: fakes via the composite generator in
/// inference mode, hinge loss, Adam on D only.
DStepStats d_step(TrainState& st, const Batch& batch, const TrainConfig& tc);

/// One joint generator + siamese update; D is left untouched.
GsStepStats gs_step(TrainState& st, const Batch& batch, const TrainConfig& tc);

struct TrainResult {
  std::uint64_t d_steps = 0;
  std::uint64_t gs_steps = 0;
  DStepStats last_d;
  GsStepStats last_gs;
};

using CheckpointHook =
    std::function<void(TrainState& st, const std::string& checkpoint_path)>;

/// Runs {d_updates_per_gs x d_step; 1 x gs_step} until total_steps,
/// writing checkpoints and an append-only scalar log
/// (step<TAB>name<TAB>value) into run_dir. Saves an initial checkpoint at
/// step 0 and a final one at the last step reached.
TrainResult train(TrainState& st, const Dataset& ds, const TrainConfig& tc,
                  const std::string& run_dir,
                  const CheckpointHook& on_checkpoint = nullptr);

std::string checkpoint_filename(std::uint64_t step);
void save_checkpoint(const TrainState& st, const std::string& path);
TrainState load_checkpoint(const std::string& path);

}  // namespace mgvc
