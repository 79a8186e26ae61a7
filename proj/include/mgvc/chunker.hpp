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
#include <utility>
#include <vector>

#include "mgvc/dsp.hpp"
#include "mgvc/rng.hpp"

namespace mgvc {

/// Crop geometry: training crops are L frames wide, the generator sees
/// L/2-frame chunks. Canonically L = hop_size / 2.
struct ChunkConfig {
  int L = 96;
  int half = 48;

  static ChunkConfig from_hop(int hop);
  void validate() const;
};

/// Fixed-width M x L slice of a training spectrogram.
struct TrainingCrop {
  Eigen::MatrixXf values;
  int source_id = -1;
  int offset = 0;
};

/// M x (L/2) slice, the generator's unit of work.
struct Chunk {
  Eigen::MatrixXf values;
};

/// Non-overlapping chunk cover of a spectrogram, padded on the right to a
/// multiple of L/2. count * (L/2) = original_frames + pad_frames.
struct ChunkSequence {
  std::vector<Chunk> chunks;
  int original_frames = 0;
  int pad_frames = 0;
};

/// Contiguous M x L slice at a uniformly random offset in [0, t - L].
TrainingCrop random_crop(const MelSpectrogram& spec, const ChunkConfig& cfg,
                         Rng& rng);

/// Left half = frames [0, L/2), right half = frames [L/2, L).
std::pair<Chunk, Chunk> split_crop(const TrainingCrop& crop);

/// Column-wise concatenation in order. All chunks must share a height.
Eigen::MatrixXf concat(const std::vector<Chunk>& chunks);

/// Pads the time axis on the right with -1 (normalized silence) to the
/// next multiple of L/2, then slices into consecutive chunks.
ChunkSequence chunk_sequence(const MelSpectrogram& spec, const ChunkConfig& cfg);

/// Concatenate and trim the padding; restores the original width exactly.
Eigen::MatrixXf unchunk(const ChunkSequence& seq);

}  // namespace mgvc
