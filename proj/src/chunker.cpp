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

#include "mgvc/chunker.hpp"

#include <stdexcept>

namespace mgvc {

ChunkConfig ChunkConfig::from_hop(int hop) {
  ChunkConfig c;
  c.L = hop / 2;
  c.half = c.L / 2;
  c.validate();
  return c;
}

void ChunkConfig::validate() const {
  if (L <= 0 || L % 2 != 0) throw std::invalid_argument("L must be positive and even");
  if (half != L / 2) throw std::invalid_argument("half must equal L / 2");
}

TrainingCrop random_crop(const MelSpectrogram& spec, const ChunkConfig& cfg,
                         Rng& rng) {
  cfg.validate();
  const int t = static_cast<int>(spec.values.cols());
  if (t < cfg.L)
    throw std::invalid_argument("random_crop: spectrogram narrower than L");
  const int offset =
      static_cast<int>(rng.uniform_int(static_cast<std::uint64_t>(t - cfg.L + 1)));
  TrainingCrop crop;
  crop.offset = offset;
  crop.values = spec.values.middleCols(offset, cfg.L);
  return crop;
}

std::pair<Chunk, Chunk> split_crop(const TrainingCrop& crop) {
  const int w = static_cast<int>(crop.values.cols());
  if (w <= 0 || w % 2 != 0)
    throw std::invalid_argument("split_crop: crop width must be even");
  Chunk left, right;
  left.values = crop.values.leftCols(w / 2);
  right.values = crop.values.rightCols(w / 2);
  return {std::move(left), std::move(right)};
}

Eigen::MatrixXf concat(const std::vector<Chunk>& chunks) {
  if (chunks.empty()) throw std::invalid_argument("concat: empty chunk list");
  const Eigen::Index rows = chunks.front().values.rows();
  Eigen::Index total = 0;
  for (const Chunk& c : chunks) {
    if (c.values.rows() != rows)
      throw std::invalid_argument("concat: mel channel mismatch");
    total += c.values.cols();
  }
  Eigen::MatrixXf out(rows, total);
  Eigen::Index at = 0;
  for (const Chunk& c : chunks) {
    out.middleCols(at, c.values.cols()) = c.values;
    at += c.values.cols();
  }
  return out;
}

ChunkSequence chunk_sequence(const MelSpectrogram& spec, const ChunkConfig& cfg) {
  cfg.validate();
  const int t = static_cast<int>(spec.values.cols());
  if (t < 1) throw std::invalid_argument("chunk_sequence: empty spectrogram");
  const int count = (t + cfg.half - 1) / cfg.half;
  ChunkSequence seq;
  seq.original_frames = t;
  seq.pad_frames = count * cfg.half - t;
  Eigen::MatrixXf padded(spec.values.rows(), count * cfg.half);
  padded.setConstant(-1.0f);  // silence under the normalization
  padded.leftCols(t) = spec.values;
  seq.chunks.reserve(static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i) {
    Chunk c;
    c.values = padded.middleCols(i * cfg.half, cfg.half);
    seq.chunks.push_back(std::move(c));
  }
  return seq;
}

Eigen::MatrixXf unchunk(const ChunkSequence& seq) {
  if (seq.chunks.empty())
    throw std::invalid_argument("unchunk: empty chunk sequence");
  const Eigen::MatrixXf whole = concat(seq.chunks);
  if (seq.original_frames + seq.pad_frames != whole.cols() ||
      seq.pad_frames < 0 || seq.original_frames < 1)
    throw std::invalid_argument("unchunk: inconsistent sequence metadata");
  return whole.leftCols(seq.original_frames);
}

}  // namespace mgvc
