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

#include <functional>
#include <string>
#include <vector>

#include "mgvc/cache.hpp"
#include "mgvc/chunker.hpp"
#include "mgvc/dsp.hpp"
#include "mgvc/trainer.hpp"

namespace mgvc {

/// Per-chunk translation hook; the real path wires the generator, tests
/// may pass the identity.
using ChunkTranslator = std::function<Chunk(const Chunk&)>;

/// chunk_sequence -> translate each chunk -> unchunk. Output width equals
/// input width for every input.
Eigen::MatrixXf translate_spectrogram(const MelSpectrogram& spec,
                                      const ChunkConfig& cc,
                                      const ChunkTranslator& translate);

/// Full inference path: waveform -> mel (with the supplied stats) ->
/// chunked translation -> phase reconstruction -> waveform.
Waveform convert_waveform(const Waveform& in, const DspConfig& dsp,
                          const ChunkConfig& cc, const NormalizationStats& stats,
                          const ChunkTranslator& translate,
                          std::uint64_t gl_seed = 0);

/// Scans input_dir for *.wav (sorted), computes the corpus-wide ref_db in
/// a first pass, then writes cache records and the manifest. Files
/// narrower than L frames are skipped with a warning on stderr and
/// counted in the manifest.
CorpusManifest prepare_corpus(const std::string& input_dir,
                              const std::string& cache_path, DspConfig dsp);

/// P5 grayscale image of a spectrogram: M rows x t columns, byte value
/// round((v + 1) * 127.5), low frequencies at the bottom row.
void write_pgm(const Eigen::MatrixXf& values, const std::string& path);

/// Orchestrates a full training run from two prepared caches: verifies
/// the settings digests match, unifies the normalization stats (shared
/// min_db, ref_db = max of the two corpora, values remapped), trains and
/// exports a translated audio sample at every checkpoint.
struct TrainRunOptions {
  std::string domain_a_cache;
  std::string domain_b_cache;
  std::string run_dir;
  RunConfig config;
  bool export_samples = true;
};

struct RunConfig;  // defined in config.hpp
TrainResult run_training(const TrainRunOptions& opts);

/// Remaps normalized values onto shared stats (same min_db, ref_db =
/// max); exact in the dB domain.
MelSpectrogram renormalize(const MelSpectrogram& spec,
                           const NormalizationStats& shared);

}  // namespace mgvc
