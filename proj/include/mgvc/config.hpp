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

#include <string>

#include "mgvc/chunker.hpp"
#include "mgvc/dsp.hpp"
#include "mgvc/models.hpp"
#include "mgvc/trainer.hpp"

namespace mgvc {

/// All tunables of a run in one place.
struct RunConfig {
  DspConfig dsp;
  ChunkConfig chunk;
  ModelConfig model;
  LossWeights weights;
  TrainConfig train;
};

/// Parses UTF-8 `key = value` lines; keys are exactly the field names of
/// DspConfig, ChunkConfig, ModelConfig, LossWeights and TrainConfig.
/// Blank lines and lines starting with '#' are skipped; unknown keys are
/// an error. Structural fields left unset are derived from hop_size
/// (window_size = 6*hop, fft_size = window, mel_channels = hop,
/// L = hop/2, half = L/2); explicitly set values must satisfy the same
/// invariants.
RunConfig parse_config_text(const std::string& text);
RunConfig parse_config_file(const std::string& path);

}  // namespace mgvc
