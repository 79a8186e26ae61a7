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
#include <string>
#include <vector>

namespace mgvc {

/// Raw decoded audio: interleaved samples scaled to [-1, 1].
struct RawAudio {
  std::vector<double> samples;  // frame-interleaved
  int channels = 0;
  int sample_rate = 0;
};

/// Reads a RIFF/WAVE file. Supported encodings: PCM 16-bit and IEEE
/// float 32-bit, any channel count and rate. Throws std::runtime_error
/// on missing files, malformed headers and unsupported encodings.
RawAudio read_wav(const std::string& path);

/// Writes mono PCM 16-bit. Samples are clamped to [-1, 1].
void write_wav_pcm16_mono(const std::string& path,
                          const std::vector<double>& samples, int sample_rate);

/// Windowed-sinc resampler (Hann-windowed, 32 zero crossings). Identity
/// when rates match. Output length is round(n * to_rate / from_rate).
std::vector<double> resample(const std::vector<double>& in, int from_rate,
                             int to_rate);

}  // namespace mgvc
