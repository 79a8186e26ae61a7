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
#include <cstdint>
#include <string>
#include <vector>

namespace mgvc {

/// Analysis/synthesis settings. The structural ties are fixed:
/// window_size = 6 * hop_size, fft_size = window_size and
/// mel_channels = hop_size. from_hop() derives a consistent config.
struct DspConfig {
  int sample_rate = 16000;
  int hop_size = 192;
  int window_size = 1152;
  int fft_size = 1152;
  int mel_channels = 192;
  double mel_fmin = 0.0;
  double mel_fmax = 8000.0;
  double amp_floor = 1e-5;
  int griffin_lim_iters = 60;
  double min_db = -100.0;
  double ref_db = 20.0;

  static DspConfig from_hop(int hop);
  void validate() const;           // throws std::invalid_argument on breakage
  std::uint64_t digest() const;    // identifies the analysis settings
};

/// Normalization range in decibels; min_db maps to -1 and ref_db to +1.
struct NormalizationStats {
  double min_db = -100.0;
  double ref_db = 20.0;
};

/// Mono audio. After ingestion the sample rate is always
/// DspConfig::sample_rate and samples live in [-1, 1].
struct Waveform {
  std::vector<double> samples;
  int sample_rate = 16000;
};

/// Magnitude STFT, (fft_size/2 + 1) rows x frames columns.
struct LinearSpectrogram {
  Eigen::MatrixXd magnitudes;
  int frame_hop = 0;
};

/// Normalized log-amplitude mel matrix, mel_channels rows x frames
/// columns, every entry in [-1, 1]. Stored single precision to match the
/// on-disk cache format.
struct MelSpectrogram {
  Eigen::MatrixXf values;
  NormalizationStats stats;
  std::uint64_t config_digest = 0;
};

/// Loads a WAV file, mixes to mono by channel averaging, resamples to
/// config.sample_rate. Throws on missing/zero-length/unsupported input.
Waveform load_audio(const std::string& path, const DspConfig& config);

/// Magnitude STFT with a periodic Hann window, centered frames and
/// reflect padding. Frame count is ceil(len / hop_size); requires
/// len >= window_size.
LinearSpectrogram stft(const Waveform& w, const DspConfig& config);

/// Triangular mel filterbank, mel_channels x (fft_size/2 + 1), filters
/// spanning [mel_fmin, mel_fmax] with area normalization.
Eigen::MatrixXd mel_filterbank(const DspConfig& config);

/// Projects magnitudes onto the mel filterbank: mel_channels x frames,
/// non-negative linear amplitudes.
Eigen::MatrixXd mel_project(const LinearSpectrogram& s,
                            const DspConfig& config);

/// Per entry: d = 20*log10(max(a, amp_floor)), clipped to
/// [min_db, ref_db], then mapped affinely onto [-1, 1].
MelSpectrogram to_log_normalized(const Eigen::MatrixXd& mel,
                                 const NormalizationStats& stats,
                                 const DspConfig& config);

/// Exact inverse of to_log_normalized on the unclipped range. Throws if an
/// entry falls outside [-1, 1].
Eigen::MatrixXd from_log_normalized(const MelSpectrogram& m);

/// Approximate linear-frequency magnitudes via the energy-normalized
/// transpose of the filterbank; negatives clipped to 0.
LinearSpectrogram mel_invert(const Eigen::MatrixXd& mel_linear,
                             const DspConfig& config);

/// Phase reconstruction by alternating projection: random initial phase
/// from `seed`, then griffin_lim_iters rounds of {inverse STFT, forward
/// STFT, keep phases, restore magnitudes}. Output has frames * hop_size
/// samples, peak-normalized to 0.95.  If `convergence` is non-null it
/// receives the spectral-convergence error after each forward STFT; the
/// sequence is non-increasing. All-zero input returns silence without
/// iterating.
Waveform griffin_lim(const LinearSpectrogram& s, const DspConfig& config,
                     std::uint64_t seed = 0,
                     std::vector<double>* convergence = nullptr);

/// Same as griffin_lim but without the final peak normalization.
Waveform griffin_lim_raw(const LinearSpectrogram& s, const DspConfig& config,
                         std::uint64_t seed = 0,
                         std::vector<double>* convergence = nullptr);

/// from_log_normalized -> mel_invert -> griffin_lim.
Waveform spectrogram_to_waveform(const MelSpectrogram& m,
                                 const DspConfig& config,
                                 std::uint64_t seed = 0);

/// Largest 20*log10(max(a, amp_floor)) over a linear mel matrix; used to
/// measure the corpus-wide ref_db during preparation.
double max_log_amplitude_db(const Eigen::MatrixXd& mel,
                            const DspConfig& config);

}  // namespace mgvc
