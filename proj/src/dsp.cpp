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

#include "mgvc/dsp.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <complex>
#include <mutex>
#include <stdexcept>

#include "mgvc/rng.hpp"
#include "mgvc/serialize.hpp"
#include "mgvc/wav.hpp"

namespace mgvc {

namespace {

constexpr double kPi = 3.14159265358979323846;

// FFTW plan creation is not thread-safe; execution is.
std::mutex g_fftw_mutex;

struct FftPlans {
  int n;
  std::vector<double> real_buf;
  std::vector<std::complex<double>> cplx_buf;
  fftw_plan fwd;
  fftw_plan inv;

  explicit FftPlans(int n_) : n(n_), real_buf(n_), cplx_buf(n_ / 2 + 1) {
    std::lock_guard<std::mutex> lk(g_fftw_mutex);
    fwd = fftw_plan_dft_r2c_1d(
        n, real_buf.data(), reinterpret_cast<fftw_complex*>(cplx_buf.data()),
        FFTW_ESTIMATE);
    inv = fftw_plan_dft_c2r_1d(
        n, reinterpret_cast<fftw_complex*>(cplx_buf.data()), real_buf.data(),
        FFTW_ESTIMATE);
    if (!fwd || !inv) throw std::runtime_error("FFT plan creation failed");
  }
  ~FftPlans() {
    std::lock_guard<std::mutex> lk(g_fftw_mutex);
    fftw_destroy_plan(fwd);
    fftw_destroy_plan(inv);
  }
  FftPlans(const FftPlans&) = delete;
  FftPlans& operator=(const FftPlans&) = delete;
};

std::vector<double> hann_window(int n) {
  std::vector<double> w(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i)
    w[static_cast<std::size_t>(i)] = 0.5 - 0.5 * std::cos(2.0 * kPi * i / n);
  return w;
}

// Slaney mel scale.
double hz_to_mel(double hz) {
  const double f_sp = 200.0 / 3.0;
  const double min_log_hz = 1000.0;
  const double min_log_mel = min_log_hz / f_sp;
  const double logstep = std::log(6.4) / 27.0;
  if (hz < min_log_hz) return hz / f_sp;
  return min_log_mel + std::log(hz / min_log_hz) / logstep;
}

double mel_to_hz(double mel) {
  const double f_sp = 200.0 / 3.0;
  const double min_log_hz = 1000.0;
  const double min_log_mel = min_log_hz / f_sp;
  const double logstep = std::log(6.4) / 27.0;
  if (mel < min_log_mel) return mel * f_sp;
  return min_log_hz * std::exp((mel - min_log_mel) * logstep);
}

// Full-spectrum Frobenius weight of a half-spectrum bin.
double bin_weight(int k, int nfft) {
  if (k == 0) return 1.0;
  if (nfft % 2 == 0 && k == nfft / 2) return 1.0;
  return 2.0;
}

// Frames taken directly over y at offsets f*hop; y must cover
// (frames-1)*hop + window samples.
Eigen::MatrixXcd stft_over(const std::vector<double>& y, int frames,
                           const std::vector<double>& window, int hop,
                           FftPlans& fft) {
  const int win = static_cast<int>(window.size());
  const int bins = fft.n / 2 + 1;
  Eigen::MatrixXcd out(bins, frames);
  for (int f = 0; f < frames; ++f) {
    for (int i = 0; i < win; ++i)
      fft.real_buf[static_cast<std::size_t>(i)] =
          y[static_cast<std::size_t>(f * hop + i)] *
          window[static_cast<std::size_t>(i)];
    for (int i = win; i < fft.n; ++i)
      fft.real_buf[static_cast<std::size_t>(i)] = 0.0;
    fftw_execute(fft.fwd);
    for (int k = 0; k < bins; ++k) out(k, f) = fft.cplx_buf[static_cast<std::size_t>(k)];
  }
  return out;
}

// Least-squares inverse of stft_over: overlap-add of windowed inverse
// DFTs divided by the window-square sum. Positions never touched by a
// nonzero window weight are unconstrained and set to zero.
std::vector<double> istft_ls(const Eigen::MatrixXcd& spec,
                             const std::vector<double>& window, int hop,
                             FftPlans& fft) {
  const int win = static_cast<int>(window.size());
  const int frames = static_cast<int>(spec.cols());
  const int bins = fft.n / 2 + 1;
  const std::size_t total = static_cast<std::size_t>((frames - 1) * hop + win);
  std::vector<double> y(total, 0.0), wsum(total, 0.0);
  for (int f = 0; f < frames; ++f) {
    for (int k = 0; k < bins; ++k) fft.cplx_buf[static_cast<std::size_t>(k)] = spec(k, f);
    fftw_execute(fft.inv);  // unnormalized: scales by n
    for (int i = 0; i < win; ++i) {
      const std::size_t p = static_cast<std::size_t>(f * hop + i);
      const double wi = window[static_cast<std::size_t>(i)];
      y[p] += wi * fft.real_buf[static_cast<std::size_t>(i)] / fft.n;
      wsum[p] += wi * wi;
    }
  }
  for (std::size_t i = 0; i < total; ++i)
    y[i] = wsum[i] > 1e-12 ? y[i] / wsum[i] : 0.0;
  return y;
}

Waveform griffin_lim_impl(const LinearSpectrogram& s, const DspConfig& cfg,
                          std::uint64_t seed, std::vector<double>* convergence,
                          bool peak_normalize) {
  cfg.validate();
  if (cfg.griffin_lim_iters < 1)
    throw std::invalid_argument("griffin_lim: iterations must be >= 1");
  const int bins = cfg.fft_size / 2 + 1;
  if (s.magnitudes.rows() != bins)
    throw std::invalid_argument("griffin_lim: bin count mismatch");
  const int frames = static_cast<int>(s.magnitudes.cols());
  if (frames < 1) throw std::invalid_argument("griffin_lim: empty spectrogram");
  const int hop = cfg.hop_size, win = cfg.window_size;

  Waveform out;
  out.sample_rate = cfg.sample_rate;
  out.samples.assign(static_cast<std::size_t>(frames) * hop, 0.0);

  // Degenerate all-zero magnitudes: silence, no iterations.
  if (s.magnitudes.maxCoeff() <= 0.0) return out;

  const auto window = hann_window(win);
  FftPlans fft(cfg.fft_size);
  Rng rng(seed);

  double s_norm2 = 0.0;
  for (int f = 0; f < frames; ++f)
    for (int k = 0; k < bins; ++k)
      s_norm2 += bin_weight(k, cfg.fft_size) * s.magnitudes(k, f) * s.magnitudes(k, f);
  const double s_norm = std::sqrt(s_norm2);

  // Random initial phases. DC and Nyquist bins of a real signal are real,
  // so they only carry a random sign.
  Eigen::MatrixXcd estimate(bins, frames);
  for (int f = 0; f < frames; ++f) {
    for (int k = 0; k < bins; ++k) {
      if (bin_weight(k, cfg.fft_size) == 1.0) {
        estimate(k, f) = s.magnitudes(k, f) * (rng.uniform() < 0.5 ? -1.0 : 1.0);
      } else {
        const double phi = 2.0 * kPi * rng.uniform();
        estimate(k, f) =
            s.magnitudes(k, f) * std::complex<double>(std::cos(phi), std::sin(phi));
      }
    }
  }

  std::vector<double> y;
  for (int it = 0; it < cfg.griffin_lim_iters; ++it) {
    y = istft_ls(estimate, window, hop, fft);
    const Eigen::MatrixXcd consistent = stft_over(y, frames, window, hop, fft);
    if (convergence) {
      double d2 = 0.0;
      for (int f = 0; f < frames; ++f)
        for (int k = 0; k < bins; ++k) {
          const double diff = std::abs(consistent(k, f)) - s.magnitudes(k, f);
          d2 += bin_weight(k, cfg.fft_size) * diff * diff;
        }
      convergence->push_back(std::sqrt(d2) / s_norm);
    }
    // Keep phases, restore magnitudes.
    for (int f = 0; f < frames; ++f) {
      for (int k = 0; k < bins; ++k) {
        const std::complex<double> v = consistent(k, f);
        if (bin_weight(k, cfg.fft_size) == 1.0) {
          estimate(k, f) = s.magnitudes(k, f) * (v.real() < 0.0 ? -1.0 : 1.0);
        } else {
          const double a = std::abs(v);
          estimate(k, f) = a > 0.0 ? s.magnitudes(k, f) * (v / a)
                                   : std::complex<double>(s.magnitudes(k, f), 0.0);
        }
      }
    }
  }
  y = istft_ls(estimate, window, hop, fft);

  const std::size_t off = static_cast<std::size_t>(win / 2);
  for (std::size_t i = 0; i < out.samples.size(); ++i)
    out.samples[i] = y[off + i];

  if (peak_normalize) {
    double peak = 0.0;
    for (double v : out.samples) peak = std::max(peak, std::abs(v));
    if (peak > 0.0) {
      const double g = 0.95 / peak;
      for (double& v : out.samples) v *= g;
    }
  }
  return out;
}

}  // namespace

DspConfig DspConfig::from_hop(int hop) {
  DspConfig c;
  c.hop_size = hop;
  c.window_size = 6 * hop;
  c.fft_size = c.window_size;
  c.mel_channels = hop;
  c.validate();
  return c;
}

void DspConfig::validate() const {
  if (sample_rate <= 0) throw std::invalid_argument("sample_rate must be positive");
  if (hop_size <= 0) throw std::invalid_argument("hop_size must be positive");
  if (window_size != 6 * hop_size)
    throw std::invalid_argument("window_size must equal 6 * hop_size");
  if (fft_size != window_size)
    throw std::invalid_argument("fft_size must equal window_size");
  if (mel_channels != hop_size)
    throw std::invalid_argument("mel_channels must equal hop_size");
  if (!(amp_floor > 0.0)) throw std::invalid_argument("amp_floor must be > 0");
  if (!(min_db < ref_db)) throw std::invalid_argument("min_db must be < ref_db");
  if (!(mel_fmin >= 0.0) || !(mel_fmax > mel_fmin))
    throw std::invalid_argument("invalid mel frequency range");
  if (mel_fmax > sample_rate / 2.0 + 1e-9)
    throw std::invalid_argument("mel_fmax exceeds Nyquist");
  if (griffin_lim_iters < 1)
    throw std::invalid_argument("griffin_lim_iters must be >= 1");
}

std::uint64_t DspConfig::digest() const {
  ByteWriter w;
  w.i32(sample_rate);
  w.i32(hop_size);
  w.i32(window_size);
  w.i32(fft_size);
  w.i32(mel_channels);
  w.f64(mel_fmin);
  w.f64(mel_fmax);
  w.f64(amp_floor);
  w.i32(griffin_lim_iters);
  w.f64(min_db);
  w.f64(ref_db);
  return w.digest();
}

Waveform load_audio(const std::string& path, const DspConfig& config) {
  config.validate();
  const RawAudio raw = read_wav(path);
  const std::size_t n = raw.samples.size() / static_cast<std::size_t>(raw.channels);
  if (n == 0) throw std::runtime_error(path + ": zero-length audio");

  std::vector<double> mono(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    double acc = 0.0;
    for (int c = 0; c < raw.channels; ++c)
      acc += raw.samples[i * static_cast<std::size_t>(raw.channels) +
                         static_cast<std::size_t>(c)];
    mono[i] = acc / raw.channels;
  }

  Waveform w;
  w.sample_rate = config.sample_rate;
  w.samples = resample(mono, raw.sample_rate, config.sample_rate);
  for (double& v : w.samples) v = std::clamp(v, -1.0, 1.0);
  if (w.samples.empty()) throw std::runtime_error(path + ": zero-length audio");
  return w;
}

LinearSpectrogram stft(const Waveform& w, const DspConfig& config) {
  config.validate();
  const int len = static_cast<int>(w.samples.size());
  const int win = config.window_size, hop = config.hop_size;
  if (len < win)
    throw std::invalid_argument("stft: waveform shorter than one window");
  const int frames = (len + hop - 1) / hop;
  const int bins = config.fft_size / 2 + 1;
  const int half = win / 2;

  // Centered frames with reflect padding.
  std::vector<double> padded(static_cast<std::size_t>(len + 2 * half));
  for (int i = 0; i < len + 2 * half; ++i) {
    int j = i - half;
    if (j < 0) j = -j;
    if (j >= len) j = 2 * len - 2 - j;
    padded[static_cast<std::size_t>(i)] = w.samples[static_cast<std::size_t>(j)];
  }

  const auto window = hann_window(win);
  FftPlans fft(config.fft_size);
  LinearSpectrogram out;
  out.frame_hop = hop;
  const Eigen::MatrixXcd spec = stft_over(padded, frames, window, hop, fft);
  out.magnitudes = spec.cwiseAbs();
  (void)bins;
  return out;
}

Eigen::MatrixXd mel_filterbank(const DspConfig& config) {
  config.validate();
  const int bins = config.fft_size / 2 + 1;
  const int m = config.mel_channels;

  const double mel_lo = hz_to_mel(config.mel_fmin);
  const double mel_hi = hz_to_mel(config.mel_fmax);
  std::vector<double> edges(static_cast<std::size_t>(m + 2));
  for (int i = 0; i < m + 2; ++i)
    edges[static_cast<std::size_t>(i)] =
        mel_to_hz(mel_lo + (mel_hi - mel_lo) * i / (m + 1));

  Eigen::MatrixXd fb = Eigen::MatrixXd::Zero(m, bins);
  for (int i = 0; i < m; ++i) {
    const double f0 = edges[static_cast<std::size_t>(i)];
    const double f1 = edges[static_cast<std::size_t>(i + 1)];
    const double f2 = edges[static_cast<std::size_t>(i + 2)];
    for (int k = 0; k < bins; ++k) {
      const double fk = static_cast<double>(k) * config.sample_rate / config.fft_size;
      const double rise = (fk - f0) / (f1 - f0);
      const double fall = (f2 - fk) / (f2 - f1);
      const double v = std::max(0.0, std::min(rise, fall));
      fb(i, k) = v * 2.0 / (f2 - f0);  // area normalization
    }
  }
  return fb;
}

Eigen::MatrixXd mel_project(const LinearSpectrogram& s, const DspConfig& config) {
  const Eigen::MatrixXd fb = mel_filterbank(config);
  if (s.magnitudes.rows() != fb.cols())
    throw std::invalid_argument("mel_project: bin count does not match filterbank");
  return fb * s.magnitudes;
}

MelSpectrogram to_log_normalized(const Eigen::MatrixXd& mel,
                                 const NormalizationStats& stats,
                                 const DspConfig& config) {
  config.validate();
  if (!(stats.min_db < stats.ref_db))
    throw std::invalid_argument("to_log_normalized: min_db must be < ref_db");
  MelSpectrogram out;
  out.stats = stats;
  out.config_digest = config.digest();
  out.values.resize(mel.rows(), mel.cols());
  const double span = stats.ref_db - stats.min_db;
  for (Eigen::Index c = 0; c < mel.cols(); ++c) {
    for (Eigen::Index r = 0; r < mel.rows(); ++r) {
      const double a = std::max(mel(r, c), config.amp_floor);
      double d = 20.0 * std::log10(a);
      d = std::clamp(d, stats.min_db, stats.ref_db);
      out.values(r, c) = static_cast<float>(2.0 * (d - stats.min_db) / span - 1.0);
    }
  }
  return out;
}

Eigen::MatrixXd from_log_normalized(const MelSpectrogram& m) {
  Eigen::MatrixXd out(m.values.rows(), m.values.cols());
  const double span = m.stats.ref_db - m.stats.min_db;
  for (Eigen::Index c = 0; c < m.values.cols(); ++c) {
    for (Eigen::Index r = 0; r < m.values.rows(); ++r) {
      const double v = static_cast<double>(m.values(r, c));
      if (v < -1.0 || v > 1.0 || !std::isfinite(v))
        throw std::invalid_argument("from_log_normalized: entry outside [-1, 1]");
      const double d = (v + 1.0) / 2.0 * span + m.stats.min_db;
      out(r, c) = std::pow(10.0, d / 20.0);
    }
  }
  return out;
}

LinearSpectrogram mel_invert(const Eigen::MatrixXd& mel_linear,
                             const DspConfig& config) {
  const Eigen::MatrixXd fb = mel_filterbank(config);
  if (mel_linear.rows() != fb.rows())
    throw std::invalid_argument("mel_invert: mel channel count mismatch");
  Eigen::VectorXd energy = fb.rowwise().squaredNorm();
  Eigen::MatrixXd scaled = mel_linear;
  for (Eigen::Index r = 0; r < scaled.rows(); ++r) {
    const double e = energy(r);
    scaled.row(r) = e > 0.0 ? (scaled.row(r) / e).eval()
                            : Eigen::RowVectorXd::Zero(scaled.cols()).eval();
  }
  LinearSpectrogram out;
  out.frame_hop = config.hop_size;
  out.magnitudes = (fb.transpose() * scaled).cwiseMax(0.0);
  return out;
}

Waveform griffin_lim(const LinearSpectrogram& s, const DspConfig& config,
                     std::uint64_t seed, std::vector<double>* convergence) {
  return griffin_lim_impl(s, config, seed, convergence, true);
}

Waveform griffin_lim_raw(const LinearSpectrogram& s, const DspConfig& config,
                         std::uint64_t seed, std::vector<double>* convergence) {
  return griffin_lim_impl(s, config, seed, convergence, false);
}

Waveform spectrogram_to_waveform(const MelSpectrogram& m, const DspConfig& config,
                                 std::uint64_t seed) {
  const Eigen::MatrixXd linear_mel = from_log_normalized(m);
  const LinearSpectrogram lin = mel_invert(linear_mel, config);
  return griffin_lim(lin, config, seed, nullptr);
}

double max_log_amplitude_db(const Eigen::MatrixXd& mel, const DspConfig& config) {
  double best = -std::numeric_limits<double>::infinity();
  for (Eigen::Index c = 0; c < mel.cols(); ++c)
    for (Eigen::Index r = 0; r < mel.rows(); ++r) {
      const double a = std::max(mel(r, c), config.amp_floor);
      best = std::max(best, 20.0 * std::log10(a));
    }
  return best;
}

}  // namespace mgvc
