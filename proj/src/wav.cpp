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

#include "mgvc/wav.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <stdexcept>

#include "mgvc/serialize.hpp"

namespace mgvc {

namespace {

constexpr double kPi = 3.14159265358979323846;

std::string read_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open file: " + path);
  std::string out((std::istreambuf_iterator<char>(f)),
                  std::istreambuf_iterator<char>());
  return out;
}

}  // namespace

RawAudio read_wav(const std::string& path) {
  const std::string blob = read_file(path);
  if (blob.size() < 12 || std::memcmp(blob.data(), "RIFF", 4) != 0 ||
      std::memcmp(blob.data() + 8, "WAVE", 4) != 0)
    throw std::runtime_error(path + ": not a RIFF/WAVE file");

  int audio_format = -1;
  int channels = 0;
  int sample_rate = 0;
  int bits = 0;
  std::size_t data_off = 0, data_len = 0;

  std::size_t pos = 12;
  while (pos + 8 <= blob.size()) {
    const char* tag = blob.data() + pos;
    ByteReader hr(blob.data() + pos + 4, 4);
    std::size_t sz = hr.u32();
    const std::size_t body = pos + 8;
    if (body + sz > blob.size()) sz = blob.size() - body;
    if (std::memcmp(tag, "fmt ", 4) == 0) {
      if (sz < 16) throw std::runtime_error(path + ": short fmt chunk");
      ByteReader fr(blob.data() + body, sz);
      audio_format = fr.u8() | (fr.u8() << 8);
      channels = fr.u8() | (fr.u8() << 8);
      sample_rate = static_cast<int>(fr.u32());
      fr.u32();  // byte rate
      fr.u8();
      fr.u8();  // block align
      bits = fr.u8() | (fr.u8() << 8);
    } else if (std::memcmp(tag, "data", 4) == 0) {
      data_off = body;
      data_len = sz;
    }
    pos = body + sz + (sz & 1);  // chunks are word-aligned
  }

  if (audio_format < 0) throw std::runtime_error(path + ": missing fmt chunk");
  if (channels <= 0 || sample_rate <= 0)
    throw std::runtime_error(path + ": malformed fmt chunk");
  if (data_len == 0) throw std::runtime_error(path + ": zero-length audio");

  RawAudio out;
  out.channels = channels;
  out.sample_rate = sample_rate;

  if (audio_format == 1 && bits == 16) {
    const std::size_t n = data_len / 2;
    out.samples.resize(n);
    ByteReader dr(blob.data() + data_off, data_len);
    for (std::size_t i = 0; i < n; ++i) {
      const auto v = static_cast<std::int16_t>(dr.u8() | (dr.u8() << 8));
      out.samples[i] = static_cast<double>(v) / 32768.0;
    }
  } else if (audio_format == 3 && bits == 32) {
    const std::size_t n = data_len / 4;
    out.samples.resize(n);
    ByteReader dr(blob.data() + data_off, data_len);
    for (std::size_t i = 0; i < n; ++i)
      out.samples[i] = static_cast<double>(dr.f32());
  } else {
    throw std::runtime_error(path + ": unsupported encoding (format " +
                             std::to_string(audio_format) + ", " +
                             std::to_string(bits) + " bits)");
  }

  if (out.samples.empty())
    throw std::runtime_error(path + ": zero-length audio");
  return out;
}

void write_wav_pcm16_mono(const std::string& path,
                          const std::vector<double>& samples,
                          int sample_rate) {
  ByteWriter w;
  const std::uint32_t data_bytes = static_cast<std::uint32_t>(samples.size() * 2);
  w.bytes("RIFF", 4);
  w.u32(36 + data_bytes);
  w.bytes("WAVE", 4);
  w.bytes("fmt ", 4);
  w.u32(16);
  w.u8(1);
  w.u8(0);  // PCM
  w.u8(1);
  w.u8(0);  // mono
  w.u32(static_cast<std::uint32_t>(sample_rate));
  w.u32(static_cast<std::uint32_t>(sample_rate * 2));
  w.u8(2);
  w.u8(0);  // block align
  w.u8(16);
  w.u8(0);  // bits
  w.bytes("data", 4);
  w.u32(data_bytes);
  for (double s : samples) {
    const double c = std::clamp(s, -1.0, 1.0);
    const auto v = static_cast<std::int16_t>(std::lrint(c * 32767.0));
    w.u8(static_cast<std::uint8_t>(v & 0xff));
    w.u8(static_cast<std::uint8_t>((v >> 8) & 0xff));
  }
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot write file: " + path);
  f.write(w.buffer().data(), static_cast<std::streamsize>(w.buffer().size()));
  if (!f) throw std::runtime_error("write failed: " + path);
}

std::vector<double> resample(const std::vector<double>& in, int from_rate,
                             int to_rate) {
  if (from_rate <= 0 || to_rate <= 0)
    throw std::invalid_argument("resample: rates must be positive");
  if (from_rate == to_rate) return in;
  const double ratio = static_cast<double>(to_rate) / from_rate;
  const auto out_len = static_cast<std::size_t>(std::llround(
      static_cast<double>(in.size()) * to_rate / from_rate));
  std::vector<double> out(out_len, 0.0);

  const double cutoff = std::min(1.0, ratio);  // vs input Nyquist
  const int zero_crossings = 32;
  const double half_width = zero_crossings / cutoff;  // in input samples

  const auto in_n = static_cast<std::ptrdiff_t>(in.size());
  for (std::size_t n = 0; n < out_len; ++n) {
    const double t = static_cast<double>(n) / ratio;
    const auto lo = static_cast<std::ptrdiff_t>(std::ceil(t - half_width));
    const auto hi = static_cast<std::ptrdiff_t>(std::floor(t + half_width));
    double acc = 0.0;
    for (std::ptrdiff_t m = std::max<std::ptrdiff_t>(lo, 0);
         m <= std::min(hi, in_n - 1); ++m) {
      const double d = (static_cast<double>(m) - t) * cutoff;
      double sinc;
      if (std::abs(d) < 1e-12) {
        sinc = 1.0;
      } else {
        sinc = std::sin(kPi * d) / (kPi * d);
      }
      const double u = (static_cast<double>(m) - t) / half_width;  // [-1, 1]
      const double win = 0.5 * (1.0 + std::cos(kPi * u));
      acc += in[static_cast<std::size_t>(m)] * sinc * win * cutoff;
    }
    out[n] = acc;
  }
  return out;
}

}  // namespace mgvc
