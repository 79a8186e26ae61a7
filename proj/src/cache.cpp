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

#include "mgvc/cache.hpp"

#include <cstdio>
#include <cstring>
#include <fstream>
#include <stdexcept>

#include <json.hpp>

#include "mgvc/serialize.hpp"

namespace mgvc {

namespace {

constexpr char kMagic[4] = {'M', 'G', 'V', 'C'};
constexpr std::uint32_t kVersion = 1;

std::string read_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open file: " + path);
  return std::string((std::istreambuf_iterator<char>(f)),
                     std::istreambuf_iterator<char>());
}

nlohmann::json dsp_to_json(const DspConfig& c) {
  return nlohmann::json{{"sample_rate", c.sample_rate},
                        {"hop_size", c.hop_size},
                        {"window_size", c.window_size},
                        {"fft_size", c.fft_size},
                        {"mel_channels", c.mel_channels},
                        {"mel_fmin", c.mel_fmin},
                        {"mel_fmax", c.mel_fmax},
                        {"amp_floor", c.amp_floor},
                        {"griffin_lim_iters", c.griffin_lim_iters},
                        {"min_db", c.min_db},
                        {"ref_db", c.ref_db}};
}

DspConfig dsp_from_json(const nlohmann::json& j) {
  DspConfig c;
  c.sample_rate = j.at("sample_rate").get<int>();
  c.hop_size = j.at("hop_size").get<int>();
  c.window_size = j.at("window_size").get<int>();
  c.fft_size = j.at("fft_size").get<int>();
  c.mel_channels = j.at("mel_channels").get<int>();
  c.mel_fmin = j.at("mel_fmin").get<double>();
  c.mel_fmax = j.at("mel_fmax").get<double>();
  c.amp_floor = j.at("amp_floor").get<double>();
  c.griffin_lim_iters = j.at("griffin_lim_iters").get<int>();
  c.min_db = j.at("min_db").get<double>();
  c.ref_db = j.at("ref_db").get<double>();
  return c;
}

}  // namespace

std::string digest_hex(std::uint64_t digest) {
  char buf[24];
  std::snprintf(buf, sizeof(buf), "%016llx",
                static_cast<unsigned long long>(digest));
  return buf;
}

std::string encode_cache_record(const MelSpectrogram& spec) {
  ByteWriter w;
  w.bytes(kMagic, 4);
  w.u32(kVersion);
  w.u32(static_cast<std::uint32_t>(spec.values.rows()));
  w.u32(static_cast<std::uint32_t>(spec.values.cols()));
  w.f64(spec.stats.min_db);
  w.f64(spec.stats.ref_db);
  for (Eigen::Index c = 0; c < spec.values.cols(); ++c)
    for (Eigen::Index r = 0; r < spec.values.rows(); ++r)
      w.f32(spec.values(r, c));
  return w.buffer();
}

MelSpectrogram decode_cache_record(const std::string& blob, std::size_t offset,
                                   std::size_t* record_size) {
  if (offset >= blob.size())
    throw std::runtime_error("cache record offset out of range");
  ByteReader r(blob.data() + offset, blob.size() - offset);
  char magic[4];
  r.bytes(magic, 4);
  if (std::memcmp(magic, kMagic, 4) != 0)
    throw std::runtime_error("bad cache record magic");
  const std::uint32_t version = r.u32();
  if (version != kVersion)
    throw std::runtime_error("unsupported cache record version " +
                             std::to_string(version));
  const std::uint32_t m = r.u32();
  const std::uint32_t t = r.u32();
  MelSpectrogram spec;
  spec.stats.min_db = r.f64();
  spec.stats.ref_db = r.f64();
  spec.values.resize(m, t);
  for (std::uint32_t c = 0; c < t; ++c)
    for (std::uint32_t rr = 0; rr < m; ++rr) spec.values(rr, c) = r.f32();
  if (record_size) *record_size = r.pos();
  return spec;
}

std::string manifest_path_for(const std::string& cache_path) {
  return cache_path + ".manifest.json";
}

void write_manifest(const CorpusManifest& m, const std::string& path) {
  nlohmann::json j;
  j["format_version"] = 1;
  j["config_digest"] = m.config_digest;
  j["dsp_config"] = dsp_to_json(m.config);
  j["stats"] = {{"min_db", m.stats.min_db}, {"ref_db", m.stats.ref_db}};
  j["skipped_files"] = m.skipped_files;
  nlohmann::json entries = nlohmann::json::array();
  for (const auto& e : m.entries)
    entries.push_back({{"path", e.path}, {"offset", e.offset}, {"frames", e.frames}});
  j["entries"] = entries;
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot write manifest: " + path);
  f << j.dump(2) << '\n';
  if (!f) throw std::runtime_error("manifest write failed: " + path);
}

CorpusManifest read_manifest(const std::string& path) {
  const std::string text = read_file(path);
  const nlohmann::json j = nlohmann::json::parse(text);
  CorpusManifest m;
  m.config_digest = j.at("config_digest").get<std::string>();
  m.config = dsp_from_json(j.at("dsp_config"));
  m.stats.min_db = j.at("stats").at("min_db").get<double>();
  m.stats.ref_db = j.at("stats").at("ref_db").get<double>();
  m.skipped_files = j.value("skipped_files", 0);
  for (const auto& e : j.at("entries")) {
    ManifestEntry entry;
    entry.path = e.at("path").get<std::string>();
    entry.offset = e.at("offset").get<std::uint64_t>();
    entry.frames = e.at("frames").get<int>();
    m.entries.push_back(std::move(entry));
  }
  return m;
}

std::vector<MelSpectrogram> load_cache(const std::string& cache_path,
                                       CorpusManifest* manifest) {
  const CorpusManifest m = read_manifest(manifest_path_for(cache_path));
  const std::string blob = read_file(cache_path);
  const std::uint64_t digest = m.config.digest();
  std::vector<MelSpectrogram> specs;
  specs.reserve(m.entries.size());
  for (const auto& e : m.entries) {
    MelSpectrogram spec = decode_cache_record(blob, e.offset);
    if (spec.values.cols() != e.frames)
      throw std::runtime_error("cache/manifest frame count mismatch for " + e.path);
    spec.config_digest = digest;
    specs.push_back(std::move(spec));
  }
  if (manifest) *manifest = m;
  return specs;
}

}  // namespace mgvc
