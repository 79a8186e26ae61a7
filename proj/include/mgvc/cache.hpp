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

#include "mgvc/dsp.hpp"

namespace mgvc {

/// One prepared corpus entry: where its record starts in the cache file
/// and how many frames it holds.
struct ManifestEntry {
  std::string path;
  std::uint64_t offset = 0;
  int frames = 0;
};

/// Sidecar of a spectrogram cache: entry table, shared normalization
/// stats and the settings digest. Stored as JSON next to the cache.
struct CorpusManifest {
  std::vector<ManifestEntry> entries;
  NormalizationStats stats;
  std::string config_digest;
  DspConfig config;
  int skipped_files = 0;
};

/// Binary record: magic "MGVC", version u32, M u32, t u32, min_db f64,
/// ref_db f64, then M*t little-endian f32 values frame by frame
/// (column-major).
std::string encode_cache_record(const MelSpectrogram& spec);
MelSpectrogram decode_cache_record(const std::string& blob, std::size_t offset,
                                   std::size_t* record_size = nullptr);

std::string manifest_path_for(const std::string& cache_path);
void write_manifest(const CorpusManifest& m, const std::string& path);
CorpusManifest read_manifest(const std::string& path);

/// Loads every record listed by the manifest sitting next to cache_path.
std::vector<MelSpectrogram> load_cache(const std::string& cache_path,
                                       CorpusManifest* manifest = nullptr);

std::string digest_hex(std::uint64_t digest);

}  // namespace mgvc
