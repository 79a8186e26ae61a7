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

#include "mgvc/config.hpp"

#include <fstream>
#include <functional>
#include <map>
#include <sstream>
#include <stdexcept>

namespace mgvc {

namespace {

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  const auto b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

long long to_int(const std::string& key, const std::string& v) {
  std::size_t used = 0;
  long long out;
  try {
    out = std::stoll(v, &used);
  } catch (const std::exception&) {
    throw std::invalid_argument("config: bad integer for " + key + ": " + v);
  }
  if (used != v.size())
    throw std::invalid_argument("config: bad integer for " + key + ": " + v);
  return out;
}

double to_double(const std::string& key, const std::string& v) {
  std::size_t used = 0;
  double out;
  try {
    out = std::stod(v, &used);
  } catch (const std::exception&) {
    throw std::invalid_argument("config: bad number for " + key + ": " + v);
  }
  if (used != v.size())
    throw std::invalid_argument("config: bad number for " + key + ": " + v);
  return out;
}

}  // namespace

RunConfig parse_config_text(const std::string& text) {
  RunConfig cfg;
  std::map<std::string, bool> seen;

  using Setter = std::function<void(const std::string&, const std::string&)>;
  std::map<std::string, Setter> setters;
  const auto int_field = [&](const std::string& key, int* dst) {
    setters[key] = [key, dst](const std::string& k, const std::string& v) {
      *dst = static_cast<int>(to_int(k, v));
    };
  };
  const auto u64_field = [&](const std::string& key, std::uint64_t* dst) {
    setters[key] = [key, dst](const std::string& k, const std::string& v) {
      *dst = static_cast<std::uint64_t>(to_int(k, v));
    };
  };
  const auto dbl_field = [&](const std::string& key, double* dst) {
    setters[key] = [key, dst](const std::string& k, const std::string& v) {
      *dst = to_double(k, v);
    };
  };

  int_field("sample_rate", &cfg.dsp.sample_rate);
  int_field("hop_size", &cfg.dsp.hop_size);
  int_field("window_size", &cfg.dsp.window_size);
  int_field("fft_size", &cfg.dsp.fft_size);
  int_field("mel_channels", &cfg.dsp.mel_channels);
  dbl_field("mel_fmin", &cfg.dsp.mel_fmin);
  dbl_field("mel_fmax", &cfg.dsp.mel_fmax);
  dbl_field("amp_floor", &cfg.dsp.amp_floor);
  int_field("griffin_lim_iters", &cfg.dsp.griffin_lim_iters);
  dbl_field("min_db", &cfg.dsp.min_db);
  dbl_field("ref_db", &cfg.dsp.ref_db);

  int_field("L", &cfg.chunk.L);
  int_field("half", &cfg.chunk.half);

  int_field("len_S", &cfg.model.len_S);
  int_field("g_base_channels", &cfg.model.g_base_channels);
  int_field("g_depth", &cfg.model.g_depth);
  int_field("d_layers", &cfg.model.d_layers);
  int_field("d_base_channels", &cfg.model.d_base_channels);
  int_field("s_layers", &cfg.model.s_layers);
  int_field("kernel_size", &cfg.model.kernel_size);
  int_field("norm_power_iters", &cfg.model.norm_power_iters);

  dbl_field("alpha", &cfg.weights.alpha);
  dbl_field("beta", &cfg.weights.beta);
  dbl_field("gamma", &cfg.weights.gamma);
  dbl_field("delta", &cfg.weights.delta);

  int_field("batch_size", &cfg.train.batch_size);
  dbl_field("lr_d", &cfg.train.lr_d);
  dbl_field("lr_gs", &cfg.train.lr_gs);
  int_field("d_updates_per_gs", &cfg.train.d_updates_per_gs);
  dbl_field("adam_beta1", &cfg.train.adam_beta1);
  dbl_field("adam_beta2", &cfg.train.adam_beta2);
  u64_field("total_steps", &cfg.train.total_steps);
  u64_field("checkpoint_every", &cfg.train.checkpoint_every);
  u64_field("log_every", &cfg.train.log_every);
  u64_field("seed", &cfg.train.seed);

  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    const auto eq = t.find('=');
    if (eq == std::string::npos)
      throw std::invalid_argument("config: line " + std::to_string(line_no) +
                                  " is not 'key = value'");
    const std::string key = trim(t.substr(0, eq));
    const std::string value = trim(t.substr(eq + 1));
    const auto it = setters.find(key);
    if (it == setters.end())
      throw std::invalid_argument("config: unknown key '" + key + "'");
    it->second(key, value);
    seen[key] = true;
  }

  // Derive structural fields that were not given explicitly.
  if (seen.count("hop_size")) {
    if (!seen.count("window_size")) cfg.dsp.window_size = 6 * cfg.dsp.hop_size;
    if (!seen.count("fft_size")) cfg.dsp.fft_size = cfg.dsp.window_size;
    if (!seen.count("mel_channels")) cfg.dsp.mel_channels = cfg.dsp.hop_size;
    if (!seen.count("L")) cfg.chunk.L = cfg.dsp.hop_size / 2;
  }
  if (seen.count("hop_size") || seen.count("L")) {
    if (!seen.count("half")) cfg.chunk.half = cfg.chunk.L / 2;
  }

  cfg.dsp.validate();
  cfg.chunk.validate();
  cfg.weights.validate();
  cfg.train.validate();
  cfg.model.validate(cfg.dsp.mel_channels, cfg.chunk.half);
  return cfg;
}

RunConfig parse_config_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open config file: " + path);
  std::string text((std::istreambuf_iterator<char>(f)),
                   std::istreambuf_iterator<char>());
  return parse_config_text(text);
}

}  // namespace mgvc
