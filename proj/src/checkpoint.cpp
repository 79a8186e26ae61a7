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
//
// Checkpoint layout: magic "MGVCCKPT", version u32, DspConfig,
// ChunkConfig, ModelConfig, LossWeights, NormalizationStats, step u64,
// RNG state string, then named f32 arrays (name, rank u32, dims u32...,
// little-endian f32 data) covering parameters, persistent buffers and
// optimizer moments, closed by a trailing FNV-1a64 digest of all
// preceding bytes.

#include <cstring>
#include <fstream>
#include <map>
#include <stdexcept>

#include "mgvc/serialize.hpp"
#include "mgvc/trainer.hpp"

namespace mgvc {

namespace {

constexpr char kMagic[8] = {'M', 'G', 'V', 'C', 'C', 'K', 'P', 'T'};
constexpr std::uint32_t kVersion = 1;

void write_array(ByteWriter& w, const std::string& name, const Tensor& t) {
  w.str(name);
  w.u32(static_cast<std::uint32_t>(t.rank()));
  for (int d : t.shape) w.u32(static_cast<std::uint32_t>(d));
  for (float v : t.data) w.f32(v);
}

struct NamedArrays {
  std::vector<std::string> order;
  std::map<std::string, Tensor> arrays;

  void add(const std::string& name, const Tensor& t) {
    if (!arrays.emplace(name, t).second)
      throw std::runtime_error("duplicate array name: " + name);
    order.push_back(name);
  }
};

void collect_network(const std::string& prefix, std::vector<ParamRef> params,
                     std::vector<BufferRef> buffers, const Adam& opt,
                     NamedArrays* out) {
  for (const auto& p : params) out->add(prefix + "." + p.name, *p.value);
  for (const auto& b : buffers) out->add(prefix + "." + b.name, *b.value);
  if (opt.m.size() != params.size())
    throw std::logic_error("optimizer moments out of sync with parameters");
  for (std::size_t i = 0; i < params.size(); ++i) {
    out->add("opt." + prefix + "." + params[i].name + ".m", opt.m[i]);
    out->add("opt." + prefix + "." + params[i].name + ".v", opt.v[i]);
  }
  // Step counter as a length-1 array; exact in f32 for any practical
  // count, and the bias corrections saturate far below the f32 limit.
  Tensor t_counter({1});
  t_counter.data[0] = static_cast<float>(opt.t);
  out->add("opt." + prefix + ".t", t_counter);
}

void restore_network(const std::string& prefix, std::vector<ParamRef> params,
                     std::vector<BufferRef> buffers, Adam* opt,
                     const std::map<std::string, Tensor>& arrays) {
  const auto fetch = [&](const std::string& name) -> const Tensor& {
    const auto it = arrays.find(name);
    if (it == arrays.end())
      throw std::runtime_error("checkpoint missing array: " + name);
    return it->second;
  };
  const auto assign = [&](Tensor* dst, const std::string& name) {
    const Tensor& src = fetch(name);
    if (src.shape != dst->shape)
      throw std::runtime_error("checkpoint array shape mismatch: " + name);
    *dst = src;
  };
  for (const auto& p : params) assign(p.value, prefix + "." + p.name);
  for (const auto& b : buffers) assign(b.value, prefix + "." + b.name);
  opt->init(params);
  for (std::size_t i = 0; i < params.size(); ++i) {
    assign(&opt->m[i], "opt." + prefix + "." + params[i].name + ".m");
    assign(&opt->v[i], "opt." + prefix + "." + params[i].name + ".v");
  }
  const Tensor& t_counter = fetch("opt." + prefix + ".t");
  opt->t = static_cast<std::uint64_t>(t_counter.data[0]);
}

void write_dsp(ByteWriter& w, const DspConfig& c) {
  w.i32(c.sample_rate);
  w.i32(c.hop_size);
  w.i32(c.window_size);
  w.i32(c.fft_size);
  w.i32(c.mel_channels);
  w.f64(c.mel_fmin);
  w.f64(c.mel_fmax);
  w.f64(c.amp_floor);
  w.i32(c.griffin_lim_iters);
  w.f64(c.min_db);
  w.f64(c.ref_db);
}

DspConfig read_dsp(ByteReader& r) {
  DspConfig c;
  c.sample_rate = r.i32();
  c.hop_size = r.i32();
  c.window_size = r.i32();
  c.fft_size = r.i32();
  c.mel_channels = r.i32();
  c.mel_fmin = r.f64();
  c.mel_fmax = r.f64();
  c.amp_floor = r.f64();
  c.griffin_lim_iters = r.i32();
  c.min_db = r.f64();
  c.ref_db = r.f64();
  return c;
}

}  // namespace

void save_checkpoint(const TrainState& st, const std::string& path) {
  ByteWriter w;
  w.bytes(kMagic, 8);
  w.u32(kVersion);
  write_dsp(w, st.dsp);
  w.i32(st.chunk.L);
  w.i32(st.chunk.half);
  w.i32(st.model.len_S);
  w.i32(st.model.g_base_channels);
  w.i32(st.model.g_depth);
  w.i32(st.model.d_layers);
  w.i32(st.model.d_base_channels);
  w.i32(st.model.s_layers);
  w.i32(st.model.kernel_size);
  w.i32(st.model.norm_power_iters);
  w.f64(st.weights.alpha);
  w.f64(st.weights.beta);
  w.f64(st.weights.gamma);
  w.f64(st.weights.delta);
  w.f64(st.stats.min_db);
  w.f64(st.stats.ref_db);
  w.u64(st.step);
  w.str(st.rng.save_state());

  NamedArrays arrays;
  auto& mutable_st = const_cast<TrainState&>(st);
  collect_network("g", mutable_st.g.parameters(), mutable_st.g.buffers(),
                  st.opt_g, &arrays);
  collect_network("d", mutable_st.d.parameters(), mutable_st.d.buffers(),
                  st.opt_d, &arrays);
  collect_network("s", mutable_st.s.parameters(), mutable_st.s.buffers(),
                  st.opt_s, &arrays);

  w.u32(static_cast<std::uint32_t>(arrays.order.size()));
  for (const auto& name : arrays.order) write_array(w, name, arrays.arrays.at(name));
  const std::uint64_t digest = w.digest();
  w.u64(digest);

  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot write checkpoint: " + path);
  f.write(w.buffer().data(), static_cast<std::streamsize>(w.buffer().size()));
  f.flush();
  if (!f) throw std::runtime_error("checkpoint write failed: " + path);
}

TrainState load_checkpoint(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open checkpoint: " + path);
  std::string blob((std::istreambuf_iterator<char>(f)),
                   std::istreambuf_iterator<char>());

  if (blob.size() < 8 + 4 + 8)
    throw std::runtime_error("checkpoint truncated: " + path);
  const std::uint64_t stored_digest =
      ByteReader(blob.data() + blob.size() - 8, 8).u64();
  const std::uint64_t actual_digest = fnv1a64(blob.data(), blob.size() - 8);
  if (stored_digest != actual_digest)
    throw std::runtime_error("checkpoint digest mismatch: " + path);

  ByteReader r(blob.data(), blob.size() - 8);
  char magic[8];
  r.bytes(magic, 8);
  if (std::memcmp(magic, kMagic, 8) != 0)
    throw std::runtime_error("not a checkpoint file: " + path);
  const std::uint32_t version = r.u32();
  if (version != kVersion)
    throw std::runtime_error("unsupported checkpoint version " +
                             std::to_string(version) + ": " + path);

  const DspConfig dsp = read_dsp(r);
  ChunkConfig chunk;
  chunk.L = r.i32();
  chunk.half = r.i32();
  ModelConfig model;
  model.len_S = r.i32();
  model.g_base_channels = r.i32();
  model.g_depth = r.i32();
  model.d_layers = r.i32();
  model.d_base_channels = r.i32();
  model.s_layers = r.i32();
  model.kernel_size = r.i32();
  model.norm_power_iters = r.i32();
  LossWeights weights;
  weights.alpha = r.f64();
  weights.beta = r.f64();
  weights.gamma = r.f64();
  weights.delta = r.f64();
  NormalizationStats stats;
  stats.min_db = r.f64();
  stats.ref_db = r.f64();
  const std::uint64_t step = r.u64();
  const std::string rng_state = r.str();

  TrainState st = make_train_state(dsp, chunk, model, weights, stats, 0);
  st.step = step;
  st.rng.load_state(rng_state);

  const std::uint32_t count = r.u32();
  std::map<std::string, Tensor> arrays;
  for (std::uint32_t i = 0; i < count; ++i) {
    const std::string name = r.str();
    const std::uint32_t rank = r.u32();
    if (rank > 8) throw std::runtime_error("corrupt checkpoint array rank");
    std::vector<int> shape(rank);
    for (auto& d : shape) d = static_cast<int>(r.u32());
    Tensor t(shape);
    for (auto& v : t.data) v = r.f32();
    if (!arrays.emplace(name, std::move(t)).second)
      throw std::runtime_error("duplicate checkpoint array: " + name);
  }

  restore_network("g", st.g.parameters(), st.g.buffers(), &st.opt_g, arrays);
  restore_network("d", st.d.parameters(), st.d.buffers(), &st.opt_d, arrays);
  restore_network("s", st.s.parameters(), st.s.buffers(), &st.opt_s, arrays);
  return st;
}

}  // namespace mgvc
