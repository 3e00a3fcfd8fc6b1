/*
 * Copyright 2026 The moddyn Authors.
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

// Microbenchmarks for the hot paths: modulation STFT, mel encoding, and one
// forward/backward step at default model size.

#include <benchmark/benchmark.h>

#include <cmath>
#include <numbers>

#include "moddyn/dsp.hpp"
#include "moddyn/dynamics.hpp"
#include "moddyn/encoders.hpp"
#include "moddyn/model.hpp"
#include "moddyn/random.hpp"

namespace {

using namespace moddyn;

Eigen::MatrixXd random_series(Eigen::Index t, Eigen::Index f, std::uint64_t seed) {
  Rng rng(seed);
  Eigen::MatrixXd m(t, f);
  for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = rng.normal();
  return m;
}

void BM_StftPower(benchmark::State& state) {
  const auto m = random_series(state.range(0), 1, 1);
  const std::vector<double> x(m.data(), m.data() + m.size());
  const StftConfig cfg;
  for (auto _ : state) benchmark::DoNotOptimize(stft_power(x, 50.0, cfg));
}
BENCHMARK(BM_StftPower)->Arg(100)->Arg(500);

void BM_ModulationAveraged(benchmark::State& state) {
  const auto h = random_series(500, state.range(0), 2);
  const ModulationTransform mt(StftConfig{}, 50.0);
  for (auto _ : state) benchmark::DoNotOptimize(mt.averaged(h));
}
BENCHMARK(BM_ModulationAveraged)->Arg(64)->Arg(768);

void BM_EncodeMel(benchmark::State& state) {
  Waveform w;
  w.sample_rate = 16000;
  w.samples.resize(16000 * state.range(0));
  Rng rng(3);
  for (auto& v : w.samples) v = 0.3 * rng.normal();
  for (auto _ : state) benchmark::DoNotOptimize(encode_mel(w, 64));
}
BENCHMARK(BM_EncodeMel)->Arg(8)->Unit(benchmark::kMillisecond);

void BM_ForwardBackward(benchmark::State& state) {
  ModelConfig cfg;
  cfg.branches = static_cast<Branches>(state.range(0));
  const auto params = init_params(cfg);
  LayeredTemporalRep rep;
  for (std::size_t l = 0; l < cfg.num_layers; ++l) {
    rep.layers.push_back(random_series(400, static_cast<Eigen::Index>(cfg.num_features), 4 + l));
  }
  Rng rng(5);
  for (auto _ : state) {
    const auto scale = draw_dropout_scale(cfg.embed_dim, cfg.dropout, rng);
    const auto trace = forward_trace(rep, params, scale);
    benchmark::DoNotOptimize(backward(rep, params, trace, 1.0));
  }
}
BENCHMARK(BM_ForwardBackward)
    ->Arg(static_cast<int>(Branches::kTemporal))
    ->Arg(static_cast<int>(Branches::kDynamics))
    ->Arg(static_cast<int>(Branches::kBoth))
    ->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
