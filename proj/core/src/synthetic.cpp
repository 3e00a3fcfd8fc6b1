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

#include "moddyn/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <numeric>

#include "moddyn/error.hpp"
#include "moddyn/wav.hpp"

namespace moddyn {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr int kFirTaps = 129;
constexpr double kTiltRefHz = 1000.0;
constexpr double kTiltMinHz = 50.0;

double tilt_gain(double f_hz, double tilt) {
  const double f = std::max(f_hz, kTiltMinHz);
  return std::pow(10.0, tilt * std::log2(f / kTiltRefHz) / 20.0);
}

// Linear-phase FIR by frequency sampling, Hann tapered.
std::vector<double> tilt_fir(double tilt, int sample_rate) {
  constexpr int n = kFirTaps;
  constexpr int mid = n / 2;
  std::vector<double> h(n, 0.0);
  for (int i = 0; i < n; ++i) {
    double acc = tilt_gain(0.0, tilt);
    for (int k = 1; k <= mid; ++k) {
      const double f = static_cast<double>(k) * sample_rate / n;
      acc += 2.0 * tilt_gain(f, tilt) * std::cos(2.0 * kPi * k * (i - mid) / n);
    }
    const double win = 0.5 - 0.5 * std::cos(2.0 * kPi * (i + 1) / (n + 1));
    h[i] = acc / n * win;
  }
  return h;
}

}  // namespace

std::string_view to_string(Carrier c) {
  return c == Carrier::kNoise ? "noise" : "sawtooth";
}

Carrier parse_carrier(std::string_view s) {
  if (s == "noise") return Carrier::kNoise;
  if (s == "sawtooth") return Carrier::kSawtooth;
  throw InvalidArgument("unknown carrier '" + std::string(s) +
                        "' (expected noise or sawtooth)");
}

void SyntheticCorpusSpec::validate() const {
  if (n_per_class < 1) throw InvalidArgument("n_per_class must be >= 1");
  if (!(duration_s > 0.0)) throw InvalidArgument("duration_s must be > 0");
  if (!(mod_freq_hz > 0.0 && mod_freq_hz < 2.0)) {
    throw InvalidArgument("mod_freq_hz must lie in (0, 2)");
  }
  if (!(mod_depth >= 0.0 && mod_depth <= 1.0)) {
    throw InvalidArgument("mod_depth must lie in [0, 1]");
  }
  if (!(speaker_tilt_db_per_octave >= 0.0)) {
    throw InvalidArgument("speaker tilt must be >= 0");
  }
  if (n_speakers < 3) throw InvalidArgument("n_speakers must be >= 3");
  if (sample_rate < 1000) throw InvalidArgument("sample_rate too low");
}

double speaker_tilt(const SyntheticCorpusSpec& spec, std::size_t index) {
  if (spec.n_speakers < 2) return 0.0;
  const double h = spec.speaker_tilt_db_per_octave;
  return -h + 2.0 * h * static_cast<double>(index) /
                  static_cast<double>(spec.n_speakers - 1);
}

std::vector<double> synth_signal(const SyntheticCorpusSpec& spec, double tilt,
                                 bool modulated, Rng& rng) {
  const auto n = static_cast<std::size_t>(std::lround(spec.duration_s * spec.sample_rate));
  const double sr = spec.sample_rate;
  std::vector<double> x(n, 0.0);
  if (spec.carrier == Carrier::kNoise) {
    const auto h = tilt_fir(tilt, spec.sample_rate);
    const std::size_t pad = h.size() - 1;
    std::vector<double> white(n + pad);
    for (auto& v : white) v = rng.normal();
    for (std::size_t i = 0; i < n; ++i) {
      double acc = 0.0;
      for (std::size_t k = 0; k < h.size(); ++k) acc += h[k] * white[i + pad - k];
      x[i] = acc;
    }
  } else {
    const double f0 = rng.uniform(100.0, 200.0);
    const int harmonics = static_cast<int>(std::floor(0.5 * sr / f0));
    for (int m = 1; m <= harmonics; ++m) {
      const double amp = tilt_gain(m * f0, tilt) / m;
      const double phase = rng.uniform(0.0, 2.0 * kPi);
      const double w = 2.0 * kPi * m * f0 / sr;
      for (std::size_t i = 0; i < n; ++i) {
        x[i] += amp * std::sin(w * static_cast<double>(i) + phase);
      }
    }
  }
  if (modulated) {
    const double phase = rng.uniform(0.0, 2.0 * kPi);
    const double w = 2.0 * kPi * spec.mod_freq_hz / sr;
    for (std::size_t i = 0; i < n; ++i) {
      x[i] *= 1.0 + spec.mod_depth * std::sin(w * static_cast<double>(i) + phase);
    }
  }
  return x;
}

std::vector<SyntheticUtterance> generate_corpus(const SyntheticCorpusSpec& spec) {
  spec.validate();
  Rng rng(spec.seed);

  std::vector<std::size_t> order(spec.n_speakers);
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  rng.shuffle(order.begin(), order.end());
  const auto n_spk = static_cast<double>(spec.n_speakers);
  auto n_test = static_cast<std::size_t>(std::lround(0.2 * n_spk));
  auto n_valid = static_cast<std::size_t>(std::lround(0.1 * n_spk));
  n_test = std::max<std::size_t>(n_test, 1);
  n_valid = std::max<std::size_t>(n_valid, 1);
  std::vector<Split> speaker_split(spec.n_speakers, Split::kTrain);
  for (std::size_t i = 0; i < n_test; ++i) speaker_split[order[i]] = Split::kTest;
  for (std::size_t i = 0; i < n_valid; ++i) {
    speaker_split[order[n_test + i]] = Split::kValid;
  }

  std::vector<SyntheticUtterance> out;
  out.reserve(2 * spec.n_per_class);
  char buf[64];
  for (int label = 0; label <= 1; ++label) {
    for (std::size_t i = 0; i < spec.n_per_class; ++i) {
      const std::size_t spk = i % spec.n_speakers;
      SyntheticUtterance u;
      std::snprintf(buf, sizeof buf, "syn%d_%04zu", label, i);
      u.record.id = buf;
      u.record.path = "audio/" + u.record.id + ".wav";
      u.record.label = label;
      std::snprintf(buf, sizeof buf, "spk%02zu", spk);
      u.record.speaker = buf;
      u.record.split = speaker_split[spk];
      u.audio.sample_rate = spec.sample_rate;
      u.audio.samples = synth_signal(spec, speaker_tilt(spec, spk), label == 1, rng);
      const double peak = std::transform_reduce(
          u.audio.samples.begin(), u.audio.samples.end(), 0.0,
          [](double a, double b) { return std::max(a, b); },
          [](double v) { return std::abs(v); });
      if (peak > 0.0) {
        for (auto& v : u.audio.samples) v = 0.9 * v / peak;
      }
      out.push_back(std::move(u));
    }
  }
  return out;
}

DatasetManifest write_corpus(const std::vector<SyntheticUtterance>& corpus,
                             const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir / "audio");
  DatasetManifest m;
  m.base_dir = dir;
  for (const auto& u : corpus) {
    write_wav(dir / u.record.path, u.audio.samples, u.audio.sample_rate);
    m.records.push_back(u.record);
  }
  write_manifest(m, dir / "manifest.csv");
  return m;
}

}  // namespace moddyn
