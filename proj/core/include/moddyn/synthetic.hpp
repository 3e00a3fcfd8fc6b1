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

#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "moddyn/dsp.hpp"
#include "moddyn/manifest.hpp"
#include "moddyn/random.hpp"

namespace moddyn {

enum class Carrier { kNoise, kSawtooth };

std::string_view to_string(Carrier c);
Carrier parse_carrier(std::string_view s);

// Two-class corpus: class 1 carries a slow sinusoidal amplitude modulation,
// class 0 is the bare carrier. Each speaker has a fixed spectral tilt, which
// is a static (non-temporal) cue for speaker identity.
struct SyntheticCorpusSpec {
  std::size_t n_per_class = 100;
  double duration_s = 8.0;
  Carrier carrier = Carrier::kNoise;
  double mod_freq_hz = 0.3;
  double mod_depth = 0.5;
  double speaker_tilt_db_per_octave = 0.5;  // speakers spread over +-this
  std::size_t n_speakers = 10;
  std::uint64_t seed = 0;
  int sample_rate = 16000;

  void validate() const;
};

struct SyntheticUtterance {
  ManifestRecord record;
  Waveform audio;
};

// Tilt (dB/octave) of speaker `index`, evenly spaced across the range.
double speaker_tilt(const SyntheticCorpusSpec& spec, std::size_t index);

// Carrier with the given tilt, optionally modulated. Not normalized.
std::vector<double> synth_signal(const SyntheticCorpusSpec& spec, double tilt,
                                 bool modulated, Rng& rng);

// Speakers are assigned round-robin within each class; whole speakers go to
// train/valid/test in a 70/10/20 proportion so no speaker crosses splits.
std::vector<SyntheticUtterance> generate_corpus(const SyntheticCorpusSpec& spec);

// Writes audio/<id>.wav files and manifest.csv under `dir`.
DatasetManifest write_corpus(const std::vector<SyntheticUtterance>& corpus,
                             const std::filesystem::path& dir);

}  // namespace moddyn
