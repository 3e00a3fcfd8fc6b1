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

#include <cstddef>
#include <filesystem>
#include <vector>

#include <Eigen/Dense>

#include "moddyn/dsp.hpp"
#include "moddyn/wav.hpp"

namespace moddyn {

// Encoder hidden states: L layers, each a T x F matrix (time-major).
struct LayeredTemporalRep {
  std::vector<Eigen::MatrixXd> layers;
  double frame_rate_hz = 50.0;

  std::size_t num_layers() const { return layers.size(); }
  std::size_t num_frames() const {
    return layers.empty() ? 0 : static_cast<std::size_t>(layers[0].rows());
  }
  std::size_t num_features() const {
    return layers.empty() ? 0 : static_cast<std::size_t>(layers[0].cols());
  }

  // Throws InvalidArgument on empty or ragged layers, non-finite values or a
  // non-positive frame rate.
  void validate() const;
};

struct PreprocessConfig {
  double max_duration_s = 10.0;
  double min_duration_s = 1.0;
  int target_rate = 16000;

  void validate() const;
};

// Mono mixdown, resampling, head truncation, end zero-padding and peak
// normalization, in that order. The result is quantized to 32-bit float
// precision. All-zero input skips normalization.
Waveform preprocess(const MultiChannelAudio& audio, const PreprocessConfig& cfg);
Waveform preprocess(const Waveform& w, const PreprocessConfig& cfg);

inline constexpr double kMelFloor = 1e-10;

// Single-layer log-mel representation: 25 ms Hamming frames every 20 ms
// (50 Hz), log(mel power + 1e-10).
LayeredTemporalRep encode_mel(const Waveform& w, int n_mels);

// WRX1 container: "WRX1", u32 L, u32 T, u32 F, f32 frame rate, then
// L*T*F f32 values (layer, frame, feature order), all little-endian.
inline constexpr std::size_t kWrx1HeaderBytes = 20;

LayeredTemporalRep load_wrx1(const std::filesystem::path& path);
void write_wrx1(const LayeredTemporalRep& rep,
                const std::filesystem::path& path);

}  // namespace moddyn
