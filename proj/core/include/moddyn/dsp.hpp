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
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace moddyn {

// Mono audio. Samples are kept in double precision; preprocessing quantizes
// them onto the 32-bit float grid used by the audio files.
struct Waveform {
  std::vector<double> samples;
  int sample_rate = 16000;

  double duration_s() const {
    return static_cast<double>(samples.size()) / sample_rate;
  }
};

enum class WindowKind { kHamming };
enum class PadKind { kZero };

struct StftConfig {
  double window_ms = 256.0;
  double hop_ms = 64.0;
  int n_fft = 400;
  WindowKind window = WindowKind::kHamming;
  PadKind pad = PadKind::kZero;

  // Throws InvalidArgument unless window_ms >= hop_ms > 0 and n_fft >= 2.
  void validate() const;
};

// Window and hop of a StftConfig realized on a series sampled at some rate.
struct FrameGeometry {
  std::size_t window = 1;
  std::size_t hop = 1;
  std::size_t n_fft = 2;

  std::size_t bins() const { return n_fft / 2 + 1; }
  // Number of full frames in a series of `length` samples (0 if too short).
  std::size_t frames(std::size_t length) const {
    return length < window ? 0 : (length - window) / hop + 1;
  }
};

// Millisecond lengths are rounded to the nearest sample with a minimum of 1,
// so 256 ms at 50 Hz gives 13 frames and 64 ms gives 3.
FrameGeometry frame_geometry(const StftConfig& cfg, double rate_hz);

// Symmetric Hamming window, w[k] = 0.54 - 0.46 cos(2 pi k / (length - 1)).
std::vector<double> hamming_window(std::size_t length);

// J x K power values, K = n_fft / 2 + 1.
struct PowerSpectrogram {
  Eigen::MatrixXd values;
  double bin_hz = 0.0;
  double frame_rate_hz = 0.0;
};

// One-sided real-input DFT restricted to the first `length` inputs of an
// n_fft-point transform (the remainder is zero padding). Row m holds the
// cos / sin of 2 pi k m / n_fft for k = 0..n_fft/2.
class DftBasis {
 public:
  DftBasis(std::size_t length, std::size_t n_fft);

  const Eigen::MatrixXd& cos() const { return cos_; }
  const Eigen::MatrixXd& sin() const { return sin_; }
  std::size_t bins() const { return static_cast<std::size_t>(cos_.cols()); }

 private:
  Eigen::MatrixXd cos_;
  Eigen::MatrixXd sin_;
};

// Windowed frames of `series` stacked as rows (J x window).
Eigen::MatrixXd frame_matrix(std::span<const double> series,
                             const FrameGeometry& geometry,
                             std::span<const double> window);

// Framed power STFT: each frame is windowed, zero-padded to n_fft and
// transformed; the value is the squared magnitude of each one-sided bin.
// Throws InvalidArgument when the series is shorter than one window.
PowerSpectrogram stft_power(std::span<const double> series, double rate_hz,
                            const StftConfig& cfg);

// Band-limited (windowed-sinc) resampling to an integer target rate.
// Output length is round(len * target / source); identical rates return the
// input untouched.
Waveform resample(const Waveform& w, int target_rate);

// Resampling by an arbitrary ratio = output_rate / input_rate.
std::vector<double> resample_by_ratio(std::span<const double> samples,
                                      double ratio);

double hz_to_mel(double hz);
double mel_to_hz(double mel);

struct MelFilterbank {
  Eigen::MatrixXd weights;  // n_mels x (n_fft / 2 + 1)
  std::vector<double> centers_hz;
};

// Triangular filters with unit peak, centers equally spaced on the mel scale
// between 0 Hz and Nyquist.
MelFilterbank mel_filterbank(int n_mels, int n_fft, double sample_rate);

}  // namespace moddyn
