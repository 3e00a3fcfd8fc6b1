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

#include "moddyn/dsp.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "moddyn/error.hpp"

namespace moddyn {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

std::size_t ms_to_samples(double ms, double rate_hz) {
  const double n = std::round(ms * rate_hz / 1000.0);
  return n < 1.0 ? 1 : static_cast<std::size_t>(n);
}

double sinc(double x) {
  if (std::abs(x) < 1e-12) return 1.0;
  const double px = std::numbers::pi * x;
  return std::sin(px) / px;
}

}  // namespace

void StftConfig::validate() const {
  if (!(hop_ms > 0.0)) {
    throw InvalidArgument("stft: hop_ms must be positive");
  }
  if (window_ms < hop_ms) {
    throw InvalidArgument("stft: window_ms must be >= hop_ms");
  }
  if (n_fft < 2) {
    throw InvalidArgument("stft: n_fft must be >= 2");
  }
}

FrameGeometry frame_geometry(const StftConfig& cfg, double rate_hz) {
  cfg.validate();
  if (!(rate_hz > 0.0)) {
    throw InvalidArgument("stft: series rate must be positive");
  }
  FrameGeometry g;
  g.window = ms_to_samples(cfg.window_ms, rate_hz);
  g.hop = ms_to_samples(cfg.hop_ms, rate_hz);
  g.n_fft = static_cast<std::size_t>(cfg.n_fft);
  if (g.n_fft < g.window) {
    throw InvalidArgument("stft: n_fft (" + std::to_string(g.n_fft) +
                          ") is smaller than the window (" +
                          std::to_string(g.window) + " samples)");
  }
  return g;
}

std::vector<double> hamming_window(std::size_t length) {
  if (length == 0) {
    throw InvalidArgument("hamming_window: length must be >= 1");
  }
  if (length == 1) return {1.0};
  std::vector<double> w(length);
  const double denom = static_cast<double>(length - 1);
  for (std::size_t k = 0; k < length; ++k) {
    w[k] = 0.54 - 0.46 * std::cos(kTwoPi * static_cast<double>(k) / denom);
  }
  return w;
}

DftBasis::DftBasis(std::size_t length, std::size_t n_fft)
    : cos_(static_cast<Eigen::Index>(length),
           static_cast<Eigen::Index>(n_fft / 2 + 1)),
      sin_(cos_.rows(), cos_.cols()) {
  for (std::size_t m = 0; m < length; ++m) {
    for (std::size_t k = 0; k <= n_fft / 2; ++k) {
      // Reduce k*m modulo n_fft first so the phase argument stays small.
      const auto r = static_cast<double>((k * m) % n_fft);
      const double phase = kTwoPi * r / static_cast<double>(n_fft);
      cos_(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(k)) =
          std::cos(phase);
      sin_(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(k)) =
          std::sin(phase);
    }
  }
}

Eigen::MatrixXd frame_matrix(std::span<const double> series,
                             const FrameGeometry& geometry,
                             std::span<const double> window) {
  const std::size_t frames = geometry.frames(series.size());
  Eigen::MatrixXd out(static_cast<Eigen::Index>(frames),
                      static_cast<Eigen::Index>(geometry.window));
  for (std::size_t j = 0; j < frames; ++j) {
    const std::size_t start = j * geometry.hop;
    for (std::size_t m = 0; m < geometry.window; ++m) {
      out(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(m)) =
          series[start + m] * window[m];
    }
  }
  return out;
}

PowerSpectrogram stft_power(std::span<const double> series, double rate_hz,
                            const StftConfig& cfg) {
  const FrameGeometry g = frame_geometry(cfg, rate_hz);
  if (series.size() < g.window) {
    throw InvalidArgument("stft_power: series of " +
                          std::to_string(series.size()) +
                          " samples is shorter than the " +
                          std::to_string(g.window) +
                          "-sample window; zero-pad the input");
  }
  const std::vector<double> window = hamming_window(g.window);
  const DftBasis basis(g.window, g.n_fft);
  const Eigen::MatrixXd frames = frame_matrix(series, g, window);
  const Eigen::MatrixXd re = frames * basis.cos();
  const Eigen::MatrixXd im = frames * basis.sin();

  PowerSpectrogram out;
  out.values = re.array().square() + im.array().square();
  out.frame_rate_hz = rate_hz;
  out.bin_hz = rate_hz / static_cast<double>(g.n_fft);
  return out;
}

std::vector<double> resample_by_ratio(std::span<const double> samples,
                                      double ratio) {
  if (!(ratio > 0.0) || !std::isfinite(ratio)) {
    throw InvalidArgument("resample: ratio must be positive and finite");
  }
  const auto out_len = static_cast<std::size_t>(
      std::llround(static_cast<double>(samples.size()) * ratio));
  std::vector<double> out(out_len, 0.0);
  if (samples.empty()) return out;

  // Kernel: Hann-windowed sinc with the cutoff at the lower Nyquist.
  constexpr double kZeroCrossings = 32.0;
  const double cutoff = std::min(1.0, ratio);
  const double half_width = kZeroCrossings / cutoff;
  const auto n_in = static_cast<std::ptrdiff_t>(samples.size());

  for (std::size_t n = 0; n < out_len; ++n) {
    const double t = static_cast<double>(n) / ratio;
    const auto lo = std::max<std::ptrdiff_t>(
        0, static_cast<std::ptrdiff_t>(std::ceil(t - half_width)));
    const auto hi = std::min<std::ptrdiff_t>(
        n_in - 1, static_cast<std::ptrdiff_t>(std::floor(t + half_width)));
    double acc = 0.0;
    for (std::ptrdiff_t i = lo; i <= hi; ++i) {
      const double d = t - static_cast<double>(i);
      const double u = d / half_width;
      const double win = 0.5 * (1.0 + std::cos(std::numbers::pi * u));
      acc += samples[static_cast<std::size_t>(i)] * cutoff * sinc(cutoff * d) *
             win;
    }
    out[n] = acc;
  }
  return out;
}

Waveform resample(const Waveform& w, int target_rate) {
  if (target_rate <= 0) {
    throw InvalidArgument("resample: target rate must be positive");
  }
  if (w.sample_rate <= 0) {
    throw InvalidArgument("resample: source rate must be positive");
  }
  if (w.sample_rate == target_rate) return w;
  Waveform out;
  out.sample_rate = target_rate;
  out.samples = resample_by_ratio(
      w.samples, static_cast<double>(target_rate) / w.sample_rate);
  return out;
}

double hz_to_mel(double hz) { return 2595.0 * std::log10(1.0 + hz / 700.0); }

double mel_to_hz(double mel) {
  return 700.0 * (std::pow(10.0, mel / 2595.0) - 1.0);
}

MelFilterbank mel_filterbank(int n_mels, int n_fft, double sample_rate) {
  if (n_mels < 1) throw InvalidArgument("mel_filterbank: n_mels must be >= 1");
  if (n_fft < 2) throw InvalidArgument("mel_filterbank: n_fft must be >= 2");
  if (!(sample_rate > 0.0)) {
    throw InvalidArgument("mel_filterbank: sample rate must be positive");
  }
  const int bins = n_fft / 2 + 1;
  if (n_mels > bins) {
    throw InvalidArgument("mel_filterbank: " + std::to_string(n_mels) +
                          " filters exceed the " + std::to_string(bins) +
                          " available bins");
  }

  const double nyquist = sample_rate / 2.0;
  const double mel_max = hz_to_mel(nyquist);
  std::vector<double> edges(static_cast<std::size_t>(n_mels) + 2);
  for (std::size_t i = 0; i < edges.size(); ++i) {
    edges[i] = mel_to_hz(mel_max * static_cast<double>(i) /
                         static_cast<double>(n_mels + 1));
  }

  MelFilterbank fb;
  fb.weights = Eigen::MatrixXd::Zero(n_mels, bins);
  fb.centers_hz.resize(static_cast<std::size_t>(n_mels));
  const double bin_hz = sample_rate / n_fft;
  for (int m = 0; m < n_mels; ++m) {
    const double left = edges[static_cast<std::size_t>(m)];
    const double center = edges[static_cast<std::size_t>(m) + 1];
    const double right = edges[static_cast<std::size_t>(m) + 2];
    fb.centers_hz[static_cast<std::size_t>(m)] = center;
    for (int k = 0; k < bins; ++k) {
      const double f = k * bin_hz;
      const double rise = (f - left) / (center - left);
      const double fall = (right - f) / (right - center);
      fb.weights(m, k) = std::max(0.0, std::min(rise, fall));
    }
    if (!(fb.weights.row(m).maxCoeff() > 0.0)) {
      throw InvalidArgument("mel_filterbank: filter " + std::to_string(m) +
                            " covers no FFT bin; use fewer mels or a larger "
                            "n_fft");
    }
  }
  return fb;
}

}  // namespace moddyn
