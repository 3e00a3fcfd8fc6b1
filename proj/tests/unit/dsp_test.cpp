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

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numbers>

#include "moddyn/dsp.hpp"
#include "moddyn/error.hpp"
#include "test_support.hpp"

namespace moddyn {
namespace {

using testing::naive_dft;
using testing::random_vector;
constexpr double kPi = std::numbers::pi;

TEST(HammingWindow, SinglePoint) {
  EXPECT_EQ(hamming_window(1), std::vector<double>{1.0});
}

TEST(HammingWindow, ThreePoints) {
  const auto w = hamming_window(3);
  ASSERT_EQ(w.size(), 3u);
  EXPECT_NEAR(w[0], 0.08, 1e-15);
  EXPECT_NEAR(w[1], 1.0, 1e-15);
  EXPECT_NEAR(w[2], 0.08, 1e-15);
}

TEST(HammingWindow, MatchesCosineFormula) {
  const auto w = hamming_window(5);
  for (int k = 0; k < 5; ++k) {
    EXPECT_NEAR(w[k], 0.54 - 0.46 * std::cos(2.0 * kPi * k / 4.0), 1e-12);
  }
}

TEST(HammingWindow, ZeroLengthThrows) {
  EXPECT_THROW(hamming_window(0), InvalidArgument);
}

TEST(HammingWindow, CoefficientRange) {
  for (std::size_t n : {2u, 13u, 64u, 401u}) {
    for (double c : hamming_window(n)) {
      EXPECT_GE(c, 0.08 - 1e-15);
      EXPECT_LE(c, 1.0 + 1e-15);
    }
  }
}

TEST(FrameGeometry, RoundsMillisecondsOnFiftyHertz) {
  const auto g = frame_geometry(StftConfig{}, 50.0);
  EXPECT_EQ(g.window, 13u);
  EXPECT_EQ(g.hop, 3u);
  EXPECT_EQ(g.n_fft, 400u);
  EXPECT_EQ(g.bins(), 201u);
}

TEST(FrameGeometry, ClampsToOneSample) {
  StftConfig cfg;
  cfg.window_ms = 1.0;
  cfg.hop_ms = 1.0;
  const auto g = frame_geometry(cfg, 50.0);
  EXPECT_EQ(g.window, 1u);
  EXPECT_EQ(g.hop, 1u);
}

TEST(StftConfig, RejectsBadValues) {
  StftConfig cfg;
  cfg.hop_ms = 300.0;
  EXPECT_THROW(cfg.validate(), InvalidArgument);
  cfg = StftConfig{};
  cfg.hop_ms = 0.0;
  EXPECT_THROW(cfg.validate(), InvalidArgument);
  cfg = StftConfig{};
  cfg.n_fft = 8;  // shorter than 13 frames at 50 Hz
  EXPECT_THROW(stft_power(std::vector<double>(100, 0.0), 50.0, cfg), InvalidArgument);
}

TEST(StftPower, FrameCount) {
  const std::vector<double> x(500, 0.5);
  const auto s = stft_power(x, 50.0, StftConfig{});
  EXPECT_EQ(s.values.rows(), 163);
  EXPECT_EQ(s.values.cols(), 201);
  EXPECT_DOUBLE_EQ(s.bin_hz, 0.125);
  EXPECT_DOUBLE_EQ(s.frame_rate_hz, 50.0);
}

TEST(StftPower, ZeroSeriesGivesZeroPower) {
  const std::vector<double> x(100, 0.0);
  const auto s = stft_power(x, 50.0, StftConfig{});
  EXPECT_EQ(s.values.cwiseAbs().maxCoeff(), 0.0);
}

TEST(StftPower, ShortSeriesThrows) {
  const std::vector<double> x(12, 1.0);
  EXPECT_THROW(stft_power(x, 50.0, StftConfig{}), InvalidArgument);
}

TEST(StftPower, MatchesNaiveDft) {
  Rng rng(3);
  const auto x = random_vector(60, rng);
  const auto s = stft_power(x, 50.0, StftConfig{});
  const auto w = hamming_window(13);
  for (Eigen::Index j = 0; j < s.values.rows(); ++j) {
    std::vector<double> frame(13);
    for (int m = 0; m < 13; ++m) frame[m] = x[j * 3 + m] * w[m];
    const auto spec = naive_dft(frame, 400);
    for (Eigen::Index k = 0; k < 201; ++k) {
      EXPECT_NEAR(s.values(j, k), std::norm(spec[k]), 1e-10);
    }
  }
}

TEST(StftPower, SinusoidOnBinPeaksAtThatBin) {
  // A long window resolves the tone; bin 48 at 50 Hz / 400 is 6 Hz.
  StftConfig cfg;
  cfg.window_ms = 8000.0;
  cfg.hop_ms = 1000.0;
  const double f = 48 * 50.0 / 400.0;
  std::vector<double> x(800);
  for (std::size_t i = 0; i < x.size(); ++i) x[i] = std::sin(2.0 * kPi * f * i / 50.0);
  const auto s = stft_power(x, 50.0, cfg);
  for (Eigen::Index j = 0; j < s.values.rows(); ++j) {
    Eigen::Index arg;
    s.values.row(j).maxCoeff(&arg);
    EXPECT_EQ(arg, 48);
  }
}

TEST(StftPower, ParsevalPerFrame) {
  Rng rng(11);
  const auto x = random_vector(200, rng);
  const StftConfig cfg;
  const auto s = stft_power(x, 50.0, cfg);
  const auto w = hamming_window(13);
  for (Eigen::Index j = 0; j < s.values.rows(); ++j) {
    double energy = 0.0;
    for (int m = 0; m < 13; ++m) energy += std::pow(x[j * 3 + m] * w[m], 2);
    // Two-sided sum from the one-sided bins (DC and Nyquist appear once).
    double two_sided = s.values(j, 0) + s.values(j, 200);
    for (int k = 1; k < 200; ++k) two_sided += 2.0 * s.values(j, k);
    EXPECT_NEAR(two_sided / (400.0 * energy), 1.0, 1e-6);
  }
}

TEST(StftPower, IgnoresTrailingSamples) {
  Rng rng(5);
  auto x = random_vector(40, rng);  // 10 frames use samples 0..39
  const auto a = stft_power(x, 50.0, StftConfig{});
  x.push_back(123.0);
  x.push_back(-7.0);
  const auto b = stft_power(x, 50.0, StftConfig{});
  ASSERT_EQ(a.values.rows(), b.values.rows());
  EXPECT_EQ(a.values, b.values);
}

TEST(Resample, IdentityIsBitwise) {
  Rng rng(1);
  Waveform w{random_vector(1000, rng), 16000};
  const auto r = resample(w, 16000);
  EXPECT_EQ(r.samples, w.samples);
  EXPECT_EQ(r.sample_rate, 16000);
}

TEST(Resample, LengthRatio) {
  Waveform w{std::vector<double>(64000, 0.1), 32000};
  const auto r = resample(w, 16000);
  EXPECT_EQ(r.samples.size(), 32000u);
  EXPECT_EQ(r.sample_rate, 16000);
}

TEST(Resample, PreservesToneFrequency) {
  Waveform w;
  w.sample_rate = 48000;
  w.samples.resize(48000 / 10);
  for (std::size_t i = 0; i < w.samples.size(); ++i) {
    w.samples[i] = std::sin(2.0 * kPi * 440.0 * i / 48000.0);
  }
  const auto r = resample(w, 16000);
  ASSERT_EQ(r.samples.size(), 1600u);
  const auto spec = naive_dft(r.samples, 1600);
  std::size_t arg = 0;
  for (std::size_t k = 1; k <= 800; ++k) {
    if (std::norm(spec[k]) > std::norm(spec[arg])) arg = k;
  }
  const double bin_hz = 16000.0 / 1600.0;
  EXPECT_NEAR(arg * bin_hz, 440.0, bin_hz);
}

TEST(Resample, Linear) {
  Rng rng(9);
  Waveform w{random_vector(3000, rng), 22050};
  Waveform w2 = w;
  for (auto& v : w2.samples) v *= 3.5;
  const auto a = resample(w, 16000);
  const auto b = resample(w2, 16000);
  ASSERT_EQ(a.samples.size(), b.samples.size());
  for (std::size_t i = 0; i < a.samples.size(); ++i) {
    EXPECT_NEAR(b.samples[i], 3.5 * a.samples[i], 1e-9 * (1.0 + std::abs(b.samples[i])));
  }
}

TEST(Resample, RejectsBadRate) {
  Waveform w{{0.0, 1.0}, 16000};
  EXPECT_THROW(resample(w, 0), InvalidArgument);
}

TEST(MelFilterbank, Shape) {
  const auto fb = mel_filterbank(64, 400, 16000.0);
  EXPECT_EQ(fb.weights.rows(), 64);
  EXPECT_EQ(fb.weights.cols(), 201);
}

TEST(MelFilterbank, RowsNonNegativeWithPositiveEntry) {
  const auto fb = mel_filterbank(64, 400, 16000.0);
  for (Eigen::Index r = 0; r < fb.weights.rows(); ++r) {
    EXPECT_GE(fb.weights.row(r).minCoeff(), 0.0);
    EXPECT_GT(fb.weights.row(r).maxCoeff(), 0.0);
  }
}

TEST(MelFilterbank, CentersIncrease) {
  const auto fb = mel_filterbank(40, 512, 16000.0);
  for (std::size_t i = 1; i < fb.centers_hz.size(); ++i) {
    EXPECT_GT(fb.centers_hz[i], fb.centers_hz[i - 1]);
  }
}

TEST(MelFilterbank, TooManyFiltersThrows) {
  EXPECT_THROW(mel_filterbank(300, 400, 16000.0), InvalidArgument);
}

TEST(MelScale, RoundTrip) {
  for (double f : {0.0, 100.0, 700.0, 4000.0, 8000.0}) {
    EXPECT_NEAR(mel_to_hz(hz_to_mel(f)), f, 1e-9);
  }
  EXPECT_NEAR(hz_to_mel(700.0), 2595.0 * std::log10(2.0), 1e-12);
}

}  // namespace
}  // namespace moddyn
