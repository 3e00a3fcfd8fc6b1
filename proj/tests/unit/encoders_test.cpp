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

#include <cmath>
#include <filesystem>

#include "moddyn/binary_io.hpp"
#include "moddyn/encoders.hpp"
#include "moddyn/error.hpp"
#include "test_support.hpp"

namespace moddyn {
namespace {

using testing::random_vector;
using testing::TempDir;

TEST(Preprocess, StereoAveragesToMono) {
  MultiChannelAudio a;
  a.sample_rate = 16000;
  a.channels = {std::vector<double>(16000, 1.0), std::vector<double>(16000, 0.5)};
  a.channels[0][0] = 1.0;
  a.channels[1][0] = 0.5;
  a.channels[0][1] = -1.0;
  a.channels[1][1] = -1.0;  // peak 1.0 keeps the average observable
  const auto w = preprocess(a, PreprocessConfig{});
  EXPECT_DOUBLE_EQ(w.samples[0], 0.75);
  EXPECT_DOUBLE_EQ(w.samples[1], -1.0);
}

TEST(Preprocess, PeakNormalizesAndPads) {
  Waveform in{{0.5, -0.25}, 16000};
  const auto w = preprocess(in, PreprocessConfig{});
  ASSERT_EQ(w.samples.size(), 16000u);
  EXPECT_EQ(w.samples[0], 1.0);
  EXPECT_EQ(w.samples[1], -0.5);
  EXPECT_EQ(w.samples[2], 0.0);
  EXPECT_EQ(w.samples.back(), 0.0);
}

TEST(Preprocess, TruncatesToMaxDuration) {
  Rng rng(2);
  Waveform in{random_vector(11 * 16000, rng), 16000};
  const auto w = preprocess(in, PreprocessConfig{});
  EXPECT_EQ(w.samples.size(), 160000u);
}

TEST(Preprocess, ResamplesToTarget) {
  Waveform in{std::vector<double>(44100, 0.1), 44100};
  const auto w = preprocess(in, PreprocessConfig{});
  EXPECT_EQ(w.sample_rate, 16000);
  EXPECT_EQ(w.samples.size(), 16000u);
}

TEST(Preprocess, SilenceSkipsNormalization) {
  Waveform in{std::vector<double>(100, 0.0), 16000};
  const auto w = preprocess(in, PreprocessConfig{});
  EXPECT_EQ(w.samples.size(), 16000u);
  for (double s : w.samples) EXPECT_EQ(s, 0.0);
}

TEST(Preprocess, EmptyThrows) {
  EXPECT_THROW(preprocess(Waveform{{}, 16000}, PreprocessConfig{}), InvalidArgument);
  PreprocessConfig bad;
  bad.min_duration_s = 20.0;
  EXPECT_THROW(bad.validate(), InvalidArgument);
}

TEST(Preprocess, Idempotent) {
  Rng rng(4);
  Waveform in{random_vector(20000, rng), 16000};
  const auto once = preprocess(in, PreprocessConfig{});
  const auto twice = preprocess(once, PreprocessConfig{});
  EXPECT_EQ(once.samples, twice.samples);
}

TEST(Preprocess, PositiveScaleInvariant) {
  Rng rng(6);
  Waveform in{random_vector(24000, rng), 16000};
  const auto ref = preprocess(in, PreprocessConfig{});
  for (double a : {2.0, 0.37, 1e-3, 17.5}) {
    Waveform scaled = in;
    for (auto& v : scaled.samples) v *= a;
    EXPECT_EQ(preprocess(scaled, PreprocessConfig{}).samples, ref.samples) << a;
  }
}

TEST(EncodeMel, FrameCounts) {
  Waveform one{std::vector<double>(16000, 0.0), 16000};
  const auto r1 = encode_mel(one, 64);
  EXPECT_EQ(r1.num_layers(), 1u);
  EXPECT_EQ(r1.num_frames(), 49u);
  EXPECT_DOUBLE_EQ(r1.frame_rate_hz, 50.0);

  Rng rng(1);
  Waveform ten{random_vector(160000, rng), 16000};
  const auto r10 = encode_mel(ten, 64);
  EXPECT_EQ(r10.num_frames(), 499u);
  EXPECT_EQ(r10.num_features(), 64u);
}

TEST(EncodeMel, SilenceIsLogFloor) {
  Waveform w{std::vector<double>(16000, 0.0), 16000};
  const auto r = encode_mel(w, 64);
  for (Eigen::Index t = 0; t < r.layers[0].rows(); ++t) {
    for (Eigen::Index f = 0; f < r.layers[0].cols(); ++f) {
      EXPECT_NEAR(r.layers[0](t, f), std::log(kMelFloor), 1e-12);
    }
  }
}

LayeredTemporalRep random_rep(std::size_t l, std::size_t t, std::size_t f,
                              std::uint64_t seed) {
  Rng rng(seed);
  LayeredTemporalRep rep;
  for (std::size_t i = 0; i < l; ++i) {
    Eigen::MatrixXd m(t, f);
    for (Eigen::Index k = 0; k < m.size(); ++k) {
      m.data()[k] = static_cast<float>(rng.normal());
    }
    rep.layers.push_back(m);
  }
  return rep;
}

TEST(Wrx1, RoundTripsBitwise) {
  TempDir dir("wrx1");
  const auto rep = random_rep(3, 7, 5, 8);
  write_wrx1(rep, dir / "a.wrx1");
  const auto back = load_wrx1(dir / "a.wrx1");
  ASSERT_EQ(back.num_layers(), 3u);
  for (std::size_t l = 0; l < 3; ++l) EXPECT_EQ(back.layers[l], rep.layers[l]);
  EXPECT_EQ(back.frame_rate_hz, 50.0);
}

TEST(Wrx1, SizeOfSmallTensor) {
  // 20-byte header plus 1 * 2 * 3 float32 values.
  TempDir dir("wrx1");
  LayeredTemporalRep rep;
  rep.layers.push_back(Eigen::MatrixXd::Zero(2, 3));
  write_wrx1(rep, dir / "z.wrx1");
  const auto bytes = read_file_bytes(dir / "z.wrx1");
  ASSERT_EQ(bytes.size(), kWrx1HeaderBytes + 6 * 4);
  EXPECT_EQ(bytes.size(), 44u);
  for (std::size_t i = kWrx1HeaderBytes; i < bytes.size(); ++i) EXPECT_EQ(bytes[i], 0);
  EXPECT_EQ(std::string(bytes.begin(), bytes.begin() + 4), "WRX1");
}

TEST(Wrx1, BadMagic) {
  TempDir dir("wrx1");
  LayeredTemporalRep rep;
  rep.layers.push_back(Eigen::MatrixXd::Ones(2, 3));
  write_wrx1(rep, dir / "m.wrx1");
  auto bytes = read_file_bytes(dir / "m.wrx1");
  for (int i = 0; i < 4; ++i) bytes[i] = 'X';
  write_file_bytes(dir / "m.wrx1", bytes);
  EXPECT_THROW(load_wrx1(dir / "m.wrx1"), FormatError);
}

TEST(Wrx1, TruncatedPayloadReportsByteCounts) {
  TempDir dir("wrx1");
  ByteWriter w;
  w.put_bytes("WRX1");
  w.put_u32(13);
  w.put_u32(499);
  w.put_u32(768);
  w.put_f32(50.0f);
  for (int i = 0; i < 10; ++i) w.put_f32(0.0f);
  write_file_bytes(dir / "t.wrx1", w.bytes());
  try {
    load_wrx1(dir / "t.wrx1");
    FAIL() << "expected FormatError";
  } catch (const FormatError& e) {
    const std::string msg = e.what();
    EXPECT_NE(msg.find(std::to_string(13ull * 499 * 768 * 4)), std::string::npos) << msg;
    EXPECT_NE(msg.find("40"), std::string::npos) << msg;
  }
}

TEST(Wrx1, ShortHeaderAndNonFinite) {
  TempDir dir("wrx1");
  write_file_bytes(dir / "h.wrx1", std::vector<std::uint8_t>{'W', 'R', 'X', '1'});
  EXPECT_THROW(load_wrx1(dir / "h.wrx1"), FormatError);

  ByteWriter w;
  w.put_bytes("WRX1");
  w.put_u32(1);
  w.put_u32(1);
  w.put_u32(1);
  w.put_f32(50.0f);
  w.put_f32(std::nanf(""));
  write_file_bytes(dir / "n.wrx1", w.bytes());
  EXPECT_THROW(load_wrx1(dir / "n.wrx1"), FormatError);
}

TEST(LayeredTemporalRep, ValidateRejectsRagged) {
  LayeredTemporalRep rep;
  rep.layers.push_back(Eigen::MatrixXd::Zero(2, 3));
  rep.layers.push_back(Eigen::MatrixXd::Zero(2, 4));
  EXPECT_THROW(rep.validate(), InvalidArgument);
  EXPECT_THROW(LayeredTemporalRep{}.validate(), InvalidArgument);
}

}  // namespace
}  // namespace moddyn
