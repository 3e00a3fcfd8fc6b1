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

#include <cstdint>
#include <fstream>

#include "moddyn/binary_io.hpp"
#include "moddyn/error.hpp"
#include "moddyn/wav.hpp"
#include "test_support.hpp"

namespace moddyn {
namespace {

using testing::TempDir;

std::vector<std::uint8_t> pcm16_wav(const std::vector<std::int16_t>& interleaved,
                                    int channels, int rate) {
  ByteWriter w;
  const auto data_bytes = static_cast<std::uint32_t>(interleaved.size() * 2);
  w.put_bytes("RIFF");
  w.put_u32(36 + data_bytes);
  w.put_bytes("WAVE");
  w.put_bytes("fmt ");
  w.put_u32(16);
  w.put_u16(1);
  w.put_u16(static_cast<std::uint16_t>(channels));
  w.put_u32(static_cast<std::uint32_t>(rate));
  w.put_u32(static_cast<std::uint32_t>(rate * channels * 2));
  w.put_u16(static_cast<std::uint16_t>(channels * 2));
  w.put_u16(16);
  w.put_bytes("data");
  w.put_u32(data_bytes);
  for (auto s : interleaved) w.put_u16(static_cast<std::uint16_t>(s));
  return w.bytes();
}

TEST(ByteIo, RoundTrip) {
  ByteWriter w;
  w.put_bytes("AB");
  w.put_u16(0xBEEF);
  w.put_u32(0x01020304);
  w.put_f32(1.5f);
  w.put_string("hello");
  const auto& b = w.bytes();
  EXPECT_EQ(b[2], 0xEF);  // little-endian
  EXPECT_EQ(b[4], 0x04);
  ByteReader r(b, "buf");
  EXPECT_EQ(r.get_bytes(2), "AB");
  EXPECT_EQ(r.get_u16(), 0xBEEF);
  EXPECT_EQ(r.get_u32(), 0x01020304u);
  EXPECT_EQ(r.get_f32(), 1.5f);
  EXPECT_EQ(r.get_string(), "hello");
  EXPECT_EQ(r.remaining(), 0u);
  EXPECT_THROW(r.get_u16(), FormatError);
}

TEST(ByteIo, MissingFileIsIoError) {
  EXPECT_THROW(read_file_bytes("/nonexistent/dir/x.bin"), IoError);
}

TEST(Wav, ReadsStereoPcm16) {
  TempDir dir("wav");
  const auto path = dir / "s.wav";
  write_file_bytes(path, pcm16_wav({16384, -16384, 32767, 0}, 2, 8000));
  const auto a = read_wav(path);
  EXPECT_EQ(a.sample_rate, 8000);
  ASSERT_EQ(a.channels.size(), 2u);
  ASSERT_EQ(a.frames(), 2u);
  EXPECT_DOUBLE_EQ(a.channels[0][0], 0.5);
  EXPECT_DOUBLE_EQ(a.channels[1][0], -0.5);
  EXPECT_DOUBLE_EQ(a.channels[1][1], 0.0);
}

TEST(Wav, FloatRoundTrip) {
  TempDir dir("wav");
  const auto path = dir / "f.wav";
  const std::vector<double> x{0.25, -0.75, 1.0, 0.0, 0.125};
  write_wav(path, x, 16000);
  const auto a = read_wav(path);
  ASSERT_EQ(a.channels.size(), 1u);
  EXPECT_EQ(a.channels[0], x);
  EXPECT_EQ(a.sample_rate, 16000);
}

TEST(Wav, RejectsGarbage) {
  TempDir dir("wav");
  const auto path = dir / "bad.wav";
  write_file_bytes(path, std::vector<std::uint8_t>{'R', 'I', 'F', 'X', 0, 0});
  EXPECT_THROW(read_wav(path), FormatError);
}

TEST(Wav, TruncatedDataKeepsWholeFrames) {
  TempDir dir("wav");
  auto bytes = pcm16_wav({1, 2, 3, 4}, 1, 8000);
  bytes.resize(bytes.size() - 3);
  const auto path = dir / "t.wav";
  write_file_bytes(path, bytes);
  EXPECT_EQ(read_wav(path).frames(), 2u);
}

TEST(Wav, MissingDataChunk) {
  TempDir dir("wav");
  auto bytes = pcm16_wav({}, 1, 8000);
  bytes.resize(36);
  const auto path = dir / "n.wav";
  write_file_bytes(path, bytes);
  EXPECT_THROW(read_wav(path), FormatError);
}

}  // namespace
}  // namespace moddyn
