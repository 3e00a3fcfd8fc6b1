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

#include "moddyn/wav.hpp"

#include <bit>
#include <cstdint>
#include <string>

#include "moddyn/binary_io.hpp"
#include "moddyn/error.hpp"

namespace moddyn {

namespace {

constexpr std::uint16_t kFormatPcm = 1;
constexpr std::uint16_t kFormatFloat = 3;
constexpr std::uint16_t kFormatExtensible = 0xFFFE;

double decode_sample(ByteReader& r, std::uint16_t format, std::uint16_t bits) {
  if (format == kFormatFloat) {
    if (bits == 32) return r.get_f32();
    if (bits == 64) {
      const std::uint64_t lo = r.get_u32();
      const std::uint64_t hi = r.get_u32();
      return std::bit_cast<double>(lo | (hi << 32));
    }
  } else if (format == kFormatPcm) {
    if (bits == 16) {
      return static_cast<std::int16_t>(r.get_u16()) / 32768.0;
    }
    if (bits == 24) {
      const std::string b = r.get_bytes(3);
      std::int32_t v = static_cast<std::uint8_t>(b[0]) |
                       (static_cast<std::uint8_t>(b[1]) << 8) |
                       (static_cast<std::int8_t>(b[2]) * 65536);
      return v / 8388608.0;
    }
    if (bits == 32) {
      return static_cast<std::int32_t>(r.get_u32()) / 2147483648.0;
    }
  }
  throw FormatError("wav: unsupported encoding (format " +
                    std::to_string(format) + ", " + std::to_string(bits) +
                    " bits)");
}

}  // namespace

MultiChannelAudio read_wav(const std::filesystem::path& path) {
  const auto bytes = read_file_bytes(path);
  ByteReader r(bytes, "wav " + path.string());
  if (r.get_bytes(4) != "RIFF") throw FormatError(path.string() + ": not RIFF");
  r.get_u32();
  if (r.get_bytes(4) != "WAVE") throw FormatError(path.string() + ": not WAVE");

  std::uint16_t format = 0, channels = 0, bits = 0;
  std::uint32_t rate = 0;
  bool have_fmt = false;
  while (r.remaining() >= 8) {
    const std::string id = r.get_bytes(4);
    const std::uint32_t size = r.get_u32();
    if (id == "fmt ") {
      const std::string body = r.get_bytes(size);
      ByteReader f({reinterpret_cast<const std::uint8_t*>(body.data()),
                    body.size()},
                   "wav fmt chunk " + path.string());
      format = f.get_u16();
      channels = f.get_u16();
      rate = f.get_u32();
      f.get_u32();
      f.get_u16();
      bits = f.get_u16();
      if (format == kFormatExtensible && size >= 26) {
        f.get_u16();
        f.get_u16();
        f.get_u32();
        format = f.get_u16();
      }
      have_fmt = true;
    } else if (id == "data") {
      if (!have_fmt || channels == 0 || rate == 0 || bits == 0) {
        throw FormatError(path.string() + ": data chunk before a valid fmt");
      }
      const std::size_t frame_bytes =
          static_cast<std::size_t>(channels) * (bits / 8);
      const std::size_t avail = std::min<std::size_t>(size, r.remaining());
      const std::size_t frames = avail / frame_bytes;
      MultiChannelAudio audio;
      audio.sample_rate = static_cast<int>(rate);
      audio.channels.assign(channels, std::vector<double>(frames));
      for (std::size_t i = 0; i < frames; ++i) {
        for (std::uint16_t c = 0; c < channels; ++c) {
          audio.channels[c][i] = decode_sample(r, format, bits);
        }
      }
      return audio;
    } else {
      r.get_bytes(size + (size & 1u));
    }
  }
  throw FormatError(path.string() + ": no data chunk");
}

void write_wav(const std::filesystem::path& path,
               const std::vector<double>& samples, int sample_rate) {
  const auto data_bytes = static_cast<std::uint32_t>(samples.size() * 4);
  ByteWriter w;
  w.put_bytes("RIFF");
  w.put_u32(36 + data_bytes);
  w.put_bytes("WAVE");
  w.put_bytes("fmt ");
  w.put_u32(16);
  w.put_u16(kFormatFloat);
  w.put_u16(1);
  w.put_u32(static_cast<std::uint32_t>(sample_rate));
  w.put_u32(static_cast<std::uint32_t>(sample_rate) * 4);
  w.put_u16(4);
  w.put_u16(32);
  w.put_bytes("data");
  w.put_u32(data_bytes);
  for (double s : samples) w.put_f32(static_cast<float>(s));
  write_file_bytes(path, w.bytes());
}

}  // namespace moddyn
