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

#include <filesystem>
#include <vector>

namespace moddyn {

// Interleaving-free multi-channel audio as read from disk.
struct MultiChannelAudio {
  std::vector<std::vector<double>> channels;
  int sample_rate = 0;

  std::size_t frames() const {
    return channels.empty() ? 0 : channels.front().size();
  }
};

// RIFF/WAVE reader for PCM 16/24/32-bit and IEEE float 32/64-bit.
MultiChannelAudio read_wav(const std::filesystem::path& path);

// Writes mono 32-bit IEEE float WAV.
void write_wav(const std::filesystem::path& path,
               const std::vector<double>& samples, int sample_rate);

}  // namespace moddyn
