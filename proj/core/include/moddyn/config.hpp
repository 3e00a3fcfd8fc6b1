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
#include <string>
#include <string_view>

#include "moddyn/encoders.hpp"
#include "moddyn/model.hpp"
#include "moddyn/training.hpp"

namespace moddyn {

// Everything needed to reproduce a run. Serialized as flat `key = value`
// lines whose names follow the usual hyperparameter table (lr_start,
// window_ms, n_fft, dropout, prune_pct, ...).
struct RunConfig {
  ModelConfig model;
  TrainConfig train;
  PreprocessConfig preprocess;
  int n_mels = 64;

  void validate() const;
};

// Unknown keys, malformed values and unsupported choices (optimizer other
// than adamw, window other than hamming, ...) raise FormatError with the line
// number. Missing keys keep their defaults.
RunConfig parse_config(std::string_view text,
                       std::string_view source = "config");
RunConfig load_config(const std::filesystem::path& path);

// Canonical text with every key; parse_config(to_config_text(c)) == c.
std::string to_config_text(const RunConfig& cfg);

}  // namespace moddyn
