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

#include <vector>

#include "moddyn/config.hpp"
#include "moddyn/manifest.hpp"
#include "moddyn/training.hpp"

namespace moddyn {

// Waveform to model input under `cfg`: preprocessing then log-mel.
LayeredTemporalRep encode_waveform(const Waveform& w, const RunConfig& cfg);

// Loads one record. `.wrx1` paths are read as precomputed representations;
// anything else is decoded as WAV, preprocessed and encoded. When
// `waveform_out` is non-null and the record is audio, the preprocessed
// waveform is stored there. Shape mismatches with the model config raise
// FormatError naming the record.
LayeredTemporalRep load_representation(const DatasetManifest& m,
                                       const ManifestRecord& r,
                                       const RunConfig& cfg,
                                       Waveform* waveform_out = nullptr);

std::vector<TrainingSample> load_samples(const DatasetManifest& m, Split split,
                                         const RunConfig& cfg,
                                         bool keep_waveforms = false);

RepEncoder make_encoder(const RunConfig& cfg);

}  // namespace moddyn
