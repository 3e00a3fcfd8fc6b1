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

#include "moddyn/pipeline.hpp"

#include <string>

#include "moddyn/error.hpp"
#include "moddyn/wav.hpp"

namespace moddyn {

LayeredTemporalRep encode_waveform(const Waveform& w, const RunConfig& cfg) {
  return encode_mel(preprocess(w, cfg.preprocess), cfg.n_mels);
}

LayeredTemporalRep load_representation(const DatasetManifest& m,
                                       const ManifestRecord& r,
                                       const RunConfig& cfg,
                                       Waveform* waveform_out) {
  const auto path = m.resolve(r);
  LayeredTemporalRep rep;
  if (path.extension() == ".wrx1") {
    rep = load_wrx1(path);
  } else {
    const Waveform w = preprocess(read_wav(path), cfg.preprocess);
    rep = encode_mel(w, cfg.n_mels);
    if (waveform_out != nullptr) *waveform_out = w;
  }
  if (rep.num_layers() != cfg.model.num_layers ||
      rep.num_features() != cfg.model.num_features) {
    throw FormatError("record '" + r.id + "': representation has " +
                      std::to_string(rep.num_layers()) + " layers x " +
                      std::to_string(rep.num_features()) +
                      " features, model expects " +
                      std::to_string(cfg.model.num_layers) + " x " +
                      std::to_string(cfg.model.num_features));
  }
  return rep;
}

std::vector<TrainingSample> load_samples(const DatasetManifest& m, Split split,
                                         const RunConfig& cfg,
                                         bool keep_waveforms) {
  std::vector<TrainingSample> out;
  for (const auto* r : m.in_split(split)) {
    TrainingSample s;
    s.id = r->id;
    s.label = r->label;
    Waveform w;
    s.rep = load_representation(m, *r, cfg, keep_waveforms ? &w : nullptr);
    if (keep_waveforms && !w.samples.empty()) s.waveform = std::move(w);
    out.push_back(std::move(s));
  }
  return out;
}

RepEncoder make_encoder(const RunConfig& cfg) {
  return [cfg](const Waveform& w) { return encode_waveform(w, cfg); };
}

}  // namespace moddyn
