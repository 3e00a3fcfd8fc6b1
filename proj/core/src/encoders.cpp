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

#include "moddyn/encoders.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "moddyn/binary_io.hpp"
#include "moddyn/error.hpp"

namespace moddyn {

void LayeredTemporalRep::validate() const {
  if (layers.empty()) throw InvalidArgument("representation has no layers");
  if (!(frame_rate_hz > 0.0) || !std::isfinite(frame_rate_hz)) {
    throw InvalidArgument("representation frame rate must be positive");
  }
  const auto t = layers[0].rows();
  const auto f = layers[0].cols();
  if (t < 1 || f < 1) {
    throw InvalidArgument("representation needs at least one frame and feature");
  }
  for (std::size_t l = 0; l < layers.size(); ++l) {
    if (layers[l].rows() != t || layers[l].cols() != f) {
      throw InvalidArgument("layer " + std::to_string(l) +
                            " shape differs from layer 0");
    }
    if (!layers[l].allFinite()) {
      throw InvalidArgument("layer " + std::to_string(l) +
                            " holds non-finite values");
    }
  }
}

void PreprocessConfig::validate() const {
  if (!(min_duration_s > 0.0) || min_duration_s > max_duration_s) {
    throw InvalidArgument(
        "preprocess: need 0 < min_duration_s <= max_duration_s");
  }
  if (target_rate <= 0) {
    throw InvalidArgument("preprocess: target_rate must be positive");
  }
}

Waveform preprocess(const MultiChannelAudio& audio,
                    const PreprocessConfig& cfg) {
  if (audio.channels.empty() || audio.frames() == 0) {
    throw InvalidArgument("preprocess: empty audio");
  }
  Waveform mono;
  mono.sample_rate = audio.sample_rate;
  if (audio.channels.size() == 1) {
    mono.samples = audio.channels[0];
  } else {
    const auto n_ch = static_cast<double>(audio.channels.size());
    mono.samples.assign(audio.frames(), 0.0);
    for (const auto& ch : audio.channels) {
      if (ch.size() != mono.samples.size()) {
        throw InvalidArgument("preprocess: channels differ in length");
      }
      for (std::size_t i = 0; i < ch.size(); ++i) mono.samples[i] += ch[i];
    }
    for (double& s : mono.samples) s /= n_ch;
  }
  return preprocess(mono, cfg);
}

Waveform preprocess(const Waveform& w, const PreprocessConfig& cfg) {
  cfg.validate();
  if (w.samples.empty()) throw InvalidArgument("preprocess: empty audio");

  Waveform out = resample(w, cfg.target_rate);

  const auto max_len = static_cast<std::size_t>(
      std::llround(cfg.max_duration_s * cfg.target_rate));
  const auto min_len = static_cast<std::size_t>(
      std::llround(cfg.min_duration_s * cfg.target_rate));
  if (out.samples.size() > max_len) out.samples.resize(max_len);
  if (out.samples.size() < min_len) out.samples.resize(min_len, 0.0);

  double peak = 0.0;
  for (double s : out.samples) peak = std::max(peak, std::abs(s));
  if (peak > 0.0) {
    for (double& s : out.samples) {
      s = static_cast<double>(static_cast<float>(s / peak));
    }
  } else {
    for (double& s : out.samples) s = static_cast<double>(static_cast<float>(s));
  }
  return out;
}

LayeredTemporalRep encode_mel(const Waveform& w, int n_mels) {
  if (w.sample_rate <= 0) throw InvalidArgument("encode_mel: invalid rate");
  StftConfig cfg;
  cfg.window_ms = 25.0;
  cfg.hop_ms = 20.0;
  cfg.n_fft = static_cast<int>(std::lround(0.025 * w.sample_rate));
  const PowerSpectrogram spec = stft_power(w.samples, w.sample_rate, cfg);
  const MelFilterbank fb = mel_filterbank(n_mels, cfg.n_fft, w.sample_rate);

  LayeredTemporalRep rep;
  rep.frame_rate_hz = 1000.0 / cfg.hop_ms;
  Eigen::MatrixXd mel = spec.values * fb.weights.transpose();
  rep.layers.push_back((mel.array() + kMelFloor).log().matrix());
  return rep;
}

LayeredTemporalRep load_wrx1(const std::filesystem::path& path) {
  const auto bytes = read_file_bytes(path);
  const std::string ctx = "wrx1 " + path.string();
  if (bytes.size() < kWrx1HeaderBytes) {
    throw FormatError(ctx + ": file of " + std::to_string(bytes.size()) +
                      " bytes is shorter than the 20-byte header");
  }
  ByteReader r(bytes, ctx);
  const std::string magic = r.get_bytes(4);
  if (magic != "WRX1") throw FormatError(ctx + ": bad magic '" + magic + "'");
  const std::uint32_t n_layers = r.get_u32();
  const std::uint32_t n_frames = r.get_u32();
  const std::uint32_t n_features = r.get_u32();
  const float rate = r.get_f32();

  const std::uint64_t count = static_cast<std::uint64_t>(n_layers) * n_frames *
                              n_features;
  const std::uint64_t expected = count * 4;
  if (r.remaining() != expected) {
    throw FormatError(ctx + ": payload is " + std::to_string(r.remaining()) +
                      " bytes, expected " + std::to_string(expected) +
                      " for L=" + std::to_string(n_layers) +
                      " T=" + std::to_string(n_frames) +
                      " F=" + std::to_string(n_features));
  }
  if (count == 0) throw FormatError(ctx + ": zero-sized tensor");
  if (!(rate > 0.0f) || !std::isfinite(rate)) {
    throw FormatError(ctx + ": frame rate must be positive");
  }

  LayeredTemporalRep rep;
  rep.frame_rate_hz = rate;
  rep.layers.assign(n_layers, Eigen::MatrixXd(n_frames, n_features));
  for (auto& layer : rep.layers) {
    for (Eigen::Index t = 0; t < layer.rows(); ++t) {
      for (Eigen::Index f = 0; f < layer.cols(); ++f) {
        const float v = r.get_f32();
        if (!std::isfinite(v)) {
          throw FormatError(ctx + ": non-finite value in payload");
        }
        layer(t, f) = v;
      }
    }
  }
  return rep;
}

void write_wrx1(const LayeredTemporalRep& rep,
                const std::filesystem::path& path) {
  rep.validate();
  ByteWriter w;
  w.put_bytes("WRX1");
  w.put_u32(static_cast<std::uint32_t>(rep.num_layers()));
  w.put_u32(static_cast<std::uint32_t>(rep.num_frames()));
  w.put_u32(static_cast<std::uint32_t>(rep.num_features()));
  w.put_f32(static_cast<float>(rep.frame_rate_hz));
  for (const auto& layer : rep.layers) {
    for (Eigen::Index t = 0; t < layer.rows(); ++t) {
      for (Eigen::Index f = 0; f < layer.cols(); ++f) {
        w.put_f32(static_cast<float>(layer(t, f)));
      }
    }
  }
  write_file_bytes(path, w.bytes());
}

}  // namespace moddyn
