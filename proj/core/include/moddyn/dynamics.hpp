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

#include <cstddef>
#include <vector>

#include <Eigen/Dense>

#include "moddyn/dsp.hpp"

namespace moddyn {

// Per-feature modulation power: channels[f] is a J x K matrix over STFT
// frame j and modulation bin k.
struct ModulationDynamics {
  std::vector<Eigen::MatrixXd> channels;
  double mod_bin_hz = 0.0;
  double frame_rate_hz = 0.0;

  std::size_t num_features() const { return channels.size(); }
  std::size_t num_frames() const {
    return channels.empty() ? 0 : static_cast<std::size_t>(channels[0].rows());
  }
  std::size_t num_bins() const {
    return channels.empty() ? 0 : static_cast<std::size_t>(channels[0].cols());
  }

  // Mean over the frame axis, laid out K x F (frequency channel rows).
  Eigen::MatrixXd time_average() const;
};

// Power STFT of every feature column of a T x F series, reusing one window and
// DFT basis. Series shorter than one window are zero-padded at the end when
// padding is allowed.
class ModulationTransform {
 public:
  ModulationTransform(const StftConfig& cfg, double frame_rate_hz,
                      bool pad_short = true);

  const FrameGeometry& geometry() const { return geometry_; }
  double frame_rate_hz() const { return frame_rate_hz_; }
  double mod_bin_hz() const {
    return frame_rate_hz_ / static_cast<double>(geometry_.n_fft);
  }
  std::size_t frames_for(std::size_t length) const;

  ModulationDynamics full(const Eigen::MatrixXd& series) const;

  // Same as full(series).time_average() without materializing J x K per
  // feature. Returns K x F.
  Eigen::MatrixXd averaged(const Eigen::MatrixXd& series) const;

  // Adjoint of averaged(): maps dL/d(average) (K x F) to dL/d(series) (T x F).
  Eigen::MatrixXd averaged_backward(const Eigen::MatrixXd& series,
                                    const Eigen::MatrixXd& grad_avg) const;

 private:
  Eigen::MatrixXd padded(const Eigen::MatrixXd& series) const;
  Eigen::MatrixXd feature_frames(const Eigen::MatrixXd& series,
                                 Eigen::Index feature) const;

  FrameGeometry geometry_;
  double frame_rate_hz_;
  bool pad_short_;
  std::vector<double> window_;
  DftBasis basis_;
};

// Squared-magnitude STFT of every feature column of a T x F series sampled
// at frame_rate_hz.
ModulationDynamics modulation_transform(const Eigen::MatrixXd& series,
                                        double frame_rate_hz,
                                        const StftConfig& cfg,
                                        bool pad_short = true);

// Center frequency of every modulation bin: k * frame_rate / n_fft.
std::vector<double> mod_freq_axis(const StftConfig& cfg, double frame_rate_hz);

}  // namespace moddyn
