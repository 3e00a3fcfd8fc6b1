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

#include "moddyn/dynamics.hpp"

#include <string>

#include "moddyn/error.hpp"

namespace moddyn {

Eigen::MatrixXd ModulationDynamics::time_average() const {
  const auto k = static_cast<Eigen::Index>(num_bins());
  const auto f = static_cast<Eigen::Index>(num_features());
  Eigen::MatrixXd out(k, f);
  for (Eigen::Index c = 0; c < f; ++c) {
    out.col(c) = channels[static_cast<std::size_t>(c)].colwise().mean().transpose();
  }
  return out;
}

ModulationTransform::ModulationTransform(const StftConfig& cfg,
                                         double frame_rate_hz, bool pad_short)
    : geometry_(frame_geometry(cfg, frame_rate_hz)),
      frame_rate_hz_(frame_rate_hz),
      pad_short_(pad_short),
      window_(hamming_window(geometry_.window)),
      basis_(geometry_.window, geometry_.n_fft) {}

std::size_t ModulationTransform::frames_for(std::size_t length) const {
  if (length < geometry_.window) {
    if (!pad_short_) return 0;
    length = geometry_.window;
  }
  return geometry_.frames(length);
}

Eigen::MatrixXd ModulationTransform::padded(const Eigen::MatrixXd& series) const {
  const auto win = static_cast<Eigen::Index>(geometry_.window);
  if (series.rows() >= win) return series;
  if (!pad_short_) {
    throw InvalidArgument("modulation_transform: " +
                          std::to_string(series.rows()) +
                          " frames is shorter than the " +
                          std::to_string(win) + "-frame window");
  }
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(win, series.cols());
  out.topRows(series.rows()) = series;
  return out;
}

Eigen::MatrixXd ModulationTransform::feature_frames(const Eigen::MatrixXd& series,
                                                    Eigen::Index feature) const {
  const auto frames = static_cast<Eigen::Index>(
      geometry_.frames(static_cast<std::size_t>(series.rows())));
  const auto win = static_cast<Eigen::Index>(geometry_.window);
  const auto hop = static_cast<Eigen::Index>(geometry_.hop);
  Eigen::MatrixXd y(frames, win);
  for (Eigen::Index j = 0; j < frames; ++j) {
    for (Eigen::Index m = 0; m < win; ++m) {
      y(j, m) = series(j * hop + m, feature) * window_[static_cast<std::size_t>(m)];
    }
  }
  return y;
}

ModulationDynamics ModulationTransform::full(const Eigen::MatrixXd& series) const {
  const Eigen::MatrixXd x = padded(series);
  ModulationDynamics out;
  out.frame_rate_hz = frame_rate_hz_;
  out.mod_bin_hz = mod_bin_hz();
  out.channels.reserve(static_cast<std::size_t>(x.cols()));
  for (Eigen::Index f = 0; f < x.cols(); ++f) {
    const Eigen::MatrixXd y = feature_frames(x, f);
    const Eigen::MatrixXd re = y * basis_.cos();
    const Eigen::MatrixXd im = y * basis_.sin();
    out.channels.emplace_back(re.array().square() + im.array().square());
  }
  return out;
}

Eigen::MatrixXd ModulationTransform::averaged(const Eigen::MatrixXd& series) const {
  const Eigen::MatrixXd x = padded(series);
  Eigen::MatrixXd out(static_cast<Eigen::Index>(basis_.bins()), x.cols());
  for (Eigen::Index f = 0; f < x.cols(); ++f) {
    const Eigen::MatrixXd y = feature_frames(x, f);
    const Eigen::MatrixXd re = y * basis_.cos();
    const Eigen::MatrixXd im = y * basis_.sin();
    out.col(f) = (re.array().square() + im.array().square())
                     .matrix()
                     .colwise()
                     .mean()
                     .transpose();
  }
  return out;
}

Eigen::MatrixXd ModulationTransform::averaged_backward(
    const Eigen::MatrixXd& series, const Eigen::MatrixXd& grad_avg) const {
  const Eigen::MatrixXd x = padded(series);
  const auto frames = static_cast<Eigen::Index>(
      geometry_.frames(static_cast<std::size_t>(x.rows())));
  const auto win = static_cast<Eigen::Index>(geometry_.window);
  const auto hop = static_cast<Eigen::Index>(geometry_.hop);
  if (grad_avg.rows() != static_cast<Eigen::Index>(basis_.bins()) ||
      grad_avg.cols() != x.cols()) {
    throw InvalidArgument("modulation backward: gradient shape mismatch");
  }

  Eigen::MatrixXd grad = Eigen::MatrixXd::Zero(x.rows(), x.cols());
  const double inv_frames = 1.0 / static_cast<double>(frames);
  for (Eigen::Index f = 0; f < x.cols(); ++f) {
    const Eigen::MatrixXd y = feature_frames(x, f);
    const Eigen::RowVectorXd g = grad_avg.col(f).transpose() * (2.0 * inv_frames);
    // d|X_k|^2 / dy_m = 2 Re X_k cos_km + 2 Im X_k sin_km
    Eigen::MatrixXd re = y * basis_.cos();
    Eigen::MatrixXd im = y * basis_.sin();
    re.array().rowwise() *= g.array();
    im.array().rowwise() *= g.array();
    const Eigen::MatrixXd dy =
        re * basis_.cos().transpose() + im * basis_.sin().transpose();
    for (Eigen::Index j = 0; j < frames; ++j) {
      for (Eigen::Index m = 0; m < win; ++m) {
        grad(j * hop + m, f) += dy(j, m) * window_[static_cast<std::size_t>(m)];
      }
    }
  }
  return grad.topRows(series.rows());
}

ModulationDynamics modulation_transform(const Eigen::MatrixXd& series,
                                        double frame_rate_hz,
                                        const StftConfig& cfg, bool pad_short) {
  return ModulationTransform(cfg, frame_rate_hz, pad_short).full(series);
}

std::vector<double> mod_freq_axis(const StftConfig& cfg, double frame_rate_hz) {
  const FrameGeometry g = frame_geometry(cfg, frame_rate_hz);
  std::vector<double> axis(g.bins());
  for (std::size_t k = 0; k < axis.size(); ++k) {
    axis[k] = static_cast<double>(k) * frame_rate_hz / static_cast<double>(g.n_fft);
  }
  return axis;
}

}  // namespace moddyn
