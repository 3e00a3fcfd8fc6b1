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
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "moddyn/dsp.hpp"
#include "moddyn/dynamics.hpp"
#include "moddyn/encoders.hpp"
#include "moddyn/random.hpp"

namespace moddyn {

// Which pooled representations feed the fusion layer.
enum class Branches { kBoth, kTemporal, kDynamics };

std::string_view to_string(Branches b);
Branches parse_branches(std::string_view s);

inline constexpr double kVarianceFloor = 1e-8;

struct ModelConfig {
  std::size_t num_layers = 1;
  std::size_t num_features = 64;
  std::size_t attn_hidden = 128;
  std::size_t embed_dim = 768;
  Branches branches = Branches::kBoth;
  StftConfig stft;
  double dropout = 0.25;
  double leaky_slope = 0.1;
  double prune_pct = 0.0;
  std::uint64_t seed = 0;

  bool uses_temporal() const { return branches != Branches::kDynamics; }
  bool uses_dynamics() const { return branches != Branches::kTemporal; }
  // Input width of the fusion layer: 2F per enabled branch.
  std::size_t fusion_width() const {
    return 2 * num_features * (branches == Branches::kBoth ? 2 : 1);
  }
  void validate() const;
};

// Single-hidden-layer attention scorer: e = v . tanh(W h + b).
struct AttentionParams {
  Eigen::MatrixXd w;  // H x F
  Eigen::VectorXd b;  // H
  Eigen::VectorXd v;  // H
};

// Every trainable tensor of the head. Gradients share this layout.
struct ModelWeights {
  Eigen::VectorXd layer_logits;
  AttentionParams attn_time;
  AttentionParams attn_freq;
  Eigen::MatrixXd fuse_w;  // E x fusion_width
  Eigen::VectorXd fuse_b;
  Eigen::VectorXd out_w;  // E
  Eigen::VectorXd out_b;  // 1

  // Views over every tensor in a fixed order; used by the optimizer and by
  // serialization.
  std::vector<std::span<double>> tensors();
  std::vector<std::span<const double>> tensors() const;
  std::vector<std::string> tensor_names() const;

  ModelWeights zeros_like() const;
  bool all_finite() const;
};

struct ModelParams {
  ModelConfig config;
  ModelWeights weights;
  Eigen::VectorXd prune_mask;  // E entries in {0, 1}

  void validate() const;
};

// Uniform(+-sqrt(1/fan_in)) weights, zero biases and layer logits, prune mask
// computed from the initial output weights.
ModelParams init_params(const ModelConfig& cfg);

Eigen::VectorXd softmax(const Eigen::VectorXd& logits);

// Softmax-weighted sum of the layers (T x F).
Eigen::MatrixXd layer_aggregate(const LayeredTemporalRep& rep,
                                const Eigen::VectorXd& layer_logits);

// Attentive statistics over the rows of an N x F matrix.
struct PooledStats {
  Eigen::VectorXd mean;
  Eigen::VectorXd stddev;
  Eigen::VectorXd variance;  // before the floor
  Eigen::VectorXd alpha;     // N attention weights
  Eigen::MatrixXd hidden;    // tanh(W h + b), N x H

  Eigen::VectorXd concat() const;
};

PooledStats attentive_stats(const Eigen::MatrixXd& rows,
                            const AttentionParams& attn);

struct PooledStatsGrad {
  Eigen::MatrixXd d_rows;
  AttentionParams d_attn;
};

PooledStatsGrad attentive_stats_backward(const Eigen::MatrixXd& rows,
                                         const AttentionParams& attn,
                                         const PooledStats& stats,
                                         const Eigen::VectorXd& d_mean,
                                         const Eigen::VectorXd& d_stddev);

// ASP over time of a T x F matrix: concat(mean, stddev), 2F values.
Eigen::VectorXd asp_time(const Eigen::MatrixXd& h, const AttentionParams& attn);

// Average the dynamics over frames (K x F), then attentive statistics across
// the K modulation-frequency channels: 2F values.
Eigen::VectorXd pool_dynamics(const ModulationDynamics& d,
                              const AttentionParams& attn);

enum class Mode { kTrain, kInfer };

struct ForwardOutput {
  double logit = 0.0;
  Eigen::VectorXd embedding;  // fusion output before dropout and activation
};

// Train mode draws a dropout mask from `rng`, which must then be non-null.
ForwardOutput forward(const LayeredTemporalRep& rep, const ModelParams& params,
                      Mode mode, Rng* rng = nullptr);

// Inverted-dropout multipliers: 0 with probability `rate`, 1/(1-rate) else.
Eigen::VectorXd draw_dropout_scale(std::size_t size, double rate, Rng& rng);

// Intermediate values retained for the backward pass.
struct ForwardTrace {
  Eigen::VectorXd layer_weights;
  Eigen::MatrixXd aggregated;  // T x F
  std::optional<PooledStats> temporal;
  Eigen::MatrixXd dyn_average;  // K x F
  std::optional<PooledStats> dynamics;
  Eigen::VectorXd fused_input;
  Eigen::VectorXd embedding;
  Eigen::VectorXd dropout_scale;
  Eigen::VectorXd activated;
  double logit = 0.0;
};

// Deterministic forward pass. An empty dropout_scale means inference mode.
ForwardTrace forward_trace(const LayeredTemporalRep& rep,
                           const ModelParams& params,
                           const Eigen::VectorXd& dropout_scale);

// Reverse-mode gradient of d_logit * logit with respect to every weight.
// Pruned output weights receive exactly zero.
ModelWeights backward(const LayeredTemporalRep& rep, const ModelParams& params,
                      const ForwardTrace& trace, double d_logit);

// Zeroes floor(pct * E) positions with the smallest |w|; ties prune the lower
// index first. Requires 0 <= pct < 1.
Eigen::VectorXd make_prune_mask(const Eigen::VectorXd& weights, double pct);

}  // namespace moddyn
