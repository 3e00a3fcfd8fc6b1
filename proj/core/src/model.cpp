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

#include "moddyn/model.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "moddyn/error.hpp"

namespace moddyn {

namespace {

using Eigen::Index;

std::span<double> view(Eigen::MatrixXd& m) {
  return {m.data(), static_cast<std::size_t>(m.size())};
}
std::span<double> view(Eigen::VectorXd& v) {
  return {v.data(), static_cast<std::size_t>(v.size())};
}

void fill_uniform(Eigen::MatrixXd& m, double bound, Rng& rng) {
  // Column-major fill order is part of the reproducibility contract.
  for (Index i = 0; i < m.size(); ++i) m.data()[i] = rng.uniform(-bound, bound);
}

void fill_uniform(Eigen::VectorXd& v, double bound, Rng& rng) {
  for (Index i = 0; i < v.size(); ++i) v[i] = rng.uniform(-bound, bound);
}

AttentionParams init_attention(std::size_t hidden, std::size_t features,
                               Rng& rng) {
  AttentionParams a;
  a.w.resize(static_cast<Index>(hidden), static_cast<Index>(features));
  fill_uniform(a.w, std::sqrt(1.0 / static_cast<double>(features)), rng);
  a.b = Eigen::VectorXd::Zero(static_cast<Index>(hidden));
  a.v.resize(static_cast<Index>(hidden));
  fill_uniform(a.v, std::sqrt(1.0 / static_cast<double>(hidden)), rng);
  return a;
}

AttentionParams zeros_like(const AttentionParams& a) {
  return {Eigen::MatrixXd::Zero(a.w.rows(), a.w.cols()),
          Eigen::VectorXd::Zero(a.b.size()), Eigen::VectorXd::Zero(a.v.size())};
}

void check_attention(const AttentionParams& a, std::size_t features,
                     const char* name) {
  if (a.w.cols() != static_cast<Index>(features) || a.w.rows() != a.b.size() ||
      a.w.rows() != a.v.size()) {
    throw InvalidArgument(std::string("attention parameters '") + name +
                          "' do not match the feature dimension");
  }
}

}  // namespace

std::string_view to_string(Branches b) {
  switch (b) {
    case Branches::kBoth:
      return "both";
    case Branches::kTemporal:
      return "temporal";
    case Branches::kDynamics:
      return "dynamics";
  }
  return "both";
}

Branches parse_branches(std::string_view s) {
  if (s == "both") return Branches::kBoth;
  if (s == "temporal") return Branches::kTemporal;
  if (s == "dynamics") return Branches::kDynamics;
  throw InvalidArgument("unknown branch selection '" + std::string(s) +
                        "' (expected both, temporal or dynamics)");
}

void ModelConfig::validate() const {
  if (num_layers == 0 || num_features == 0 || attn_hidden == 0 ||
      embed_dim == 0) {
    throw InvalidArgument("model: all dimensions must be positive");
  }
  if (!(dropout >= 0.0 && dropout < 1.0)) {
    throw InvalidArgument("model: dropout must be in [0, 1)");
  }
  if (!(prune_pct >= 0.0 && prune_pct < 1.0)) {
    throw InvalidArgument("model: prune_pct must be in [0, 1)");
  }
  stft.validate();
}

std::vector<std::span<double>> ModelWeights::tensors() {
  return {view(layer_logits),  view(attn_time.w), view(attn_time.b),
          view(attn_time.v),   view(attn_freq.w), view(attn_freq.b),
          view(attn_freq.v),   view(fuse_w),      view(fuse_b),
          view(out_w),         view(out_b)};
}

std::vector<std::span<const double>> ModelWeights::tensors() const {
  auto& self = const_cast<ModelWeights&>(*this);
  std::vector<std::span<const double>> out;
  for (auto s : self.tensors()) out.emplace_back(s.data(), s.size());
  return out;
}

std::vector<std::string> ModelWeights::tensor_names() const {
  return {"layer_logits", "attn_time.w", "attn_time.b", "attn_time.v",
          "attn_freq.w",  "attn_freq.b", "attn_freq.v", "fuse.w",
          "fuse.b",       "out.w",       "out.b"};
}

ModelWeights ModelWeights::zeros_like() const {
  ModelWeights z;
  z.layer_logits = Eigen::VectorXd::Zero(layer_logits.size());
  z.attn_time = moddyn::zeros_like(attn_time);
  z.attn_freq = moddyn::zeros_like(attn_freq);
  z.fuse_w = Eigen::MatrixXd::Zero(fuse_w.rows(), fuse_w.cols());
  z.fuse_b = Eigen::VectorXd::Zero(fuse_b.size());
  z.out_w = Eigen::VectorXd::Zero(out_w.size());
  z.out_b = Eigen::VectorXd::Zero(out_b.size());
  return z;
}

bool ModelWeights::all_finite() const {
  for (auto t : tensors()) {
    for (double x : t) {
      if (!std::isfinite(x)) return false;
    }
  }
  return true;
}

void ModelParams::validate() const {
  config.validate();
  const auto& w = weights;
  const auto e = static_cast<Index>(config.embed_dim);
  if (w.layer_logits.size() != static_cast<Index>(config.num_layers)) {
    throw InvalidArgument("model: layer_logits size differs from num_layers");
  }
  check_attention(w.attn_time, config.num_features, "attn_time");
  check_attention(w.attn_freq, config.num_features, "attn_freq");
  if (w.fuse_w.rows() != e ||
      w.fuse_w.cols() != static_cast<Index>(config.fusion_width()) ||
      w.fuse_b.size() != e || w.out_w.size() != e || w.out_b.size() != 1 ||
      prune_mask.size() != e) {
    throw InvalidArgument("model: fusion/output shapes do not match config");
  }
  for (Index i = 0; i < prune_mask.size(); ++i) {
    if (prune_mask[i] != 0.0 && prune_mask[i] != 1.0) {
      throw InvalidArgument("model: prune mask entries must be 0 or 1");
    }
  }
  if (!w.all_finite()) throw InvalidArgument("model: non-finite parameters");
}

ModelParams init_params(const ModelConfig& cfg) {
  cfg.validate();
  Rng rng(cfg.seed);
  ModelParams p;
  p.config = cfg;
  auto& w = p.weights;
  w.layer_logits = Eigen::VectorXd::Zero(static_cast<Index>(cfg.num_layers));
  w.attn_time = init_attention(cfg.attn_hidden, cfg.num_features, rng);
  w.attn_freq = init_attention(cfg.attn_hidden, cfg.num_features, rng);
  const auto e = static_cast<Index>(cfg.embed_dim);
  const auto width = static_cast<Index>(cfg.fusion_width());
  w.fuse_w.resize(e, width);
  fill_uniform(w.fuse_w, std::sqrt(1.0 / static_cast<double>(width)), rng);
  w.fuse_b = Eigen::VectorXd::Zero(e);
  w.out_w.resize(e);
  fill_uniform(w.out_w, std::sqrt(1.0 / static_cast<double>(e)), rng);
  w.out_b = Eigen::VectorXd::Zero(1);
  p.prune_mask = make_prune_mask(w.out_w, cfg.prune_pct);
  return p;
}

Eigen::VectorXd softmax(const Eigen::VectorXd& logits) {
  if (logits.size() == 0) throw InvalidArgument("softmax of an empty vector");
  const double top = logits.maxCoeff();
  Eigen::VectorXd e = (logits.array() - top).exp();
  return e / e.sum();
}

Eigen::MatrixXd layer_aggregate(const LayeredTemporalRep& rep,
                                const Eigen::VectorXd& layer_logits) {
  if (static_cast<std::size_t>(layer_logits.size()) != rep.num_layers()) {
    throw InvalidArgument("layer_aggregate: " +
                          std::to_string(layer_logits.size()) +
                          " logits for " + std::to_string(rep.num_layers()) +
                          " layers");
  }
  const Eigen::VectorXd w = softmax(layer_logits);
  Eigen::MatrixXd out = w[0] * rep.layers[0];
  for (std::size_t l = 1; l < rep.num_layers(); ++l) {
    out += w[static_cast<Index>(l)] * rep.layers[l];
  }
  return out;
}

Eigen::VectorXd PooledStats::concat() const {
  Eigen::VectorXd out(mean.size() + stddev.size());
  out << mean, stddev;
  return out;
}

PooledStats attentive_stats(const Eigen::MatrixXd& rows,
                            const AttentionParams& attn) {
  if (rows.rows() < 1) throw InvalidArgument("attentive_stats: no rows");
  check_attention(attn, static_cast<std::size_t>(rows.cols()), "pooling");
  PooledStats s;
  Eigen::MatrixXd pre = rows * attn.w.transpose();
  pre.rowwise() += attn.b.transpose();
  s.hidden = pre.array().tanh();
  s.alpha = softmax(s.hidden * attn.v);
  s.mean = rows.transpose() * s.alpha;
  const Eigen::VectorXd second = rows.array().square().matrix().transpose() * s.alpha;
  s.variance = second - s.mean.cwiseProduct(s.mean);
  s.stddev = s.variance.cwiseMax(kVarianceFloor).cwiseSqrt();
  return s;
}

PooledStatsGrad attentive_stats_backward(const Eigen::MatrixXd& rows,
                                         const AttentionParams& attn,
                                         const PooledStats& stats,
                                         const Eigen::VectorXd& d_mean,
                                         const Eigen::VectorXd& d_stddev) {
  const Index f = rows.cols();
  Eigen::VectorXd d_var(f);
  for (Index i = 0; i < f; ++i) {
    d_var[i] = stats.variance[i] > kVarianceFloor
                   ? d_stddev[i] / (2.0 * stats.stddev[i])
                   : 0.0;
  }
  const Eigen::VectorXd d_mean_total = d_mean - 2.0 * stats.mean.cwiseProduct(d_var);

  PooledStatsGrad g;
  // Direct path through the weighted moments.
  g.d_rows = stats.alpha * d_mean_total.transpose();
  g.d_rows += 2.0 * (stats.alpha.asDiagonal() * rows * d_var.asDiagonal());

  // Path through the attention weights.
  const Eigen::VectorXd d_alpha =
      rows * d_mean_total + rows.array().square().matrix() * d_var;
  const double mix = stats.alpha.dot(d_alpha);
  const Eigen::VectorXd d_score =
      stats.alpha.cwiseProduct((d_alpha.array() - mix).matrix());

  g.d_attn.v = stats.hidden.transpose() * d_score;
  Eigen::MatrixXd d_pre = d_score * attn.v.transpose();
  d_pre.array() *= 1.0 - stats.hidden.array().square();
  g.d_attn.w = d_pre.transpose() * rows;
  g.d_attn.b = d_pre.colwise().sum().transpose();
  g.d_rows += d_pre * attn.w;
  return g;
}

Eigen::VectorXd asp_time(const Eigen::MatrixXd& h, const AttentionParams& attn) {
  return attentive_stats(h, attn).concat();
}

Eigen::VectorXd pool_dynamics(const ModulationDynamics& d,
                              const AttentionParams& attn) {
  return attentive_stats(d.time_average(), attn).concat();
}

Eigen::VectorXd draw_dropout_scale(std::size_t size, double rate, Rng& rng) {
  Eigen::VectorXd s(static_cast<Index>(size));
  const double keep = 1.0 / (1.0 - rate);
  for (Index i = 0; i < s.size(); ++i) {
    s[i] = rng.uniform() < rate ? 0.0 : keep;
  }
  return s;
}

ForwardTrace forward_trace(const LayeredTemporalRep& rep,
                           const ModelParams& params,
                           const Eigen::VectorXd& dropout_scale) {
  const ModelConfig& cfg = params.config;
  const ModelWeights& w = params.weights;
  rep.validate();
  if (rep.num_features() != cfg.num_features) {
    throw InvalidArgument("forward: representation has " +
                          std::to_string(rep.num_features()) +
                          " features, model expects " +
                          std::to_string(cfg.num_features));
  }

  ForwardTrace tr;
  tr.layer_weights = softmax(w.layer_logits);
  tr.aggregated = layer_aggregate(rep, w.layer_logits);

  Eigen::VectorXd fused(static_cast<Index>(cfg.fusion_width()));
  Index offset = 0;
  if (cfg.uses_temporal()) {
    tr.temporal = attentive_stats(tr.aggregated, w.attn_time);
    const Eigen::VectorXd t = tr.temporal->concat();
    fused.segment(offset, t.size()) = t;
    offset += t.size();
  }
  if (cfg.uses_dynamics()) {
    const ModulationTransform transform(cfg.stft, rep.frame_rate_hz);
    tr.dyn_average = transform.averaged(tr.aggregated);
    tr.dynamics = attentive_stats(tr.dyn_average, w.attn_freq);
    const Eigen::VectorXd d = tr.dynamics->concat();
    fused.segment(offset, d.size()) = d;
  }
  tr.fused_input = std::move(fused);

  tr.embedding = w.fuse_w * tr.fused_input + w.fuse_b;
  tr.dropout_scale = dropout_scale;
  Eigen::VectorXd pre = tr.embedding;
  if (dropout_scale.size() != 0) {
    if (dropout_scale.size() != pre.size()) {
      throw InvalidArgument("forward: dropout scale size mismatch");
    }
    pre = pre.cwiseProduct(dropout_scale);
  }
  const double slope = cfg.leaky_slope;
  tr.activated = pre.unaryExpr([slope](double x) { return x > 0.0 ? x : slope * x; });
  tr.logit = w.out_w.cwiseProduct(params.prune_mask).dot(tr.activated) + w.out_b[0];
  return tr;
}

ForwardOutput forward(const LayeredTemporalRep& rep, const ModelParams& params,
                      Mode mode, Rng* rng) {
  Eigen::VectorXd scale;
  if (mode == Mode::kTrain) {
    if (rng == nullptr) {
      throw InvalidArgument("forward: train mode needs a random generator");
    }
    scale = draw_dropout_scale(params.config.embed_dim, params.config.dropout,
                               *rng);
  }
  ForwardTrace tr = forward_trace(rep, params, scale);
  return {tr.logit, std::move(tr.embedding)};
}

ModelWeights backward(const LayeredTemporalRep& rep, const ModelParams& params,
                      const ForwardTrace& tr, double d_logit) {
  const ModelConfig& cfg = params.config;
  const ModelWeights& w = params.weights;
  ModelWeights g = w.zeros_like();

  g.out_b[0] = d_logit;
  g.out_w = d_logit * tr.activated.cwiseProduct(params.prune_mask);
  const Eigen::VectorXd d_act = d_logit * w.out_w.cwiseProduct(params.prune_mask);

  Eigen::VectorXd d_embed(d_act.size());
  for (Index i = 0; i < d_act.size(); ++i) {
    const double scale = tr.dropout_scale.size() ? tr.dropout_scale[i] : 1.0;
    const double pre = tr.embedding[i] * scale;
    d_embed[i] = d_act[i] * (pre > 0.0 ? 1.0 : cfg.leaky_slope) * scale;
  }
  g.fuse_b = d_embed;
  g.fuse_w = d_embed * tr.fused_input.transpose();
  const Eigen::VectorXd d_fused = w.fuse_w.transpose() * d_embed;

  const auto f = static_cast<Index>(cfg.num_features);
  Eigen::MatrixXd d_agg = Eigen::MatrixXd::Zero(tr.aggregated.rows(), f);
  Index offset = 0;
  if (cfg.uses_temporal()) {
    const auto pg = attentive_stats_backward(
        tr.aggregated, w.attn_time, *tr.temporal, d_fused.segment(offset, f),
        d_fused.segment(offset + f, f));
    g.attn_time = pg.d_attn;
    d_agg += pg.d_rows;
    offset += 2 * f;
  }
  if (cfg.uses_dynamics()) {
    const auto pg = attentive_stats_backward(
        tr.dyn_average, w.attn_freq, *tr.dynamics, d_fused.segment(offset, f),
        d_fused.segment(offset + f, f));
    g.attn_freq = pg.d_attn;
    const ModulationTransform transform(cfg.stft, rep.frame_rate_hz);
    d_agg += transform.averaged_backward(tr.aggregated, pg.d_rows);
  }

  const Index layers = tr.layer_weights.size();
  Eigen::VectorXd d_weights(layers);
  for (Index l = 0; l < layers; ++l) {
    d_weights[l] = rep.layers[static_cast<std::size_t>(l)].cwiseProduct(d_agg).sum();
  }
  const double mix = tr.layer_weights.dot(d_weights);
  g.layer_logits = tr.layer_weights.cwiseProduct((d_weights.array() - mix).matrix());
  return g;
}

Eigen::VectorXd make_prune_mask(const Eigen::VectorXd& weights, double pct) {
  if (!(pct >= 0.0) || pct >= 1.0) {
    throw InvalidArgument("make_prune_mask: percentage must be in [0, 1)");
  }
  const auto n = static_cast<std::size_t>(weights.size());
  const auto n_pruned = static_cast<std::size_t>(
      std::floor(pct * static_cast<double>(n)));
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return std::abs(weights[static_cast<Index>(a)]) <
           std::abs(weights[static_cast<Index>(b)]);
  });
  Eigen::VectorXd mask = Eigen::VectorXd::Ones(weights.size());
  for (std::size_t i = 0; i < n_pruned; ++i) {
    mask[static_cast<Index>(order[i])] = 0.0;
  }
  return mask;
}

}  // namespace moddyn
