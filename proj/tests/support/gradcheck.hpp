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

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "moddyn/model.hpp"
#include "moddyn/training.hpp"

namespace moddyn::testing {

struct TensorCheck {
  std::string name;
  double rel_error = 0.0;  // ||analytic - numeric|| / max(||analytic||, ||numeric||)
  double norm = 0.0;
};

// Central finite differences of the BCE loss against every weight.
inline std::vector<TensorCheck> gradient_check(const LayeredTemporalRep& rep,
                                               int label, ModelParams params,
                                               const Eigen::VectorXd& dropout_scale,
                                               double step = 1e-4) {
  const LossAndGrad lg = loss_and_gradient(rep, label, params, dropout_scale);
  const auto analytic = lg.grad.tensors();
  auto weights = params.weights.tensors();
  const auto names = params.weights.tensor_names();
  std::vector<TensorCheck> out;
  for (std::size_t t = 0; t < weights.size(); ++t) {
    double diff2 = 0.0, a2 = 0.0, n2 = 0.0;
    for (std::size_t i = 0; i < weights[t].size(); ++i) {
      const double orig = weights[t][i];
      weights[t][i] = orig + step;
      const double up = loss_and_gradient(rep, label, params, dropout_scale).loss;
      weights[t][i] = orig - step;
      const double down = loss_and_gradient(rep, label, params, dropout_scale).loss;
      weights[t][i] = orig;
      const double num = (up - down) / (2.0 * step);
      const double a = analytic[t][i];
      diff2 += (a - num) * (a - num);
      a2 += a * a;
      n2 += num * num;
    }
    const double denom = std::max(std::sqrt(a2), std::sqrt(n2));
    out.push_back({names[t], denom > 0.0 ? std::sqrt(diff2) / denom : 0.0, std::sqrt(a2)});
  }
  return out;
}

// Tiny model with both branches for gradient checks.
inline ModelConfig gradcheck_config(std::uint64_t seed) {
  ModelConfig cfg;
  cfg.num_layers = 2;
  cfg.num_features = 8;
  cfg.attn_hidden = 8;
  cfg.embed_dim = 16;
  cfg.seed = seed;
  cfg.prune_pct = 0.25;
  return cfg;
}

inline LayeredTemporalRep gradcheck_rep(std::uint64_t seed) {
  Rng rng(seed * 7919 + 1);
  LayeredTemporalRep rep;
  for (int l = 0; l < 2; ++l) {
    Eigen::MatrixXd m(20, 8);
    for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = 0.5 * rng.normal();
    rep.layers.push_back(m);
  }
  return rep;
}

// Non-trivial starting point: random layer logits and biases as well.
inline ModelParams gradcheck_params(std::uint64_t seed) {
  ModelParams p = init_params(gradcheck_config(seed));
  Rng rng(seed + 100);
  for (Eigen::Index i = 0; i < p.weights.layer_logits.size(); ++i) {
    p.weights.layer_logits[i] = rng.normal();
  }
  for (Eigen::Index i = 0; i < p.weights.fuse_b.size(); ++i) {
    p.weights.fuse_b[i] = 0.1 * rng.normal();
  }
  for (auto* a : {&p.weights.attn_time, &p.weights.attn_freq}) {
    for (Eigen::Index i = 0; i < a->b.size(); ++i) a->b[i] = 0.5 * rng.normal();
  }
  p.weights.out_b[0] = 0.05;
  return p;
}

}  // namespace moddyn::testing
