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

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "moddyn/dynamics.hpp"
#include "moddyn/model.hpp"

namespace moddyn {

// Rank-based ROC AUC; tied scores earn half credit. For a binary task the
// per-class AUCs coincide, so this is also the macro AUC.
// Throws UndefinedMetric unless both classes are present.
double auc_roc(std::span<const double> scores, std::span<const int> labels);

// Unweighted mean of the F1 of class 1 and class 0. A class that is neither
// predicted nor present scores 0.
double f1_macro(std::span<const int> preds, std::span<const int> labels);

inline constexpr double kFRatioEpsilon = 1e-12;

// Fisher ratio per (feature, modulation bin); entries below 1 are zeroed.
struct FRatioMap {
  Eigen::MatrixXd values;  // F x K
  double mod_bin_hz = 0.0;

  struct Peak {
    Eigen::Index feature = 0;
    Eigen::Index bin = 0;
    double value = 0.0;
    double frequency_hz = 0.0;
  };
  // Global maximum; the first occurrence in (feature, bin) order wins ties.
  Peak peak() const;
};

// (mu_pos - mu_neg)^2 / (var_pos + var_neg + eps) per pixel, with population
// variances over the time-averaged K x F dynamics of each group.
FRatioMap f_ratio_map(const std::vector<Eigen::MatrixXd>& pos_averages,
                      const std::vector<Eigen::MatrixXd>& neg_averages,
                      double mod_bin_hz);
FRatioMap f_ratio_map(const std::vector<ModulationDynamics>& pos,
                      const std::vector<ModulationDynamics>& neg);

inline constexpr double kSparsityThreshold = 0.01;

struct SparsityReport {
  double mean_pct = 0.0;
  double std_pct = 0.0;  // population std over samples
  double threshold_rel = kSparsityThreshold;
  std::vector<double> per_sample_pct;
};

// Percentage of components with |v| < threshold_rel * max|v| per sample; an
// all-zero sample counts as fully sparse.
SparsityReport sparsity(const std::vector<Eigen::VectorXd>& embeddings,
                        double threshold_rel = kSparsityThreshold);

// Softmax of the learned layer logits.
Eigen::VectorXd layer_importance(const ModelParams& params);

// Multi-class linear discriminant with a shared covariance shrunk toward a
// scaled identity: (1 - lambda) S + lambda (tr(S) / d) I.
class LdaClassifier {
 public:
  LdaClassifier(const Eigen::MatrixXd& x, const std::vector<int>& classes,
                double shrinkage);

  int predict(const Eigen::VectorXd& x) const;
  Eigen::VectorXd scores(const Eigen::VectorXd& x) const;
  const std::vector<int>& classes() const { return labels_; }

 private:
  std::vector<int> labels_;
  Eigen::MatrixXd coef_;       // C x d : Sigma^-1 mu_c
  Eigen::VectorXd intercept_;  // C
};

inline constexpr double kProbeShrinkage = 1e-3;

struct SpeakerProbeResult {
  double accuracy = 0.0;
  std::size_t n_train = 0;
  std::size_t n_test = 0;
};

// Stratified per-speaker split (ceil(train_frac * n), at least 1 and at most
// n - 1 per speaker), LDA on the train part, accuracy on the rest.
SpeakerProbeResult speaker_probe(const std::vector<Eigen::VectorXd>& embeddings,
                                 const std::vector<std::string>& speakers,
                                 double train_frac, std::uint64_t seed,
                                 double shrinkage = kProbeShrinkage);

}  // namespace moddyn
