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

#include "moddyn/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

#include "moddyn/error.hpp"
#include "moddyn/random.hpp"

namespace moddyn {

double auc_roc(std::span<const double> scores, std::span<const int> labels) {
  if (scores.size() != labels.size()) {
    throw InvalidArgument("auc_roc: scores and labels differ in length");
  }
  const std::size_t n = scores.size();
  std::size_t n_pos = 0;
  for (int y : labels) {
    if (y != 0 && y != 1) throw InvalidArgument("auc_roc: labels must be 0/1");
    n_pos += static_cast<std::size_t>(y);
  }
  const std::size_t n_neg = n - n_pos;
  if (n_pos == 0 || n_neg == 0) {
    throw UndefinedMetric("auc_roc: both classes must be present");
  }

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });

  // Sum of mid-ranks of the positives (Mann-Whitney U).
  double pos_rank_sum = 0.0;
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i;
    while (j + 1 < n && scores[order[j + 1]] == scores[order[i]]) ++j;
    const double mid_rank = 0.5 * static_cast<double>(i + j) + 1.0;
    for (std::size_t k = i; k <= j; ++k) {
      if (labels[order[k]] == 1) pos_rank_sum += mid_rank;
    }
    i = j + 1;
  }
  const double np = static_cast<double>(n_pos);
  const double u = pos_rank_sum - np * (np + 1.0) / 2.0;
  return u / (np * static_cast<double>(n_neg));
}

double f1_macro(std::span<const int> preds, std::span<const int> labels) {
  if (preds.size() != labels.size()) {
    throw InvalidArgument("f1_macro: preds and labels differ in length");
  }
  if (preds.empty()) throw InvalidArgument("f1_macro: empty input");
  double total = 0.0;
  for (int cls : {1, 0}) {
    std::size_t tp = 0, fp = 0, fn = 0;
    for (std::size_t i = 0; i < preds.size(); ++i) {
      const bool p = preds[i] == cls;
      const bool y = labels[i] == cls;
      tp += p && y;
      fp += p && !y;
      fn += !p && y;
    }
    const std::size_t denom = 2 * tp + fp + fn;
    total += denom == 0 ? 0.0 : 2.0 * static_cast<double>(tp) / static_cast<double>(denom);
  }
  return total / 2.0;
}

FRatioMap::Peak FRatioMap::peak() const {
  Peak p;
  p.value = -1.0;
  for (Eigen::Index f = 0; f < values.rows(); ++f) {
    for (Eigen::Index k = 0; k < values.cols(); ++k) {
      if (values(f, k) > p.value) {
        p.value = values(f, k);
        p.feature = f;
        p.bin = k;
      }
    }
  }
  p.frequency_hz = static_cast<double>(p.bin) * mod_bin_hz;
  return p;
}

namespace {

struct Moments {
  Eigen::MatrixXd mean;
  Eigen::MatrixXd var;
};

Moments group_moments(const std::vector<Eigen::MatrixXd>& group) {
  const auto rows = group[0].rows();
  const auto cols = group[0].cols();
  Moments m{Eigen::MatrixXd::Zero(rows, cols), Eigen::MatrixXd::Zero(rows, cols)};
  for (const auto& g : group) {
    if (g.rows() != rows || g.cols() != cols) {
      throw InvalidArgument("f_ratio_map: dynamics shapes differ");
    }
    m.mean += g;
  }
  m.mean /= static_cast<double>(group.size());
  for (const auto& g : group) m.var.array() += (g - m.mean).array().square();
  m.var /= static_cast<double>(group.size());
  return m;
}

}  // namespace

FRatioMap f_ratio_map(const std::vector<Eigen::MatrixXd>& pos_averages,
                      const std::vector<Eigen::MatrixXd>& neg_averages,
                      double mod_bin_hz) {
  if (pos_averages.empty() || neg_averages.empty()) {
    throw InvalidArgument("f_ratio_map: both groups must be non-empty");
  }
  const Moments p = group_moments(pos_averages);
  const Moments n = group_moments(neg_averages);
  if (p.mean.rows() != n.mean.rows() || p.mean.cols() != n.mean.cols()) {
    throw InvalidArgument("f_ratio_map: groups have different shapes");
  }
  Eigen::ArrayXXd ratio = (p.mean - n.mean).array().square() /
                          (p.var.array() + n.var.array() + kFRatioEpsilon);
  ratio = (ratio < 1.0).select(0.0, ratio);

  FRatioMap map;
  map.values = ratio.matrix().transpose();  // K x F -> F x K
  map.mod_bin_hz = mod_bin_hz;
  return map;
}

FRatioMap f_ratio_map(const std::vector<ModulationDynamics>& pos,
                      const std::vector<ModulationDynamics>& neg) {
  if (pos.empty() || neg.empty()) {
    throw InvalidArgument("f_ratio_map: both groups must be non-empty");
  }
  std::vector<Eigen::MatrixXd> pa, na;
  for (const auto& d : pos) pa.push_back(d.time_average());
  for (const auto& d : neg) na.push_back(d.time_average());
  return f_ratio_map(pa, na, pos.front().mod_bin_hz);
}

SparsityReport sparsity(const std::vector<Eigen::VectorXd>& embeddings,
                        double threshold_rel) {
  if (embeddings.empty()) throw InvalidArgument("sparsity: no embeddings");
  SparsityReport r;
  r.threshold_rel = threshold_rel;
  for (const auto& e : embeddings) {
    if (e.size() == 0) throw InvalidArgument("sparsity: empty embedding");
    const double top = e.cwiseAbs().maxCoeff();
    std::size_t below = 0;
    if (top == 0.0) {
      below = static_cast<std::size_t>(e.size());
    } else {
      const double cut = threshold_rel * top;
      for (Eigen::Index i = 0; i < e.size(); ++i) below += std::abs(e[i]) < cut;
    }
    r.per_sample_pct.push_back(100.0 * static_cast<double>(below) /
                               static_cast<double>(e.size()));
  }
  const double n = static_cast<double>(r.per_sample_pct.size());
  r.mean_pct = std::accumulate(r.per_sample_pct.begin(), r.per_sample_pct.end(), 0.0) / n;
  double ss = 0.0;
  for (double v : r.per_sample_pct) ss += (v - r.mean_pct) * (v - r.mean_pct);
  r.std_pct = std::sqrt(ss / n);
  return r;
}

Eigen::VectorXd layer_importance(const ModelParams& params) {
  return softmax(params.weights.layer_logits);
}

LdaClassifier::LdaClassifier(const Eigen::MatrixXd& x,
                             const std::vector<int>& classes, double shrinkage) {
  if (x.rows() != static_cast<Eigen::Index>(classes.size()) || x.rows() == 0) {
    throw InvalidArgument("lda: sample/label count mismatch");
  }
  if (!(shrinkage >= 0.0 && shrinkage <= 1.0)) {
    throw InvalidArgument("lda: shrinkage must be in [0, 1]");
  }
  std::map<int, std::vector<Eigen::Index>> by_class;
  for (std::size_t i = 0; i < classes.size(); ++i) {
    by_class[classes[i]].push_back(static_cast<Eigen::Index>(i));
  }
  const auto d = x.cols();
  const auto n = x.rows();
  const auto c = static_cast<Eigen::Index>(by_class.size());
  if (c < 2) throw InvalidArgument("lda: need at least two classes");

  Eigen::MatrixXd means(c, d);
  Eigen::VectorXd log_prior(c);
  Eigen::MatrixXd scatter = Eigen::MatrixXd::Zero(d, d);
  Eigen::Index row = 0;
  for (const auto& [label, idx] : by_class) {
    labels_.push_back(label);
    Eigen::RowVectorXd mu = Eigen::RowVectorXd::Zero(d);
    for (auto i : idx) mu += x.row(i);
    mu /= static_cast<double>(idx.size());
    means.row(row) = mu;
    for (auto i : idx) {
      const Eigen::RowVectorXd centered = x.row(i) - mu;
      scatter += centered.transpose() * centered;
    }
    log_prior[row] = std::log(static_cast<double>(idx.size()) / static_cast<double>(n));
    ++row;
  }
  scatter /= static_cast<double>(n);
  const double avg_var = scatter.trace() / static_cast<double>(d);
  Eigen::MatrixXd cov = (1.0 - shrinkage) * scatter;
  cov.diagonal().array() += shrinkage * (avg_var > 0.0 ? avg_var : 1.0);

  const Eigen::LDLT<Eigen::MatrixXd> solver(cov);
  if (solver.info() != Eigen::Success) {
    throw InvalidArgument("lda: covariance factorization failed");
  }
  coef_ = solver.solve(means.transpose()).transpose();  // C x d
  intercept_.resize(c);
  for (Eigen::Index k = 0; k < c; ++k) {
    intercept_[k] = -0.5 * coef_.row(k).dot(means.row(k)) + log_prior[k];
  }
}

Eigen::VectorXd LdaClassifier::scores(const Eigen::VectorXd& x) const {
  return coef_ * x + intercept_;
}

int LdaClassifier::predict(const Eigen::VectorXd& x) const {
  Eigen::Index best = 0;
  scores(x).maxCoeff(&best);
  return labels_[static_cast<std::size_t>(best)];
}

SpeakerProbeResult speaker_probe(const std::vector<Eigen::VectorXd>& embeddings,
                                 const std::vector<std::string>& speakers,
                                 double train_frac, std::uint64_t seed,
                                 double shrinkage) {
  if (embeddings.size() != speakers.size() || embeddings.empty()) {
    throw InvalidArgument("speaker_probe: embedding/speaker count mismatch");
  }
  if (!(train_frac > 0.0 && train_frac < 1.0)) {
    throw InvalidArgument("speaker_probe: train_frac must be in (0, 1)");
  }
  std::map<std::string, std::vector<std::size_t>> by_speaker;
  for (std::size_t i = 0; i < speakers.size(); ++i) {
    by_speaker[speakers[i]].push_back(i);
  }
  if (by_speaker.size() < 2) {
    throw InvalidArgument("speaker_probe: need at least two speakers");
  }
  for (const auto& [spk, idx] : by_speaker) {
    if (idx.size() < 2) {
      throw InvalidArgument("speaker_probe: speaker '" + spk + "' has " +
                            std::to_string(idx.size()) +
                            " sample(s); at least 2 are required");
    }
  }

  Rng rng(seed);
  std::vector<std::size_t> train_idx, test_idx;
  std::vector<int> train_cls, test_cls;
  int cls = 0;
  for (auto& [spk, idx] : by_speaker) {
    std::vector<std::size_t> shuffled = idx;
    rng.shuffle(shuffled.begin(), shuffled.end());
    auto n_train = static_cast<std::size_t>(
        std::ceil(train_frac * static_cast<double>(shuffled.size())));
    n_train = std::clamp<std::size_t>(n_train, 1, shuffled.size() - 1);
    for (std::size_t i = 0; i < shuffled.size(); ++i) {
      (i < n_train ? train_idx : test_idx).push_back(shuffled[i]);
      (i < n_train ? train_cls : test_cls).push_back(cls);
    }
    ++cls;
  }

  const auto d = embeddings[0].size();
  Eigen::MatrixXd x(static_cast<Eigen::Index>(train_idx.size()), d);
  for (std::size_t i = 0; i < train_idx.size(); ++i) {
    if (embeddings[train_idx[i]].size() != d) {
      throw InvalidArgument("speaker_probe: embeddings differ in size");
    }
    x.row(static_cast<Eigen::Index>(i)) = embeddings[train_idx[i]].transpose();
  }
  const LdaClassifier lda(x, train_cls, shrinkage);
  std::size_t correct = 0;
  for (std::size_t i = 0; i < test_idx.size(); ++i) {
    correct += lda.predict(embeddings[test_idx[i]]) == test_cls[i];
  }
  SpeakerProbeResult r;
  r.n_train = train_idx.size();
  r.n_test = test_idx.size();
  r.accuracy = static_cast<double>(correct) / static_cast<double>(test_idx.size());
  return r;
}

}  // namespace moddyn
