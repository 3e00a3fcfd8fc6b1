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

#include <gtest/gtest.h>

#include <cmath>

#include "moddyn/analysis.hpp"
#include "moddyn/error.hpp"
#include "test_support.hpp"

namespace moddyn {
namespace {

double auc_oracle(const std::vector<double>& s, const std::vector<int>& y) {
  double wins = 0.0, pairs = 0.0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    for (std::size_t j = 0; j < s.size(); ++j) {
      if (y[i] != 1 || y[j] != 0) continue;
      pairs += 1.0;
      wins += s[i] > s[j] ? 1.0 : (s[i] == s[j] ? 0.5 : 0.0);
    }
  }
  return wins / pairs;
}

double f1_oracle(const std::vector<int>& p, const std::vector<int>& y) {
  double total = 0.0;
  for (int c : {0, 1}) {
    double tp = 0, fp = 0, fn = 0;
    for (std::size_t i = 0; i < p.size(); ++i) {
      if (p[i] == c && y[i] == c) ++tp;
      if (p[i] == c && y[i] != c) ++fp;
      if (p[i] != c && y[i] == c) ++fn;
    }
    total += (2 * tp + fp + fn) > 0 ? 2 * tp / (2 * tp + fp + fn) : 0.0;
  }
  return total / 2.0;
}

TEST(Auc, Examples) {
  EXPECT_EQ(auc_roc(std::vector<double>{0.1, 0.2, 0.8, 0.9}, std::vector<int>{0, 0, 1, 1}), 1.0);
  EXPECT_EQ(auc_roc(std::vector<double>{0.5, 0.5, 0.5}, std::vector<int>{0, 1, 1}), 0.5);
  EXPECT_EQ(auc_roc(std::vector<double>{0.1, 0.4, 0.35, 0.8}, std::vector<int>{0, 0, 1, 1}),
            0.75);
}

TEST(Auc, SingleClassIsUndefined) {
  EXPECT_THROW(auc_roc(std::vector<double>{0.1, 0.2}, std::vector<int>{1, 1}), UndefinedMetric);
  EXPECT_THROW(auc_roc(std::vector<double>{0.1}, std::vector<int>{1, 0}), InvalidArgument);
}

TEST(Auc, MatchesPairCountingOracle) {
  Rng rng(1);
  for (int trial = 0; trial < 1000; ++trial) {
    const std::size_t n = 2 + rng.below(49);
    std::vector<double> s(n);
    std::vector<int> y(n);
    for (std::size_t i = 0; i < n; ++i) {
      s[i] = static_cast<double>(rng.below(8)) / 4.0;  // many ties
      y[i] = static_cast<int>(rng.below(2));
    }
    y[0] = 0;
    y[1] = 1;
    EXPECT_NEAR(auc_roc(s, y), auc_oracle(s, y), 1e-12);
  }
}

TEST(Auc, MonotoneTransformInvariant) {
  Rng rng(2);
  std::vector<double> s(40), t(40);
  std::vector<int> y(40);
  for (int i = 0; i < 40; ++i) {
    s[i] = rng.normal();
    t[i] = std::exp(3.0 * s[i]) + 1.0;
    y[i] = i % 3 == 0;
  }
  EXPECT_EQ(auc_roc(s, y), auc_roc(t, y));
}

TEST(F1, Examples) {
  EXPECT_EQ(f1_macro(std::vector<int>{0, 1, 1, 0}, std::vector<int>{0, 1, 1, 0}), 1.0);
  EXPECT_NEAR(f1_macro(std::vector<int>{1, 1, 1, 1}, std::vector<int>{1, 0, 1, 0}), 1.0 / 3.0,
              1e-15);
  EXPECT_EQ(f1_macro(std::vector<int>{0, 1}, std::vector<int>{1, 0}), 0.0);
  EXPECT_THROW(f1_macro(std::vector<int>{0, 1}, std::vector<int>{1}), InvalidArgument);
}

TEST(F1, MatchesConfusionOracle) {
  Rng rng(3);
  for (int trial = 0; trial < 1000; ++trial) {
    const std::size_t n = 1 + rng.below(50);
    std::vector<int> p(n), y(n);
    for (std::size_t i = 0; i < n; ++i) {
      p[i] = static_cast<int>(rng.below(2));
      y[i] = static_cast<int>(rng.below(2));
    }
    EXPECT_NEAR(f1_macro(p, y), f1_oracle(p, y), 1e-12);
  }
}

TEST(F1, ClassSwapSymmetric) {
  Rng rng(4);
  std::vector<int> p(30), y(30), ps(30), ys(30);
  for (int i = 0; i < 30; ++i) {
    p[i] = static_cast<int>(rng.below(2));
    y[i] = static_cast<int>(rng.below(2));
    ps[i] = 1 - p[i];
    ys[i] = 1 - y[i];
  }
  EXPECT_EQ(f1_macro(p, y), f1_macro(ps, ys));
}

TEST(FRatio, IdenticalGroupsAreZero) {
  Rng rng(5);
  std::vector<Eigen::MatrixXd> g;
  for (int i = 0; i < 4; ++i) g.push_back(Eigen::MatrixXd::Random(5, 3));
  const auto m = f_ratio_map(g, g, 0.125);
  EXPECT_EQ(m.values.rows(), 3);
  EXPECT_EQ(m.values.cols(), 5);
  EXPECT_EQ(m.values.maxCoeff(), 0.0);
}

TEST(FRatio, HandPixel) {
  // Means 0 and 1, population variances 0.25 each: F = 1 / 0.5 = 2.
  std::vector<Eigen::MatrixXd> neg{Eigen::MatrixXd::Constant(1, 1, -0.5),
                                   Eigen::MatrixXd::Constant(1, 1, 0.5)};
  std::vector<Eigen::MatrixXd> pos{Eigen::MatrixXd::Constant(1, 1, 0.5),
                                   Eigen::MatrixXd::Constant(1, 1, 1.5)};
  const auto m = f_ratio_map(pos, neg, 0.125);
  EXPECT_NEAR(m.values(0, 0), 2.0, 1e-9);
}

TEST(FRatio, BelowOneIsZeroed) {
  // Means 0 and 0.8, variances 0.5 each: F = 0.64 -> reported as 0.
  const double s = std::sqrt(0.5);
  std::vector<Eigen::MatrixXd> neg{Eigen::MatrixXd::Constant(1, 1, -s),
                                   Eigen::MatrixXd::Constant(1, 1, s)};
  std::vector<Eigen::MatrixXd> pos{Eigen::MatrixXd::Constant(1, 1, 0.8 - s),
                                   Eigen::MatrixXd::Constant(1, 1, 0.8 + s)};
  EXPECT_EQ(f_ratio_map(pos, neg, 0.125).values(0, 0), 0.0);
}

TEST(FRatio, SymmetricAndPeak) {
  Rng rng(6);
  std::vector<Eigen::MatrixXd> a, b;
  for (int i = 0; i < 6; ++i) {
    Eigen::MatrixXd x(4, 2), z(4, 2);
    for (Eigen::Index k = 0; k < 8; ++k) {
      x.data()[k] = rng.normal();
      z.data()[k] = rng.normal();
    }
    x(3, 1) += 10.0;  // bin 3, feature 1
    a.push_back(x);
    b.push_back(z);
  }
  const auto ab = f_ratio_map(a, b, 0.125);
  const auto ba = f_ratio_map(b, a, 0.125);
  EXPECT_EQ(ab.values, ba.values);
  const auto pk = ab.peak();
  EXPECT_EQ(pk.feature, 1);
  EXPECT_EQ(pk.bin, 3);
  EXPECT_EQ(pk.frequency_hz, 0.375);
}

TEST(FRatio, ShapeMismatchThrows) {
  std::vector<Eigen::MatrixXd> a{Eigen::MatrixXd::Zero(3, 2)};
  std::vector<Eigen::MatrixXd> b{Eigen::MatrixXd::Zero(4, 2)};
  EXPECT_THROW(f_ratio_map(a, b, 0.125), InvalidArgument);
  EXPECT_THROW(f_ratio_map(a, {}, 0.125), InvalidArgument);
}

int brute_sparse(const Eigen::VectorXd& v) {
  double m = 0.0;
  for (Eigen::Index i = 0; i < v.size(); ++i) m = std::max(m, std::abs(v[i]));
  if (m == 0.0) return static_cast<int>(v.size());
  int c = 0;
  for (Eigen::Index i = 0; i < v.size(); ++i) c += std::abs(v[i]) < 0.01 * m;
  return c;
}

TEST(Sparsity, Examples) {
  Eigen::VectorXd v(4);
  v << 1.0, 0.005, 0.5, 0.0;
  EXPECT_EQ(sparsity({v}).mean_pct, 50.0);
  EXPECT_EQ(sparsity({Eigen::VectorXd::Constant(5, 0.3)}).mean_pct, 0.0);
  EXPECT_EQ(sparsity({Eigen::VectorXd::Zero(5)}).mean_pct, 100.0);
}

TEST(Sparsity, BruteForceAgreement) {
  Rng rng(7);
  std::vector<Eigen::VectorXd> batch;
  for (int s = 0; s < 50; ++s) {
    Eigen::VectorXd v(768);
    for (Eigen::Index i = 0; i < 768; ++i) {
      v[i] = std::pow(rng.normal(), 5);  // heavy tails put mass under 1%
    }
    batch.push_back(v);
  }
  const auto rep = sparsity(batch);
  double mean = 0.0;
  for (std::size_t s = 0; s < batch.size(); ++s) {
    const double pct = 100.0 * brute_sparse(batch[s]) / 768.0;
    EXPECT_EQ(rep.per_sample_pct[s], pct);
    mean += pct / 50.0;
  }
  EXPECT_NEAR(rep.mean_pct, mean, 1e-12);
  EXPECT_GT(rep.mean_pct, 0.0);
}

TEST(Sparsity, PositiveScaleInvariant) {
  Rng rng(8);
  std::vector<Eigen::VectorXd> a, b;
  for (int s = 0; s < 10; ++s) {
    Eigen::VectorXd v(64);
    for (Eigen::Index i = 0; i < 64; ++i) v[i] = std::pow(rng.normal(), 3);
    a.push_back(v);
    b.push_back(v * 0.25);  // power-of-two scale keeps the comparison exact
  }
  EXPECT_EQ(sparsity(a).per_sample_pct, sparsity(b).per_sample_pct);
}

TEST(LayerImportance, SoftmaxOfLogits) {
  ModelParams p;
  p.weights.layer_logits = Eigen::VectorXd::Zero(4);
  EXPECT_EQ(layer_importance(p), Eigen::VectorXd::Constant(4, 0.25));
  p.weights.layer_logits.resize(2);
  p.weights.layer_logits << std::log(3.0), 0.0;
  const auto w = layer_importance(p);
  EXPECT_NEAR(w[0], 0.75, 1e-15);
  EXPECT_NEAR(w[1], 0.25, 1e-15);
}

TEST(Lda, ClosedFormTwoClassOracle) {
  // Hand oracle: shared covariance S, discriminant
  // x^T S^-1 (m1 - m0) - 0.5 (m1^T S^-1 m1 - m0^T S^-1 m0) + log(n1 / n0) > 0.
  Rng rng(9);
  const int n0 = 30, n1 = 20;
  Eigen::MatrixXd x(n0 + n1, 2);
  std::vector<int> y;
  for (int i = 0; i < n0 + n1; ++i) {
    const bool one = i >= n0;
    const double a = rng.normal(), b = rng.normal();
    x(i, 0) = (one ? 1.0 : -0.5) + a;
    x(i, 1) = (one ? 0.5 : 0.0) + 0.6 * a + 0.8 * b;
    y.push_back(one ? 1 : 0);
  }
  const Eigen::Vector2d m0 = x.topRows(n0).colwise().mean();
  const Eigen::Vector2d m1 = x.bottomRows(n1).colwise().mean();
  Eigen::Matrix2d s = Eigen::Matrix2d::Zero();
  for (int i = 0; i < n0 + n1; ++i) {
    const Eigen::Vector2d d = x.row(i).transpose() - (i >= n0 ? m1 : m0);
    s += d * d.transpose();
  }
  s /= static_cast<double>(n0 + n1);
  const Eigen::Matrix2d inv = s.inverse();
  const Eigen::Vector2d w = inv * (m1 - m0);
  const double c = -0.5 * (m1.dot(inv * m1) - m0.dot(inv * m0)) +
                   std::log(static_cast<double>(n1) / n0);

  const LdaClassifier lda(x, y, 0.0);
  Rng probe(10);
  for (int i = 0; i < 200; ++i) {
    Eigen::Vector2d q(2.0 * probe.normal(), 2.0 * probe.normal());
    const double g = q.dot(w) + c;
    if (std::abs(g) < 1e-9) continue;
    EXPECT_EQ(lda.predict(q), g > 0.0 ? 1 : 0);
  }
}

TEST(SpeakerProbe, SeparableClusters) {
  std::vector<Eigen::VectorXd> e;
  std::vector<std::string> spk;
  Rng rng(11);
  for (int i = 0; i < 40; ++i) {
    Eigen::VectorXd v(3);
    const double c = i % 2 ? 100.0 : -100.0;
    v << c + rng.normal(), rng.normal(), rng.normal();
    e.push_back(v);
    spk.push_back(i % 2 ? "b" : "a");
  }
  const auto r = speaker_probe(e, spk, 0.10, 1);
  EXPECT_EQ(r.accuracy, 1.0);
  EXPECT_EQ(r.n_train, 4u);  // ceil(0.1 * 20) per speaker
  EXPECT_EQ(r.n_test, 36u);
}

TEST(SpeakerProbe, ChanceOnShuffledLabels) {
  // 5 speakers x 20 samples, 2 train / 18 test each: 90 test decisions.
  const double n_test = 90.0;
  const double sigma = std::sqrt(0.2 * 0.8 / n_test);
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    Rng rng(seed + 50);
    std::vector<Eigen::VectorXd> e;
    std::vector<std::string> spk;
    for (int i = 0; i < 100; ++i) {
      Eigen::VectorXd v(4);
      for (Eigen::Index k = 0; k < 4; ++k) v[k] = rng.normal();
      e.push_back(v);
      spk.push_back("s" + std::to_string(i % 5));
    }
    const auto r = speaker_probe(e, spk, 0.10, seed);
    EXPECT_NEAR(r.accuracy, 0.2, 3.0 * sigma) << "seed " << seed;
  }
}

TEST(SpeakerProbe, OrthogonalInvariance) {
  Rng rng(12);
  const int d = 6;
  std::vector<Eigen::VectorXd> e;
  std::vector<std::string> spk;
  for (int i = 0; i < 60; ++i) {
    Eigen::VectorXd v(d);
    for (int k = 0; k < d; ++k) v[k] = rng.normal() + (k == i % 3 ? 1.5 : 0.0);
    e.push_back(v);
    spk.push_back("s" + std::to_string(i % 3));
  }
  Eigen::MatrixXd a(d, d);
  for (Eigen::Index k = 0; k < a.size(); ++k) a.data()[k] = rng.normal();
  const Eigen::MatrixXd q = a.householderQr().householderQ();
  std::vector<Eigen::VectorXd> rotated;
  for (const auto& v : e) rotated.push_back(q * v);
  const auto r1 = speaker_probe(e, spk, 0.3, 4);
  const auto r2 = speaker_probe(rotated, spk, 0.3, 4);
  EXPECT_NEAR(r1.accuracy, r2.accuracy, 1e-6);

  // Without shrinkage any invertible affine map leaves the decisions alone.
  std::vector<Eigen::VectorXd> affine;
  for (const auto& v : e) affine.push_back(a * v + Eigen::VectorXd::Constant(d, 3.0));
  EXPECT_NEAR(speaker_probe(e, spk, 0.3, 4, 0.0).accuracy,
              speaker_probe(affine, spk, 0.3, 4, 0.0).accuracy, 1e-12);
}

TEST(SpeakerProbe, Errors) {
  std::vector<Eigen::VectorXd> e(3, Eigen::VectorXd::Zero(2));
  try {
    speaker_probe(e, {"a", "a", "lonely"}, 0.1, 0);
    FAIL() << "expected InvalidArgument";
  } catch (const InvalidArgument& ex) {
    EXPECT_NE(std::string(ex.what()).find("lonely"), std::string::npos);
  }
  EXPECT_THROW(speaker_probe(e, {"a", "a", "a"}, 0.1, 0), InvalidArgument);
}

}  // namespace
}  // namespace moddyn
