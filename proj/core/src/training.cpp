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

#include "moddyn/training.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include <json.hpp>

#include "moddyn/analysis.hpp"
#include "moddyn/error.hpp"

namespace moddyn {

void AugmentConfig::validate() const {
  if (snr_min_db > snr_max_db) {
    throw InvalidArgument("augment: snr_min_db must be <= snr_max_db");
  }
  if (!(speed_min > 0.0) || speed_min > speed_max) {
    throw InvalidArgument("augment: need 0 < speed_min <= speed_max");
  }
  if (!(rt60_min_s > 0.0) || rt60_min_s > rt60_max_s) {
    throw InvalidArgument("augment: need 0 < rt60_min_s <= rt60_max_s");
  }
  if (prob_noise < 0.0 || prob_noise > 1.0 || prob_reverb < 0.0 ||
      prob_reverb > 1.0) {
    throw InvalidArgument("augment: probabilities must be in [0, 1]");
  }
}

void TrainConfig::validate() const {
  if (epochs < 1) throw InvalidArgument("train: epochs must be >= 1");
  if (batch_size != 1) {
    throw InvalidArgument("train: only batch_size = 1 is supported");
  }
  if (!(lr_end > 0.0) || lr_end > lr_start) {
    throw InvalidArgument("train: need 0 < lr_end <= lr_start");
  }
  if (!(beta1 >= 0.0 && beta1 < 1.0) || !(beta2 >= 0.0 && beta2 < 1.0) ||
      !(adam_eps > 0.0) || weight_decay < 0.0) {
    throw InvalidArgument("train: invalid optimizer constants");
  }
  augment.validate();
}

double sigmoid(double x) {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

double bce_loss(double logit, int label) {
  const double z = (label == 1 ? -1.0 : 1.0) * logit;
  // softplus(z) = max(z, 0) + log1p(exp(-|z|))
  return std::max(z, 0.0) + std::log1p(std::exp(-std::abs(z)));
}

double bce_grad(double logit, int label) {
  return sigmoid(logit) - static_cast<double>(label);
}

double lr_at(std::size_t epoch, const TrainConfig& cfg) {
  if (epoch >= cfg.epochs) {
    throw InvalidArgument("lr_at: epoch " + std::to_string(epoch) +
                          " outside [0, " + std::to_string(cfg.epochs) + ")");
  }
  if (cfg.epochs == 1) return cfg.lr_start;
  const double frac =
      static_cast<double>(epoch) / static_cast<double>(cfg.epochs - 1);
  return cfg.lr_start + (cfg.lr_end - cfg.lr_start) * frac;
}

AdamW::AdamW(const ModelWeights& like, const TrainConfig& cfg)
    : m_(like.zeros_like()),
      v_(like.zeros_like()),
      beta1_(cfg.beta1),
      beta2_(cfg.beta2),
      eps_(cfg.adam_eps),
      weight_decay_(cfg.weight_decay) {}

void AdamW::step(ModelWeights& weights, const ModelWeights& grad, double lr) {
  ++t_;
  const double bc1 = 1.0 - std::pow(beta1_, static_cast<double>(t_));
  const double bc2 = 1.0 - std::pow(beta2_, static_cast<double>(t_));
  auto params = weights.tensors();
  const auto grads = grad.tensors();
  auto ms = m_.tensors();
  auto vs = v_.tensors();
  for (std::size_t t = 0; t < params.size(); ++t) {
    auto p = params[t];
    const auto g = grads[t];
    auto m = ms[t];
    auto v = vs[t];
    for (std::size_t i = 0; i < p.size(); ++i) {
      m[i] = beta1_ * m[i] + (1.0 - beta1_) * g[i];
      v[i] = beta2_ * v[i] + (1.0 - beta2_) * g[i] * g[i];
      const double m_hat = m[i] / bc1;
      const double v_hat = v[i] / bc2;
      p[i] -= lr * weight_decay_ * p[i];
      p[i] -= lr * m_hat / (std::sqrt(v_hat) + eps_);
    }
  }
}

LossAndGrad loss_and_gradient(const LayeredTemporalRep& rep, int label,
                              const ModelParams& params,
                              const Eigen::VectorXd& dropout_scale) {
  const ForwardTrace tr = forward_trace(rep, params, dropout_scale);
  LossAndGrad out;
  out.logit = tr.logit;
  out.loss = bce_loss(tr.logit, label);
  out.grad = backward(rep, params, tr, bce_grad(tr.logit, label));
  return out;
}

Waveform add_noise(const Waveform& w, double snr_db, Rng& rng) {
  Waveform out = w;
  if (w.samples.empty()) return out;
  double p_signal = 0.0;
  for (double s : w.samples) p_signal += s * s;
  p_signal /= static_cast<double>(w.samples.size());
  if (p_signal == 0.0) return out;

  std::vector<double> noise(w.samples.size());
  double p_noise = 0.0;
  for (double& n : noise) {
    n = rng.normal();
    p_noise += n * n;
  }
  p_noise /= static_cast<double>(noise.size());
  const double target = p_signal / std::pow(10.0, snr_db / 10.0);
  const double gain = std::sqrt(target / p_noise);
  for (std::size_t i = 0; i < noise.size(); ++i) out.samples[i] += gain * noise[i];
  return out;
}

Waveform add_reverb(const Waveform& w, double rt60_s, Rng& rng) {
  Waveform out = w;
  if (w.samples.empty()) return out;
  constexpr double kPulsesPerSecond = 2000.0;
  const auto length = static_cast<std::size_t>(
      std::max(1.0, std::round(rt60_s * w.sample_rate)));
  const double grid = std::max(1.0, w.sample_rate / kPulsesPerSecond);
  const double decay = std::log(1000.0) / (rt60_s * w.sample_rate);  // -60 dB

  // Sparse taps: direct path plus one signed pulse per grid cell.
  std::vector<std::pair<std::size_t, double>> taps{{0, 1.0}};
  for (double start = grid; start < static_cast<double>(length); start += grid) {
    const auto pos = static_cast<std::size_t>(start + rng.uniform() * (grid - 1.0));
    if (pos >= length) break;
    const double sign = rng.uniform() < 0.5 ? -1.0 : 1.0;
    taps.emplace_back(pos, sign * std::exp(-decay * static_cast<double>(pos)));
  }

  std::vector<double> wet(w.samples.size(), 0.0);
  for (const auto& [delay, gain] : taps) {
    for (std::size_t i = delay; i < wet.size(); ++i) {
      wet[i] += gain * w.samples[i - delay];
    }
  }
  double e_in = 0.0, e_out = 0.0;
  for (std::size_t i = 0; i < wet.size(); ++i) {
    e_in += w.samples[i] * w.samples[i];
    e_out += wet[i] * wet[i];
  }
  const double gain = e_out > 0.0 ? std::sqrt(e_in / e_out) : 1.0;
  for (std::size_t i = 0; i < wet.size(); ++i) out.samples[i] = gain * wet[i];
  return out;
}

Waveform change_speed(const Waveform& w, double factor) {
  if (!(factor > 0.0)) throw InvalidArgument("change_speed: factor must be > 0");
  if (factor == 1.0) return w;
  Waveform out;
  out.sample_rate = w.sample_rate;
  out.samples = resample_by_ratio(w.samples, 1.0 / factor);
  return out;
}

std::vector<Waveform> augment(const Waveform& w, const AugmentConfig& cfg,
                              Rng& rng) {
  cfg.validate();
  std::vector<Waveform> out{w};
  if (rng.uniform() < cfg.prob_noise) {
    out.push_back(add_noise(w, rng.uniform(cfg.snr_min_db, cfg.snr_max_db), rng));
  }
  if (rng.uniform() < cfg.prob_reverb) {
    out.push_back(add_reverb(w, rng.uniform(cfg.rt60_min_s, cfg.rt60_max_s), rng));
  }
  const double factor = rng.uniform() < 0.5 ? cfg.speed_min : cfg.speed_max;
  out.push_back(change_speed(w, factor));
  return out;
}

std::string EpochRecord::to_json() const {
  nlohmann::json j;
  j["epoch"] = epoch;
  j["lr"] = lr;
  j["train_loss"] = train_loss;
  j["val_loss"] = val_loss;
  j["val_f1"] = val_f1;
  j["stopped_early"] = stopped_early;
  return j.dump();
}

int predict_label(double logit) { return sigmoid(logit) >= 0.5 ? 1 : 0; }

Evaluation evaluate_samples(std::span<const TrainingSample> samples,
                            const ModelParams& params) {
  if (samples.empty()) throw InvalidArgument("evaluate: empty sample set");
  Evaluation ev;
  std::vector<int> preds, labels;
  double loss = 0.0;
  for (const auto& s : samples) {
    const double logit = forward(s.rep, params, Mode::kInfer).logit;
    ev.logits.push_back(logit);
    loss += bce_loss(logit, s.label);
    preds.push_back(predict_label(logit));
    labels.push_back(s.label);
  }
  ev.mean_loss = loss / static_cast<double>(samples.size());
  ev.f1 = f1_macro(preds, labels);
  return ev;
}

namespace {

void check_labels(std::span<const TrainingSample> set, const char* split) {
  for (const auto& s : set) {
    if (s.label != 0 && s.label != 1) {
      throw InvalidArgument(std::string("train: non-binary label in ") + split +
                            " sample '" + s.id + "'");
    }
  }
}

}  // namespace

TrainResult train(std::span<const TrainingSample> train_set,
                  std::span<const TrainingSample> valid_set, ModelParams params,
                  const TrainConfig& cfg, const RepEncoder& encoder,
                  const std::function<void(const EpochRecord&)>& on_epoch) {
  cfg.validate();
  params.validate();
  if (train_set.empty()) throw InvalidArgument("train: empty training split");
  if (valid_set.empty()) throw InvalidArgument("train: empty validation split");
  check_labels(train_set, "train");
  check_labels(valid_set, "valid");

  Rng rng(cfg.seed);
  AdamW opt(params.weights, cfg);
  TrainResult result;
  result.best = params;
  double best_f1 = -1.0;
  double best_loss = 0.0;
  std::size_t stale = 0;

  std::vector<std::size_t> order(train_set.size());
  std::iota(order.begin(), order.end(), std::size_t{0});

  auto step_on = [&](const LayeredTemporalRep& rep, const TrainingSample& s,
                     std::size_t epoch, double lr) {
    const Eigen::VectorXd scale = draw_dropout_scale(
        params.config.embed_dim, params.config.dropout, rng);
    LossAndGrad lg = loss_and_gradient(rep, s.label, params, scale);
    if (!std::isfinite(lg.loss) || !lg.grad.all_finite()) {
      std::ostringstream msg;
      msg << "train: non-finite loss or gradient at epoch " << epoch + 1
          << ", sample '" << s.id << "' (logit " << lg.logit << ")";
      throw TrainingError(msg.str());
    }
    opt.step(params.weights, lg.grad, lr);
    return lg.loss;
  };

  for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
    const double lr = lr_at(epoch, cfg);
    rng.shuffle(order.begin(), order.end());
    double loss_sum = 0.0;
    std::size_t n_steps = 0;
    for (std::size_t idx : order) {
      const TrainingSample& s = train_set[idx];
      loss_sum += step_on(s.rep, s, epoch, lr);
      ++n_steps;
      if (cfg.augment.enabled && s.waveform && encoder) {
        const auto copies = augment(*s.waveform, cfg.augment, rng);
        for (std::size_t c = 1; c < copies.size(); ++c) {
          loss_sum += step_on(encoder(copies[c]), s, epoch, lr);
          ++n_steps;
        }
      }
    }

    const Evaluation val = evaluate_samples(valid_set, params);
    EpochRecord rec;
    rec.epoch = epoch + 1;
    rec.lr = lr;
    rec.train_loss = loss_sum / static_cast<double>(n_steps);
    rec.val_loss = val.mean_loss;
    rec.val_f1 = val.f1;

    const bool improved = val.f1 > best_f1;
    if (improved || (val.f1 == best_f1 && val.mean_loss < best_loss)) {
      best_f1 = val.f1;
      best_loss = val.mean_loss;
      result.best = params;
      result.best_epoch = epoch + 1;
    }
    if (epoch + 1 > cfg.warmup_epochs) stale = improved ? 0 : stale + 1;
    if (cfg.early_stop && stale >= cfg.patience && epoch + 1 < cfg.epochs) {
      rec.stopped_early = true;
      result.stopped_early = true;
    }
    result.log.push_back(rec);
    if (on_epoch) on_epoch(rec);
    if (rec.stopped_early) break;
  }
  return result;
}

}  // namespace moddyn
