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
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "moddyn/dsp.hpp"
#include "moddyn/encoders.hpp"
#include "moddyn/model.hpp"
#include "moddyn/random.hpp"

namespace moddyn {

struct AugmentConfig {
  bool enabled = false;
  double prob_noise = 1.0;
  double prob_reverb = 1.0;
  double snr_min_db = 0.0;
  double snr_max_db = 15.0;
  double speed_min = 0.95;
  double speed_max = 1.05;
  double rt60_min_s = 0.2;
  double rt60_max_s = 0.8;

  void validate() const;
};

struct TrainConfig {
  std::size_t epochs = 30;
  std::size_t batch_size = 1;
  double lr_start = 1e-4;
  double lr_end = 1e-5;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double adam_eps = 1e-8;
  double weight_decay = 0.01;
  bool early_stop = true;
  std::size_t warmup_epochs = 2;  // epochs before patience counting starts
  std::size_t patience = 3;
  AugmentConfig augment;
  std::uint64_t seed = 0;

  void validate() const;
};

// log(1 + exp(-(2 y - 1) * logit)), evaluated without overflow.
double bce_loss(double logit, int label);
// d bce / d logit = sigmoid(logit) - label.
double bce_grad(double logit, int label);
double sigmoid(double x);

// Linear interpolation from lr_start (epoch 0) to lr_end (last epoch).
double lr_at(std::size_t epoch, const TrainConfig& cfg);

// Adam with decoupled weight decay.
class AdamW {
 public:
  AdamW(const ModelWeights& like, const TrainConfig& cfg);

  void step(ModelWeights& weights, const ModelWeights& grad, double lr);
  std::size_t steps() const { return t_; }

 private:
  ModelWeights m_;
  ModelWeights v_;
  double beta1_, beta2_, eps_, weight_decay_;
  std::size_t t_ = 0;
};

struct LossAndGrad {
  double loss = 0.0;
  double logit = 0.0;
  ModelWeights grad;
};

// BCE loss of one utterance and its exact gradient. An empty dropout_scale
// evaluates the network in inference mode.
LossAndGrad loss_and_gradient(const LayeredTemporalRep& rep, int label,
                              const ModelParams& params,
                              const Eigen::VectorXd& dropout_scale = {});

// White Gaussian noise scaled to the requested SNR against the signal power.
Waveform add_noise(const Waveform& w, double snr_db, Rng& rng);
// Convolution with a sparse exponentially decaying (velvet-noise) impulse
// response reaching -60 dB after rt60_s; output keeps the input length and RMS.
Waveform add_reverb(const Waveform& w, double rt60_s, Rng& rng);
// Speed change by resampling: length becomes round(len / factor).
Waveform change_speed(const Waveform& w, double factor);

// [original, noisy?, reverberant?, speed-perturbed] with the optional copies
// drawn according to prob_noise / prob_reverb.
std::vector<Waveform> augment(const Waveform& w, const AugmentConfig& cfg,
                              Rng& rng);

struct TrainingSample {
  std::string id;
  LayeredTemporalRep rep;
  int label = 0;
  // Needed only for augmentation.
  std::optional<Waveform> waveform;
};

// Turns an (augmented) waveform into a model input.
using RepEncoder = std::function<LayeredTemporalRep(const Waveform&)>;

struct EpochRecord {
  std::size_t epoch = 0;  // 1-based
  double lr = 0.0;
  double train_loss = 0.0;
  double val_loss = 0.0;
  double val_f1 = 0.0;
  bool stopped_early = false;

  std::string to_json() const;
};

struct TrainResult {
  ModelParams best;
  std::vector<EpochRecord> log;
  std::size_t best_epoch = 0;
  bool stopped_early = false;
};

struct Evaluation {
  std::vector<double> logits;
  double mean_loss = 0.0;
  double f1 = 0.0;
};

// Inference-mode logits, mean BCE and macro F1 at the 0.5 probability cut.
Evaluation evaluate_samples(std::span<const TrainingSample> samples,
                            const ModelParams& params);

int predict_label(double logit);

// Batch-1 AdamW training with a linear learning-rate schedule. After each
// epoch the validation macro F1 is measured; once warmup_epochs have passed,
// training stops after `patience` consecutive epochs without an F1
// improvement. Returns the best-validation parameters (highest F1, lower
// validation loss among equals).
TrainResult train(std::span<const TrainingSample> train_set,
                  std::span<const TrainingSample> valid_set,
                  ModelParams params, const TrainConfig& cfg,
                  const RepEncoder& encoder = {},
                  const std::function<void(const EpochRecord&)>& on_epoch = {});

}  // namespace moddyn
