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

#include "moddyn/config.hpp"

#include <charconv>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

#include "moddyn/error.hpp"

namespace moddyn {

namespace {

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::string fmt_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

double parse_double(std::string_view v) {
  double out = 0.0;
  const auto res = std::from_chars(v.data(), v.data() + v.size(), out);
  if (res.ec != std::errc() || res.ptr != v.data() + v.size()) {
    throw InvalidArgument("expected a number, got '" + std::string(v) + "'");
  }
  return out;
}

std::uint64_t parse_uint(std::string_view v) {
  std::uint64_t out = 0;
  const auto res = std::from_chars(v.data(), v.data() + v.size(), out);
  if (res.ec != std::errc() || res.ptr != v.data() + v.size()) {
    throw InvalidArgument("expected a non-negative integer, got '" +
                          std::string(v) + "'");
  }
  return out;
}

bool parse_bool(std::string_view v) {
  if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
  if (v == "false" || v == "0" || v == "no" || v == "off") return false;
  throw InvalidArgument("expected a boolean, got '" + std::string(v) + "'");
}

void expect_choice(std::string_view v, std::string_view allowed) {
  if (v != allowed) {
    throw InvalidArgument("unsupported value '" + std::string(v) +
                          "' (only '" + std::string(allowed) + "')");
  }
}

struct Field {
  std::function<void(RunConfig&, std::string_view)> set;
  std::function<std::string(const RunConfig&)> get;
};

template <typename T>
Field double_field(T RunConfig::*group, double T::*member) {
  return {[=](RunConfig& c, std::string_view v) { (c.*group).*member = parse_double(v); },
          [=](const RunConfig& c) { return fmt_double((c.*group).*member); }};
}

template <typename T>
Field size_field(T RunConfig::*group, std::size_t T::*member) {
  return {[=](RunConfig& c, std::string_view v) {
            (c.*group).*member = static_cast<std::size_t>(parse_uint(v));
          },
          [=](const RunConfig& c) { return std::to_string((c.*group).*member); }};
}

Field augment_double(double AugmentConfig::*member) {
  return {[=](RunConfig& c, std::string_view v) { c.train.augment.*member = parse_double(v); },
          [=](const RunConfig& c) { return fmt_double(c.train.augment.*member); }};
}

// Ordered so that to_config_text is stable.
const std::vector<std::pair<std::string, Field>>& fields() {
  static const std::vector<std::pair<std::string, Field>> table = {
      // training
      {"batch_size", size_field(&RunConfig::train, &TrainConfig::batch_size)},
      {"lr_scheduler", {[](RunConfig&, std::string_view v) { expect_choice(v, "linear"); },
                        [](const RunConfig&) { return std::string("linear"); }}},
      {"lr_start", double_field(&RunConfig::train, &TrainConfig::lr_start)},
      {"lr_end", double_field(&RunConfig::train, &TrainConfig::lr_end)},
      {"epochs", size_field(&RunConfig::train, &TrainConfig::epochs)},
      {"optimizer", {[](RunConfig&, std::string_view v) { expect_choice(v, "adamw"); },
                     [](const RunConfig&) { return std::string("adamw"); }}},
      {"beta1", double_field(&RunConfig::train, &TrainConfig::beta1)},
      {"beta2", double_field(&RunConfig::train, &TrainConfig::beta2)},
      {"adam_eps", double_field(&RunConfig::train, &TrainConfig::adam_eps)},
      {"weight_decay", double_field(&RunConfig::train, &TrainConfig::weight_decay)},
      {"early_stop", {[](RunConfig& c, std::string_view v) { c.train.early_stop = parse_bool(v); },
                      [](const RunConfig& c) { return std::string(c.train.early_stop ? "true" : "false"); }}},
      {"limit_start", size_field(&RunConfig::train, &TrainConfig::warmup_epochs)},
      {"limit_stop", size_field(&RunConfig::train, &TrainConfig::patience)},
      {"seed", {[](RunConfig& c, std::string_view v) {
                  c.train.seed = parse_uint(v);
                  c.model.seed = c.train.seed;
                },
                [](const RunConfig& c) { return std::to_string(c.train.seed); }}},
      // model
      {"window_ms", {[](RunConfig& c, std::string_view v) { c.model.stft.window_ms = parse_double(v); },
                     [](const RunConfig& c) { return fmt_double(c.model.stft.window_ms); }}},
      {"hop_ms", {[](RunConfig& c, std::string_view v) { c.model.stft.hop_ms = parse_double(v); },
                  [](const RunConfig& c) { return fmt_double(c.model.stft.hop_ms); }}},
      {"n_fft", {[](RunConfig& c, std::string_view v) { c.model.stft.n_fft = static_cast<int>(parse_uint(v)); },
                 [](const RunConfig& c) { return std::to_string(c.model.stft.n_fft); }}},
      {"window_type", {[](RunConfig&, std::string_view v) { expect_choice(v, "hamming"); },
                       [](const RunConfig&) { return std::string("hamming"); }}},
      {"pad_type", {[](RunConfig&, std::string_view v) { expect_choice(v, "zero"); },
                    [](const RunConfig&) { return std::string("zero"); }}},
      {"dropout", double_field(&RunConfig::model, &ModelConfig::dropout)},
      {"prune_pct", double_field(&RunConfig::model, &ModelConfig::prune_pct)},
      {"leaky_slope", double_field(&RunConfig::model, &ModelConfig::leaky_slope)},
      {"embed_dim", size_field(&RunConfig::model, &ModelConfig::embed_dim)},
      {"attn_hidden", size_field(&RunConfig::model, &ModelConfig::attn_hidden)},
      {"num_layers", size_field(&RunConfig::model, &ModelConfig::num_layers)},
      {"num_features", size_field(&RunConfig::model, &ModelConfig::num_features)},
      {"branches", {[](RunConfig& c, std::string_view v) { c.model.branches = parse_branches(v); },
                    [](const RunConfig& c) { return std::string(to_string(c.model.branches)); }}},
      // data augmentation
      {"augment", {[](RunConfig& c, std::string_view v) { c.train.augment.enabled = parse_bool(v); },
                   [](const RunConfig& c) { return std::string(c.train.augment.enabled ? "true" : "false"); }}},
      {"prob_noise", augment_double(&AugmentConfig::prob_noise)},
      {"prob_reverb", augment_double(&AugmentConfig::prob_reverb)},
      {"snr_min", augment_double(&AugmentConfig::snr_min_db)},
      {"snr_max", augment_double(&AugmentConfig::snr_max_db)},
      {"speed_min", augment_double(&AugmentConfig::speed_min)},
      {"speed_max", augment_double(&AugmentConfig::speed_max)},
      {"rt60_min", augment_double(&AugmentConfig::rt60_min_s)},
      {"rt60_max", augment_double(&AugmentConfig::rt60_max_s)},
      // front end
      {"n_mels", {[](RunConfig& c, std::string_view v) { c.n_mels = static_cast<int>(parse_uint(v)); },
                  [](const RunConfig& c) { return std::to_string(c.n_mels); }}},
      {"target_rate", {[](RunConfig& c, std::string_view v) { c.preprocess.target_rate = static_cast<int>(parse_uint(v)); },
                       [](const RunConfig& c) { return std::to_string(c.preprocess.target_rate); }}},
      {"max_duration_s", double_field(&RunConfig::preprocess, &PreprocessConfig::max_duration_s)},
      {"min_duration_s", double_field(&RunConfig::preprocess, &PreprocessConfig::min_duration_s)},
  };
  return table;
}

}  // namespace

void RunConfig::validate() const {
  model.validate();
  train.validate();
  preprocess.validate();
  if (n_mels < 1) throw InvalidArgument("config: n_mels must be >= 1");
}

RunConfig parse_config(std::string_view text, std::string_view source) {
  std::map<std::string_view, const Field*> lookup;
  for (const auto& [name, field] : fields()) lookup[name] = &field;

  RunConfig cfg;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto end = text.find('\n', pos);
    std::string_view line =
        text.substr(pos, end == std::string_view::npos ? text.size() - pos : end - pos);
    pos = end == std::string_view::npos ? text.size() + 1 : end + 1;
    ++line_no;

    if (const auto hash = line.find('#'); hash != std::string_view::npos) {
      line = line.substr(0, hash);
    }
    line = trim(line);
    if (line.empty()) continue;

    const std::string where = std::string(source) + ":" + std::to_string(line_no);
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw FormatError(where + ": expected 'key = value'");
    }
    const auto key = trim(line.substr(0, eq));
    const auto value = trim(line.substr(eq + 1));
    const auto it = lookup.find(key);
    if (it == lookup.end()) {
      throw FormatError(where + ": unknown key '" + std::string(key) + "'");
    }
    try {
      it->second->set(cfg, value);
    } catch (const InvalidArgument& e) {
      throw FormatError(where + ": " + std::string(key) + ": " + e.what());
    }
  }
  try {
    cfg.validate();
  } catch (const InvalidArgument& e) {
    throw FormatError(std::string(source) + ": " + e.what());
  }
  return cfg;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str(), path.string());
}

std::string to_config_text(const RunConfig& cfg) {
  std::string out;
  for (const auto& [name, field] : fields()) {
    out += name + " = " + field.get(cfg) + "\n";
  }
  return out;
}

}  // namespace moddyn
