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

#include "moddyn/cli.hpp"

#include <charconv>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "moddyn/analysis.hpp"
#include "moddyn/checkpoint.hpp"
#include "moddyn/config.hpp"
#include "moddyn/error.hpp"
#include "moddyn/manifest.hpp"
#include "moddyn/pipeline.hpp"
#include "moddyn/synthetic.hpp"

namespace moddyn::cli {

namespace fs = std::filesystem;
using json = nlohmann::json;

namespace {

std::string fmt_double(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

void write_text(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw IoError("cannot open " + path.string() + " for writing");
  f << text;
  if (!f) throw IoError("write failure on " + path.string());
}

SpeakerCheck parse_speaker_check(const std::string& s) {
  if (s == "ignore") return SpeakerCheck::kIgnore;
  if (s == "strict") return SpeakerCheck::kStrict;
  return SpeakerCheck::kWarn;
}

DatasetManifest open_manifest(const fs::path& path, const std::string& check,
                              std::ostream& err) {
  auto m = parse_manifest(path, parse_speaker_check(check));
  for (const auto& w : m.warnings) err << "warning: " << w << '\n';
  return m;
}

std::optional<Split> parse_split_filter(const std::string& s) {
  if (s == "train") return Split::kTrain;
  if (s == "valid") return Split::kValid;
  if (s == "test") return Split::kTest;
  return std::nullopt;  // all
}

std::vector<const ManifestRecord*> select(const DatasetManifest& m,
                                          const std::string& split) {
  const auto s = parse_split_filter(split);
  std::vector<const ManifestRecord*> out;
  for (const auto& r : m.records) {
    if (!s || r.split == *s) out.push_back(&r);
  }
  return out;
}

RunConfig config_of(const Checkpoint& c) {
  RunConfig cfg = c.config;
  cfg.model = c.params.config;
  return cfg;
}

std::vector<Eigen::VectorXd> embed_records(
    const Checkpoint& ckpt, const DatasetManifest& m,
    const std::vector<const ManifestRecord*>& records) {
  const RunConfig cfg = config_of(ckpt);
  std::vector<Eigen::VectorXd> out;
  out.reserve(records.size());
  for (const auto* r : records) {
    const auto rep = load_representation(m, *r, cfg);
    out.push_back(forward(rep, ckpt.params, Mode::kInfer).embedding);
  }
  return out;
}

// Embedding manifests (from `extract`) hold WRX1 tensors with L = T = 1.
std::vector<Eigen::VectorXd> load_embedding_manifest(
    const DatasetManifest& m, const std::vector<const ManifestRecord*>& records) {
  std::vector<Eigen::VectorXd> out;
  for (const auto* r : records) {
    const auto rep = load_wrx1(m.resolve(*r));
    if (rep.num_layers() != 1 || rep.num_frames() != 1) {
      throw FormatError("record '" + r->id + "' is not an embedding (expected L = T = 1)");
    }
    out.push_back(rep.layers[0].row(0).transpose());
  }
  return out;
}

// ---------------------------------------------------------------- commands

struct TrainArgs {
  std::string config, manifest, out, log, speakers = "warn";
};

int cmd_train(const TrainArgs& a, std::ostream& out, std::ostream& err) {
  const RunConfig cfg = load_config(a.config);
  const auto m = open_manifest(a.manifest, a.speakers, err);
  const bool augment = cfg.train.augment.enabled;
  const auto train_set = load_samples(m, Split::kTrain, cfg, augment);
  const auto valid_set = load_samples(m, Split::kValid, cfg);
  if (train_set.empty()) throw FormatError(a.manifest + ": train split is empty");
  if (valid_set.empty()) throw FormatError(a.manifest + ": valid split is empty");

  std::ostringstream log;
  const auto result =
      train(train_set, valid_set, init_params(cfg.model), cfg.train,
            augment ? make_encoder(cfg) : RepEncoder{},
            [&](const EpochRecord& rec) {
              const auto line = rec.to_json();
              log << line << '\n';
              out << line << '\n';
            });
  save_checkpoint({cfg, result.best}, a.out);
  if (!a.log.empty()) write_text(a.log, log.str());
  err << "best epoch " << result.best_epoch << ", checkpoint " << a.out << '\n';
  return kExitOk;
}

struct EvalArgs {
  std::string ckpt, manifest, out, speakers = "ignore";
};

int cmd_evaluate(const EvalArgs& a, std::ostream& out, std::ostream& err) {
  const auto ckpt = load_checkpoint(a.ckpt);
  const auto m = open_manifest(a.manifest, a.speakers, err);
  const RunConfig cfg = config_of(ckpt);
  json report = json::object();
  for (Split s : {Split::kTrain, Split::kValid, Split::kTest}) {
    const auto samples = load_samples(m, s, cfg);
    if (samples.empty()) continue;
    const auto ev = evaluate_samples(samples, ckpt.params);
    std::vector<int> labels;
    for (const auto& x : samples) labels.push_back(x.label);
    json j;
    j["n"] = samples.size();
    j["f1"] = ev.f1;
    j["loss"] = ev.mean_loss;
    try {
      j["auc"] = auc_roc(ev.logits, labels);
    } catch (const UndefinedMetric&) {
      j["auc"] = nullptr;
    }
    report[std::string(to_string(s))] = j;
  }
  const auto text = report.dump();
  out << text << '\n';
  if (!a.out.empty()) write_text(a.out, text + "\n");
  return kExitOk;
}

struct ExtractArgs {
  std::string ckpt, manifest, out, split = "all";
};

int cmd_extract(const ExtractArgs& a, std::ostream& out, std::ostream& err) {
  const auto ckpt = load_checkpoint(a.ckpt);
  const auto m = open_manifest(a.manifest, "ignore", err);
  const auto records = select(m, a.split);
  const auto emb = embed_records(ckpt, m, records);
  const fs::path dir(a.out);
  fs::create_directories(dir);
  DatasetManifest index;
  index.base_dir = dir;
  for (std::size_t i = 0; i < records.size(); ++i) {
    LayeredTemporalRep rep;
    rep.layers.push_back(emb[i].transpose());
    rep.frame_rate_hz = 1.0;
    ManifestRecord r = *records[i];
    r.path = r.id + ".wrx1";
    write_wrx1(rep, dir / r.path);
    index.records.push_back(std::move(r));
  }
  write_manifest(index, dir / "embeddings.csv");
  out << "wrote " << records.size() << " embeddings to " << (dir / "embeddings.csv").string()
      << '\n';
  return kExitOk;
}

struct FRatioArgs {
  std::string ckpt, manifest, out, split = "all";
};

int cmd_fratio(const FRatioArgs& a, std::ostream& out, std::ostream& err) {
  const auto ckpt = load_checkpoint(a.ckpt);
  const auto m = open_manifest(a.manifest, "ignore", err);
  const RunConfig cfg = config_of(ckpt);
  std::vector<Eigen::MatrixXd> pos, neg;
  std::optional<ModulationTransform> mt;
  for (const auto* r : select(m, a.split)) {
    const auto rep = load_representation(m, *r, cfg);
    if (!mt) mt.emplace(cfg.model.stft, rep.frame_rate_hz);
    const auto h = layer_aggregate(rep, ckpt.params.weights.layer_logits);
    (r->label == 1 ? pos : neg).push_back(mt->averaged(h));
  }
  if (pos.empty() || neg.empty()) {
    throw FormatError(a.manifest + ": F-ratio needs both classes in the selection");
  }
  const auto map = f_ratio_map(pos, neg, mt->mod_bin_hz());
  std::ostringstream tsv;
  tsv << "feature\tfreq_hz\tvalue\n";
  for (Eigen::Index f = 0; f < map.values.rows(); ++f) {
    for (Eigen::Index k = 0; k < map.values.cols(); ++k) {
      tsv << f << '\t' << fmt_double(static_cast<double>(k) * map.mod_bin_hz) << '\t'
          << fmt_double(map.values(f, k)) << '\n';
    }
  }
  const fs::path path = a.out.empty() ? fs::path("fratio.tsv") : fs::path(a.out);
  write_text(path, tsv.str());
  const auto peak = map.peak();
  json j{{"map", path.string()},
         {"peak_feature", peak.feature},
         {"peak_bin", peak.bin},
         {"peak_freq_hz", peak.frequency_hz},
         {"peak_value", peak.value}};
  out << j.dump() << '\n';
  return kExitOk;
}

struct EmbeddingSource {
  std::string ckpt, manifest, embeddings, split = "all";
};

std::pair<std::vector<Eigen::VectorXd>, std::vector<const ManifestRecord*>>
gather_embeddings(const EmbeddingSource& a, DatasetManifest& m, std::ostream& err) {
  if (!a.embeddings.empty()) {
    m = open_manifest(a.embeddings, "ignore", err);
    auto records = select(m, a.split);
    return {load_embedding_manifest(m, records), records};
  }
  if (a.ckpt.empty() || a.manifest.empty()) {
    throw CLI::ValidationError("need --embeddings, or --ckpt with --manifest");
  }
  const auto ckpt = load_checkpoint(a.ckpt);
  m = open_manifest(a.manifest, "ignore", err);
  auto records = select(m, a.split);
  return {embed_records(ckpt, m, records), records};
}

int cmd_sparsity(const EmbeddingSource& a, const std::string& out_path,
                 std::ostream& out, std::ostream& err) {
  DatasetManifest m;
  const auto [emb, records] = gather_embeddings(a, m, err);
  if (emb.empty()) throw FormatError("no embeddings selected");
  const auto rep = sparsity(emb);
  if (!out_path.empty()) {
    std::ostringstream tsv;
    tsv << "id\tsparsity_pct\n";
    for (std::size_t i = 0; i < records.size(); ++i) {
      tsv << records[i]->id << '\t' << fmt_double(rep.per_sample_pct[i]) << '\n';
    }
    write_text(out_path, tsv.str());
  }
  json j{{"n", emb.size()},
         {"mean_pct", rep.mean_pct},
         {"std_pct", rep.std_pct},
         {"threshold_rel", rep.threshold_rel}};
  out << j.dump() << '\n';
  return kExitOk;
}

int cmd_layers(const std::string& ckpt_path, std::ostream& out) {
  const auto ckpt = load_checkpoint(ckpt_path);
  const auto w = layer_importance(ckpt.params);
  json j = json::array();
  for (Eigen::Index i = 0; i < w.size(); ++i) j.push_back(w[i]);
  out << json{{"layer_weights", j}}.dump() << '\n';
  return kExitOk;
}

int cmd_probe(const EmbeddingSource& a, double train_frac, std::uint64_t seed,
              std::ostream& out, std::ostream& err) {
  DatasetManifest m;
  const auto [emb, records] = gather_embeddings(a, m, err);
  std::vector<std::string> speakers;
  for (const auto* r : records) speakers.push_back(r->speaker);
  const auto res = speaker_probe(emb, speakers, train_frac, seed);
  json j{{"accuracy", res.accuracy}, {"n_train", res.n_train}, {"n_test", res.n_test}};
  out << j.dump() << '\n';
  return kExitOk;
}

int cmd_synth(const SyntheticCorpusSpec& spec, const std::string& dir,
              std::ostream& out) {
  const auto corpus = generate_corpus(spec);
  write_corpus(corpus, dir);
  out << "wrote " << corpus.size() << " utterances to "
      << (fs::path(dir) / "manifest.csv").string() << '\n';
  return kExitOk;
}

}  // namespace

int run_command(const std::vector<std::string>& args, std::ostream& out,
                std::ostream& err) {
  CLI::App app{"Modulation-dynamics speech health classifier", "moddyn"};
  app.require_subcommand(1);

  TrainArgs ta;
  auto* train_cmd = app.add_subcommand("train", "Train a model and write a checkpoint");
  train_cmd->add_option("--config", ta.config, "Run configuration file")->required();
  train_cmd->add_option("--manifest", ta.manifest, "Dataset manifest")->required();
  train_cmd->add_option("--out", ta.out, "Checkpoint output path")->required();
  train_cmd->add_option("--log", ta.log, "Per-epoch JSON-lines log");
  train_cmd->add_option("--speaker-check", ta.speakers, "Speaker overlap policy")
      ->check(CLI::IsMember({"ignore", "warn", "strict"}));

  EvalArgs ea;
  auto* eval_cmd = app.add_subcommand("evaluate", "AUC and macro F1 per split");
  eval_cmd->add_option("--ckpt", ea.ckpt)->required();
  eval_cmd->add_option("--manifest", ea.manifest)->required();
  eval_cmd->add_option("--out", ea.out, "Also write the JSON report here");
  eval_cmd->add_option("--speaker-check", ea.speakers)
      ->check(CLI::IsMember({"ignore", "warn", "strict"}));

  const auto split_check = CLI::IsMember({"all", "train", "valid", "test"});

  ExtractArgs xa;
  auto* extract_cmd = app.add_subcommand("extract", "Write embeddings as WRX1 files");
  extract_cmd->add_option("--ckpt", xa.ckpt)->required();
  extract_cmd->add_option("--manifest", xa.manifest)->required();
  extract_cmd->add_option("--out", xa.out, "Output directory")->required();
  extract_cmd->add_option("--split", xa.split)->check(split_check);

  auto* analyze_cmd = app.add_subcommand("analyze", "Interpretability reports");
  analyze_cmd->require_subcommand(1);
  FRatioArgs fa;
  auto* fratio_cmd = analyze_cmd->add_subcommand("fratio", "Fisher F-ratio map");
  fratio_cmd->add_option("--ckpt", fa.ckpt)->required();
  fratio_cmd->add_option("--manifest", fa.manifest)->required();
  fratio_cmd->add_option("--out", fa.out, "TSV output (default fratio.tsv)");
  fratio_cmd->add_option("--split", fa.split)->check(split_check);

  EmbeddingSource sa;
  std::string sparsity_out;
  auto* sparsity_cmd = analyze_cmd->add_subcommand("sparsity", "Embedding sparsity");
  sparsity_cmd->add_option("--ckpt", sa.ckpt);
  sparsity_cmd->add_option("--manifest", sa.manifest);
  sparsity_cmd->add_option("--embeddings", sa.embeddings, "Manifest written by extract");
  sparsity_cmd->add_option("--split", sa.split)->check(split_check);
  sparsity_cmd->add_option("--out", sparsity_out, "Per-sample TSV");

  std::string layers_ckpt;
  auto* layers_cmd = analyze_cmd->add_subcommand("layers", "Learned layer weights");
  layers_cmd->add_option("--ckpt", layers_ckpt)->required();

  auto* probe_cmd = app.add_subcommand("probe", "Leakage probes");
  probe_cmd->require_subcommand(1);
  EmbeddingSource pa;
  double train_frac = 0.10;
  std::uint64_t probe_seed = 0;
  auto* speaker_cmd = probe_cmd->add_subcommand("speaker", "LDA speaker identification");
  speaker_cmd->add_option("--ckpt", pa.ckpt);
  speaker_cmd->add_option("--manifest", pa.manifest);
  speaker_cmd->add_option("--embeddings", pa.embeddings);
  speaker_cmd->add_option("--split", pa.split)->check(split_check);
  speaker_cmd->add_option("--train-frac", train_frac)->check(CLI::Range(0.0, 1.0));
  speaker_cmd->add_option("--seed", probe_seed);

  SyntheticCorpusSpec spec;
  std::string synth_dir;
  std::string carrier = "noise";
  auto* synth_cmd = app.add_subcommand("synth", "Generate a synthetic corpus");
  synth_cmd->add_option("--out", synth_dir, "Output directory")->required();
  synth_cmd->add_option("--n-per-class", spec.n_per_class)->check(CLI::PositiveNumber);
  synth_cmd->add_option("--duration", spec.duration_s)->check(CLI::PositiveNumber);
  synth_cmd->add_option("--carrier", carrier)->check(CLI::IsMember({"noise", "sawtooth"}));
  synth_cmd->add_option("--mod-freq", spec.mod_freq_hz);
  synth_cmd->add_option("--mod-depth", spec.mod_depth);
  synth_cmd->add_option("--tilt", spec.speaker_tilt_db_per_octave,
                        "Speaker tilt half-range, dB/octave");
  synth_cmd->add_option("--speakers", spec.n_speakers);
  synth_cmd->add_option("--seed", spec.seed);
  synth_cmd->add_option("--sample-rate", spec.sample_rate);

  std::vector<const char*> argv;
  argv.reserve(args.size());
  for (const auto& s : args) argv.push_back(s.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  }

  try {
    if (*train_cmd) return cmd_train(ta, out, err);
    if (*eval_cmd) return cmd_evaluate(ea, out, err);
    if (*extract_cmd) return cmd_extract(xa, out, err);
    if (*fratio_cmd) return cmd_fratio(fa, out, err);
    if (*sparsity_cmd) return cmd_sparsity(sa, sparsity_out, out, err);
    if (*layers_cmd) return cmd_layers(layers_ckpt, out);
    if (*speaker_cmd) return cmd_probe(pa, train_frac, probe_seed, out, err);
    if (*synth_cmd) {
      spec.carrier = parse_carrier(carrier);
      try {
        spec.validate();
      } catch (const InvalidArgument& e) {
        err << "error: " << e.what() << '\n';
        return kExitUsage;
      }
      return cmd_synth(spec, synth_dir, out);
    }
  } catch (const CLI::ValidationError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitData;
  }
  err << "error: no command\n";
  return kExitUsage;
}

}  // namespace moddyn::cli
