/*
 * SPDX-FileCopyrightText: Copyright (c) 2026 The prda authors. All rights reserved.
 * SPDX-License-Identifier: Apache-2.0
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 * http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

// prda command-line front end. Talks to the engine only through the C API.

#include <chrono>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "prda/prda.h"

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitFailure = 1;
constexpr int kExitUsage = 2;
constexpr int kExitQualityGate = 3;
constexpr int kExitDivergence = 4;

struct CliError {
  int exit_code;
  std::string message;
};

int exit_code_for(prda_status s) {
  switch (s) {
    case PRDA_OK: return kExitOk;
    case PRDA_ERR_INVALID_INPUT:
    case PRDA_ERR_CONFIG:
    case PRDA_ERR_USAGE:
    case PRDA_ERR_PARSE:
    case PRDA_ERR_IO: return kExitUsage;
    case PRDA_ERR_QUALITY_GATE: return kExitQualityGate;
    case PRDA_ERR_DIVERGENCE: return kExitDivergence;
    default: return kExitFailure;
  }
}

void check(prda_status s, const std::string& what) {
  if (s == PRDA_OK) return;
  throw CliError{exit_code_for(s), what + ": " + prda_status_string(s) + ": " + prda_last_error()};
}

struct DatasetDeleter {
  void operator()(prda_dataset* p) const { prda_dataset_free(p); }
};
struct LabelsDeleter {
  void operator()(prda_labels* p) const { prda_labels_free(p); }
};
struct ModelDeleter {
  void operator()(prda_model* p) const { prda_model_free(p); }
};
struct RunDeleter {
  void operator()(prda_run* p) const { prda_run_free(p); }
};
using DatasetPtr = std::unique_ptr<prda_dataset, DatasetDeleter>;
using LabelsPtr = std::unique_ptr<prda_labels, LabelsDeleter>;
using ModelPtr = std::unique_ptr<prda_model, ModelDeleter>;
using RunPtr = std::unique_ptr<prda_run, RunDeleter>;

DatasetPtr read_dataset(const std::string& path) {
  prda_dataset* d = nullptr;
  check(prda_dataset_read(path.c_str(), &d), "reading " + path);
  return DatasetPtr(d);
}

LabelsPtr read_labels(const std::string& path) {
  prda_labels* l = nullptr;
  check(prda_labels_read(path.c_str(), &l), "reading " + path);
  return LabelsPtr(l);
}

ModelPtr load_model(const std::string& path) {
  if (!fs::exists(path)) throw CliError{kExitUsage, "model file not found: " + path};
  prda_model* m = nullptr;
  check(prda_model_load(path.c_str(), &m), "loading " + path);
  return ModelPtr(m);
}

std::string hex64(std::uint64_t v) {
  std::ostringstream os;
  os << std::hex << std::setw(16) << std::setfill('0') << v;
  return os.str();
}

std::string digest_of(const std::string& path) {
  std::uint64_t d = 0;
  check(prda_file_digest(path.c_str(), &d), "hashing " + path);
  return hex64(d);
}

std::string utc_now() {
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  std::ostringstream os;
  os << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
  return os.str();
}

void write_text(const fs::path& path, const std::string& text) {
  const fs::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw CliError{kExitUsage, "cannot write " + path.string()};
    out << text;
    if (!out) throw CliError{kExitUsage, "cannot write " + path.string()};
  }
  fs::rename(tmp, path);
}

void write_json(const fs::path& path, const json& j) { write_text(path, j.dump(2) + "\n"); }

json base_manifest(const std::string& command) {
  json m;
  m["tool"] = "prda";
  m["version"] = prda_version();
  m["command"] = command;
  m["started_at"] = utc_now();
  m["finished_at"] = nullptr;
  m["status"] = "running";
  return m;
}

void finish_manifest(json& m, const fs::path& path, const std::string& status) {
  m["finished_at"] = utc_now();
  m["status"] = status;
  write_json(path, m);
}

const char* generator_name(prda_generator g) { return g == PRDA_GEN_TWO_ARCS ? "two-arcs" : "gaussian-mixture"; }

json to_json(const prda_shift_spec& s) {
  return json{{"family", generator_name(s.family)},
              {"num_classes", s.num_classes},
              {"radius", s.radius},
              {"spread", s.spread},
              {"rotation_deg", s.rotation_deg},
              {"translation", {s.translation[0], s.translation[1]}},
              {"noise", s.noise},
              {"samples_per_domain", s.samples_per_domain},
              {"seed", s.seed}};
}

json to_json(const prda_pretrain_config& c) {
  return json{{"hidden_size", c.hidden_size}, {"embedding_dim", c.embedding_dim},
              {"epochs", c.epochs},           {"batch_size", c.batch_size},
              {"lr", c.lr},                   {"momentum", c.momentum},
              {"weight_decay", c.weight_decay}, {"seed", c.seed},
              {"min_accuracy", c.min_accuracy}};
}

std::string alpha_label(const prda_adapt_config& c) {
  if (c.alpha_dynamic) return "dynamic";
  std::ostringstream os;
  os << c.alpha_static;
  return os.str();
}

json to_json(const prda_adapt_config& c) {
  return json{{"max_iter", c.max_iter},
              {"batch_size", c.batch_size},
              {"update_period", c.update_period},
              {"lr", {{"lr0", c.lr0}, {"a", c.lr_a}, {"b", c.lr_b}}},
              {"lr_extractor_scale", c.lr_extractor_scale},
              {"momentum", c.momentum},
              {"weight_decay", c.weight_decay},
              {"alpha", alpha_label(c)},
              {"seed", c.seed},
              {"log_interval", c.log_interval}};
}

// Accepts "dynamic" or a number in [0, 1].
void apply_alpha(prda_adapt_config& c, const std::string& alpha) {
  if (alpha == "dynamic") {
    c.alpha_dynamic = 1;
    return;
  }
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(alpha, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != alpha.size() || !(v >= 0.0 && v <= 1.0)) {
    throw CliError{kExitUsage, "--alpha must be 'dynamic' or a number in [0, 1], got '" + alpha + "'"};
  }
  c.alpha_dynamic = 0;
  c.alpha_static = v;
}

void prepare_out_dir(const fs::path& dir, bool force) {
  if (fs::exists(dir)) {
    if (!force) throw CliError{kExitUsage, "output directory exists (use --force): " + dir.string()};
    if (!fs::is_directory(dir)) throw CliError{kExitUsage, "output path is not a directory: " + dir.string()};
  }
  fs::create_directories(dir);
}

std::vector<std::string> access_log() {
  std::vector<std::string> out;
  for (std::size_t i = 0, n = prda_access_log_size(); i < n; ++i) out.emplace_back(prda_access_log_entry(i));
  return out;
}

// gen-data ------------------------------------------------------------------

struct GenArgs {
  std::string preset = "blobs-rot35";
  std::uint64_t seed = 0;
  std::optional<double> rotation, tx, ty, noise, spread, radius;
  std::optional<std::uint64_t> samples;
  std::optional<int> classes;
  std::string out;
  bool force = false;
};

int cmd_gen_data(const GenArgs& a) {
  prda_shift_spec spec{};
  check(prda_shift_spec_preset(a.preset.c_str(), a.seed, &spec), "preset");
  if (a.rotation) spec.rotation_deg = *a.rotation;
  if (a.tx) spec.translation[0] = *a.tx;
  if (a.ty) spec.translation[1] = *a.ty;
  if (a.noise) spec.noise = *a.noise;
  if (a.spread) spec.spread = *a.spread;
  if (a.radius) spec.radius = *a.radius;
  if (a.samples) spec.samples_per_domain = *a.samples;
  if (a.classes) spec.num_classes = *a.classes;
  check(prda_shift_spec_validate(&spec), "shift spec");

  const fs::path dir = a.out;
  prepare_out_dir(dir, a.force);
  json manifest = base_manifest("gen-data");
  manifest["preset"] = a.preset;
  manifest["seed"] = a.seed;
  manifest["shift_spec"] = to_json(spec);
  write_json(dir / "manifest.json", manifest);

  prda_dataset* src = nullptr;
  prda_dataset* tgt = nullptr;
  prda_labels* lab = nullptr;
  check(prda_generate(&spec, &src, &tgt, &lab), "generating data");
  DatasetPtr source(src), target(tgt);
  LabelsPtr labels(lab);

  const std::string source_path = (dir / "source.csv").string();
  const std::string target_path = (dir / "target.csv").string();
  const std::string labels_path = (dir / "target.labels.csv").string();
  check(prda_dataset_write(source.get(), source_path.c_str()), "writing source.csv");
  check(prda_dataset_write(target.get(), target_path.c_str()), "writing target.csv");
  check(prda_labels_write(labels.get(), labels_path.c_str()), "writing target.labels.csv");

  manifest["outputs"] = {{"source.csv", digest_of(source_path)},
                         {"target.csv", digest_of(target_path)},
                         {"target.labels.csv", digest_of(labels_path)}};
  finish_manifest(manifest, dir / "manifest.json", "ok");
  std::cout << "wrote " << prda_dataset_size(source.get()) << " source and " << prda_dataset_size(target.get())
            << " target samples to " << dir.string() << "\n";
  return kExitOk;
}

// pretrain ------------------------------------------------------------------

struct PretrainArgs {
  std::string source;
  std::string out;
  prda_pretrain_config config{};
};

int cmd_pretrain(const PretrainArgs& a) {
  const fs::path manifest_path = a.out + ".manifest.json";
  json manifest = base_manifest("pretrain");
  manifest["seed"] = a.config.seed;
  manifest["config"] = to_json(a.config);
  manifest["inputs"] = {{"source", {{"path", a.source}, {"digest", digest_of(a.source)}}}};
  write_json(manifest_path, manifest);

  DatasetPtr source = read_dataset(a.source);
  prda_model* m = nullptr;
  double accuracy = 0.0;
  const prda_status s = prda_pretrain(source.get(), &a.config, &m, &accuracy);
  if (s == PRDA_ERR_QUALITY_GATE) finish_manifest(manifest, manifest_path, "quality-gate-failed");
  check(s, "pre-training");
  ModelPtr model(m);
  check(prda_model_save(model.get(), a.out.c_str()), "saving " + a.out);

  manifest["source_train_accuracy"] = accuracy;
  manifest["outputs"] = {{"model", {{"path", a.out}, {"digest", digest_of(a.out)}}}};
  finish_manifest(manifest, manifest_path, "ok");
  std::cout << "source train accuracy " << std::fixed << std::setprecision(4) << accuracy << "\n";
  return kExitOk;
}

// adapt ---------------------------------------------------------------------

struct AdaptArgs {
  std::string model;
  std::string target;
  std::string out;
  std::string alpha = "dynamic";
  bool force = false;
  prda_adapt_config config{};
};

struct AdaptOutcome {
  RunPtr run;
  std::vector<double> confident_trace;
};

// Runs one adaptation into dir and leaves target.prda, metrics.jsonl,
// manifest.json and access.log behind.
AdaptOutcome run_adapt(const std::string& model_path, const std::string& target_path, const prda_adapt_config& config,
                       const fs::path& dir) {
  const fs::path manifest_path = dir / "manifest.json";
  json manifest = base_manifest("adapt");
  manifest["seed"] = config.seed;
  manifest["config"] = to_json(config);
  manifest["shift_spec"] = nullptr;  // see the data directory manifest, identified by the target digest
  write_json(manifest_path, manifest);

  prda_access_log_clear();
  ModelPtr source = load_model(model_path);
  if (prda_model_get_kind(source.get()) != PRDA_MODEL_SOURCE) {
    throw CliError{kExitUsage, "expected a source model: " + model_path};
  }
  DatasetPtr target = read_dataset(target_path);
  if (prda_dataset_is_labeled(target.get())) {
    throw CliError{kExitUsage, "target dataset must not carry labels: " + target_path};
  }
  manifest["inputs"] = {{"source_model", {{"path", model_path}, {"digest", digest_of(model_path)}}},
                        {"target", {{"path", target_path}, {"digest", digest_of(target_path)}}}};
  write_json(manifest_path, manifest);

  prda_run* r = nullptr;
  const std::string dir_str = dir.string();
  const prda_status s = prda_adapt(source.get(), target.get(), &config, nullptr, dir_str.c_str(), &r);
  std::string log;
  for (const auto& e : access_log()) log += e + "\n";
  write_text(dir / "access.log", log);
  if (s != PRDA_OK) finish_manifest(manifest, manifest_path, s == PRDA_ERR_DIVERGENCE ? "diverged" : "failed");
  check(s, "adaptation");
  RunPtr run(r);

  const std::string model_out = (dir / "target.prda").string();
  const std::string metrics_out = (dir / "metrics.jsonl").string();
  check(prda_model_save(prda_run_model(run.get()), model_out.c_str()), "saving target model");
  check(prda_run_write_metrics(run.get(), metrics_out.c_str()), "writing metrics");

  std::vector<double> trace(prda_run_steps(run.get()));
  if (!trace.empty()) check(prda_run_confident_trace(run.get(), trace.data(), trace.size()), "confident trace");

  manifest["outputs"] = {{"target_model", {{"path", model_out}, {"digest", digest_of(model_out)}}},
                         {"metrics", {{"path", metrics_out}, {"digest", digest_of(metrics_out)}}}};
  manifest["steps"] = trace.size();
  manifest["apm_refreshes"] = prda_run_refresh_count(run.get());
  finish_manifest(manifest, manifest_path, "ok");
  return AdaptOutcome{std::move(run), std::move(trace)};
}

int cmd_adapt(AdaptArgs a) {
  apply_alpha(a.config, a.alpha);
  if (!fs::exists(a.model)) throw CliError{kExitUsage, "model file not found: " + a.model};
  prepare_out_dir(a.out, a.force);
  const AdaptOutcome outcome = run_adapt(a.model, a.target, a.config, a.out);
  std::cout << "adapted in " << outcome.confident_trace.size() << " steps; wrote " << a.out << "\n";
  return kExitOk;
}

// eval ----------------------------------------------------------------------

struct EvalArgs {
  std::string model;
  std::string data;
  std::string labels;
};

int cmd_eval(const EvalArgs& a) {
  ModelPtr model = load_model(a.model);
  DatasetPtr data = read_dataset(a.data);
  LabelsPtr labels;
  if (!a.labels.empty()) labels = read_labels(a.labels);
  double accuracy = 0.0;
  check(prda_evaluate(model.get(), data.get(), labels.get(), &accuracy), "evaluation");
  std::cout << "accuracy " << std::fixed << std::setprecision(4) << accuracy << "\n";
  const json line{{"model", a.model},
                  {"kind", prda_model_get_kind(model.get()) == PRDA_MODEL_TARGET ? "target" : "source"},
                  {"data", a.data},
                  {"samples", prda_dataset_size(data.get())},
                  {"accuracy", accuracy}};
  std::cout << line.dump() << "\n";
  return kExitOk;
}

// sweep ---------------------------------------------------------------------

struct SweepArgs {
  std::string kind = "alpha";
  std::vector<std::string> values;
  std::uint64_t seeds = 1;
  std::string model;
  std::string target;
  std::string labels;
  std::string out;
  bool force = false;
  prda_adapt_config config{};
  std::string alpha = "dynamic";
};

double tail_mean(const std::vector<double>& trace) {
  if (trace.empty()) return 0.0;
  const std::size_t k = std::max<std::size_t>(1, trace.size() / 10);
  double sum = 0.0;
  for (std::size_t i = trace.size() - k; i < trace.size(); ++i) sum += trace[i];
  return sum / static_cast<double>(k);
}

std::string csv_double(double v) {
  std::ostringstream os;
  os << std::setprecision(17) << v;
  return os.str();
}

int cmd_sweep(SweepArgs a) {
  if (a.kind != "alpha" && a.kind != "update-period") {
    throw CliError{kExitUsage, "--kind must be 'alpha' or 'update-period'"};
  }
  if (a.values.empty()) {
    a.values = a.kind == "alpha" ? std::vector<std::string>{"0", "0.2", "0.4", "0.6", "0.8", "1", "dynamic"}
                                 : std::vector<std::string>{"10", "100", "1000", "3000"};
  }
  if (a.seeds == 0) throw CliError{kExitUsage, "--seeds must be at least 1"};
  if (!fs::exists(a.model)) throw CliError{kExitUsage, "model file not found: " + a.model};

  // Validate every point before any run starts.
  std::vector<prda_adapt_config> points;
  prda_adapt_config base = a.config;
  apply_alpha(base, a.alpha);
  for (const auto& v : a.values) {
    prda_adapt_config c = base;
    if (a.kind == "alpha") {
      apply_alpha(c, v);
    } else {
      std::size_t used = 0;
      long long period = 0;
      try {
        period = std::stoll(v, &used);
      } catch (const std::exception&) {
        used = 0;
      }
      if (used != v.size() || period < 1) throw CliError{kExitUsage, "bad update period '" + v + "'"};
      c.update_period = period;
    }
    points.push_back(c);
  }

  prepare_out_dir(a.out, a.force);
  LabelsPtr labels = read_labels(a.labels);
  DatasetPtr target = read_dataset(a.target);

  std::string summary = "sweep_value,final_accuracy,confident_ratio_final,seed\n";
  for (std::size_t p = 0; p < points.size(); ++p) {
    for (std::uint64_t k = 0; k < a.seeds; ++k) {
      prda_adapt_config c = points[p];
      c.seed = a.config.seed + k;
      const fs::path dir = fs::path(a.out) / (a.kind + "_" + a.values[p] + "_seed" + std::to_string(c.seed));
      fs::create_directories(dir);
      const AdaptOutcome outcome = run_adapt(a.model, a.target, c, dir);
      double accuracy = 0.0;
      check(prda_evaluate(prda_run_model(outcome.run.get()), target.get(), labels.get(), &accuracy), "evaluation");
      summary += a.values[p] + "," + csv_double(accuracy) + "," + csv_double(tail_mean(outcome.confident_trace)) +
                 "," + std::to_string(c.seed) + "\n";
      std::cout << a.kind << "=" << a.values[p] << " seed=" << c.seed << " accuracy=" << std::fixed
                << std::setprecision(4) << accuracy << std::defaultfloat << "\n";
    }
  }
  write_text(fs::path(a.out) / "summary.csv", summary);
  return kExitOk;
}

void add_adapt_flags(CLI::App* cmd, prda_adapt_config& c, std::string& alpha) {
  cmd->add_option("--max-iter", c.max_iter, "Training steps")->capture_default_str();
  cmd->add_option("--batch-size", c.batch_size, "Mini-batch size")->capture_default_str();
  cmd->add_option("--update-period", c.update_period, "Steps between prototype memory refreshes")
      ->capture_default_str();
  cmd->add_option("--alpha", alpha, "'dynamic' or a constant in [0, 1]")->capture_default_str();
  cmd->add_option("--lr", c.lr0, "Initial learning rate")->capture_default_str();
  cmd->add_option("--momentum", c.momentum, "SGD momentum")->capture_default_str();
  cmd->add_option("--weight-decay", c.weight_decay, "L2 weight decay")->capture_default_str();
  cmd->add_option("--seed", c.seed, "Base seed")->capture_default_str();
  cmd->add_option("--log-interval", c.log_interval, "Steps between metric records")->capture_default_str();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"prda: source-free domain adaptation on synthetic covariate shift"};
  app.set_version_flag("--version", std::string(prda_version()));
  app.require_subcommand(1);

  GenArgs gen;
  auto* gen_cmd = app.add_subcommand("gen-data", "Generate a shifted source/target dataset pair");
  gen_cmd->add_option("--preset", gen.preset, "blobs-rot35 or two-arcs")->capture_default_str();
  gen_cmd->add_option("--seed", gen.seed, "Data seed")->capture_default_str();
  gen_cmd->add_option("--rotation", gen.rotation, "Target rotation in degrees, [0, 360)");
  gen_cmd->add_option("--tx", gen.tx, "Target translation along x");
  gen_cmd->add_option("--ty", gen.ty, "Target translation along y");
  gen_cmd->add_option("--noise", gen.noise, "Extra isotropic target noise");
  gen_cmd->add_option("--spread", gen.spread, "Per-axis class standard deviation");
  gen_cmd->add_option("--radius", gen.radius, "Class centre radius");
  gen_cmd->add_option("--samples", gen.samples, "Samples per domain");
  gen_cmd->add_option("--classes", gen.classes, "Number of classes");
  gen_cmd->add_option("-o,--out", gen.out, "Output directory")->required();
  gen_cmd->add_flag("--force", gen.force, "Reuse an existing output directory");

  PretrainArgs pre;
  prda_pretrain_config_default(&pre.config);
  auto* pre_cmd = app.add_subcommand("pretrain", "Train the source model on labeled source data");
  pre_cmd->add_option("--source", pre.source, "Labeled source CSV")->required();
  pre_cmd->add_option("-o,--out", pre.out, "Output model file")->required();
  pre_cmd->add_option("--epochs", pre.config.epochs, "Training epochs")->capture_default_str();
  pre_cmd->add_option("--batch-size", pre.config.batch_size, "Mini-batch size")->capture_default_str();
  pre_cmd->add_option("--lr", pre.config.lr, "Learning rate")->capture_default_str();
  pre_cmd->add_option("--momentum", pre.config.momentum, "SGD momentum")->capture_default_str();
  pre_cmd->add_option("--weight-decay", pre.config.weight_decay, "L2 weight decay")->capture_default_str();
  pre_cmd->add_option("--hidden", pre.config.hidden_size, "Hidden layer width")->capture_default_str();
  pre_cmd->add_option("--embedding-dim", pre.config.embedding_dim, "Embedding width")->capture_default_str();
  pre_cmd->add_option("--min-accuracy", pre.config.min_accuracy, "Training accuracy gate")->capture_default_str();
  pre_cmd->add_option("--seed", pre.config.seed, "Initialization and shuffling seed")->capture_default_str();

  AdaptArgs ad;
  prda_adapt_config_default(&ad.config);
  auto* ad_cmd = app.add_subcommand("adapt", "Adapt a source model to unlabeled target data");
  ad_cmd->add_option("--model", ad.model, "Source model file")->required();
  ad_cmd->add_option("--target", ad.target, "Unlabeled target CSV")->required();
  ad_cmd->add_option("-o,--out", ad.out, "Run directory")->required();
  ad_cmd->add_flag("--force", ad.force, "Reuse an existing run directory");
  add_adapt_flags(ad_cmd, ad.config, ad.alpha);

  EvalArgs ev;
  auto* ev_cmd = app.add_subcommand("eval", "Report accuracy of a model on labeled data");
  ev_cmd->add_option("--model", ev.model, "Model file")->required();
  ev_cmd->add_option("--data", ev.data, "Dataset CSV")->required();
  ev_cmd->add_option("--labels", ev.labels, "Labels CSV (omit if the dataset is labeled)");

  SweepArgs sw;
  prda_adapt_config_default(&sw.config);
  auto* sw_cmd = app.add_subcommand("sweep", "Run an ablation sweep over alpha or the update period");
  sw_cmd->add_option("--kind", sw.kind, "alpha or update-period")->capture_default_str();
  sw_cmd->add_option("--values", sw.values, "Comma-separated sweep points")->delimiter(',');
  sw_cmd->add_option("--seeds", sw.seeds, "Seeds per point: base, base+1, ...")->capture_default_str();
  sw_cmd->add_option("--model", sw.model, "Source model file")->required();
  sw_cmd->add_option("--target", sw.target, "Unlabeled target CSV")->required();
  sw_cmd->add_option("--labels", sw.labels, "Target labels CSV, used only for scoring")->required();
  sw_cmd->add_option("-o,--out", sw.out, "Sweep directory")->required();
  sw_cmd->add_flag("--force", sw.force, "Reuse an existing sweep directory");
  add_adapt_flags(sw_cmd, sw.config, sw.alpha);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*gen_cmd) return cmd_gen_data(gen);
    if (*pre_cmd) return cmd_pretrain(pre);
    if (*ad_cmd) return cmd_adapt(ad);
    if (*ev_cmd) return cmd_eval(ev);
    if (*sw_cmd) return cmd_sweep(sw);
  } catch (const CliError& e) {
    std::cerr << "prda: " << e.message << "\n";
    return e.exit_code;
  } catch (const std::exception& e) {
    std::cerr << "prda: " << e.what() << "\n";
    return kExitFailure;
  }
  return kExitUsage;
}
