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

#include "prda/prda.h"

#include <memory>
#include <optional>
#include <string>
#include <variant>

#include "prda/data.hpp"
#include "prda/error.hpp"
#include "prda/io.hpp"
#include "prda/trainer.hpp"

struct prda_dataset {
  prda::Dataset data;
  std::optional<prda::Labels> labels;
};

struct prda_labels {
  prda::Labels labels;
};

struct prda_model {
  std::variant<prda::SourceModel, prda::TargetModel> model;
};

struct prda_run {
  prda_model model;
  std::vector<prda::StepMetrics> metrics;
  std::vector<double> confident_trace;
  std::size_t refreshes = 0;
};

namespace {

thread_local std::string g_last_error;

prda_status to_status(prda::ErrorCode code) {
  using prda::ErrorCode;
  switch (code) {
    case ErrorCode::kInvalidInput: return PRDA_ERR_INVALID_INPUT;
    case ErrorCode::kDegenerateInput: return PRDA_ERR_DEGENERATE_INPUT;
    case ErrorCode::kConfig: return PRDA_ERR_CONFIG;
    case ErrorCode::kInvalidState: return PRDA_ERR_INVALID_STATE;
    case ErrorCode::kUsage: return PRDA_ERR_USAGE;
    case ErrorCode::kDivergence: return PRDA_ERR_DIVERGENCE;
    case ErrorCode::kParse: return PRDA_ERR_PARSE;
    case ErrorCode::kIo: return PRDA_ERR_IO;
    case ErrorCode::kQualityGate: return PRDA_ERR_QUALITY_GATE;
  }
  return PRDA_ERR_INTERNAL;
}

template <typename Fn>
prda_status guarded(Fn&& fn) {
  try {
    fn();
    g_last_error.clear();
    return PRDA_OK;
  } catch (const prda::Error& e) {
    g_last_error = e.what();
    return to_status(e.code());
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return PRDA_ERR_INTERNAL;
  } catch (...) {
    g_last_error = "unknown exception";
    return PRDA_ERR_INTERNAL;
  }
}

void require_arg(bool ok, const char* what) {
  if (!ok) prda::fail(prda::ErrorCode::kUsage, what);
}

prda::ShiftSpec from_c(const prda_shift_spec& c) {
  prda::ShiftSpec s;
  s.family = c.family == PRDA_GEN_TWO_ARCS ? prda::GeneratorFamily::kTwoArcs : prda::GeneratorFamily::kGaussianMixture;
  s.num_classes = c.num_classes;
  s.radius = c.radius;
  s.spread = c.spread;
  s.rotation_deg = c.rotation_deg;
  s.translation[0] = c.translation[0];
  s.translation[1] = c.translation[1];
  s.noise = c.noise;
  s.samples_per_domain = c.samples_per_domain;
  s.seed = c.seed;
  return s;
}

prda_shift_spec to_c(const prda::ShiftSpec& s) {
  prda_shift_spec c{};
  c.family = s.family == prda::GeneratorFamily::kTwoArcs ? PRDA_GEN_TWO_ARCS : PRDA_GEN_GAUSSIAN_MIXTURE;
  c.num_classes = s.num_classes;
  c.radius = s.radius;
  c.spread = s.spread;
  c.rotation_deg = s.rotation_deg;
  c.translation[0] = s.translation[0];
  c.translation[1] = s.translation[1];
  c.noise = s.noise;
  c.samples_per_domain = s.samples_per_domain;
  c.seed = s.seed;
  return c;
}

prda::AdaptConfig from_c(const prda_adapt_config& c) {
  prda::AdaptConfig a;
  a.max_iter = c.max_iter;
  a.batch_size = c.batch_size;
  a.update_period = c.update_period;
  a.lr = {c.lr0, c.lr_a, c.lr_b};
  a.lr_extractor_scale = c.lr_extractor_scale;
  a.momentum = c.momentum;
  a.weight_decay = c.weight_decay;
  a.alpha_mode = c.alpha_dynamic ? prda::AlphaMode::kDynamic : prda::AlphaMode::kStatic;
  a.alpha_static = c.alpha_static;
  a.seed = c.seed;
  a.log_interval = c.log_interval;
  return a;
}

prda::PretrainConfig from_c(const prda_pretrain_config& c) {
  prda::PretrainConfig p;
  p.hidden = {c.hidden_size};
  p.embedding_dim = c.embedding_dim;
  p.epochs = c.epochs;
  p.batch_size = c.batch_size;
  p.lr = c.lr;
  p.momentum = c.momentum;
  p.weight_decay = c.weight_decay;
  p.seed = c.seed;
  p.min_accuracy = c.min_accuracy;
  return p;
}

const prda::Labels& pick_labels(const prda_dataset* data, const prda_labels* labels) {
  if (labels) return labels->labels;
  if (!data->labels) prda::fail(prda::ErrorCode::kInvalidInput, "dataset carries no labels and none were given");
  return *data->labels;
}

}  // namespace

extern "C" {

const char* prda_version(void) { return "1.0.0"; }

const char* prda_last_error(void) { return g_last_error.c_str(); }

const char* prda_status_string(prda_status status) {
  switch (status) {
    case PRDA_OK: return "ok";
    case PRDA_ERR_INVALID_INPUT: return "invalid input";
    case PRDA_ERR_DEGENERATE_INPUT: return "degenerate input";
    case PRDA_ERR_CONFIG: return "configuration error";
    case PRDA_ERR_INVALID_STATE: return "invalid state";
    case PRDA_ERR_USAGE: return "usage error";
    case PRDA_ERR_DIVERGENCE: return "training diverged";
    case PRDA_ERR_PARSE: return "parse error";
    case PRDA_ERR_IO: return "i/o error";
    case PRDA_ERR_QUALITY_GATE: return "quality gate failed";
    case PRDA_ERR_INTERNAL: return "internal error";
  }
  return "unknown status";
}

prda_status prda_shift_spec_preset(const char* preset, uint64_t seed, prda_shift_spec* out) {
  return guarded([&] {
    require_arg(preset && out, "prda_shift_spec_preset: null argument");
    *out = to_c(prda::shift_preset(preset, seed));
  });
}

prda_status prda_shift_spec_validate(const prda_shift_spec* spec) {
  return guarded([&] {
    require_arg(spec, "prda_shift_spec_validate: null spec");
    from_c(*spec).validate();
  });
}

prda_status prda_generate(const prda_shift_spec* spec, prda_dataset** source, prda_dataset** target,
                          prda_labels** target_labels) {
  return guarded([&] {
    require_arg(spec && source && target && target_labels, "prda_generate: null argument");
    auto pair = prda::generate_shifted_pair(from_c(*spec));
    auto src = std::make_unique<prda_dataset>(prda_dataset{std::move(pair.source.data), std::move(pair.source.labels)});
    auto tgt = std::make_unique<prda_dataset>(prda_dataset{std::move(pair.target), std::nullopt});
    auto lab = std::make_unique<prda_labels>(prda_labels{std::move(pair.target_labels)});
    *source = src.release();
    *target = tgt.release();
    *target_labels = lab.release();
  });
}

prda_status prda_dataset_read(const char* path, prda_dataset** out) {
  return guarded([&] {
    require_arg(path && out, "prda_dataset_read: null argument");
    auto file = prda::read_dataset(path);
    *out = new prda_dataset{std::move(file.data), std::move(file.labels)};
  });
}

prda_status prda_dataset_write(const prda_dataset* data, const char* path) {
  return guarded([&] {
    require_arg(data && path, "prda_dataset_write: null argument");
    prda::write_dataset(path, data->data, data->labels ? &*data->labels : nullptr);
  });
}

size_t prda_dataset_size(const prda_dataset* data) { return data ? data->data.size() : 0; }
size_t prda_dataset_dim(const prda_dataset* data) { return data ? data->data.dim() : 0; }
int32_t prda_dataset_num_classes(const prda_dataset* data) { return data ? data->data.num_classes() : 0; }
int32_t prda_dataset_is_labeled(const prda_dataset* data) { return data && data->labels ? 1 : 0; }

prda_status prda_dataset_row(const prda_dataset* data, size_t i, double* buf, size_t capacity) {
  return guarded([&] {
    require_arg(data && buf, "prda_dataset_row: null argument");
    prda::require(i < data->data.size(), prda::ErrorCode::kInvalidInput, "prda_dataset_row: row out of range");
    prda::require(capacity >= data->data.dim(), prda::ErrorCode::kInvalidInput, "prda_dataset_row: buffer too small");
    const auto row = data->data.row(i);
    std::copy(row.begin(), row.end(), buf);
  });
}

void prda_dataset_free(prda_dataset* data) { delete data; }

prda_status prda_labels_read(const char* path, prda_labels** out) {
  return guarded([&] {
    require_arg(path && out, "prda_labels_read: null argument");
    *out = new prda_labels{prda::read_labels(path)};
  });
}

prda_status prda_labels_write(const prda_labels* labels, const char* path) {
  return guarded([&] {
    require_arg(labels && path, "prda_labels_write: null argument");
    prda::write_labels(path, labels->labels);
  });
}

size_t prda_labels_size(const prda_labels* labels) { return labels ? labels->labels.values.size() : 0; }

void prda_labels_free(prda_labels* labels) { delete labels; }

void prda_pretrain_config_default(prda_pretrain_config* out) {
  if (!out) return;
  const prda::PretrainConfig d;
  *out = prda_pretrain_config{d.hidden.front(), d.embedding_dim, d.epochs, d.batch_size, d.lr,
                              d.momentum,       d.weight_decay,  d.seed,   d.min_accuracy};
}

prda_status prda_pretrain(const prda_dataset* source, const prda_pretrain_config* config, prda_model** out,
                          double* train_accuracy) {
  return guarded([&] {
    require_arg(source && config && out, "prda_pretrain: null argument");
    prda::require(source->labels.has_value(), prda::ErrorCode::kInvalidInput, "pre-training needs a labeled dataset");
    auto result = prda::pretrain_source(prda::LabeledDataset{source->data, *source->labels}, from_c(*config));
    if (train_accuracy) *train_accuracy = result.train_accuracy;
    *out = new prda_model{std::move(result.model)};
  });
}

prda_status prda_model_load(const char* path, prda_model** out) {
  return guarded([&] {
    require_arg(path && out, "prda_model_load: null argument");
    auto file = prda::load_model_file(path);
    if (file.kind == prda::ModelKind::kSource) {
      prda::require(file.networks.size() == 2, prda::ErrorCode::kParse, "source model must hold two networks");
      *out = new prda_model{prda::SourceModel(std::move(file.networks[0]), std::move(file.networks[1]))};
    } else {
      prda::require(file.networks.size() == 3, prda::ErrorCode::kParse, "target model must hold three networks");
      *out = new prda_model{
          prda::TargetModel{std::move(file.networks[0]), std::move(file.networks[1]), std::move(file.networks[2])}};
    }
  });
}

prda_status prda_model_save(const prda_model* model, const char* path) {
  return guarded([&] {
    require_arg(model && path, "prda_model_save: null argument");
    std::visit([&](const auto& m) { prda::save_model(path, m); }, model->model);
  });
}

prda_model_kind prda_model_get_kind(const prda_model* model) {
  return model && std::holds_alternative<prda::TargetModel>(model->model) ? PRDA_MODEL_TARGET : PRDA_MODEL_SOURCE;
}

uint64_t prda_model_digest(const prda_model* model) {
  if (!model) return 0;
  if (const auto* src = std::get_if<prda::SourceModel>(&model->model)) return src->current_digest();
  return std::get<prda::TargetModel>(model->model).digest();
}

prda_status prda_model_predict(const prda_model* model, const double* x, size_t dim, double* probs,
                               size_t capacity) {
  return guarded([&] {
    require_arg(model && x && probs, "prda_model_predict: null argument");
    const std::span<const double> input(x, dim);
    prda::ForwardResult r;
    if (const auto* src = std::get_if<prda::SourceModel>(&model->model)) {
      r = prda::forward(src->extractor(), src->classifier(), input);
    } else {
      const auto& tgt = std::get<prda::TargetModel>(model->model);
      r = prda::forward(tgt.extractor, tgt.head_t, input);
    }
    prda::require(capacity >= r.prob.size(), prda::ErrorCode::kInvalidInput, "prda_model_predict: buffer too small");
    std::copy(r.prob.begin(), r.prob.end(), probs);
  });
}

void prda_model_free(prda_model* model) { delete model; }

prda_status prda_evaluate(const prda_model* model, const prda_dataset* data, const prda_labels* labels,
                          double* accuracy) {
  return guarded([&] {
    require_arg(model && data && accuracy, "prda_evaluate: null argument");
    const prda::Labels& truth = pick_labels(data, labels);
    if (const auto* src = std::get_if<prda::SourceModel>(&model->model)) {
      *accuracy = prda::source_accuracy(*src, data->data, truth);
    } else {
      *accuracy = prda::evaluate(std::get<prda::TargetModel>(model->model), data->data, truth);
    }
  });
}

void prda_adapt_config_default(prda_adapt_config* out) {
  if (!out) return;
  const prda::AdaptConfig d;
  *out = prda_adapt_config{d.max_iter,
                           d.batch_size,
                           d.update_period,
                           d.lr.lr0,
                           d.lr.a,
                           d.lr.b,
                           d.lr_extractor_scale,
                           d.momentum,
                           d.weight_decay,
                           d.alpha_mode == prda::AlphaMode::kDynamic ? 1 : 0,
                           d.alpha_static,
                           d.seed,
                           d.log_interval};
}

prda_status prda_adapt(const prda_model* source, const prda_dataset* target, const prda_adapt_config* config,
                       const prda_labels* diagnostic_labels, const char* divergence_dir, prda_run** out) {
  return guarded([&] {
    require_arg(source && target && config && out, "prda_adapt: null argument");
    const auto* src = std::get_if<prda::SourceModel>(&source->model);
    prda::require(src != nullptr, prda::ErrorCode::kConfig, "prda_adapt: expected a source model");
    prda::AdaptOptions options;
    if (diagnostic_labels) options.diagnostic_labels = &diagnostic_labels->labels;
    if (divergence_dir) options.divergence_dir = std::filesystem::path(divergence_dir);
    auto result = prda::adapt(*src, target->data, from_c(*config), options);
    *out = new prda_run{prda_model{std::move(result.model)}, std::move(result.metrics),
                        std::move(result.confident_trace), result.refreshes.size()};
  });
}

const prda_model* prda_run_model(const prda_run* run) { return run ? &run->model : nullptr; }

prda_status prda_run_write_metrics(const prda_run* run, const char* path) {
  return guarded([&] {
    require_arg(run && path, "prda_run_write_metrics: null argument");
    prda::io::write_file(path, prda::metrics_jsonl(run->metrics));
  });
}

size_t prda_run_metrics_count(const prda_run* run) { return run ? run->metrics.size() : 0; }
size_t prda_run_steps(const prda_run* run) { return run ? run->confident_trace.size() : 0; }

prda_status prda_run_confident_trace(const prda_run* run, double* buf, size_t capacity) {
  return guarded([&] {
    require_arg(run && buf, "prda_run_confident_trace: null argument");
    prda::require(capacity >= run->confident_trace.size(), prda::ErrorCode::kInvalidInput,
                  "prda_run_confident_trace: buffer too small");
    std::copy(run->confident_trace.begin(), run->confident_trace.end(), buf);
  });
}

size_t prda_run_refresh_count(const prda_run* run) { return run ? run->refreshes : 0; }

void prda_run_free(prda_run* run) { delete run; }

void prda_access_log_clear(void) { prda::io::AccessLog::global().clear(); }

size_t prda_access_log_size(void) { return prda::io::AccessLog::global().entries().size(); }

const char* prda_access_log_entry(size_t i) {
  thread_local std::vector<std::string> snapshot;
  snapshot = prda::io::AccessLog::global().entries();
  return i < snapshot.size() ? snapshot[i].c_str() : nullptr;
}

prda_status prda_file_digest(const char* path, uint64_t* out) {
  return guarded([&] {
    require_arg(path && out, "prda_file_digest: null argument");
    *out = prda::io::file_digest(path);
  });
}

}  // extern "C"
