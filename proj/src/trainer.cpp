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

#include "prda/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <fstream>
#include <numeric>
#include <sstream>

#include "json.hpp"
#include "prda/error.hpp"
#include "prda/io.hpp"

namespace prda {

void AdaptConfig::validate() const {
  require(max_iter >= 0, ErrorCode::kConfig, "max_iter must be non-negative");
  require(batch_size >= 1, ErrorCode::kConfig, "batch_size must be at least 1");
  require(update_period >= 1, ErrorCode::kConfig, "update_period must be at least 1");
  require(log_interval >= 1, ErrorCode::kConfig, "log_interval must be at least 1");
  require(lr.lr0 > 0.0 && lr.a >= 0.0 && lr.b >= 0.0, ErrorCode::kConfig, "invalid learning-rate schedule");
  require(lr_extractor_scale >= 0.0, ErrorCode::kConfig, "lr_extractor_scale must be non-negative");
  require(momentum >= 0.0 && momentum < 1.0, ErrorCode::kConfig, "momentum must lie in [0, 1)");
  require(weight_decay >= 0.0, ErrorCode::kConfig, "weight_decay must be non-negative");
  require(alpha_static >= 0.0 && alpha_static <= 1.0, ErrorCode::kConfig, "static alpha must lie in [0, 1]");
}

double alpha_at(const AdaptConfig& config, std::int64_t iter) {
  if (config.alpha_mode == AlphaMode::kStatic) return config.alpha_static;
  if (config.max_iter <= 0) return 0.0;
  const double progress = static_cast<double>(iter) / static_cast<double>(config.max_iter);
  return 2.0 / (1.0 + std::exp(-10.0 * progress)) - 1.0;
}

double loss_source(const TargetModel& model, const BatchCache& cache, std::span<const int> source_labels) {
  require(cache.matches(model), ErrorCode::kUsage, "loss_source: stale forward cache");
  require(source_labels.size() == cache.size(), ErrorCode::kInvalidInput, "loss_source: label count mismatch");
  double sum = 0.0;
  for (std::size_t i = 0; i < cache.size(); ++i) {
    sum += cross_entropy(cache.logits(i, Head::kSourceToTarget), source_labels[i]);
  }
  return sum / static_cast<double>(cache.size());
}

double loss_self(const TargetModel& model, const BatchCache& cache, std::span<const PseudoLabelRecord> records) {
  require(cache.matches(model), ErrorCode::kUsage, "loss_self: stale forward cache");
  require(records.size() == cache.size(), ErrorCode::kInvalidInput, "loss_self: record count mismatch");
  double sum = 0.0;
  for (std::size_t i = 0; i < cache.size(); ++i) {
    if (records[i].confidence == 0) continue;
    sum += cross_entropy(cache.logits(i, Head::kTarget), records[i].target_label);
  }
  return sum / static_cast<double>(cache.size());
}

double total_loss(double loss_source, double loss_self, double alpha) {
  return (1.0 - alpha) * loss_source + alpha * loss_self;
}

double evaluate(const TargetModel& model, const Dataset& data, const Labels& labels) {
  require(data.size() > 0, ErrorCode::kInvalidInput, "evaluate: empty dataset");
  check_aligned(data, labels);
  std::size_t correct = 0;
  for (std::size_t i = 0; i < data.size(); ++i) {
    const auto logits = model.head_t.forward(model.extractor.forward(data.row(i)));
    if (static_cast<int>(argmax(logits)) == labels.values[i]) ++correct;
  }
  return static_cast<double>(correct) / static_cast<double>(data.size());
}

namespace {

RefreshEvent describe_refresh(std::int64_t iter, const PrototypeMemory& memory, const TargetModel& model,
                              const Dataset& data) {
  RefreshEvent ev;
  ev.iter = iter;
  ev.threshold = memory.threshold;
  ev.predicted.assign(memory.num_classes(), 0);
  for (std::size_t i = 0; i < data.size(); ++i) {
    ++ev.predicted[argmax(model.head_t.forward(model.extractor.forward(data.row(i))))];
  }
  for (const auto& c : memory.classes) ev.prototypes.push_back(c.size());
  return ev;
}

void write_diagnostics(const std::filesystem::path& dir, std::int64_t iter, const PrototypeMemory& memory,
                       const TargetModel& model, const Dataset& data, const SourceLabelCache& source_labels) {
  std::filesystem::create_directories(dir);
  std::ostringstream apm;
  write_memory_dump(apm, memory);
  io::write_file(dir / ("apm_" + std::to_string(iter) + ".txt"), apm.str());
  std::vector<std::size_t> rows(data.size());
  std::iota(rows.begin(), rows.end(), std::size_t{0});
  const auto records = label_batch(model, source_labels, memory, data, rows);
  std::ostringstream labels;
  write_label_dump(labels, records);
  io::write_file(dir / ("labels_" + std::to_string(iter) + ".txt"), labels.str());
}

class MetricsSink {
 public:
  void push(const StepMetrics& m) {
    all_.push_back(m);
    recent_.push_back(m);
    if (recent_.size() > 100) recent_.pop_front();
  }
  std::vector<StepMetrics> take() { return std::move(all_); }
  std::vector<StepMetrics> recent() const { return {recent_.begin(), recent_.end()}; }

 private:
  std::vector<StepMetrics> all_;
  std::deque<StepMetrics> recent_;
};

[[noreturn]] void diverged(const std::string& why, std::int64_t iter, const TargetModel& model,
                           const MetricsSink& sink, const AdaptOptions& options) {
  std::string what = "adaptation diverged at iteration " + std::to_string(iter) + ": " + why;
  if (options.divergence_dir) {
    std::filesystem::create_directories(*options.divergence_dir);
    save_model(*options.divergence_dir / "divergence_checkpoint.prda", model);
    io::write_file(*options.divergence_dir / "divergence_metrics.jsonl", metrics_jsonl(sink.recent()));
    what += " (checkpoint written to " + options.divergence_dir->string() + ")";
  }
  fail(ErrorCode::kDivergence, what);
}

}  // namespace

AdaptResult adapt(const SourceModel& src, const Dataset& target, const AdaptConfig& config,
                  const AdaptOptions& options) {
  config.validate();
  require(target.size() > 0, ErrorCode::kInvalidInput, "adapt: empty target dataset");
  require(target.dim() == src.extractor().input_dim(), ErrorCode::kConfig,
          "adapt: target feature dimension does not match the source model");
  require(static_cast<std::size_t>(target.num_classes()) == src.classifier().output_dim(), ErrorCode::kConfig,
          "adapt: target class count does not match the source model");
  if (options.diagnostic_labels) check_aligned(target, *options.diagnostic_labels);

  AdaptResult result{init_target_from_source(src), {}, {}, {}};
  TargetModel& model = result.model;
  if (config.max_iter == 0) return result;

  const SourceLabelCache source_labels(src, target);
  MetricsSink sink;

  auto on_built = [&](std::int64_t iter, const PrototypeMemory& memory) {
    RefreshEvent ev = describe_refresh(iter, memory, model, target);
    if (options.diagnostics_dir) write_diagnostics(*options.diagnostics_dir, iter, memory, model, target, source_labels);
    if (options.on_refresh) options.on_refresh(ev, memory);
    result.refreshes.push_back(std::move(ev));
  };

  PrototypeMemory memory = build_memory(model, target, 0);
  on_built(0, memory);

  const std::uint64_t shuffle_seed = derive_seed(config.seed, "shuffle");
  std::uint64_t epoch = 0;
  auto epoch_batches = batches(target.size(), config.batch_size, shuffle_seed, epoch);
  std::size_t cursor = 0;

  std::vector<std::vector<double>> inputs;
  std::vector<int> batch_source_labels;
  std::vector<int> batch_target_labels;
  std::vector<double> ones;
  std::vector<double> weights;
  std::vector<Embedding> embeddings;

  for (std::int64_t t = 1; t <= config.max_iter; ++t) {
    if (cursor == epoch_batches.size()) {
      epoch_batches = batches(target.size(), config.batch_size, shuffle_seed, ++epoch);
      cursor = 0;
    }
    const auto& rows = epoch_batches[cursor++];

    inputs.clear();
    for (std::size_t row : rows) inputs.emplace_back(target.row(row).begin(), target.row(row).end());
    const BatchCache cache(model, inputs);
    for (std::size_t i = 0; i < cache.size(); ++i) {
      if (!all_finite(cache.embedding(i)) || !all_finite(cache.logits(i, Head::kSourceToTarget)) ||
          !all_finite(cache.logits(i, Head::kTarget))) {
        diverged("non-finite activations", t, model, sink, options);
      }
    }

    embeddings.clear();
    for (std::size_t i = 0; i < cache.size(); ++i) embeddings.push_back(cache.embedding(i));
    const auto records = label_embeddings(embeddings, rows, target, source_labels, memory);

    batch_source_labels.clear();
    batch_target_labels.clear();
    weights.clear();
    for (const auto& r : records) {
      batch_source_labels.push_back(r.source_label);
      batch_target_labels.push_back(r.target_label);
      weights.push_back(static_cast<double>(r.confidence));
    }
    ones.assign(rows.size(), 1.0);

    const std::int64_t step = t - 1;
    const double alpha = alpha_at(config, step);
    const double lr = lr_at(config.lr, static_cast<double>(step) / static_cast<double>(config.max_iter));
    const double ls = loss_source(model, cache, batch_source_labels);
    const double lt = loss_self(model, cache, records);
    if (!std::isfinite(total_loss(ls, lt, alpha))) diverged("non-finite loss", t, model, sink, options);

    if (alpha < 1.0) {
      backward_cross_entropy(model, cache, batch_source_labels, ones, Head::kSourceToTarget, 1.0 - alpha);
    }
    if (alpha > 0.0) backward_cross_entropy(model, cache, batch_target_labels, weights, Head::kTarget, alpha);
    try {
      sgd_step(model.head_s2t, lr, config.momentum, config.weight_decay);
      sgd_step(model.head_t, lr, config.momentum, config.weight_decay);
      sgd_step(model.extractor, lr * config.lr_extractor_scale, config.momentum, config.weight_decay);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::kDivergence) throw;
      diverged(e.what(), t, model, sink, options);
    }
    for (const Network* net : {&model.extractor, &model.head_s2t, &model.head_t}) {
      if (!all_finite(net->flat_parameters())) diverged("non-finite parameters", t, model, sink, options);
    }

    std::size_t confident = 0;
    std::size_t confident_correct = 0;
    for (const auto& r : records) {
      if (r.confidence == 0) continue;
      ++confident;
      if (options.diagnostic_labels && options.diagnostic_labels->values[r.row] == r.target_label) {
        ++confident_correct;
      }
    }
    const double ratio = static_cast<double>(confident) / static_cast<double>(rows.size());
    result.confident_trace.push_back(ratio);

    const bool refreshed = maybe_refresh(memory, model, target, t, config.update_period);
    if (refreshed) on_built(t, memory);

    if (refreshed || t % config.log_interval == 0) {
      StepMetrics m;
      m.iter = t;
      m.loss_source = ls;
      m.loss_self = lt;
      m.alpha = alpha;
      m.confident_ratio = ratio;
      if (options.diagnostic_labels) {
        if (confident > 0) {
          m.pseudo_label_accuracy = static_cast<double>(confident_correct) / static_cast<double>(confident);
        }
        m.target_accuracy = evaluate(model, target, *options.diagnostic_labels);
      }
      sink.push(m);
    }
  }

  src.verify_frozen();
  result.metrics = sink.take();
  return result;
}

void write_metrics_jsonl(std::ostream& out, std::span<const StepMetrics> metrics) {
  for (const auto& m : metrics) {
    nlohmann::ordered_json j;
    j["iter"] = m.iter;
    j["loss_source"] = m.loss_source;
    j["loss_self"] = m.loss_self;
    j["alpha"] = m.alpha;
    j["confident_ratio"] = m.confident_ratio;
    j["pseudo_label_accuracy"] = m.pseudo_label_accuracy ? nlohmann::ordered_json(*m.pseudo_label_accuracy) : nullptr;
    j["target_accuracy"] = m.target_accuracy ? nlohmann::ordered_json(*m.target_accuracy) : nullptr;
    out << j.dump() << '\n';
  }
}

std::string metrics_jsonl(std::span<const StepMetrics> metrics) {
  std::ostringstream ss;
  write_metrics_jsonl(ss, metrics);
  return ss.str();
}

std::vector<EntropyBin> accuracy_by_entropy(const TargetModel& model, const Dataset& data, const Labels& labels,
                                            std::size_t bins) {
  check_aligned(data, labels);
  require(bins >= 1 && bins <= data.size(), ErrorCode::kInvalidInput, "accuracy_by_entropy: bad bin count");
  struct Scored {
    double entropy;
    bool correct;
  };
  std::vector<Scored> scored;
  scored.reserve(data.size());
  for (std::size_t i = 0; i < data.size(); ++i) {
    const ForwardResult r = forward(model.extractor, model.head_t, data.row(i));
    scored.push_back({normalized_entropy(r.prob), static_cast<int>(argmax(r.prob)) == labels.values[i]});
  }
  std::stable_sort(scored.begin(), scored.end(), [](const auto& a, const auto& b) { return a.entropy < b.entropy; });
  std::vector<EntropyBin> out;
  for (std::size_t b = 0; b < bins; ++b) {
    const std::size_t begin = b * scored.size() / bins;
    const std::size_t end = (b + 1) * scored.size() / bins;
    EntropyBin bin;
    bin.count = end - begin;
    std::size_t correct = 0;
    for (std::size_t i = begin; i < end; ++i) correct += scored[i].correct ? 1 : 0;
    bin.accuracy = bin.count ? static_cast<double>(correct) / static_cast<double>(bin.count) : 0.0;
    bin.max_entropy = end > begin ? scored[end - 1].entropy : 0.0;
    out.push_back(bin);
  }
  return out;
}

}  // namespace prda
