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

#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

#include "prda/apm.hpp"
#include "prda/data.hpp"
#include "prda/network.hpp"
#include "prda/pseudo_label.hpp"

namespace prda {

enum class AlphaMode { kDynamic, kStatic };

struct AdaptConfig {
  std::int64_t max_iter = 3000;
  std::size_t batch_size = 32;
  std::int64_t update_period = 100;
  LrSchedule lr{1e-3, 10.0, 0.75};
  double lr_extractor_scale = 1.0;  // extractor lr = head lr * scale
  double momentum = 0.9;
  double weight_decay = 5e-4;
  AlphaMode alpha_mode = AlphaMode::kDynamic;
  double alpha_static = 0.0;
  std::uint64_t seed = 0;
  std::int64_t log_interval = 50;

  void validate() const;
};

struct StepMetrics {
  std::int64_t iter = 0;
  double loss_source = 0.0;
  double loss_self = 0.0;
  double alpha = 0.0;
  double confident_ratio = 0.0;
  std::optional<double> pseudo_label_accuracy;  // over w = 1 samples, needs diagnostic labels
  std::optional<double> target_accuracy;        // needs diagnostic labels
};

struct RefreshEvent {
  std::int64_t iter = 0;
  double threshold = 0.0;
  std::vector<std::size_t> predicted;   // samples predicted per class
  std::vector<std::size_t> prototypes;  // prototypes stored per class
};

/// 2 * (sigmoid(10 iter / max_iter) - 0.5) in dynamic mode, the constant otherwise.
double alpha_at(const AdaptConfig& config, std::int64_t iter);

/// Mean over the batch of CE(C_s2t(F_t(x)), y_s).
double loss_source(const TargetModel& model, const BatchCache& cache, std::span<const int> source_labels);

/// Mean over the full batch of w * CE(C_t(F_t(x)), y_t); w = 0 rows count as zeros.
double loss_self(const TargetModel& model, const BatchCache& cache, std::span<const PseudoLabelRecord> records);

/// (1 - alpha) * source + alpha * self.
double total_loss(double loss_source, double loss_self, double alpha);

/// Accuracy of argmax C_t(F_t(x)) against ground truth.
double evaluate(const TargetModel& model, const Dataset& data, const Labels& labels);

struct AdaptOptions {
  // Used only for metric reporting; never influences training.
  const Labels* diagnostic_labels = nullptr;
  // On divergence a checkpoint and the last 100 metric records land here.
  std::optional<std::filesystem::path> divergence_dir;
  // When set, every refresh writes apm_<iter>.txt and labels_<iter>.txt.
  std::optional<std::filesystem::path> diagnostics_dir;
  std::function<void(const RefreshEvent&, const PrototypeMemory&)> on_refresh;
};

struct AdaptResult {
  TargetModel model;
  std::vector<StepMetrics> metrics;
  std::vector<double> confident_trace;  // w = 1 fraction of every step's batch
  std::vector<RefreshEvent> refreshes;
};

/// Runs the progressive self-training loop from a frozen source model over an
/// unlabeled target dataset.
AdaptResult adapt(const SourceModel& src, const Dataset& target, const AdaptConfig& config,
                  const AdaptOptions& options = {});

void write_metrics_jsonl(std::ostream& out, std::span<const StepMetrics> metrics);
std::string metrics_jsonl(std::span<const StepMetrics> metrics);

struct EntropyBin {
  double max_entropy = 0.0;
  std::size_t count = 0;
  double accuracy = 0.0;
};

/// Splits samples into equal-count bins by C_t entropy (ascending) and
/// reports the accuracy of C_t's prediction within each bin.
std::vector<EntropyBin> accuracy_by_entropy(const TargetModel& model, const Dataset& data, const Labels& labels,
                                            std::size_t bins);

}  // namespace prda
