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

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "prda/network.hpp"

namespace prda {

enum class DatasetRole { kSource, kTargetTrain, kTargetEval };

/// Feature rows with stable ids. Carries no labels: class ids live in the
/// separate Labels type so code that only receives a Dataset cannot see them.
class Dataset {
 public:
  Dataset() = default;
  Dataset(std::size_t dim, int num_classes, DatasetRole role);

  void add(std::uint64_t id, std::span<const double> features);

  std::size_t size() const { return ids_.size(); }
  std::size_t dim() const { return dim_; }
  int num_classes() const { return num_classes_; }
  DatasetRole role() const { return role_; }
  std::uint64_t id(std::size_t row) const { return ids_[row]; }
  std::span<const double> row(std::size_t i) const { return rows_[i]; }
  const std::vector<std::uint64_t>& ids() const { return ids_; }
  const std::vector<std::vector<double>>& rows() const { return rows_; }

 private:
  std::size_t dim_ = 0;
  int num_classes_ = 0;
  DatasetRole role_ = DatasetRole::kTargetTrain;
  std::vector<std::uint64_t> ids_;
  std::vector<std::vector<double>> rows_;
};

/// Ground-truth class ids aligned row-by-row with a Dataset.
struct Labels {
  int num_classes = 0;
  std::vector<std::uint64_t> ids;
  std::vector<int> values;
};

struct LabeledDataset {
  Dataset data;
  Labels labels;
};

/// Throws kInvalidInput unless labels align with the dataset ids and lie in range.
void check_aligned(const Dataset& data, const Labels& labels);

enum class GeneratorFamily { kGaussianMixture, kTwoArcs };

struct ShiftSpec {
  GeneratorFamily family = GeneratorFamily::kGaussianMixture;
  int num_classes = 4;
  double radius = 2.0;
  double spread = 0.5;          // per-axis standard deviation
  double rotation_deg = 35.0;   // target rotation about the origin
  double translation[2] = {0.5, 0.0};
  double noise = 0.0;           // extra isotropic noise added to target samples
  std::size_t samples_per_domain = 2000;
  std::uint64_t seed = 0;

  void validate() const;
};

/// Default benchmark: four blobs rotated by 35 degrees and shifted by (0.5, 0).
ShiftSpec blobs_rot35_preset(std::uint64_t seed);
ShiftSpec two_arcs_preset(std::uint64_t seed);
/// Looks up "blobs-rot35" or "two-arcs"; throws kConfig otherwise.
ShiftSpec shift_preset(const std::string& name, std::uint64_t seed);

struct ShiftedPair {
  LabeledDataset source;
  Dataset target;
  Labels target_labels;
};

ShiftedPair generate_shifted_pair(const ShiftSpec& spec);

/// Per-class generator means in the source domain and after the target transform.
std::vector<std::array<double, 2>> class_means(const ShiftSpec& spec, bool target);

struct PretrainConfig {
  std::vector<std::size_t> hidden = {32};
  std::size_t embedding_dim = 16;
  std::size_t epochs = 10;
  std::size_t batch_size = 32;
  double lr = 0.01;
  double momentum = 0.9;
  double weight_decay = 5e-4;
  std::uint64_t seed = 0;
  // Below this training accuracy the benchmark is unusable (kQualityGate).
  double min_accuracy = 0.80;
};

struct PretrainResult {
  SourceModel model;
  double train_accuracy;
};

PretrainResult pretrain_source(const LabeledDataset& source, const PretrainConfig& config);

/// Accuracy of argmax C_s(F_s(x)).
double source_accuracy(const SourceModel& model, const Dataset& data, const Labels& labels);

/// Row indices for one epoch: a seeded permutation cut into batches; the last may be short.
std::vector<std::vector<std::size_t>> batches(std::size_t n, std::size_t batch_size, std::uint64_t seed,
                                              std::uint64_t epoch);

struct DatasetFile {
  Dataset data;
  std::optional<Labels> labels;
};

std::string format_dataset(const Dataset& data, const Labels* labels);
DatasetFile parse_dataset(const std::string& text, DatasetRole role_if_unlabeled = DatasetRole::kTargetTrain);
void write_dataset(const std::filesystem::path& path, const Dataset& data, const Labels* labels = nullptr);
DatasetFile read_dataset(const std::filesystem::path& path);

std::string format_labels(const Labels& labels);
Labels parse_labels(const std::string& text);
void write_labels(const std::filesystem::path& path, const Labels& labels);
Labels read_labels(const std::filesystem::path& path);

}  // namespace prda
