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

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <random>
#include <span>
#include <vector>

#include "prda/core_math.hpp"

namespace prda {

struct DenseLayer {
  std::size_t in = 0;
  std::size_t out = 0;
  std::vector<double> weight;  // out x in, row-major
  std::vector<double> bias;
  std::vector<double> grad_weight;
  std::vector<double> grad_bias;
  std::vector<double> velocity_weight;
  std::vector<double> velocity_bias;
};

/// Per-sample values retained by a forward pass so backward can run later.
struct Activations {
  std::vector<std::vector<double>> layer_inputs;
  std::vector<std::vector<double>> pre_activations;
  std::vector<double> output;
};

/// Fully connected network, ReLU after every layer except the last.
class Network {
 public:
  Network() = default;
  /// sizes = {input, hidden..., output}; parameters start at zero.
  explicit Network(std::vector<std::size_t> sizes);

  /// Uniform init in [-s, s] with s = sqrt(6 / (fan_in + fan_out)), zero biases.
  static Network glorot_uniform(std::vector<std::size_t> sizes, std::mt19937_64& rng);

  const std::vector<std::size_t>& sizes() const { return sizes_; }
  std::size_t input_dim() const { return sizes_.front(); }
  std::size_t output_dim() const { return sizes_.back(); }
  std::size_t parameter_count() const;

  std::vector<DenseLayer>& layers() { return layers_; }
  const std::vector<DenseLayer>& layers() const { return layers_; }

  std::vector<double> forward(std::span<const double> x) const;
  void forward(std::span<const double> x, Activations& acts) const;

  /// Accumulates parameter gradients for one sample and returns dL/dx.
  std::vector<double> backward(const Activations& acts, std::span<const double> grad_output);

  void zero_grad();

  /// Same parameters, cleared gradient and momentum buffers.
  Network clone_parameters() const;

  // Flat views over parameters in serialization order (per layer: weights, then biases).
  double parameter(std::size_t k) const;
  void set_parameter(std::size_t k, double value);
  double gradient(std::size_t k) const;
  std::vector<double> flat_parameters() const;

  std::uint64_t digest() const;

  /// Incremented by every optimizer step; lets caches detect stale activations.
  std::uint64_t generation() const { return generation_; }
  void bump_generation() { ++generation_; }

 private:
  std::pair<std::size_t, std::size_t> locate(std::size_t k) const;

  std::vector<std::size_t> sizes_;
  std::vector<DenseLayer> layers_;
  std::uint64_t generation_ = 0;
};

/// velocity <- momentum * velocity + grad + weight_decay * param;
/// param <- param - lr * velocity; gradients are cleared afterwards.
/// Throws kDivergence on a non-finite gradient.
void sgd_step(Network& net, double lr, double momentum, double weight_decay);

struct LrSchedule {
  double lr0 = 1e-3;
  double a = 10.0;
  double b = 0.75;
};

/// lr0 * (1 + a p)^(-b) for relative progress p in [0, 1].
double lr_at(const LrSchedule& schedule, double p);

/// Frozen pre-trained model. Parameters are fixed at construction and a
/// digest is recorded so later reads can prove nothing changed them.
class SourceModel {
 public:
  SourceModel(Network extractor, Network classifier);

  const Network& extractor() const { return extractor_; }
  const Network& classifier() const { return classifier_; }
  std::uint64_t recorded_digest() const { return digest_; }
  std::uint64_t current_digest() const;
  /// Throws kInvalidState if the parameters no longer match the recorded digest.
  void verify_frozen() const;

 private:
  Network extractor_;
  Network classifier_;
  std::uint64_t digest_;
};

struct TargetModel {
  Network extractor;
  Network head_s2t;
  Network head_t;

  std::uint64_t digest() const;
};

enum class Head { kSourceToTarget, kTarget };

/// Target model whose extractor and both heads are copies of the source model.
TargetModel init_target_from_source(const SourceModel& src);

struct ForwardResult {
  Embedding embedding;
  std::vector<double> logits;
  ProbVector prob;
};

ForwardResult forward(const Network& extractor, const Network& head, std::span<const double> x);

/// Forward activations for a mini-batch through the shared extractor and
/// both heads, retained for backward_cross_entropy.
class BatchCache {
 public:
  struct Sample {
    Activations extractor;
    Activations head_s2t;
    Activations head_t;
  };

  BatchCache() = default;
  BatchCache(const TargetModel& model, std::span<const std::vector<double>> inputs);

  std::size_t size() const { return samples_.size(); }
  bool empty() const { return samples_.empty(); }
  const Sample& sample(std::size_t i) const { return samples_[i]; }
  const Embedding& embedding(std::size_t i) const { return samples_[i].extractor.output; }
  const std::vector<double>& logits(std::size_t i, Head head) const;

  /// True when the model has not stepped since this cache was filled.
  bool matches(const TargetModel& model) const;

 private:
  std::vector<Sample> samples_;
  std::uint64_t gen_extractor_ = 0;
  std::uint64_t gen_s2t_ = 0;
  std::uint64_t gen_t_ = 0;
  std::uint64_t digest_extractor_ = 0;
};

/// Accumulates gradients of scale * mean_i(w_i * CE(head(F(x_i)), label_i))
/// into the selected head and the extractor. The mean is over the full batch.
void backward_cross_entropy(TargetModel& model, const BatchCache& cache, std::span<const int> labels,
                            std::span<const double> weights, Head head, double scale = 1.0);

/// Cross-entropy of one sample's logits against a label.
double cross_entropy(std::span<const double> logits, int label);

// Binary checkpoint format shared by source and target models.
enum class ModelKind : std::uint32_t { kSource = 1, kTarget = 2 };

inline constexpr std::uint32_t kModelFormatVersion = 1;

struct ModelFile {
  ModelKind kind = ModelKind::kSource;
  std::vector<Network> networks;
};

std::vector<std::byte> encode_model(const ModelFile& file);
ModelFile decode_model(std::span<const std::byte> bytes);

void save_model(const std::filesystem::path& path, const SourceModel& model);
void save_model(const std::filesystem::path& path, const TargetModel& model);
ModelFile load_model_file(const std::filesystem::path& path);
SourceModel load_source_model(const std::filesystem::path& path);
TargetModel load_target_model(const std::filesystem::path& path);

}  // namespace prda
