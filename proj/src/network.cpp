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

#include "prda/network.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "prda/error.hpp"

namespace prda {

Network::Network(std::vector<std::size_t> sizes) : sizes_(std::move(sizes)) {
  require(sizes_.size() >= 2, ErrorCode::kConfig, "network needs at least an input and output size");
  for (std::size_t s : sizes_) require(s > 0, ErrorCode::kConfig, "network layer sizes must be positive");
  layers_.reserve(sizes_.size() - 1);
  for (std::size_t l = 0; l + 1 < sizes_.size(); ++l) {
    DenseLayer layer;
    layer.in = sizes_[l];
    layer.out = sizes_[l + 1];
    layer.weight.assign(layer.in * layer.out, 0.0);
    layer.bias.assign(layer.out, 0.0);
    layer.grad_weight.assign(layer.weight.size(), 0.0);
    layer.grad_bias.assign(layer.out, 0.0);
    layer.velocity_weight.assign(layer.weight.size(), 0.0);
    layer.velocity_bias.assign(layer.out, 0.0);
    layers_.push_back(std::move(layer));
  }
}

Network Network::glorot_uniform(std::vector<std::size_t> sizes, std::mt19937_64& rng) {
  Network net(std::move(sizes));
  for (auto& layer : net.layers_) {
    const double s = std::sqrt(6.0 / static_cast<double>(layer.in + layer.out));
    std::uniform_real_distribution<double> dist(-s, s);
    for (double& w : layer.weight) w = dist(rng);
  }
  return net;
}

std::size_t Network::parameter_count() const {
  std::size_t n = 0;
  for (const auto& layer : layers_) n += layer.weight.size() + layer.bias.size();
  return n;
}

std::vector<double> Network::forward(std::span<const double> x) const {
  Activations acts;
  forward(x, acts);
  return std::move(acts.output);
}

void Network::forward(std::span<const double> x, Activations& acts) const {
  require(x.size() == input_dim(), ErrorCode::kInvalidInput,
          "forward: expected input of dimension " + std::to_string(input_dim()) + ", got " +
              std::to_string(x.size()));
  acts.layer_inputs.resize(layers_.size());
  acts.pre_activations.resize(layers_.size());
  std::vector<double> current(x.begin(), x.end());
  for (std::size_t l = 0; l < layers_.size(); ++l) {
    const DenseLayer& layer = layers_[l];
    std::vector<double> z(layer.bias);
    for (std::size_t o = 0; o < layer.out; ++o) {
      const double* row = layer.weight.data() + o * layer.in;
      double acc = 0.0;
      for (std::size_t i = 0; i < layer.in; ++i) acc += row[i] * current[i];
      z[o] += acc;
    }
    acts.layer_inputs[l] = std::move(current);
    acts.pre_activations[l] = z;
    if (l + 1 < layers_.size()) {
      for (double& v : z) v = std::max(v, 0.0);
    }
    current = std::move(z);
  }
  acts.output = std::move(current);
}

std::vector<double> Network::backward(const Activations& acts, std::span<const double> grad_output) {
  require(acts.layer_inputs.size() == layers_.size(), ErrorCode::kUsage,
          "backward: activations do not belong to this network");
  require(grad_output.size() == output_dim(), ErrorCode::kInvalidInput, "backward: gradient size mismatch");
  std::vector<double> delta(grad_output.begin(), grad_output.end());
  for (std::size_t l = layers_.size(); l-- > 0;) {
    DenseLayer& layer = layers_[l];
    if (l + 1 < layers_.size()) {
      const auto& pre = acts.pre_activations[l];
      for (std::size_t o = 0; o < layer.out; ++o) {
        if (pre[o] <= 0.0) delta[o] = 0.0;
      }
    }
    const auto& input = acts.layer_inputs[l];
    std::vector<double> grad_input(layer.in, 0.0);
    for (std::size_t o = 0; o < layer.out; ++o) {
      const double d = delta[o];
      if (d == 0.0) continue;
      layer.grad_bias[o] += d;
      double* grow = layer.grad_weight.data() + o * layer.in;
      const double* wrow = layer.weight.data() + o * layer.in;
      for (std::size_t i = 0; i < layer.in; ++i) {
        grow[i] += d * input[i];
        grad_input[i] += d * wrow[i];
      }
    }
    delta = std::move(grad_input);
  }
  return delta;
}

void Network::zero_grad() {
  for (auto& layer : layers_) {
    std::fill(layer.grad_weight.begin(), layer.grad_weight.end(), 0.0);
    std::fill(layer.grad_bias.begin(), layer.grad_bias.end(), 0.0);
  }
}

Network Network::clone_parameters() const {
  Network copy(sizes_);
  for (std::size_t l = 0; l < layers_.size(); ++l) {
    copy.layers_[l].weight = layers_[l].weight;
    copy.layers_[l].bias = layers_[l].bias;
  }
  return copy;
}

std::pair<std::size_t, std::size_t> Network::locate(std::size_t k) const {
  for (std::size_t l = 0; l < layers_.size(); ++l) {
    const std::size_t n = layers_[l].weight.size() + layers_[l].bias.size();
    if (k < n) return {l, k};
    k -= n;
  }
  fail(ErrorCode::kInvalidInput, "parameter index out of range");
}

double Network::parameter(std::size_t k) const {
  auto [l, off] = locate(k);
  const auto& layer = layers_[l];
  return off < layer.weight.size() ? layer.weight[off] : layer.bias[off - layer.weight.size()];
}

void Network::set_parameter(std::size_t k, double value) {
  auto [l, off] = locate(k);
  auto& layer = layers_[l];
  if (off < layer.weight.size()) {
    layer.weight[off] = value;
  } else {
    layer.bias[off - layer.weight.size()] = value;
  }
}

double Network::gradient(std::size_t k) const {
  auto [l, off] = locate(k);
  const auto& layer = layers_[l];
  return off < layer.grad_weight.size() ? layer.grad_weight[off] : layer.grad_bias[off - layer.weight.size()];
}

std::vector<double> Network::flat_parameters() const {
  std::vector<double> out;
  out.reserve(parameter_count());
  for (const auto& layer : layers_) {
    out.insert(out.end(), layer.weight.begin(), layer.weight.end());
    out.insert(out.end(), layer.bias.begin(), layer.bias.end());
  }
  return out;
}

std::uint64_t Network::digest() const {
  std::uint64_t h = fnv1a64(std::as_bytes(std::span(sizes_)));
  for (const auto& layer : layers_) {
    h = fnv1a64(std::as_bytes(std::span(layer.weight)), h);
    h = fnv1a64(std::as_bytes(std::span(layer.bias)), h);
  }
  return h;
}

namespace {

void step_buffer(std::vector<double>& param, std::vector<double>& grad, std::vector<double>& velocity,
                 double lr, double momentum, double weight_decay) {
  for (std::size_t i = 0; i < param.size(); ++i) {
    velocity[i] = momentum * velocity[i] + grad[i] + weight_decay * param[i];
    param[i] -= lr * velocity[i];
    grad[i] = 0.0;
  }
}

}  // namespace

void sgd_step(Network& net, double lr, double momentum, double weight_decay) {
  for (const auto& layer : net.layers()) {
    if (!all_finite(layer.grad_weight) || !all_finite(layer.grad_bias)) {
      fail(ErrorCode::kDivergence, "sgd_step: non-finite gradient");
    }
  }
  for (auto& layer : net.layers()) {
    step_buffer(layer.weight, layer.grad_weight, layer.velocity_weight, lr, momentum, weight_decay);
    step_buffer(layer.bias, layer.grad_bias, layer.velocity_bias, lr, momentum, weight_decay);
  }
  net.bump_generation();
}

double lr_at(const LrSchedule& schedule, double p) {
  return schedule.lr0 * std::pow(1.0 + schedule.a * p, -schedule.b);
}

SourceModel::SourceModel(Network extractor, Network classifier)
    : extractor_(std::move(extractor)), classifier_(std::move(classifier)) {
  require(extractor_.output_dim() == classifier_.input_dim(), ErrorCode::kConfig,
          "source model: classifier input does not match embedding size");
  digest_ = current_digest();
}

std::uint64_t SourceModel::current_digest() const {
  return extractor_.digest() ^ (classifier_.digest() * 0x9e3779b97f4a7c15ULL);
}

void SourceModel::verify_frozen() const {
  require(current_digest() == digest_, ErrorCode::kInvalidState, "source model parameters were modified");
}

std::uint64_t TargetModel::digest() const {
  std::uint64_t h = extractor.digest();
  h = h * 0x100000001b3ULL ^ head_s2t.digest();
  h = h * 0x100000001b3ULL ^ head_t.digest();
  return h;
}

TargetModel init_target_from_source(const SourceModel& src) {
  src.verify_frozen();
  require(src.classifier().input_dim() == src.extractor().output_dim(), ErrorCode::kConfig,
          "source model shapes are inconsistent");
  return TargetModel{src.extractor().clone_parameters(), src.classifier().clone_parameters(),
                     src.classifier().clone_parameters()};
}

ForwardResult forward(const Network& extractor, const Network& head, std::span<const double> x) {
  require(head.input_dim() == extractor.output_dim(), ErrorCode::kInvalidInput,
          "forward: head does not consume the extractor's embedding size");
  ForwardResult r;
  r.embedding = extractor.forward(x);
  r.logits = head.forward(r.embedding);
  r.prob = softmax(r.logits);
  return r;
}

BatchCache::BatchCache(const TargetModel& model, std::span<const std::vector<double>> inputs) {
  samples_.resize(inputs.size());
  for (std::size_t i = 0; i < inputs.size(); ++i) {
    auto& s = samples_[i];
    model.extractor.forward(inputs[i], s.extractor);
    model.head_s2t.forward(s.extractor.output, s.head_s2t);
    model.head_t.forward(s.extractor.output, s.head_t);
  }
  gen_extractor_ = model.extractor.generation();
  gen_s2t_ = model.head_s2t.generation();
  gen_t_ = model.head_t.generation();
  digest_extractor_ = model.extractor.digest();
}

const std::vector<double>& BatchCache::logits(std::size_t i, Head head) const {
  return head == Head::kTarget ? samples_[i].head_t.output : samples_[i].head_s2t.output;
}

bool BatchCache::matches(const TargetModel& model) const {
  return !samples_.empty() && gen_extractor_ == model.extractor.generation() &&
         gen_s2t_ == model.head_s2t.generation() && gen_t_ == model.head_t.generation() &&
         digest_extractor_ == model.extractor.digest();
}

double cross_entropy(std::span<const double> logits, int label) {
  require(label >= 0 && static_cast<std::size_t>(label) < logits.size(), ErrorCode::kInvalidInput,
          "cross_entropy: label out of range");
  return log_sum_exp(logits) - logits[static_cast<std::size_t>(label)];
}

void backward_cross_entropy(TargetModel& model, const BatchCache& cache, std::span<const int> labels,
                            std::span<const double> weights, Head head, double scale) {
  require(!cache.empty(), ErrorCode::kUsage, "backward_cross_entropy: no forward cache");
  require(cache.matches(model), ErrorCode::kUsage,
          "backward_cross_entropy: forward cache is stale or belongs to another model");
  require(labels.size() == cache.size() && weights.size() == cache.size(), ErrorCode::kInvalidInput,
          "backward_cross_entropy: labels/weights not aligned with the batch");
  Network& head_net = head == Head::kTarget ? model.head_t : model.head_s2t;
  const double inv_batch = 1.0 / static_cast<double>(cache.size());
  for (std::size_t i = 0; i < cache.size(); ++i) {
    require(weights[i] == 0.0 || weights[i] == 1.0, ErrorCode::kInvalidInput,
            "backward_cross_entropy: weights must be 0 or 1");
    if (weights[i] == 0.0 || scale == 0.0) continue;
    const auto& s = cache.sample(i);
    const auto& head_acts = head == Head::kTarget ? s.head_t : s.head_s2t;
    const int label = labels[i];
    require(label >= 0 && static_cast<std::size_t>(label) < head_acts.output.size(), ErrorCode::kInvalidInput,
            "backward_cross_entropy: label out of range");
    ProbVector grad = softmax(head_acts.output);
    grad[static_cast<std::size_t>(label)] -= 1.0;
    const double coef = scale * weights[i] * inv_batch;
    for (double& g : grad) g *= coef;
    const std::vector<double> grad_embedding = head_net.backward(head_acts, grad);
    model.extractor.backward(s.extractor, grad_embedding);
  }
}

}  // namespace prda
