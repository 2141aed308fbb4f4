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

#include "prda/data.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <numbers>
#include <numeric>
#include <random>
#include <unordered_set>

#include "prda/error.hpp"
#include "prda/io.hpp"

namespace prda {

Dataset::Dataset(std::size_t dim, int num_classes, DatasetRole role)
    : dim_(dim), num_classes_(num_classes), role_(role) {
  require(dim > 0, ErrorCode::kConfig, "dataset dimension must be positive");
  require(num_classes >= 2, ErrorCode::kConfig, "dataset needs at least two classes");
}

void Dataset::add(std::uint64_t id, std::span<const double> features) {
  require(features.size() == dim_, ErrorCode::kInvalidInput, "dataset row has wrong dimension");
  require(all_finite(features), ErrorCode::kInvalidInput, "dataset row contains non-finite values");
  ids_.push_back(id);
  rows_.emplace_back(features.begin(), features.end());
}

void check_aligned(const Dataset& data, const Labels& labels) {
  require(labels.values.size() == data.size() && labels.ids.size() == data.size(), ErrorCode::kInvalidInput,
          "labels do not cover the dataset");
  require(labels.num_classes == data.num_classes(), ErrorCode::kInvalidInput, "label class count mismatch");
  for (std::size_t i = 0; i < data.size(); ++i) {
    require(labels.ids[i] == data.id(i), ErrorCode::kInvalidInput,
            "label id " + std::to_string(labels.ids[i]) + " does not match dataset id " +
                std::to_string(data.id(i)));
    require(labels.values[i] >= 0 && labels.values[i] < labels.num_classes, ErrorCode::kInvalidInput,
            "label out of range");
  }
}

// ---------------------------------------------------------------------------
// Synthetic covariate shift

void ShiftSpec::validate() const {
  require(num_classes >= 2, ErrorCode::kConfig, "need at least two classes");
  require(family != GeneratorFamily::kTwoArcs || num_classes == 2, ErrorCode::kConfig,
          "two-arcs generator has exactly two classes");
  require(std::isfinite(spread) && spread > 0.0, ErrorCode::kConfig, "spread must be positive");
  require(std::isfinite(radius) && radius > 0.0, ErrorCode::kConfig, "radius must be positive");
  require(rotation_deg >= 0.0 && rotation_deg < 360.0, ErrorCode::kConfig, "rotation must lie in [0, 360)");
  require(std::isfinite(translation[0]) && std::isfinite(translation[1]), ErrorCode::kConfig,
          "translation must be finite");
  require(std::isfinite(noise) && noise >= 0.0, ErrorCode::kConfig, "noise must be non-negative");
  require(samples_per_domain >= static_cast<std::size_t>(num_classes) * 10, ErrorCode::kConfig,
          "need at least 10 samples per class");
}

ShiftSpec blobs_rot35_preset(std::uint64_t seed) {
  ShiftSpec spec;
  spec.seed = seed;
  return spec;
}

ShiftSpec two_arcs_preset(std::uint64_t seed) {
  ShiftSpec spec;
  spec.family = GeneratorFamily::kTwoArcs;
  spec.num_classes = 2;
  spec.radius = 1.0;
  spec.spread = 0.1;
  spec.rotation_deg = 30.0;
  spec.translation[0] = 0.0;
  spec.translation[1] = 0.0;
  spec.seed = seed;
  return spec;
}

ShiftSpec shift_preset(const std::string& name, std::uint64_t seed) {
  if (name == "blobs-rot35") return blobs_rot35_preset(seed);
  if (name == "two-arcs") return two_arcs_preset(seed);
  fail(ErrorCode::kConfig, "unknown preset '" + name + "'");
}

namespace {

using Point = std::array<double, 2>;

Point transform(const ShiftSpec& spec, Point p) {
  const double theta = spec.rotation_deg * std::numbers::pi / 180.0;
  const double c = std::cos(theta);
  const double s = std::sin(theta);
  return {c * p[0] - s * p[1] + spec.translation[0], s * p[0] + c * p[1] + spec.translation[1]};
}

// Arc centers are shifted so the pair straddles the origin.
Point arcs_offset(const ShiftSpec& spec) { return {spec.radius / 2.0, spec.radius / 4.0}; }

Point sample_base(const ShiftSpec& spec, int label, std::mt19937_64& rng) {
  std::normal_distribution<double> gauss(0.0, spec.spread);
  if (spec.family == GeneratorFamily::kGaussianMixture) {
    const double angle = 2.0 * std::numbers::pi * label / spec.num_classes;
    return {spec.radius * std::cos(angle) + gauss(rng), spec.radius * std::sin(angle) + gauss(rng)};
  }
  std::uniform_real_distribution<double> arc(0.0, std::numbers::pi);
  const double t = arc(rng);
  const Point off = arcs_offset(spec);
  const double r = spec.radius;
  Point p = label == 0 ? Point{r * std::cos(t), r * std::sin(t)}
                       : Point{r - r * std::cos(t), r / 2.0 - r * std::sin(t)};
  return {p[0] - off[0] + gauss(rng), p[1] - off[1] + gauss(rng)};
}

}  // namespace

std::vector<std::array<double, 2>> class_means(const ShiftSpec& spec, bool target) {
  std::vector<Point> means;
  for (int c = 0; c < spec.num_classes; ++c) {
    Point m;
    if (spec.family == GeneratorFamily::kGaussianMixture) {
      const double angle = 2.0 * std::numbers::pi * c / spec.num_classes;
      m = {spec.radius * std::cos(angle), spec.radius * std::sin(angle)};
    } else {
      // E[cos t] = 0 and E[sin t] = 2/pi for t ~ U[0, pi].
      const double r = spec.radius;
      const Point off = arcs_offset(spec);
      m = c == 0 ? Point{0.0, 2.0 * r / std::numbers::pi} : Point{r, r / 2.0 - 2.0 * r / std::numbers::pi};
      m = {m[0] - off[0], m[1] - off[1]};
    }
    means.push_back(target ? transform(spec, m) : m);
  }
  return means;
}

ShiftedPair generate_shifted_pair(const ShiftSpec& spec) {
  spec.validate();
  std::mt19937_64 source_rng(derive_seed(spec.seed, "data/source"));
  std::mt19937_64 target_rng(derive_seed(spec.seed, "data/target"));
  std::normal_distribution<double> noise(0.0, 1.0);

  ShiftedPair pair{{Dataset(2, spec.num_classes, DatasetRole::kSource), Labels{spec.num_classes, {}, {}}},
                   Dataset(2, spec.num_classes, DatasetRole::kTargetTrain),
                   Labels{spec.num_classes, {}, {}}};
  // Labels cycle through the classes so both domains share the same priors.
  for (std::size_t i = 0; i < spec.samples_per_domain; ++i) {
    const int label = static_cast<int>(i % static_cast<std::size_t>(spec.num_classes));
    const Point p = sample_base(spec, label, source_rng);
    pair.source.data.add(i, p);
    pair.source.labels.ids.push_back(i);
    pair.source.labels.values.push_back(label);
  }
  for (std::size_t i = 0; i < spec.samples_per_domain; ++i) {
    const int label = static_cast<int>(i % static_cast<std::size_t>(spec.num_classes));
    Point p = transform(spec, sample_base(spec, label, target_rng));
    if (spec.noise > 0.0) {
      p[0] += spec.noise * noise(target_rng);
      p[1] += spec.noise * noise(target_rng);
    }
    pair.target.add(i, p);
    pair.target_labels.ids.push_back(i);
    pair.target_labels.values.push_back(label);
  }
  return pair;
}

// ---------------------------------------------------------------------------
// Source pre-training

std::vector<std::vector<std::size_t>> batches(std::size_t n, std::size_t batch_size, std::uint64_t seed,
                                              std::uint64_t epoch) {
  require(batch_size >= 1, ErrorCode::kConfig, "batch size must be at least 1");
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::mt19937_64 rng(derive_seed(seed + 0x9e3779b97f4a7c15ULL * (epoch + 1), "shuffle"));
  std::shuffle(order.begin(), order.end(), rng);
  std::vector<std::vector<std::size_t>> out;
  for (std::size_t start = 0; start < n; start += batch_size) {
    const std::size_t end = std::min(n, start + batch_size);
    out.emplace_back(order.begin() + static_cast<std::ptrdiff_t>(start),
                     order.begin() + static_cast<std::ptrdiff_t>(end));
  }
  return out;
}

double source_accuracy(const SourceModel& model, const Dataset& data, const Labels& labels) {
  check_aligned(data, labels);
  require(data.size() > 0, ErrorCode::kInvalidInput, "cannot evaluate on an empty dataset");
  std::size_t correct = 0;
  for (std::size_t i = 0; i < data.size(); ++i) {
    const auto logits = model.classifier().forward(model.extractor().forward(data.row(i)));
    if (static_cast<int>(argmax(logits)) == labels.values[i]) ++correct;
  }
  return static_cast<double>(correct) / static_cast<double>(data.size());
}

PretrainResult pretrain_source(const LabeledDataset& source, const PretrainConfig& config) {
  check_aligned(source.data, source.labels);
  require(source.data.size() > 0, ErrorCode::kInvalidInput, "empty source dataset");
  require(config.embedding_dim > 0 && config.batch_size > 0, ErrorCode::kConfig, "invalid pretrain config");

  std::mt19937_64 init_rng(derive_seed(config.seed, "init"));
  std::vector<std::size_t> ext_sizes{source.data.dim()};
  ext_sizes.insert(ext_sizes.end(), config.hidden.begin(), config.hidden.end());
  ext_sizes.push_back(config.embedding_dim);
  Network extractor = Network::glorot_uniform(ext_sizes, init_rng);
  Network classifier = Network::glorot_uniform(
      {config.embedding_dim, static_cast<std::size_t>(source.data.num_classes())}, init_rng);

  const std::uint64_t shuffle_seed = derive_seed(config.seed, "pretrain");
  Activations ext_acts;
  Activations cls_acts;
  for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
    for (const auto& batch : batches(source.data.size(), config.batch_size, shuffle_seed, epoch)) {
      const double inv = 1.0 / static_cast<double>(batch.size());
      for (std::size_t row : batch) {
        extractor.forward(source.data.row(row), ext_acts);
        classifier.forward(ext_acts.output, cls_acts);
        ProbVector grad = softmax(cls_acts.output);
        grad[static_cast<std::size_t>(source.labels.values[row])] -= 1.0;
        for (double& g : grad) g *= inv;
        extractor.backward(ext_acts, classifier.backward(cls_acts, grad));
      }
      sgd_step(extractor, config.lr, config.momentum, config.weight_decay);
      sgd_step(classifier, config.lr, config.momentum, config.weight_decay);
    }
  }

  SourceModel model(extractor.clone_parameters(), classifier.clone_parameters());
  const double accuracy = source_accuracy(model, source.data, source.labels);
  if (accuracy < config.min_accuracy) {
    fail(ErrorCode::kQualityGate, "source pre-training reached only " + std::to_string(accuracy) +
                                      " accuracy (gate " + std::to_string(config.min_accuracy) + ")");
  }
  return PretrainResult{std::move(model), accuracy};
}

// ---------------------------------------------------------------------------
// CSV format

namespace {

void append_double(std::string& out, double v) {
  char buf[32];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  out.append(buf, ptr);
}

std::vector<std::string_view> split(std::string_view line, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = line.find(sep, start);
    out.push_back(line.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

[[noreturn]] void parse_fail(std::size_t line, const std::string& what) {
  fail(ErrorCode::kParse, "line " + std::to_string(line) + ": " + what);
}

template <typename T>
T parse_number(std::string_view field, std::size_t line, const char* what) {
  field = trim(field);
  T value{};
  auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
  if (ec != std::errc() || ptr != field.data() + field.size()) {
    parse_fail(line, std::string("malformed ") + what + " '" + std::string(field) + "'");
  }
  return value;
}

// Reads "key=value" out of a header token list.
long header_value(const std::vector<std::string_view>& tokens, std::string_view key) {
  for (auto tok : tokens) {
    if (tok.size() > key.size() && tok.substr(0, key.size()) == key && tok[key.size()] == '=') {
      return parse_number<long>(tok.substr(key.size() + 1), 1, "header value");
    }
  }
  parse_fail(1, "header is missing '" + std::string(key) + "='");
}

std::vector<std::string_view> lines_of(const std::string& text) {
  std::vector<std::string_view> lines = split(text, '\n');
  while (!lines.empty() && trim(lines.back()).empty()) lines.pop_back();
  return lines;
}

}  // namespace

std::string format_dataset(const Dataset& data, const Labels* labels) {
  if (labels) check_aligned(data, *labels);
  std::string out = "# prda-dataset v1 I=" + std::to_string(data.dim()) +
                    " N_c=" + std::to_string(data.num_classes()) + " labeled=" + (labels ? "1" : "0") + "\n";
  for (std::size_t i = 0; i < data.size(); ++i) {
    out += std::to_string(data.id(i));
    for (double v : data.row(i)) {
      out += ',';
      append_double(out, v);
    }
    if (labels) {
      out += ',';
      out += std::to_string(labels->values[i]);
    }
    out += '\n';
  }
  return out;
}

DatasetFile parse_dataset(const std::string& text, DatasetRole role_if_unlabeled) {
  const auto lines = lines_of(text);
  if (lines.empty()) parse_fail(1, "empty file");
  const auto header = split(trim(lines[0]), ' ');
  if (header.size() < 3 || header[0] != "#" || header[1] != "prda-dataset" || header[2] != "v1") {
    parse_fail(1, "expected header '# prda-dataset v1 I=<int> N_c=<int> labeled=<0|1>'");
  }
  const long dim = header_value(header, "I");
  const long num_classes = header_value(header, "N_c");
  const long labeled = header_value(header, "labeled");
  if (dim < 1) parse_fail(1, "I must be positive");
  if (num_classes < 2) parse_fail(1, "N_c must be at least 2");
  if (labeled != 0 && labeled != 1) parse_fail(1, "labeled must be 0 or 1");

  DatasetFile file{Dataset(static_cast<std::size_t>(dim), static_cast<int>(num_classes),
                           labeled ? DatasetRole::kSource : role_if_unlabeled),
                   std::nullopt};
  if (labeled) file.labels = Labels{static_cast<int>(num_classes), {}, {}};

  const std::size_t expected = 1 + static_cast<std::size_t>(dim) + (labeled ? 1 : 0);
  std::unordered_set<std::uint64_t> seen;
  std::vector<double> features(static_cast<std::size_t>(dim));
  for (std::size_t ln = 1; ln < lines.size(); ++ln) {
    const std::size_t line_no = ln + 1;
    const auto row = trim(lines[ln]);
    if (row.empty()) parse_fail(line_no, "blank line inside data");
    const auto fields = split(row, ',');
    if (fields.size() != expected) {
      parse_fail(line_no, "expected " + std::to_string(expected) + " fields, got " + std::to_string(fields.size()));
    }
    const auto id = parse_number<std::uint64_t>(fields[0], line_no, "id");
    if (!seen.insert(id).second) parse_fail(line_no, "duplicate id " + std::to_string(id));
    for (std::size_t j = 0; j < features.size(); ++j) {
      features[j] = parse_number<double>(fields[1 + j], line_no, "feature");
      if (!std::isfinite(features[j])) parse_fail(line_no, "non-finite feature");
    }
    file.data.add(id, features);
    if (labeled) {
      const int label = parse_number<int>(fields.back(), line_no, "label");
      if (label < 0 || label >= num_classes) {
        parse_fail(line_no, "label " + std::to_string(label) + " outside [0, " + std::to_string(num_classes) + ")");
      }
      file.labels->ids.push_back(id);
      file.labels->values.push_back(label);
    }
  }
  return file;
}

void write_dataset(const std::filesystem::path& path, const Dataset& data, const Labels* labels) {
  io::write_file(path, format_dataset(data, labels));
}

DatasetFile read_dataset(const std::filesystem::path& path) {
  try {
    return parse_dataset(io::read_file(path));
  } catch (const Error& e) {
    if (e.code() != ErrorCode::kParse) throw;
    fail(ErrorCode::kParse, path.string() + ": " + e.what());
  }
}

std::string format_labels(const Labels& labels) {
  std::string out = "# prda-labels v1 N_c=" + std::to_string(labels.num_classes) + "\n";
  for (std::size_t i = 0; i < labels.values.size(); ++i) {
    out += std::to_string(labels.ids[i]) + "," + std::to_string(labels.values[i]) + "\n";
  }
  return out;
}

Labels parse_labels(const std::string& text) {
  const auto lines = lines_of(text);
  if (lines.empty()) parse_fail(1, "empty file");
  const auto header = split(trim(lines[0]), ' ');
  if (header.size() < 3 || header[0] != "#" || header[1] != "prda-labels" || header[2] != "v1") {
    parse_fail(1, "expected header '# prda-labels v1 N_c=<int>'");
  }
  const long num_classes = header_value(header, "N_c");
  if (num_classes < 2) parse_fail(1, "N_c must be at least 2");
  Labels labels{static_cast<int>(num_classes), {}, {}};
  for (std::size_t ln = 1; ln < lines.size(); ++ln) {
    const auto fields = split(trim(lines[ln]), ',');
    if (fields.size() != 2) parse_fail(ln + 1, "expected 'id,label'");
    const int label = parse_number<int>(fields[1], ln + 1, "label");
    if (label < 0 || label >= num_classes) parse_fail(ln + 1, "label out of range");
    labels.ids.push_back(parse_number<std::uint64_t>(fields[0], ln + 1, "id"));
    labels.values.push_back(label);
  }
  return labels;
}

void write_labels(const std::filesystem::path& path, const Labels& labels) {
  io::write_file(path, format_labels(labels));
}

Labels read_labels(const std::filesystem::path& path) {
  try {
    return parse_labels(io::read_file(path));
  } catch (const Error& e) {
    if (e.code() != ErrorCode::kParse) throw;
    fail(ErrorCode::kParse, path.string() + ": " + e.what());
  }
}

}  // namespace prda
