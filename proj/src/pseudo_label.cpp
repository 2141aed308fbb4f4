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

#include "prda/pseudo_label.hpp"

#include <cmath>
#include <limits>
#include <ostream>

#include "prda/error.hpp"

namespace prda {

namespace {
constexpr double kNegInf = -std::numeric_limits<double>::infinity();
}

int source_pseudo_label(const SourceModel& src, std::span<const double> x) {
  return static_cast<int>(argmax(src.classifier().forward(src.extractor().forward(x))));
}

SourceLabelCache::SourceLabelCache(const SourceModel& src, const Dataset& data) {
  labels_.reserve(data.size());
  for (std::size_t i = 0; i < data.size(); ++i) labels_.push_back(source_pseudo_label(src, data.row(i)));
}

std::vector<double> class_similarity(std::span<const double> f, const PrototypeMemory& memory) {
  require(l2_norm(f) > 0.0, ErrorCode::kDegenerateInput, "class_similarity: zero-norm embedding");
  std::vector<double> scores(memory.num_classes(), kNegInf);
  for (std::size_t c = 0; c < memory.num_classes(); ++c) {
    const auto& protos = memory.classes[c];
    if (protos.empty()) continue;
    double sum = 0.0;
    for (const auto& p : protos) sum += cosine_similarity(p.embedding, f);
    scores[c] = sum / static_cast<double>(protos.size());
  }
  return scores;
}

int target_pseudo_label(std::span<const double> scores) {
  require(!scores.empty(), ErrorCode::kInvalidState, "target_pseudo_label: no scores");
  int best = -1;
  for (std::size_t c = 0; c < scores.size(); ++c) {
    if (scores[c] == kNegInf) continue;
    if (best < 0 || scores[c] > scores[static_cast<std::size_t>(best)]) best = static_cast<int>(c);
  }
  require(best >= 0, ErrorCode::kInvalidState, "target_pseudo_label: no class has prototypes");
  return best;
}

double hausdorff_to_top1(std::span<const double> f, std::span<const Prototype> set) {
  require(!set.empty(), ErrorCode::kInvalidInput, "hausdorff_to_top1: empty prototype set");
  double d = cosine_distance(f, set[0].embedding);
  for (std::size_t i = 1; i < set.size(); ++i) d = std::max(d, cosine_distance(f, set[i].embedding));
  return d;
}

double modified_hausdorff_to_top2(std::span<const double> f, std::span<const Prototype> set) {
  require(!set.empty(), ErrorCode::kInvalidInput, "modified_hausdorff_to_top2: empty prototype set");
  double d = cosine_distance(f, set[0].embedding);
  for (std::size_t i = 1; i < set.size(); ++i) d = std::min(d, cosine_distance(f, set[i].embedding));
  return d;
}

TopTwo top_two(std::span<const double> scores) {
  TopTwo t;
  t.first = target_pseudo_label(scores);
  for (std::size_t c = 0; c < scores.size(); ++c) {
    if (static_cast<int>(c) == t.first || scores[c] == kNegInf) continue;
    if (t.second < 0 || scores[c] > scores[static_cast<std::size_t>(t.second)]) t.second = static_cast<int>(c);
  }
  return t;
}

int confidence(std::span<const double> f, const PrototypeMemory& memory, std::span<const double> scores) {
  const TopTwo t = top_two(scores);
  if (t.second < 0) return 0;
  const double d_top1 = hausdorff_to_top1(f, memory.classes[static_cast<std::size_t>(t.first)]);
  const double d_top2 = modified_hausdorff_to_top2(f, memory.classes[static_cast<std::size_t>(t.second)]);
  return d_top1 < d_top2 ? 1 : 0;
}

PseudoLabelRecord label_sample(std::span<const double> f, const PrototypeMemory& memory) {
  PseudoLabelRecord r;
  r.scores = class_similarity(f, memory);
  r.target_label = target_pseudo_label(r.scores);
  r.confidence = confidence(f, memory, r.scores);
  return r;
}

std::vector<PseudoLabelRecord> label_embeddings(std::span<const Embedding> embeddings, std::span<const std::size_t> rows,
                                                const Dataset& data, const SourceLabelCache& source_labels,
                                                const PrototypeMemory& memory) {
  require(embeddings.size() == rows.size(), ErrorCode::kInvalidInput, "label_embeddings: rows/embeddings mismatch");
  require(source_labels.size() == data.size(), ErrorCode::kInvalidInput,
          "label_embeddings: source label cache does not cover the dataset");
  std::vector<PseudoLabelRecord> out;
  out.reserve(rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    PseudoLabelRecord r = label_sample(embeddings[i], memory);
    r.row = rows[i];
    r.sample_id = data.id(rows[i]);
    r.source_label = source_labels[rows[i]];
    out.push_back(std::move(r));
  }
  return out;
}

std::vector<PseudoLabelRecord> label_batch(const TargetModel& model, const SourceLabelCache& source_labels,
                                           const PrototypeMemory& memory, const Dataset& data,
                                           std::span<const std::size_t> rows) {
  std::vector<Embedding> embeddings;
  embeddings.reserve(rows.size());
  for (std::size_t row : rows) embeddings.push_back(model.extractor.forward(data.row(row)));
  return label_embeddings(embeddings, rows, data, source_labels, memory);
}

void write_label_dump(std::ostream& out, std::span<const PseudoLabelRecord> records) {
  out.precision(17);
  for (const auto& r : records) {
    const TopTwo t = top_two(r.scores);
    out << r.sample_id << ' ' << r.source_label << ' ' << r.target_label << ' ' << r.confidence << ' '
        << r.scores[static_cast<std::size_t>(t.first)] << ' ';
    if (t.second >= 0) {
      out << r.scores[static_cast<std::size_t>(t.second)];
    } else {
      out << "nan";
    }
    out << '\n';
  }
}

}  // namespace prda
