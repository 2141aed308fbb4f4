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
#include <iosfwd>
#include <span>
#include <vector>

#include "prda/apm.hpp"
#include "prda/data.hpp"
#include "prda/network.hpp"

namespace prda {

struct PseudoLabelRecord {
  std::size_t row = 0;
  std::uint64_t sample_id = 0;
  int source_label = 0;  // from the frozen source model
  int target_label = 0;  // most similar prototype class
  int confidence = 0;    // 1 when the sample passes the set-distance filter
  std::vector<double> scores;
};

int source_pseudo_label(const SourceModel& src, std::span<const double> x);

/// Source-model predictions for every row, computed once; the source model
/// never changes so they stay valid for the whole run.
class SourceLabelCache {
 public:
  SourceLabelCache() = default;
  SourceLabelCache(const SourceModel& src, const Dataset& data);

  int operator[](std::size_t row) const { return labels_[row]; }
  std::size_t size() const { return labels_.size(); }
  const std::vector<int>& labels() const { return labels_; }

 private:
  std::vector<int> labels_;
};

/// Mean cosine similarity of f to each class's prototypes; -inf for empty classes.
std::vector<double> class_similarity(std::span<const double> f, const PrototypeMemory& memory);

/// argmax of the scores, lowest index on ties. Throws kInvalidState if all are -inf.
int target_pseudo_label(std::span<const double> scores);

/// Hausdorff distance between {f} and the set; reduces to the farthest member.
double hausdorff_to_top1(std::span<const double> f, std::span<const Prototype> set);

/// The min-variant used for the runner-up class; reduces to the nearest member.
double modified_hausdorff_to_top2(std::span<const double> f, std::span<const Prototype> set);

struct TopTwo {
  int first = -1;
  int second = -1;  // -1 when fewer than two classes have prototypes
};

TopTwo top_two(std::span<const double> scores);

/// 1 iff the farthest top-1 prototype is strictly closer than the nearest top-2
/// prototype. Degenerate cases (no runner-up class) give 0.
int confidence(std::span<const double> f, const PrototypeMemory& memory, std::span<const double> scores);

PseudoLabelRecord label_sample(std::span<const double> f, const PrototypeMemory& memory);

/// Labels precomputed embeddings of the given dataset rows, in input order.
std::vector<PseudoLabelRecord> label_embeddings(std::span<const Embedding> embeddings, std::span<const std::size_t> rows,
                                                const Dataset& data, const SourceLabelCache& source_labels,
                                                const PrototypeMemory& memory);

/// Computes embeddings with the live extractor, then labels them.
std::vector<PseudoLabelRecord> label_batch(const TargetModel& model, const SourceLabelCache& source_labels,
                                           const PrototypeMemory& memory, const Dataset& data,
                                           std::span<const std::size_t> rows);

/// One line per record: sample id, source label, target label, w, top-2 scores.
void write_label_dump(std::ostream& out, std::span<const PseudoLabelRecord> records);

}  // namespace prda
