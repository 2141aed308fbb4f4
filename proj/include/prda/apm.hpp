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

// Adaptive prototype memory. Every target sample is classified by C_t and
// scored by its normalized entropy; the admission threshold is the largest of
// the per-class minimum entropies, so each predicted class keeps at least its
// most certain sample and classes with many certain samples keep more.

#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

#include "prda/core_math.hpp"
#include "prda/data.hpp"
#include "prda/network.hpp"

namespace prda {

struct EntropyEntry {
  std::size_t row;  // row index in the dataset
  double entropy;
};

struct ClassEntropySet {
  int label = 0;
  std::vector<EntropyEntry> entries;  // ascending row order
};

struct Prototype {
  std::size_t row;
  std::uint64_t sample_id;
  double entropy;
  Embedding embedding;
};

struct PrototypeMemory {
  std::vector<std::vector<Prototype>> classes;
  double threshold = 0.0;
  std::int64_t built_at = -1;

  std::size_t num_classes() const { return classes.size(); }
  std::size_t non_empty_classes() const;
  std::size_t total_prototypes() const;
};

/// Groups every sample under its C_t prediction (lowest index on ties) with
/// its normalized entropy. Returns one set per class, possibly empty.
std::vector<ClassEntropySet> build_entropy_sets(const TargetModel& model, const Dataset& data);

/// max over non-empty classes of that class's minimum entropy.
double adaptive_threshold(std::span<const ClassEntropySet> sets);

/// Embeddings F_t(x) of every sample whose entropy is <= threshold, filed under its predicted class.
PrototypeMemory build_prototypes(const TargetModel& model, const Dataset& data,
                                 std::span<const ClassEntropySet> sets, double threshold, std::int64_t iter);

/// Throws kInvalidState if a class with predictions ended up without prototypes.
void check_prototype_coverage(std::span<const ClassEntropySet> sets, const PrototypeMemory& memory);

/// Full build: entropy sets, threshold, prototypes, coverage check.
PrototypeMemory build_memory(const TargetModel& model, const Dataset& data, std::int64_t iter);

/// Rebuilds when iter % update_period == 0. Returns true if a rebuild happened.
bool maybe_refresh(PrototypeMemory& memory, const TargetModel& model, const Dataset& data, std::int64_t iter,
                   std::int64_t update_period);

/// One line per prototype: class, sample id, entropy, embedding values.
void write_memory_dump(std::ostream& out, const PrototypeMemory& memory);

}  // namespace prda
