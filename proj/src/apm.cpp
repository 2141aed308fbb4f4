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

#include "prda/apm.hpp"

#include <algorithm>
#include <ostream>
#include <string>

#include "prda/error.hpp"

namespace prda {

std::size_t PrototypeMemory::non_empty_classes() const {
  return static_cast<std::size_t>(
      std::count_if(classes.begin(), classes.end(), [](const auto& c) { return !c.empty(); }));
}

std::size_t PrototypeMemory::total_prototypes() const {
  std::size_t n = 0;
  for (const auto& c : classes) n += c.size();
  return n;
}

std::vector<ClassEntropySet> build_entropy_sets(const TargetModel& model, const Dataset& data) {
  require(data.size() > 0, ErrorCode::kInvalidInput, "build_entropy_sets: empty dataset");
  const std::size_t num_classes = model.head_t.output_dim();
  std::vector<ClassEntropySet> sets(num_classes);
  for (std::size_t c = 0; c < num_classes; ++c) sets[c].label = static_cast<int>(c);
  for (std::size_t i = 0; i < data.size(); ++i) {
    const ForwardResult r = forward(model.extractor, model.head_t, data.row(i));
    sets[argmax(r.prob)].entries.push_back({i, normalized_entropy(r.prob)});
  }
  return sets;
}

double adaptive_threshold(std::span<const ClassEntropySet> sets) {
  bool any = false;
  double eta = 0.0;
  for (const auto& set : sets) {
    if (set.entries.empty()) continue;
    const double class_min =
        std::min_element(set.entries.begin(), set.entries.end(), [](const auto& a, const auto& b) {
          return a.entropy < b.entropy;
        })->entropy;
    eta = any ? std::max(eta, class_min) : class_min;
    any = true;
  }
  require(any, ErrorCode::kInvalidState, "adaptive_threshold: every class entropy set is empty");
  return eta;
}

PrototypeMemory build_prototypes(const TargetModel& model, const Dataset& data,
                                 std::span<const ClassEntropySet> sets, double threshold, std::int64_t iter) {
  PrototypeMemory memory;
  memory.threshold = threshold;
  memory.built_at = iter;
  memory.classes.resize(sets.size());
  for (std::size_t c = 0; c < sets.size(); ++c) {
    for (const auto& e : sets[c].entries) {
      if (e.entropy > threshold) continue;
      memory.classes[c].push_back({e.row, data.id(e.row), e.entropy, model.extractor.forward(data.row(e.row))});
    }
  }
  return memory;
}

void check_prototype_coverage(std::span<const ClassEntropySet> sets, const PrototypeMemory& memory) {
  require(memory.non_empty_classes() >= 1, ErrorCode::kInvalidState, "prototype memory is empty");
  for (std::size_t c = 0; c < sets.size(); ++c) {
    if (!sets[c].entries.empty() && memory.classes[c].empty()) {
      fail(ErrorCode::kInvalidState,
           "class " + std::to_string(c) + " has predictions but no prototypes at threshold " +
               std::to_string(memory.threshold));
    }
  }
}

PrototypeMemory build_memory(const TargetModel& model, const Dataset& data, std::int64_t iter) {
  const auto sets = build_entropy_sets(model, data);
  const double eta = adaptive_threshold(sets);
  PrototypeMemory memory = build_prototypes(model, data, sets, eta, iter);
  check_prototype_coverage(sets, memory);
  return memory;
}

bool maybe_refresh(PrototypeMemory& memory, const TargetModel& model, const Dataset& data, std::int64_t iter,
                   std::int64_t update_period) {
  require(update_period >= 1, ErrorCode::kConfig, "update period must be at least 1");
  if (iter % update_period != 0) return false;
  memory = build_memory(model, data, iter);
  return true;
}

void write_memory_dump(std::ostream& out, const PrototypeMemory& memory) {
  out.precision(17);
  for (std::size_t c = 0; c < memory.classes.size(); ++c) {
    for (const auto& p : memory.classes[c]) {
      out << c << ' ' << p.sample_id << ' ' << p.entropy;
      for (double v : p.embedding) out << ' ' << v;
      out << '\n';
    }
  }
}

}  // namespace prda
