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
#include <span>
#include <string_view>
#include <vector>

namespace prda {

/// Class probabilities; entries in [0, 1] summing to one.
using ProbVector = std::vector<double>;
/// A point in the extractor's output space.
using Embedding = std::vector<double>;

// Entries with p at or below this are treated as contributing 0 * log 0 = 0.
inline constexpr double kEntropyFloor = 1e-12;

ProbVector softmax(std::span<const double> logits);

/// log(sum(exp(z))) evaluated with the max subtracted.
double log_sum_exp(std::span<const double> logits);

/// Shannon entropy divided by log(N_c), so the result lies in [0, 1].
double normalized_entropy(std::span<const double> probs);

double cosine_similarity(std::span<const double> a, std::span<const double> b);

/// 1 - cosine similarity, in [0, 2].
double cosine_distance(std::span<const double> a, std::span<const double> b);

/// Index of the largest entry; the lowest index wins ties.
std::size_t argmax(std::span<const double> values);

double l2_norm(std::span<const double> v);

bool all_finite(std::span<const double> v);

/// 64-bit FNV-1a over raw bytes. Used for model checksums and file digests.
std::uint64_t fnv1a64(std::span<const std::byte> bytes, std::uint64_t seed = 0xcbf29ce484222325ULL);

std::uint64_t fnv1a64(std::span<const double> values);

/// Deterministic sub-stream seed: mixes a user seed with a stream name.
std::uint64_t derive_seed(std::uint64_t seed, std::string_view stream);

}  // namespace prda
