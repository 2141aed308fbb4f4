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

#include "prda/core_math.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>

#include "prda/error.hpp"

namespace prda {

const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidInput: return "invalid input";
    case ErrorCode::kDegenerateInput: return "degenerate input";
    case ErrorCode::kConfig: return "configuration error";
    case ErrorCode::kInvalidState: return "invalid state";
    case ErrorCode::kUsage: return "usage error";
    case ErrorCode::kDivergence: return "training diverged";
    case ErrorCode::kParse: return "parse error";
    case ErrorCode::kIo: return "i/o error";
    case ErrorCode::kQualityGate: return "quality gate failed";
  }
  return "unknown error";
}

bool all_finite(std::span<const double> v) {
  return std::all_of(v.begin(), v.end(), [](double x) { return std::isfinite(x); });
}

double log_sum_exp(std::span<const double> logits) {
  require(!logits.empty(), ErrorCode::kInvalidInput, "log_sum_exp: empty logits");
  require(all_finite(logits), ErrorCode::kInvalidInput, "log_sum_exp: non-finite logit");
  const double top = *std::max_element(logits.begin(), logits.end());
  double sum = 0.0;
  for (double z : logits) sum += std::exp(z - top);
  return top + std::log(sum);
}

ProbVector softmax(std::span<const double> logits) {
  require(!logits.empty(), ErrorCode::kInvalidInput, "softmax: empty logits");
  require(all_finite(logits), ErrorCode::kInvalidInput, "softmax: non-finite logit");
  const double top = *std::max_element(logits.begin(), logits.end());
  ProbVector out(logits.size());
  double sum = 0.0;
  for (std::size_t i = 0; i < logits.size(); ++i) {
    out[i] = std::exp(logits[i] - top);
    sum += out[i];
  }
  for (double& p : out) p /= sum;
  return out;
}

double normalized_entropy(std::span<const double> probs) {
  require(probs.size() >= 2, ErrorCode::kInvalidInput,
          "normalized_entropy: need at least two classes");
  double h = 0.0;
  for (double p : probs) {
    if (p > kEntropyFloor) h -= p * std::log(p);
  }
  const double value = h / std::log(static_cast<double>(probs.size()));
  return std::clamp(value, 0.0, 1.0);
}

double l2_norm(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

double cosine_similarity(std::span<const double> a, std::span<const double> b) {
  require(a.size() == b.size(), ErrorCode::kInvalidInput, "cosine_similarity: dimension mismatch");
  const double na = l2_norm(a);
  const double nb = l2_norm(b);
  require(na > 0.0 && nb > 0.0, ErrorCode::kDegenerateInput, "cosine_similarity: zero-norm vector");
  double dot = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) dot += a[i] * b[i];
  return std::clamp(dot / (na * nb), -1.0, 1.0);
}

double cosine_distance(std::span<const double> a, std::span<const double> b) {
  return 1.0 - cosine_similarity(a, b);
}

std::size_t argmax(std::span<const double> values) {
  require(!values.empty(), ErrorCode::kInvalidInput, "argmax: empty input");
  std::size_t best = 0;
  for (std::size_t i = 1; i < values.size(); ++i) {
    if (values[i] > values[best]) best = i;
  }
  return best;
}

std::uint64_t fnv1a64(std::span<const std::byte> bytes, std::uint64_t seed) {
  std::uint64_t h = seed;
  for (std::byte b : bytes) {
    h ^= static_cast<std::uint64_t>(b);
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::uint64_t fnv1a64(std::span<const double> values) { return fnv1a64(std::as_bytes(values)); }

std::uint64_t derive_seed(std::uint64_t seed, std::string_view stream) {
  std::uint64_t z = seed ^ fnv1a64(std::as_bytes(std::span(stream.data(), stream.size())));
  // splitmix64 finalizer
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

}  // namespace prda
