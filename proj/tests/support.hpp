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

// Shared helpers for the test binaries: seeded generators, scratch
// directories and reference implementations written independently of the
// library code they check.

#pragma once

#include <unistd.h>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <limits>
#include <random>
#include <span>
#include <string>
#include <vector>

namespace prda_test {

/// Seeded generator wrapper for property tests.
class Gen {
 public:
  explicit Gen(std::uint64_t seed) : rng_(seed) {}

  double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng_); }
  double normal(double mean = 0.0, double sd = 1.0) { return std::normal_distribution<double>(mean, sd)(rng_); }
  int integer(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng_); }
  std::size_t index(std::size_t n) { return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng_); }
  bool coin() { return integer(0, 1) == 1; }

  std::vector<double> vec(std::size_t n, double lo = -1.0, double hi = 1.0) {
    std::vector<double> v(n);
    for (auto& x : v) x = uniform(lo, hi);
    return v;
  }

  /// Random vector with norm bounded away from zero.
  std::vector<double> nonzero_vec(std::size_t n) {
    for (;;) {
      auto v = vec(n);
      double s = 0.0;
      for (double x : v) s += x * x;
      if (s > 1e-2) return v;
    }
  }

  std::mt19937_64& engine() { return rng_; }

 private:
  std::mt19937_64 rng_;
};

/// Scratch directory removed on destruction.
class TempDir {
 public:
  TempDir() {
    static std::atomic<int> counter{0};
    path_ = std::filesystem::temp_directory_path() /
            ("prda_test_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
    std::filesystem::remove_all(path_);
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

// Reference formulas in extended precision -------------------------------

inline std::vector<long double> ref_softmax(std::span<const double> z) {
  std::vector<long double> out(z.size());
  long double sum = 0.0L;
  for (std::size_t i = 0; i < z.size(); ++i) sum += std::exp(static_cast<long double>(z[i]));
  for (std::size_t i = 0; i < z.size(); ++i) out[i] = std::exp(static_cast<long double>(z[i])) / sum;
  return out;
}

inline long double ref_entropy(std::span<const double> p) {
  long double h = 0.0L;
  for (double v : p) {
    if (v > 0.0) h -= static_cast<long double>(v) * std::log(static_cast<long double>(v));
  }
  return h / std::log(static_cast<long double>(p.size()));
}

inline long double ref_cosine(std::span<const double> a, std::span<const double> b) {
  long double dot = 0.0L, na = 0.0L, nb = 0.0L;
  for (std::size_t i = 0; i < a.size(); ++i) {
    dot += static_cast<long double>(a[i]) * b[i];
    na += static_cast<long double>(a[i]) * a[i];
    nb += static_cast<long double>(b[i]) * b[i];
  }
  return dot / (std::sqrt(na) * std::sqrt(nb));
}

/// Plain dense evaluation: weights row-major (out x in), ReLU on all but the last layer.
struct RefLayer {
  std::size_t in, out;
  std::vector<double> w, b;
};

inline std::vector<double> ref_forward(const std::vector<RefLayer>& layers, std::vector<double> x) {
  for (std::size_t l = 0; l < layers.size(); ++l) {
    const auto& L = layers[l];
    std::vector<double> y(L.out);
    for (std::size_t o = 0; o < L.out; ++o) {
      long double acc = L.b[o];
      for (std::size_t i = 0; i < L.in; ++i) acc += static_cast<long double>(L.w[o * L.in + i]) * x[i];
      y[o] = static_cast<double>(acc);
      if (l + 1 < layers.size()) y[o] = std::max(0.0, y[o]);
    }
    x = std::move(y);
  }
  return x;
}

/// sup over x in X of inf over y in Y of d(x, y), evaluated exhaustively.
template <typename Metric>
double directed_sup_inf(const std::vector<std::vector<double>>& X, const std::vector<std::vector<double>>& Y,
                        Metric d) {
  double sup = -std::numeric_limits<double>::infinity();
  for (const auto& x : X) {
    double inf = std::numeric_limits<double>::infinity();
    for (const auto& y : Y) inf = std::min(inf, d(x, y));
    sup = std::max(sup, inf);
  }
  return sup;
}

/// Two-sided Hausdorff distance: max of both directed terms.
template <typename Metric>
double brute_hausdorff(const std::vector<std::vector<double>>& A, const std::vector<std::vector<double>>& B,
                       Metric d) {
  return std::max(directed_sup_inf(A, B, d), directed_sup_inf(B, A, d));
}

/// The opposite corner case: the same directed terms combined with min.
template <typename Metric>
double brute_modified_hausdorff(const std::vector<std::vector<double>>& A, const std::vector<std::vector<double>>& B,
                                Metric d) {
  return std::min(directed_sup_inf(A, B, d), directed_sup_inf(B, A, d));
}

/// Cosine distance evaluated straight from the definition.
inline double ref_cosine_distance(const std::vector<double>& a, const std::vector<double>& b) {
  double dot = 0.0, na = 0.0, nb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    dot += a[i] * b[i];
    na += a[i] * a[i];
    nb += b[i] * b[i];
  }
  double c = dot / (std::sqrt(na) * std::sqrt(nb));
  c = std::clamp(c, -1.0, 1.0);
  return 1.0 - c;
}

}  // namespace prda_test
