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

#include <doctest.h>

#include <cmath>
#include <numbers>
#include <set>
#include <string>
#include <type_traits>
#include <vector>

#include "prda/data.hpp"
#include "prda/error.hpp"
#include "prda/io.hpp"
#include "prda/trainer.hpp"
#include "support.hpp"

using namespace prda;
using prda_test::Gen;

namespace {

ErrorCode code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an exception");
  return ErrorCode::kInvalidInput;
}

std::string error_text(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.what();
  }
  return {};
}

// A type with a label accessor would satisfy this.
template <typename T>
concept ExposesLabels = requires(const T& t) { t.labels(); } || requires(const T& t) { t.label(0); };

}  // namespace

TEST_SUITE("data") {
  TEST_CASE("training datasets expose no labels") {
    static_assert(!ExposesLabels<Dataset>);
    using AdaptSignature = AdaptResult (*)(const SourceModel&, const Dataset&, const AdaptConfig&,
                                           const AdaptOptions&);
    static_assert(std::is_same_v<decltype(&adapt), AdaptSignature>);
    CHECK(true);
  }

  TEST_CASE("shift spec validation") {
    ShiftSpec s = blobs_rot35_preset(0);
    CHECK_NOTHROW(s.validate());
    s.rotation_deg = 400.0;
    CHECK(code_of([&] { s.validate(); }) == ErrorCode::kConfig);
    s.rotation_deg = 360.0;
    CHECK(code_of([&] { s.validate(); }) == ErrorCode::kConfig);
    s = blobs_rot35_preset(0);
    s.spread = 0.0;
    CHECK(code_of([&] { generate_shifted_pair(s); }) == ErrorCode::kConfig);
    s = blobs_rot35_preset(0);
    s.samples_per_domain = 39;
    CHECK(code_of([&] { s.validate(); }) == ErrorCode::kConfig);
    CHECK(code_of([] { shift_preset("nope", 0); }) == ErrorCode::kConfig);
  }

  TEST_CASE("default preset matches the benchmark description") {
    const ShiftSpec s = shift_preset("blobs-rot35", 3);
    CHECK(s.num_classes == 4);
    CHECK(s.radius == 2.0);
    CHECK(s.rotation_deg == 35.0);
    CHECK(s.translation[0] == 0.5);
    CHECK(s.translation[1] == 0.0);
    CHECK(s.samples_per_domain == 2000);
    CHECK(s.seed == 3);
  }

  TEST_CASE("generation is deterministic and seed dependent") {
    const auto a = generate_shifted_pair(blobs_rot35_preset(5));
    const auto b = generate_shifted_pair(blobs_rot35_preset(5));
    const auto c = generate_shifted_pair(blobs_rot35_preset(6));
    CHECK(a.source.data.rows() == b.source.data.rows());
    CHECK(a.target.rows() == b.target.rows());
    CHECK(a.target_labels.values == b.target_labels.values);
    CHECK(a.target.rows() != c.target.rows());
  }

  TEST_CASE("class priors match across domains and ids are unique") {
    const auto p = generate_shifted_pair(blobs_rot35_preset(1));
    std::vector<int> src(4, 0), tgt(4, 0);
    for (int v : p.source.labels.values) ++src[static_cast<std::size_t>(v)];
    for (int v : p.target_labels.values) ++tgt[static_cast<std::size_t>(v)];
    CHECK(src == tgt);
    const std::set<std::uint64_t> ids(p.target.ids().begin(), p.target.ids().end());
    CHECK(ids.size() == p.target.size());
    CHECK_NOTHROW(check_aligned(p.target, p.target_labels));
  }

  TEST_CASE("target class means match the analytic transform within 3 sigma over root n") {
    const ShiftSpec spec = blobs_rot35_preset(2);
    const auto p = generate_shifted_pair(spec);
    const double th = 35.0 * std::numbers::pi / 180.0;
    std::vector<std::array<double, 2>> sum(4, {0.0, 0.0});
    std::vector<int> n(4, 0);
    for (std::size_t i = 0; i < p.target.size(); ++i) {
      const auto c = static_cast<std::size_t>(p.target_labels.values[i]);
      sum[c][0] += p.target.row(i)[0];
      sum[c][1] += p.target.row(i)[1];
      ++n[c];
    }
    for (std::size_t c = 0; c < 4; ++c) {
      const double a = 2.0 * std::numbers::pi * static_cast<double>(c) / 4.0;
      const double mx = 2.0 * std::cos(a), my = 2.0 * std::sin(a);
      const double ex = std::cos(th) * mx - std::sin(th) * my + 0.5;
      const double ey = std::sin(th) * mx + std::cos(th) * my;
      const double tol = 3.0 * spec.spread / std::sqrt(static_cast<double>(n[c]));
      CHECK(std::abs(sum[c][0] / n[c] - ex) < tol);
      CHECK(std::abs(sum[c][1] / n[c] - ey) < tol);
      CHECK(class_means(spec, true)[c][0] == doctest::Approx(ex).epsilon(1e-12));
    }
  }

  TEST_CASE("no-shift spec draws both domains from one distribution") {
    ShiftSpec s = blobs_rot35_preset(4);
    s.rotation_deg = 0.0;
    s.translation[0] = s.translation[1] = 0.0;
    const auto src = class_means(s, false);
    const auto tgt = class_means(s, true);
    for (std::size_t c = 0; c < src.size(); ++c) {
      CHECK(src[c][0] == doctest::Approx(tgt[c][0]));
      CHECK(src[c][1] == doctest::Approx(tgt[c][1]));
    }
  }

  TEST_CASE("two-arcs preset produces two balanced classes") {
    const auto p = generate_shifted_pair(shift_preset("two-arcs", 0));
    CHECK(p.target.num_classes() == 2);
    int ones = 0;
    for (int v : p.target_labels.values) ones += v;
    CHECK(ones == static_cast<int>(p.target.size() / 2));
  }

  TEST_CASE("batches cover every row once per epoch") {
    const auto b = batches(10, 3, 7, 0);
    REQUIRE(b.size() == 4);
    CHECK(b[0].size() == 3);
    CHECK(b[3].size() == 1);
    std::set<std::size_t> seen;
    for (const auto& batch : b) seen.insert(batch.begin(), batch.end());
    CHECK(seen.size() == 10);
    CHECK(batches(5, 8, 1, 0).size() == 1);
    CHECK(batches(100, 10, 3, 0) == batches(100, 10, 3, 0));
    CHECK(batches(100, 10, 3, 0) != batches(100, 10, 3, 1));
    CHECK(code_of([] { batches(4, 0, 1, 0); }) == ErrorCode::kConfig);
  }

  TEST_CASE("property: batching is a permutation for any size") {
    Gen g(21);
    for (int trial = 0; trial < 200; ++trial) {
      const std::size_t n = static_cast<std::size_t>(g.integer(1, 200));
      const std::size_t bs = static_cast<std::size_t>(g.integer(1, 40));
      const auto b = batches(n, bs, static_cast<std::uint64_t>(trial), static_cast<std::uint64_t>(g.integer(0, 9)));
      std::vector<int> count(n, 0);
      for (const auto& batch : b) {
        REQUIRE(batch.size() <= bs);
        for (std::size_t r : batch) ++count[r];
      }
      for (int c : count) REQUIRE(c == 1);
      REQUIRE(b.size() == (n + bs - 1) / bs);
    }
  }

  TEST_CASE("dataset csv round-trips bitwise") {
    Gen g(22);
    Dataset d(3, 4, DatasetRole::kSource);
    Labels l{4, {}, {}};
    for (std::uint64_t i = 0; i < 50; ++i) {
      auto row = g.vec(3, -1e6, 1e6);
      row[0] = g.normal() * 1e-300;
      d.add(i * 7 + 1, row);
      l.ids.push_back(i * 7 + 1);
      l.values.push_back(g.integer(0, 3));
    }
    prda_test::TempDir dir;
    write_dataset(dir / "d.csv", d, &l);
    const auto back = read_dataset(dir / "d.csv");
    CHECK(back.data.rows() == d.rows());
    CHECK(back.data.ids() == d.ids());
    REQUIRE(back.labels.has_value());
    CHECK(back.labels->values == l.values);

    write_dataset(dir / "u.csv", d);
    CHECK_FALSE(read_dataset(dir / "u.csv").labels.has_value());
    write_labels(dir / "l.csv", l);
    CHECK(read_labels(dir / "l.csv").values == l.values);
  }

  TEST_CASE("dataset csv parses a small labeled file") {
    const auto f = parse_dataset("# prda-dataset v1 I=2 N_c=3 labeled=1\n0,1.5,2.5,0\n1,-1,0,2\n2,3e-1,4,1\n");
    CHECK(f.data.size() == 3);
    CHECK(f.data.dim() == 2);
    CHECK(f.data.row(2)[0] == 0.3);
    CHECK(f.labels->values == std::vector<int>{0, 2, 1});
  }

  TEST_CASE("dataset csv errors carry line numbers") {
    CHECK(code_of([] { parse_dataset("# prda-dataset v1 I=2 N_c=3 labeled=1\n0,1,2,0\n1,1,2,5\n"); }) ==
          ErrorCode::kParse);
    CHECK(error_text([] { parse_dataset("# prda-dataset v1 I=2 N_c=3 labeled=1\n0,1,2,0\n1,1,2,5\n"); })
              .find("line 3") != std::string::npos);
    CHECK(error_text([] { parse_dataset("# prda-dataset v1 I=2 N_c=3 labeled=0\n0,1\n"); }).find("line 2") !=
          std::string::npos);
    CHECK(code_of([] { parse_dataset("id,x,y\n0,1,2\n"); }) == ErrorCode::kParse);
    CHECK(code_of([] { parse_dataset("# prda-dataset v1 I=2 N_c=3 labeled=0\n0,1,x\n"); }) == ErrorCode::kParse);
    CHECK(code_of([] { parse_dataset("# prda-dataset v1 I=1 N_c=2 labeled=0\n0,1\n0,2\n"); }) == ErrorCode::kParse);
    CHECK(code_of([] { parse_labels("# prda-labels v1 N_c=2\n0,2\n"); }) == ErrorCode::kParse);
  }

  TEST_CASE("labels must align with their dataset") {
    Dataset d(1, 2, DatasetRole::kTargetEval);
    d.add(0, std::vector<double>{1.0});
    d.add(1, std::vector<double>{2.0});
    CHECK(code_of([&] { check_aligned(d, Labels{2, {0, 2}, {0, 1}}); }) == ErrorCode::kInvalidInput);
    CHECK(code_of([&] { check_aligned(d, Labels{2, {0}, {0}}); }) == ErrorCode::kInvalidInput);
    CHECK_NOTHROW(check_aligned(d, Labels{2, {0, 1}, {1, 0}}));
  }

  TEST_CASE("pretraining reaches the accuracy floor on held-out source data") {
    const auto train = generate_shifted_pair(blobs_rot35_preset(0));
    const auto held = generate_shifted_pair(blobs_rot35_preset(1000));
    PretrainConfig cfg;
    const auto r = pretrain_source(train.source, cfg);
    CHECK(r.train_accuracy >= 0.95);
    CHECK(source_accuracy(r.model, held.source.data, held.source.labels) >= 0.95);
  }

  TEST_CASE("separable two-class blobs pretrain to 99 percent") {
    ShiftSpec s = blobs_rot35_preset(3);
    s.num_classes = 2;
    s.spread = 0.3;
    s.samples_per_domain = 600;
    const auto train = generate_shifted_pair(s);
    s.seed = 4;
    const auto held = generate_shifted_pair(s);
    const auto r = pretrain_source(train.source, PretrainConfig{});
    CHECK(source_accuracy(r.model, held.source.data, held.source.labels) >= 0.99);
  }

  TEST_CASE("zero training epochs stay near chance") {
    const auto p = generate_shifted_pair(blobs_rot35_preset(0));
    double mean = 0.0;
    for (std::uint64_t seed = 0; seed < 8; ++seed) {
      PretrainConfig cfg;
      cfg.epochs = 0;
      cfg.min_accuracy = 0.0;
      cfg.seed = seed;
      mean += pretrain_source(p.source, cfg).train_accuracy / 8.0;
    }
    CHECK(mean > 0.1);
    CHECK(mean < 0.45);
  }

  TEST_CASE("pretraining below the gate fails with a quality-gate error") {
    const auto p = generate_shifted_pair(blobs_rot35_preset(0));
    PretrainConfig cfg;
    cfg.epochs = 0;
    CHECK(code_of([&] { pretrain_source(p.source, cfg); }) == ErrorCode::kQualityGate);
  }

  TEST_CASE("a half-turn label flip drives source-only accuracy toward zero") {
    ShiftSpec s = blobs_rot35_preset(9);
    s.num_classes = 2;
    s.rotation_deg = 180.0;
    s.translation[0] = 0.0;
    s.samples_per_domain = 400;
    const auto p = generate_shifted_pair(s);
    const auto r = pretrain_source(p.source, PretrainConfig{});
    CHECK(source_accuracy(r.model, p.target, p.target_labels) < 0.05);
  }

  TEST_CASE("file reads are recorded in the access log") {
    prda_test::TempDir dir;
    io::write_file(dir / "x.txt", "hello");
    io::AccessLog::global().clear();
    CHECK(io::read_file(dir / "x.txt") == "hello");
    const auto entries = io::AccessLog::global().entries();
    REQUIRE(entries.size() == 1);
    CHECK(entries[0] == std::filesystem::canonical(dir / "x.txt").string());
  }
}
