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

// Exercises the shared library strictly through its C header.

#include <doctest.h>

#include <cmath>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <string>
#include <vector>

#include "prda/prda.h"
#include "support.hpp"

namespace {

struct Benchmark {
  prda_dataset* source = nullptr;
  prda_dataset* target = nullptr;
  prda_labels* labels = nullptr;
  prda_model* model = nullptr;
  ~Benchmark() {
    prda_dataset_free(source);
    prda_dataset_free(target);
    prda_labels_free(labels);
    prda_model_free(model);
  }
};

void make_benchmark(Benchmark& b, uint64_t samples = 400) {
  prda_shift_spec spec;
  REQUIRE(prda_shift_spec_preset("blobs-rot35", 0, &spec) == PRDA_OK);
  spec.samples_per_domain = samples;
  REQUIRE(prda_generate(&spec, &b.source, &b.target, &b.labels) == PRDA_OK);
  prda_pretrain_config pc;
  prda_pretrain_config_default(&pc);
  double acc = 0.0;
  REQUIRE(prda_pretrain(b.source, &pc, &b.model, &acc) == PRDA_OK);
  REQUIRE(acc >= pc.min_accuracy);
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

}  // namespace

TEST_SUITE("c_api") {
  TEST_CASE("version and status strings") {
    CHECK(std::string(prda_version()) == "1.0.0");
    CHECK(std::string(prda_status_string(PRDA_OK)) != std::string(prda_status_string(PRDA_ERR_PARSE)));
    for (int s = PRDA_OK; s <= PRDA_ERR_INTERNAL; ++s) {
      CHECK(std::strlen(prda_status_string(static_cast<prda_status>(s))) > 0);
    }
  }

  TEST_CASE("null arguments are usage errors with a message") {
    prda_model* m = nullptr;
    CHECK(prda_model_load(nullptr, &m) == PRDA_ERR_USAGE);
    CHECK(m == nullptr);
    CHECK(std::strlen(prda_last_error()) > 0);
    prda_shift_spec spec;
    CHECK(prda_shift_spec_preset("blobs-rot35", 0, &spec) == PRDA_OK);
    CHECK(std::strlen(prda_last_error()) == 0);
  }

  TEST_CASE("shift spec validation maps to configuration errors") {
    prda_shift_spec spec;
    CHECK(prda_shift_spec_preset("no-such-preset", 0, &spec) == PRDA_ERR_CONFIG);
    REQUIRE(prda_shift_spec_preset("two-arcs", 3, &spec) == PRDA_OK);
    CHECK(spec.family == PRDA_GEN_TWO_ARCS);
    CHECK(spec.seed == 3);
    CHECK(prda_shift_spec_validate(&spec) == PRDA_OK);
    spec.rotation_deg = 400.0;
    CHECK(prda_shift_spec_validate(&spec) == PRDA_ERR_CONFIG);
  }

  TEST_CASE("missing and malformed files") {
    prda_test::TempDir dir;
    prda_dataset* d = nullptr;
    CHECK(prda_dataset_read((dir / "absent.csv").c_str(), &d) == PRDA_ERR_IO);
    {
      std::ofstream(dir / "bad.csv") << "id,x0\n0,notanumber\n";
    }
    CHECK(prda_dataset_read((dir / "bad.csv").c_str(), &d) == PRDA_ERR_PARSE);
    CHECK(d == nullptr);
    prda_model* m = nullptr;
    {
      std::ofstream(dir / "bad.prda") << "nonsense";
    }
    CHECK(prda_model_load((dir / "bad.prda").c_str(), &m) == PRDA_ERR_PARSE);
  }

  TEST_CASE("generated data keeps target labels apart") {
    Benchmark b;
    prda_shift_spec spec;
    REQUIRE(prda_shift_spec_preset("blobs-rot35", 1, &spec) == PRDA_OK);
    spec.samples_per_domain = 200;
    REQUIRE(prda_generate(&spec, &b.source, &b.target, &b.labels) == PRDA_OK);
    CHECK(prda_dataset_is_labeled(b.source) == 1);
    CHECK(prda_dataset_is_labeled(b.target) == 0);
    CHECK(prda_dataset_size(b.target) == 200);
    CHECK(prda_labels_size(b.labels) == 200);
    CHECK(prda_dataset_dim(b.target) == 2);
    CHECK(prda_dataset_num_classes(b.target) == 4);
    double row[2];
    CHECK(prda_dataset_row(b.target, 0, row, 2) == PRDA_OK);
    CHECK(std::isfinite(row[0]));
    CHECK(prda_dataset_row(b.target, 200, row, 2) != PRDA_OK);
    CHECK(prda_dataset_row(b.target, 0, row, 1) != PRDA_OK);
  }

  TEST_CASE("pre-training on unlabeled data is rejected") {
    Benchmark b;
    make_benchmark(b, 200);
    prda_pretrain_config pc;
    prda_pretrain_config_default(&pc);
    prda_model* m = nullptr;
    CHECK(prda_pretrain(b.target, &pc, &m, nullptr) == PRDA_ERR_INVALID_INPUT);
    pc.min_accuracy = 1.01;
    CHECK(prda_pretrain(b.source, &pc, &m, nullptr) != PRDA_OK);
    pc.min_accuracy = 0.999;
    pc.epochs = 0;
    CHECK(prda_pretrain(b.source, &pc, &m, nullptr) == PRDA_ERR_QUALITY_GATE);
    CHECK(m == nullptr);
  }

  TEST_CASE("files round-trip through the API") {
    Benchmark b;
    make_benchmark(b, 200);
    prda_test::TempDir dir;
    const auto src = dir / "source.csv", tgt = dir / "target.csv", lab = dir / "labels.csv", mod = dir / "m.prda";
    REQUIRE(prda_dataset_write(b.source, src.c_str()) == PRDA_OK);
    REQUIRE(prda_dataset_write(b.target, tgt.c_str()) == PRDA_OK);
    REQUIRE(prda_labels_write(b.labels, lab.c_str()) == PRDA_OK);
    REQUIRE(prda_model_save(b.model, mod.c_str()) == PRDA_OK);

    prda_dataset *s2 = nullptr, *t2 = nullptr;
    prda_labels* l2 = nullptr;
    prda_model* m2 = nullptr;
    REQUIRE(prda_dataset_read(src.c_str(), &s2) == PRDA_OK);
    REQUIRE(prda_dataset_read(tgt.c_str(), &t2) == PRDA_OK);
    REQUIRE(prda_labels_read(lab.c_str(), &l2) == PRDA_OK);
    REQUIRE(prda_model_load(mod.c_str(), &m2) == PRDA_OK);
    CHECK(prda_dataset_is_labeled(s2) == 1);
    CHECK(prda_dataset_is_labeled(t2) == 0);
    CHECK(prda_model_get_kind(m2) == PRDA_MODEL_SOURCE);
    CHECK(prda_model_digest(m2) == prda_model_digest(b.model));

    double a1 = 0, a2 = 0;
    REQUIRE(prda_evaluate(b.model, b.target, b.labels, &a1) == PRDA_OK);
    REQUIRE(prda_evaluate(m2, t2, l2, &a2) == PRDA_OK);
    CHECK(a1 == a2);
    CHECK(prda_evaluate(m2, t2, nullptr, &a2) == PRDA_ERR_INVALID_INPUT);
    REQUIRE(prda_evaluate(m2, s2, nullptr, &a2) == PRDA_OK);
    CHECK(a2 >= 0.95);

    uint64_t h1 = 0, h2 = 0;
    REQUIRE(prda_file_digest(mod.c_str(), &h1) == PRDA_OK);
    REQUIRE(prda_model_save(m2, (dir / "again.prda").c_str()) == PRDA_OK);
    REQUIRE(prda_file_digest((dir / "again.prda").c_str(), &h2) == PRDA_OK);
    CHECK(h1 == h2);
    prda_dataset_free(s2);
    prda_dataset_free(t2);
    prda_labels_free(l2);
    prda_model_free(m2);
  }

  TEST_CASE("predictions are probability vectors") {
    Benchmark b;
    make_benchmark(b, 200);
    double x[2], p[4];
    REQUIRE(prda_dataset_row(b.target, 5, x, 2) == PRDA_OK);
    REQUIRE(prda_model_predict(b.model, x, 2, p, 4) == PRDA_OK);
    CHECK(std::accumulate(p, p + 4, 0.0) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(prda_model_predict(b.model, x, 3, p, 4) != PRDA_OK);
    CHECK(prda_model_predict(b.model, x, 2, p, 3) != PRDA_OK);
  }

  TEST_CASE("adaptation through the API") {
    Benchmark b;
    make_benchmark(b);
    prda_adapt_config c;
    prda_adapt_config_default(&c);
    CHECK(c.max_iter == 3000);
    CHECK(c.alpha_dynamic != 0);
    c.max_iter = 200;
    c.update_period = 50;
    c.log_interval = 20;
    prda_run* run = nullptr;
    REQUIRE(prda_adapt(b.model, b.target, &c, b.labels, nullptr, &run) == PRDA_OK);
    const prda_model* t = prda_run_model(run);
    CHECK(prda_model_get_kind(t) == PRDA_MODEL_TARGET);
    CHECK(prda_run_steps(run) == 200);
    CHECK(prda_run_refresh_count(run) == 5);
    CHECK(prda_run_metrics_count(run) == 12);
    std::vector<double> trace(200);
    CHECK(prda_run_confident_trace(run, trace.data(), 199) != PRDA_OK);
    REQUIRE(prda_run_confident_trace(run, trace.data(), trace.size()) == PRDA_OK);
    for (double r : trace) CHECK((r >= 0.0 && r <= 1.0));

    double x[2], p[4];
    REQUIRE(prda_dataset_row(b.target, 0, x, 2) == PRDA_OK);
    REQUIRE(prda_model_predict(t, x, 2, p, 4) == PRDA_OK);
    CHECK(std::accumulate(p, p + 4, 0.0) == doctest::Approx(1.0).epsilon(1e-12));

    prda_test::TempDir dir;
    REQUIRE(prda_run_write_metrics(run, (dir / "m.jsonl").c_str()) == PRDA_OK);
    const std::string text = slurp(dir / "m.jsonl");
    CHECK(std::count(text.begin(), text.end(), '\n') == 12);
    CHECK(text.rfind("{\"iter\":20,", 0) == 0);

    prda_run* second = nullptr;
    CHECK(prda_adapt(t, b.target, &c, nullptr, nullptr, &second) == PRDA_ERR_CONFIG);
    c.batch_size = 0;
    CHECK(prda_adapt(b.model, b.target, &c, nullptr, nullptr, &second) == PRDA_ERR_CONFIG);
    CHECK(second == nullptr);
    prda_run_free(run);
  }

  TEST_CASE("diverging runs report their own status") {
    Benchmark b;
    make_benchmark(b, 200);
    prda_adapt_config c;
    prda_adapt_config_default(&c);
    c.max_iter = 100;
    c.lr0 = 1e6;
    prda_test::TempDir dir;
    prda_run* run = nullptr;
    CHECK(prda_adapt(b.model, b.target, &c, nullptr, dir.path().c_str(), &run) == PRDA_ERR_DIVERGENCE);
    CHECK(run == nullptr);
    CHECK(std::filesystem::exists(dir / "divergence_checkpoint.prda"));
  }

  TEST_CASE("the access log lists every file read") {
    Benchmark b;
    make_benchmark(b, 200);
    prda_test::TempDir dir;
    const auto tgt = dir / "target.csv", mod = dir / "m.prda";
    REQUIRE(prda_dataset_write(b.target, tgt.c_str()) == PRDA_OK);
    REQUIRE(prda_model_save(b.model, mod.c_str()) == PRDA_OK);
    prda_access_log_clear();
    CHECK(prda_access_log_size() == 0);
    prda_dataset* d = nullptr;
    prda_model* m = nullptr;
    REQUIRE(prda_dataset_read(tgt.c_str(), &d) == PRDA_OK);
    REQUIRE(prda_model_load(mod.c_str(), &m) == PRDA_OK);
    REQUIRE(prda_access_log_size() == 2);
    CHECK(std::string(prda_access_log_entry(0)) == std::filesystem::canonical(tgt).string());
    CHECK(std::string(prda_access_log_entry(1)) == std::filesystem::canonical(mod).string());
    CHECK(prda_access_log_entry(2) == nullptr);
    prda_dataset_free(d);
    prda_model_free(m);
  }
}
