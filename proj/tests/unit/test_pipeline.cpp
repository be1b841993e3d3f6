// Copyright 2026 The Emoq Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <fstream>
#include <sstream>

#include <doctest.h>

#include "emoq/pipeline.hpp"
#include "emoq/synth.hpp"
#include "test_util.hpp"

using namespace emoq;

namespace {

EmbeddingSet pipeline_data(double ambiguity, std::uint64_t seed) {
  SynthSpec spec;
  spec.classes = 4;
  spec.dim = 8;
  spec.per_class = 40;
  spec.separation = 6.0;
  spec.ambiguity_fraction = ambiguity;
  spec.frames_min = 2;
  spec.frames_max = 4;
  spec.seed = seed;
  return generate(spec);
}

PipelineConfig small_config() {
  PipelineConfig cfg;
  cfg.stages = 3;
  cfg.entries = 4;
  cfg.budget = 40;  // specific regimes draw all 40 from one class
  cfg.seed = 42;
  return cfg;
}

std::string csv_of(const EvalReport& rep) {
  std::ostringstream os;
  rep.to_csv(os);
  return os.str();
}

}  // namespace

TEST_CASE("rq1 report covers every depth for every emotion and metric") {
  auto data = pipeline_data(0.0, 1);
  auto cfg = small_config();
  auto rep = run_rq1(data, cfg);

  const Taxonomy tax = Taxonomy::canonical(4);
  for (int c = 0; c < 4; ++c) {
    int cosine_rows = 0, recall_rows = 0;
    for (const auto& row : rep.rows()) {
      if (row.emotion != tax.name(c)) continue;
      if (row.metric == "cosine") ++cosine_rows;
      if (row.metric == "recall") ++recall_rows;
    }
    CHECK(cosine_rows == cfg.stages);
    CHECK(recall_rows == cfg.stages);
  }

  // Fidelity and retention improve with depth on separated clusters.
  CHECK(rep.value(cfg.stages, "ALL", "cosine") >= rep.value(1, "ALL", "cosine"));
  CHECK(rep.value(cfg.stages, "ALL", "recall") >= rep.value(1, "ALL", "recall"));
  // Bitrate follows the fixed-width formula.
  CHECK(rep.value(2, "ALL", "bitrate_bps") == 2 * 2 * 50.0);
  for (int l = 1; l <= cfg.stages; ++l) {
    const double h = rep.value(l, "ALL", "entropy");
    CHECK(h >= 0.0);
    CHECK(h <= 1.0);
  }
}

TEST_CASE("rq2 balanced rows reproduce rq1 under identical seeds") {
  auto data = pipeline_data(0.0, 2);
  auto cfg = small_config();
  auto rq1 = run_rq1(data, cfg);
  auto rq2 = run_rq2(data, cfg);
  const Taxonomy tax = Taxonomy::canonical(4);
  for (int depth = 1; depth <= cfg.stages; ++depth) {
    for (int c = 0; c < 4; ++c) {
      CHECK(rq2.value(depth, tax.name(c), "cosine.balanced") ==
            rq1.value(depth, tax.name(c), "cosine"));
      CHECK(rq2.value(depth, tax.name(c), "recall.balanced") ==
            rq1.value(depth, tax.name(c), "recall"));
    }
  }
  for (const auto& row : rq2.rows()) {
    if (row.metric.rfind("entropy", 0) == 0) {
      CHECK(row.value >= 0.0);
      CHECK(row.value <= 1.0);
    }
  }
  // Matched and unmatched rows exist for every emotion and depth.
  for (int c = 0; c < 4; ++c) {
    CHECK_NOTHROW(rq2.value(1, tax.name(c), "cosine.matched"));
    CHECK_NOTHROW(rq2.value(1, tax.name(c), "cosine.unmatched"));
    CHECK_NOTHROW(rq2.value(1, tax.name(c), "recall.matched"));
    CHECK_NOTHROW(rq2.value(1, tax.name(c), "recall.unmatched"));
  }
}

TEST_CASE("rq3 reports both strata for every regime") {
  auto data = pipeline_data(0.3, 3);
  auto cfg = small_config();
  auto reports = run_rq3(data, cfg, {-1, 100, 99});
  REQUIRE(reports.size() == 3);
  CHECK(reports[0].first == "balanced");
  CHECK(reports[1].first == "100+0");
  CHECK(reports[2].first == "99+1");
  for (const auto& [name, rep] : reports) {
    for (int depth = 1; depth <= cfg.stages; ++depth) {
      CHECK_NOTHROW(rep.value(depth, "ALL", "jsd_low"));
      CHECK_NOTHROW(rep.value(depth, "ALL", "jsd_high"));
      CHECK_NOTHROW(rep.value(depth, "ALL", "top2_low"));
      CHECK_NOTHROW(rep.value(depth, "ALL", "top2_high"));
      CHECK(rep.value(depth, "ALL", "jsd") >= 0.0);
      CHECK(rep.value(depth, "ALL", "jsd") <= 1.0);
      CHECK(rep.value(depth, "ALL", "top2") >= 0.0);
      CHECK(rep.value(depth, "ALL", "top2") <= 1.0);
    }
  }
}

TEST_CASE("rq3 requires soft labels") {
  auto data = pipeline_data(0.0, 4);
  std::vector<Utterance> utts = data.utterances();
  utts[5].soft.reset();
  EmbeddingSet stripped(data.dim(), data.data(), utts, data.taxonomy(),
                        data.level());
  CHECK_THROWS_WITH_AS(run_rq3(stripped, small_config(), {-1}),
                       doctest::Contains(utts[5].uid.c_str()),
                       ValidationError);
}

TEST_CASE("rq4 produces the delta table layout") {
  auto data = pipeline_data(0.0, 5);
  auto cfg = small_config();
  // Two small pairs keep the unit suite fast; the acceptance suite runs the
  // full seven-configuration sweep.
  std::vector<SweepPair> pairs{{2, 4}, {3, 2}};
  auto table = run_rq4(data, cfg, pairs);
  CHECK(table.configs == std::vector<std::string>{"2x4", "3x2"});
  CHECK(table.bal_delta.size() == 2);
  CHECK(table.emoq100_delta.size() == 2);
  CHECK(table.emoq99_delta.size() == 2);
  CHECK(table.detail.value(0, "ALL", "baseline_delta") == 0.0);

  const std::string csv = table.table_csv();
  CHECK(csv.find("Config,2x4,3x2\n") == 0);
  CHECK(csv.find("\nBal,") != std::string::npos);
  CHECK(csv.find("\nEmo-Q(100),") != std::string::npos);
  CHECK(csv.find("\nEmo-Q(99),") != std::string::npos);

  CHECK(default_sweep_pairs().size() == 7);
}

TEST_CASE("rq4 routing beats balanced quantization on overlapping clusters") {
  SynthSpec spec;
  spec.classes = 4;
  spec.dim = 32;
  spec.per_class = 250;
  spec.separation = 3.0;
  spec.frames_min = 1;
  spec.frames_max = 3;
  spec.seed = 6060;
  auto data = generate(spec);
  PipelineConfig cfg;
  cfg.budget = 200;
  cfg.seed = 19;
  auto table = run_rq4(data, cfg, {{8, 32}});
  CHECK(table.emoq100_delta[0] >= table.bal_delta[0]);
}

TEST_CASE("artifact caching reuses stacks and probes") {
  auto data = pipeline_data(0.0, 6);
  auto cfg = small_config();
  cfg.cache_dir = test::temp_dir("pipeline_cache");
  auto first = run_rq1(data, cfg);
  std::size_t cached = 0;
  for (const auto& entry :
       std::filesystem::directory_iterator(cfg.cache_dir)) {
    (void)entry;
    ++cached;
  }
  CHECK(cached >= 2);  // one stack, one probe
  auto second = run_rq1(data, cfg);
  CHECK(csv_of(first) == csv_of(second));
  std::filesystem::remove_all(cfg.cache_dir);
}

TEST_CASE("parallel sweep workers write the same bytes as a single worker") {
  auto data = pipeline_data(0.0, 8);
  SweepConfig cfg;
  cfg.pairs = {{2, 2}, {2, 4}, {3, 2}};
  cfg.regimes = {"balanced"};
  cfg.budget = 40;
  cfg.seed = 4;
  auto dir_seq = test::temp_dir("sweep_seq");
  auto dir_par = test::temp_dir("sweep_par");
  cfg.jobs = 1;
  run_sweep(data, cfg, dir_seq);
  cfg.jobs = 3;
  run_sweep(data, cfg, dir_par);
  std::ifstream a(dir_seq / "summary.csv"), b(dir_par / "summary.csv");
  std::stringstream sa, sb;
  sa << a.rdbuf();
  sb << b.rdbuf();
  CHECK(sa.str() == sb.str());
  std::filesystem::remove_all(dir_seq);
  std::filesystem::remove_all(dir_par);
}

TEST_CASE("sweep outputs are byte-stable across runs") {
  auto data = pipeline_data(0.0, 7);
  SweepConfig cfg;
  cfg.pairs = {{2, 2}, {2, 4}};
  cfg.regimes = {"balanced", "specific"};
  cfg.budget = 40;
  cfg.seed = 9;
  auto dir_a = test::temp_dir("sweep_a");
  auto dir_b = test::temp_dir("sweep_b");
  run_sweep(data, cfg, dir_a);
  run_sweep(data, cfg, dir_b);
  for (const char* name : {"summary.csv", "summary.json",
                           "sweep_L2_K2_balanced.csv",
                           "sweep_L2_K4_specific.csv"}) {
    std::ifstream a(dir_a / name), b(dir_b / name);
    REQUIRE(a);
    REQUIRE(b);
    std::stringstream sa, sb;
    sa << a.rdbuf();
    sb << b.rdbuf();
    CHECK(sa.str() == sb.str());
    CHECK(!sa.str().empty());
  }
  std::filesystem::remove_all(dir_a);
  std::filesystem::remove_all(dir_b);
}
