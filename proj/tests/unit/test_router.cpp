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

#include <cmath>

#include <doctest.h>

#include "emoq/router.hpp"
#include "emoq/synth.hpp"
#include "emoq/trainer.hpp"
#include "test_util.hpp"

using namespace emoq;

namespace {

RvqStack one_stage_stack(int dim, std::vector<float> words, int entries) {
  return RvqStack({Codebook(dim, entries, std::move(words))}, RegimeInfo{});
}

// Independent routing evaluator: per stack, greedy encode and double-sum
// reconstruction recomputed from scratch, then cosine and lowest-id argmax.
int oracle_route(std::span<const float> z, const RouterBank& bank) {
  std::vector<float> query(z.begin(), z.end());
  double qn = 0.0;
  for (float v : query) qn += static_cast<double>(v) * v;
  if (bank.normalized()) {
    const double inv = 1.0 / std::sqrt(qn);
    for (float& v : query) v = static_cast<float>(v * inv);
  }
  int best = 0;
  double best_score = -2.0;
  for (int c = 0; c < bank.classes(); ++c) {
    std::vector<float> residual = query;
    std::vector<double> recon(query.size(), 0.0);
    for (int l = 0; l < bank.depth(); ++l) {
      const Codebook& cb = bank.stack(c).stage(l);
      int pick = 0;
      double pick_d = 1e300;
      for (int k = 0; k < cb.entries(); ++k) {
        auto w = cb.word(k);
        double d = 0.0;
        for (std::size_t j = 0; j < residual.size(); ++j) {
          const double diff = static_cast<double>(residual[j]) - w[j];
          d += diff * diff;
        }
        if (d < pick_d) {
          pick_d = d;
          pick = k;
        }
      }
      auto w = cb.word(pick);
      for (std::size_t j = 0; j < residual.size(); ++j) {
        recon[j] += w[j];
        residual[j] -= w[j];
      }
    }
    double dot = 0.0, nq = 0.0, nr = 0.0;
    for (std::size_t j = 0; j < query.size(); ++j) {
      const float rf = static_cast<float>(recon[j]);
      dot += static_cast<double>(query[j]) * rf;
      nq += static_cast<double>(query[j]) * query[j];
      nr += static_cast<double>(rf) * rf;
    }
    const double score = dot / (std::sqrt(nq) * std::sqrt(nr));
    if (score > best_score) {
      best_score = score;
      best = c;
    }
  }
  return best;
}

}  // namespace

TEST_CASE("routing picks the stack holding the exact codeword") {
  const int dim = 4;
  // Each stack holds two codewords; only the happy stack contains e1.
  std::vector<RvqStack> stacks;
  stacks.push_back(one_stage_stack(dim, {0, 0, 1, 0, 0, 0, 0, 1}, 2));  // angry
  stacks.push_back(one_stage_stack(dim, {1, 0, 0, 0, 0, 0.5f, 0, 0}, 2));  // happy
  stacks.push_back(one_stage_stack(dim, {0, 0, 0.7f, 0.7f, 0, 0, 0, 2}, 2));
  stacks.push_back(one_stage_stack(dim, {0, 0, 0, 3, 0, 2, 2, 0}, 2));
  auto bank = RouterBank::build(std::move(stacks), 1, true,
                                Taxonomy::canonical(4));
  std::vector<float> z{1.f, 0.f, 0.f, 0.f};
  auto res = route(z, bank);
  CHECK(res.label == 1);
  CHECK(res.scores[1] == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("identical stacks tie to label zero") {
  const int dim = 3;
  std::vector<float> words{1.f, 2.f, 3.f, -1.f, 0.f, 1.f};
  std::vector<RvqStack> stacks;
  for (int c = 0; c < 4; ++c) stacks.push_back(one_stage_stack(dim, words, 2));
  auto bank = RouterBank::build(std::move(stacks), 1, true,
                                Taxonomy::canonical(4));
  auto set = test::make_set(dim, {0.9f, 1.8f, 3.3f, -2.f, 0.f, 0.5f}, {2, 3});
  auto res = route_batch(set, bank);
  for (int label : res.labels) CHECK(label == 0);
}

TEST_CASE("positive rescaling never changes the routed label") {
  SynthSpec spec;
  spec.classes = 4;
  spec.dim = 16;
  spec.per_class = 40;
  spec.separation = 4.0;
  spec.seed = 5;
  auto data = generate(spec);
  KMeansConfig km;
  std::vector<RvqStack> stacks;
  for (int c = 0; c < 4; ++c) {
    TrainingRegime regime{RegimeKind::kSpecific, c, -1, 30,
                          static_cast<std::uint64_t>(100 + c)};
    stacks.push_back(train_rvq(data, regime, 2, 8, km));
  }
  auto bank = RouterBank::build(std::move(stacks), 2, true,
                                Taxonomy::canonical(4));
  for (std::size_t r = 0; r < 40; ++r) {
    auto row = data.row(r);
    const int base = route(row, bank).label;
    for (float alpha : {0.1f, 10.f}) {
      std::vector<float> scaled(row.begin(), row.end());
      for (float& v : scaled) v *= alpha;
      CHECK(route(scaled, bank).label == base);
    }
  }
}

TEST_CASE("routing matches the brute-force evaluator on synthetic clusters") {
  SynthSpec spec;
  spec.classes = 4;
  spec.dim = 16;
  spec.per_class = 60;
  spec.separation = 4.0;
  spec.frames_min = 4;
  spec.frames_max = 8;
  spec.seed = 9;
  auto data = generate(spec);
  KMeansConfig km;
  std::vector<RvqStack> stacks;
  for (int c = 0; c < 4; ++c) {
    TrainingRegime regime{RegimeKind::kSpecific, c, -1, 50,
                          static_cast<std::uint64_t>(200 + c)};
    stacks.push_back(train_rvq(data, regime, 1, 8, km));
  }
  auto bank = RouterBank::build(std::move(stacks), 1, true,
                                Taxonomy::canonical(4));
  auto pooled = pool_utterance(data);
  auto res = route_batch(data, bank);
  REQUIRE(res.labels.size() == pooled.utterances().size());
  std::size_t hits = 0;
  for (std::size_t i = 0; i < pooled.utterances().size(); ++i) {
    CHECK(res.labels[i] == oracle_route(pooled.row(i), bank));
    if (res.labels[i] == pooled.utterances()[i].label) ++hits;
  }
  CHECK(static_cast<double>(hits) / res.labels.size() >= 0.95);
  CHECK(res.report.value(1, "ALL", "macro_f1") >= 0.95);
}

TEST_CASE("route batch reports the delta against a baseline") {
  const int dim = 2;
  std::vector<RvqStack> stacks;
  stacks.push_back(one_stage_stack(dim, {1.f, 0.f}, 1));
  stacks.push_back(one_stage_stack(dim, {0.f, 1.f}, 1));
  stacks.push_back(one_stage_stack(dim, {-1.f, 0.f}, 1));
  stacks.push_back(one_stage_stack(dim, {0.f, -1.f}, 1));
  auto bank = RouterBank::build(std::move(stacks), 1, true,
                                Taxonomy::canonical(4));
  auto set = test::make_set(dim, {1.f, 0.1f, 0.1f, 1.f, -1.f, 0.f, 0.f, -1.f},
                            {0, 1, 2, 3});
  auto res = route_batch(set, bank, 0.50);
  const double f1 = res.report.value(1, "ALL", "macro_f1");
  CHECK(f1 == 1.0);
  CHECK(res.report.value(1, "ALL", "baseline_f1") == 0.50);
  CHECK(res.report.value(1, "ALL", "delta_f1") ==
        doctest::Approx(f1 - 0.50).epsilon(1e-15));
}

TEST_CASE("router input validation") {
  std::vector<RvqStack> stacks;
  for (int c = 0; c < 4; ++c)
    stacks.push_back(one_stage_stack(2, {1.f, 0.f}, 1));
  CHECK_THROWS_AS(RouterBank::build(std::move(stacks), 2, true,
                                    Taxonomy::canonical(4)),
                  ValidationError);

  std::vector<RvqStack> three;
  for (int c = 0; c < 3; ++c)
    three.push_back(one_stage_stack(2, {1.f, 0.f}, 1));
  CHECK_THROWS_AS(RouterBank::build(std::move(three), 1, true,
                                    Taxonomy::canonical(4)),
                  ValidationError);

  std::vector<RvqStack> ok;
  for (int c = 0; c < 4; ++c) ok.push_back(one_stage_stack(2, {1.f, 0.f}, 1));
  auto bank = RouterBank::build(std::move(ok), 1, true, Taxonomy::canonical(4));
  std::vector<float> zero{0.f, 0.f};
  CHECK_THROWS_AS(route(zero, bank), DataError);
}
