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

#include <algorithm>
#include <cmath>
#include <sstream>

#include <doctest.h>

#include "emoq/metrics.hpp"
#include "test_util.hpp"

using namespace emoq;

TEST_CASE("cosine fidelity identities") {
  auto a = test::make_set(3, {1.f, 2.f, 3.f}, {0});
  auto same = test::make_set(3, {1.f, 2.f, 3.f}, {0});
  auto flipped = test::make_set(3, {-1.f, -2.f, -3.f}, {0});
  CHECK(cosine_fidelity(a, same).mean == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(cosine_fidelity(a, flipped).mean ==
        doctest::Approx(-1.0).epsilon(1e-12));
}

TEST_CASE("cosine matches an independent 64-bit recomputation") {
  Rng rng(3);
  std::vector<float> x(3), y(3);
  for (int j = 0; j < 3; ++j) {
    x[j] = static_cast<float>(rng.gaussian());
    y[j] = static_cast<float>(rng.gaussian());
  }
  auto a = test::make_set(3, x, {0});
  auto b = test::make_set(3, y, {0});
  double dot = 0.0, nx = 0.0, ny = 0.0;
  for (int j = 0; j < 3; ++j) {
    dot += static_cast<double>(x[j]) * y[j];
    nx += static_cast<double>(x[j]) * x[j];
    ny += static_cast<double>(y[j]) * y[j];
  }
  CHECK(cosine_fidelity(a, b).per_row[0] ==
        doctest::Approx(dot / (std::sqrt(nx) * std::sqrt(ny))).epsilon(1e-9));
}

TEST_CASE("cosine rejects zero-norm rows by index") {
  auto a = test::make_set(2, {1.f, 0.f, 0.f, 0.f}, {0, 1});
  auto b = test::make_set(2, {1.f, 0.f, 1.f, 1.f}, {0, 1});
  CHECK_THROWS_WITH_AS(cosine_fidelity(a, b), doctest::Contains("row 1"),
                       DataError);
}

TEST_CASE("primary recall counts per-class hits") {
  // truth (a,a,h,h), pred (a,h,h,h): angry 0.5, happy 1.0.
  std::vector<int> truth{0, 0, 1, 1};
  std::vector<int> pred{0, 1, 1, 1};
  auto r = primary_recall(pred, truth, 4);
  CHECK(r.per_class[0] == 0.5);
  CHECK(r.per_class[1] == 1.0);
  CHECK(r.defined[0]);
  CHECK(r.defined[1]);
  CHECK_FALSE(r.defined[3]);  // sad absent from truth
  CHECK(r.macro == doctest::Approx(0.75));

  auto perfect = primary_recall(truth, truth, 4);
  CHECK(perfect.macro == 1.0);

  CHECK_THROWS_AS(primary_recall(std::vector<int>{}, std::vector<int>{}, 4),
                  ValidationError);
}

TEST_CASE("normalized entropy identities") {
  // Uniform usage over K codes.
  std::vector<double> uniform(8, 1.0 / 8.0);
  CHECK(normalized_entropy(uniform) == doctest::Approx(1.0).epsilon(1e-9));
  // Collapse onto one code.
  std::vector<double> collapse{1.0, 0.0, 0.0, 0.0};
  CHECK(normalized_entropy(collapse) == 0.0);
  // Half-uniform over K=4 is exactly 1/2.
  std::vector<double> half{0.5, 0.5, 0.0, 0.0};
  CHECK(normalized_entropy(half) == doctest::Approx(0.5).epsilon(1e-9));
  // K=1 is defined as zero.
  std::vector<double> single{1.0};
  CHECK(normalized_entropy(single) == 0.0);
}

TEST_CASE("codebook entropy reads stage usage") {
  // Stage 0 uses codes (0,1,2,3) uniformly; stage 1 collapses onto 2.
  std::vector<std::uint32_t> idx{0, 2, 1, 2, 2, 2, 3, 2};
  CodeSequence codes(4, 2, 4, idx);
  CHECK(codebook_entropy(codes, 0) == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(codebook_entropy(codes, 1) == 0.0);
  CHECK_THROWS_AS(codebook_entropy(codes, 2), ValidationError);
}

TEST_CASE("entropy is invariant to code relabeling") {
  Rng rng(44);
  std::vector<std::uint32_t> idx(200);
  for (auto& v : idx) v = static_cast<std::uint32_t>(rng.uniform_below(6));
  CodeSequence codes(200, 1, 6, idx);
  const double before = codebook_entropy(codes, 0);
  std::vector<std::uint32_t> perm{3, 5, 0, 1, 4, 2};
  std::vector<std::uint32_t> relabeled(idx.size());
  for (std::size_t i = 0; i < idx.size(); ++i) relabeled[i] = perm[idx[i]];
  CodeSequence codes2(200, 1, 6, relabeled);
  CHECK(codebook_entropy(codes2, 0) ==
        doctest::Approx(before).epsilon(1e-12));
}

TEST_CASE("jsd identities and the hand-computed oracle") {
  std::vector<double> p{0.5, 0.5, 0.0, 0.0};
  std::vector<double> q{0.25, 0.25, 0.25, 0.25};
  CHECK(js_divergence(p, p) == 0.0);

  std::vector<double> e0{1.0, 0.0, 0.0, 0.0};
  std::vector<double> e1{0.0, 1.0, 0.0, 0.0};
  CHECK(js_divergence(e0, e1) == 1.0);

  // Independent KL evaluation: jsd = 0.5 KL(p||m) + 0.5 KL(q||m), base 2.
  double expected = 0.0;
  for (int i = 0; i < 4; ++i) {
    const double m = 0.5 * (p[i] + q[i]);
    if (p[i] > 0) expected += 0.5 * p[i] * std::log2(p[i] / m);
    if (q[i] > 0) expected += 0.5 * q[i] * std::log2(q[i] / m);
  }
  CHECK(js_divergence(p, q) == doctest::Approx(expected).epsilon(1e-9));

  CHECK_THROWS_AS(js_divergence(std::vector<double>{0.5, 0.2, 0.0, 0.0}, q),
                  ValidationError);
}

TEST_CASE("jsd is exactly symmetric and bounded on random simplex points") {
  Rng rng(70);
  for (int trial = 0; trial < 300; ++trial) {
    std::vector<double> p(4), q(4);
    double sp = 0.0, sq = 0.0;
    for (int i = 0; i < 4; ++i) {
      p[i] = rng.uniform01() + 1e-12;
      q[i] = rng.uniform01() + 1e-12;
      sp += p[i];
      sq += q[i];
    }
    for (int i = 0; i < 4; ++i) {
      p[i] /= sp;
      q[i] /= sq;
    }
    const double pq = js_divergence(p, q);
    const double qp = js_divergence(q, p);
    CHECK(pq == qp);  // bitwise
    CHECK(pq >= 0.0);
    CHECK(pq <= 1.0);
  }
}

TEST_CASE("top2 sets break rank-2 ties toward the lowest id") {
  std::vector<double> probs{0.4, 0.3, 0.3, 0.0};
  auto t = top2_set(probs);
  CHECK(t[0] == 0);
  CHECK(t[1] == 1);

  // Exhaustive comparison against a sort-based oracle on tie-rich grids.
  Rng rng(71);
  for (int trial = 0; trial < 500; ++trial) {
    std::vector<double> v(4);
    for (double& x : v) x = static_cast<double>(rng.uniform_below(5)) / 10.0;
    v[rng.uniform_below(4)] += 0.1;
    std::vector<int> order{0, 1, 2, 3};
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
      if (v[a] != v[b]) return v[a] > v[b];
      return a < b;
    });
    auto got = top2_set(v);
    CHECK(got[0] == order[0]);
    CHECK(got[1] == order[1]);
  }
}

TEST_CASE("top2 accuracy is order-invariant") {
  // pred top-2 {angry, happy} vs truth {happy, angry} scores 1.
  std::vector<double> pred{0.6, 0.4, 0.0, 0.0};
  std::vector<double> truth{0.4, 0.6, 0.0, 0.0};
  CHECK(top2_set_accuracy(pred, truth, 1, 4) == 1.0);

  // pred {angry, happy} vs truth {angry, sad} scores 0.
  std::vector<double> truth2{0.6, 0.0, 0.0, 0.4};
  CHECK(top2_set_accuracy(pred, truth2, 1, 4) == 0.0);

  CHECK_THROWS_AS(top2_set_accuracy(pred, truth, 1, 1), ValidationError);
}

TEST_CASE("macro f1 identities and hand-computed case") {
  std::vector<int> truth{0, 0, 1, 1};
  CHECK(macro_f1(truth, truth, 2).macro == 1.0);

  // truth (a,a,h,h), pred (a,a,a,a): F1_a = 2/3, F1_h = 0, macro = 1/3.
  std::vector<int> pred{0, 0, 0, 0};
  auto r = macro_f1(pred, truth, 2);
  CHECK(r.per_class[0] == doctest::Approx(2.0 / 3.0).epsilon(1e-12));
  CHECK(r.per_class[1] == 0.0);
  CHECK(r.macro == doctest::Approx(1.0 / 3.0).epsilon(1e-12));

  // Everything wrong scores zero.
  std::vector<int> wrong{1, 1, 0, 0};
  CHECK(macro_f1(wrong, truth, 2).macro == 0.0);

  // Absent-everywhere classes are flagged and contribute zero.
  auto r4 = macro_f1(truth, truth, 4);
  CHECK(r4.flagged[2]);
  CHECK(r4.flagged[3]);
  CHECK(r4.macro == 0.5);
}

TEST_CASE("macro f1 is invariant under consistent label permutation") {
  Rng rng(50);
  std::vector<int> truth(60), pred(60);
  for (int i = 0; i < 60; ++i) {
    truth[i] = static_cast<int>(rng.uniform_below(4));
    pred[i] = static_cast<int>(rng.uniform_below(4));
  }
  const double base = macro_f1(pred, truth, 4).macro;
  std::vector<int> perm{2, 0, 3, 1};
  std::vector<int> truth_p(60), pred_p(60);
  for (int i = 0; i < 60; ++i) {
    truth_p[i] = perm[truth[i]];
    pred_p[i] = perm[pred[i]];
  }
  CHECK(macro_f1(pred_p, truth_p, 4).macro ==
        doctest::Approx(base).epsilon(1e-12));
}

TEST_CASE("eval report serializes rows and metadata") {
  EvalReport rep;
  rep.set_meta("stages", "8");
  rep.add(1, "angry", "cosine", 0.25);
  rep.add(2, "ALL", "recall", 0.5);
  CHECK(rep.value(1, "angry", "cosine") == 0.25);
  CHECK_THROWS_AS(rep.value(3, "ALL", "recall"), ValidationError);
  CHECK_THROWS_AS(rep.add(1, "ALL", "bad", NAN), DataError);

  std::ostringstream os;
  rep.to_csv(os);
  CHECK(os.str() ==
        "layer,emotion,metric,value\n1,angry,cosine,0.25\n2,ALL,recall,0.5\n");
  CHECK(rep.to_json().find("\"stages\": \"8\"") != std::string::npos);
}
