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

#include <doctest.h>

#include "emoq/io.hpp"
#include "test_util.hpp"

using namespace emoq;

namespace {

std::vector<char> slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  REQUIRE(in);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void corrupt_byte(const std::filesystem::path& p, std::size_t offset,
                  char value) {
  std::fstream f(p, std::ios::binary | std::ios::in | std::ios::out);
  REQUIRE(f);
  f.seekp(static_cast<std::streamoff>(offset));
  f.put(value);
}

}  // namespace

TEST_CASE("embedding roundtrip re-writes identical bytes") {
  auto dir = test::temp_dir("io_embv");
  auto set = test::make_set(2, {1.f, 2.f, 3.f, 4.f, 5.f, 6.f}, {0, 1, 2});
  const auto vec = dir / "a.embv";
  const auto man = dir / "a.jsonl";
  write_embeddings(set, vec, man);
  auto loaded = read_embeddings(vec, man);
  const auto vec2 = dir / "b.embv";
  const auto man2 = dir / "b.jsonl";
  write_embeddings(loaded, vec2, man2);
  CHECK(slurp(vec) == slurp(vec2));
  CHECK(slurp(man) == slurp(man2));
  std::filesystem::remove_all(dir);
}

TEST_CASE("large embedding roundtrip preserves the content hash") {
  auto dir = test::temp_dir("io_embv_big");
  Rng rng(5);
  const std::size_t rows = 10000;
  const int dim = 768;
  std::vector<float> data(rows * dim);
  for (float& v : data) v = static_cast<float>(rng.gaussian());
  std::vector<Utterance> utts(rows);
  for (std::size_t i = 0; i < rows; ++i)
    utts[i] = {"u" + std::to_string(i), static_cast<int>(i % 4), std::nullopt,
               i, i + 1, "t"};
  EmbeddingSet set(dim, data, utts, Taxonomy::canonical(4), Level::kFrame);
  const std::uint64_t before =
      fnv1a64(set.data().data(), set.data().size() * sizeof(float));
  write_embeddings(set, dir / "big.embv", dir / "big.jsonl");
  auto loaded = read_embeddings(dir / "big.embv", dir / "big.jsonl");
  const std::uint64_t after =
      fnv1a64(loaded.data().data(), loaded.data().size() * sizeof(float));
  CHECK(before == after);
  std::filesystem::remove_all(dir);
}

TEST_CASE("embedding reader rejects bad headers and truncation") {
  auto dir = test::temp_dir("io_embv_bad");
  auto set = test::make_set(2, {1.f, 2.f, 3.f, 4.f}, {0, 1});
  const auto vec = dir / "x.embv";
  const auto man = dir / "x.jsonl";
  write_embeddings(set, vec, man);

  SUBCASE("bad magic") {
    corrupt_byte(vec, 0, 'X');
    CHECK_THROWS_WITH_AS(read_embeddings(vec, man),
                         doctest::Contains("bad magic"), DataError);
  }
  SUBCASE("version mismatch") {
    corrupt_byte(vec, 4, 9);
    CHECK_THROWS_WITH_AS(read_embeddings(vec, man),
                         doctest::Contains("version"), DataError);
  }
  SUBCASE("truncated payload reports the offset") {
    // Header claims 2 rows but the payload holds only 1.
    std::filesystem::resize_file(vec, 19 + 2 * sizeof(float));
    CHECK_THROWS_WITH_AS(read_embeddings(vec, man),
                         doctest::Contains("offset"), DataError);
  }
  std::filesystem::remove_all(dir);
}

TEST_CASE("codebook payload size and lossless roundtrip") {
  auto dir = test::temp_dir("io_rvqc");
  Rng rng(9);
  const int L = 8, K = 32, D = 768;
  std::vector<Codebook> books;
  for (int l = 0; l < L; ++l) {
    std::vector<float> words(static_cast<std::size_t>(K) * D);
    for (float& w : words) w = static_cast<float>(rng.gaussian());
    books.emplace_back(D, K, std::move(words));
  }
  RegimeInfo info{RegimeKind::kSpecific, 1, 100, 1234};
  RvqStack stack(std::move(books), info);
  const auto path = dir / "stack.rvqc";
  write_codebook(stack, path);

  // Header is 29 bytes; payload is L*K*D float32 = 786,432 bytes.
  CHECK(std::filesystem::file_size(path) == 29 + 786432);

  auto loaded = read_codebook(path);
  CHECK(loaded.depth() == L);
  CHECK(loaded.entries() == K);
  CHECK(loaded.dim() == D);
  CHECK(loaded.regime().kind == RegimeKind::kSpecific);
  CHECK(loaded.regime().target == 1);
  CHECK(loaded.regime().bias_percent == 100);
  CHECK(loaded.regime().seed == 1234);
  CHECK(loaded.fingerprint() == stack.fingerprint());
  for (int l = 0; l < L; ++l)
    CHECK(loaded.stage(l).words() == stack.stage(l).words());
  std::filesystem::remove_all(dir);
}

TEST_CASE("code index width follows K") {
  CHECK(code_index_width(2) == 1);
  CHECK(code_index_width(256) == 1);
  CHECK(code_index_width(257) == 2);
  CHECK(code_index_width(65536) == 2);
  CHECK(code_index_width(65537) == 4);
}

TEST_CASE("code sequences roundtrip at every index width") {
  auto dir = test::temp_dir("io_rvqi");
  Rng rng(13);
  for (int entries : {2, 200, 300, 70000}) {
    const std::size_t rows = 50;
    const int stages = 3;
    std::vector<std::uint32_t> idx(rows * stages);
    for (auto& v : idx)
      v = static_cast<std::uint32_t>(rng.uniform_below(entries));
    CodeSequence codes(rows, stages, entries, idx);
    const auto path = dir / ("codes_" + std::to_string(entries) + ".rvqi");
    write_codes(codes, path);
    CHECK(std::filesystem::file_size(path) ==
          20 + rows * stages * code_index_width(entries));
    auto loaded = read_codes(path);
    CHECK(loaded.rows() == rows);
    CHECK(loaded.stages() == stages);
    CHECK(loaded.entries() == entries);
    CHECK(loaded.indices() == codes.indices());
  }
  std::filesystem::remove_all(dir);
}

TEST_CASE("all three formats satisfy read-write identity on random payloads") {
  auto dir = test::temp_dir("io_prop");
  Rng rng(31);
  for (int trial = 0; trial < 20; ++trial) {
    const int dim = 1 + static_cast<int>(rng.uniform_below(6));
    const std::size_t n = 1 + rng.uniform_below(12);
    std::vector<float> data(n * dim);
    for (float& v : data) v = static_cast<float>(rng.gaussian());
    std::vector<Utterance> utts(n);
    for (std::size_t i = 0; i < n; ++i) {
      std::optional<SoftLabel> soft;
      if (rng.uniform_below(2) == 0) {
        std::vector<double> votes(4);
        for (double& v : votes) v = static_cast<double>(rng.uniform_below(8));
        votes[rng.uniform_below(4)] += 1.0;
        soft = SoftLabel(votes);
      }
      utts[i] = {"u" + std::to_string(i), static_cast<int>(rng.uniform_below(4)),
                 soft, i, i + 1, "c"};
    }
    EmbeddingSet set(dim, data, utts, Taxonomy::canonical(4), Level::kFrame);
    write_embeddings(set, dir / "p.embv", dir / "p.jsonl");
    auto rt = read_embeddings(dir / "p.embv", dir / "p.jsonl");
    CHECK(rt.data() == set.data());
    REQUIRE(rt.utterances().size() == n);
    for (std::size_t i = 0; i < n; ++i) {
      CHECK(rt.utterances()[i].uid == utts[i].uid);
      CHECK(rt.utterances()[i].label == utts[i].label);
      CHECK(rt.utterances()[i].frame_begin == utts[i].frame_begin);
      CHECK((rt.utterances()[i].soft.has_value() == utts[i].soft.has_value()));
      if (utts[i].soft)
        CHECK(rt.utterances()[i].soft->probs() == utts[i].soft->probs());
    }

    const int L = 1 + static_cast<int>(rng.uniform_below(4));
    const int K = 1 + static_cast<int>(rng.uniform_below(9));
    std::vector<Codebook> books;
    for (int l = 0; l < L; ++l) {
      std::vector<float> words(static_cast<std::size_t>(K) * dim);
      for (float& w : words) w = static_cast<float>(rng.gaussian());
      books.emplace_back(dim, K, std::move(words));
    }
    RvqStack stack(std::move(books), RegimeInfo{RegimeKind::kBalanced, -1, -1,
                                                rng.next_u64()});
    write_codebook(stack, dir / "p.rvqc");
    auto stack_rt = read_codebook(dir / "p.rvqc");
    CHECK(stack_rt.fingerprint() == stack.fingerprint());
    CHECK(stack_rt.regime().seed == stack.regime().seed);

    std::vector<std::uint32_t> idx(n * L);
    for (auto& v : idx) v = static_cast<std::uint32_t>(rng.uniform_below(K));
    CodeSequence codes(n, L, K, idx);
    write_codes(codes, dir / "p.rvqi");
    CHECK(read_codes(dir / "p.rvqi").indices() == codes.indices());
  }
  std::filesystem::remove_all(dir);
}

TEST_CASE("manifest parse errors carry the line number") {
  auto dir = test::temp_dir("io_manifest");
  write_embeddings(test::make_set(1, {1.f, 2.f}, {0, 1}), dir / "bad.embv");
  {
    std::ofstream os(dir / "bad.jsonl");
    os << R"({"uid":"a","label":"angry","soft":null,"frames":[0,1],"corpus":"t"})"
       << "\n";
    os << "not json\n";
  }
  CHECK_THROWS_WITH_AS(read_embeddings(dir / "bad.embv", dir / "bad.jsonl"),
                       doctest::Contains("line 2"), DataError);
  std::filesystem::remove_all(dir);
}
