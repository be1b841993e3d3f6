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

#include "emoq/io.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <string>

#include <json.hpp>

#include "emoq/detail/binio.hpp"

namespace emoq {

namespace {

constexpr std::uint16_t kEmbeddingVersion = 1;
constexpr std::uint16_t kCodebookVersion = 1;
constexpr std::uint8_t kDtypeFloat32 = 0;
constexpr std::uint8_t kNoByte = 255;

// Canonical names map to 0..3, classN to N; anything else is rejected.
int label_name_to_id(const std::string& raw) {
  std::string name = raw;
  std::transform(name.begin(), name.end(), name.begin(),
                 [](unsigned char ch) { return std::tolower(ch); });
  static const char* kNames[4] = {"angry", "happy", "neutral", "sad"};
  for (int i = 0; i < 4; ++i) {
    if (name == kNames[i]) return i;
  }
  if (name.rfind("class", 0) == 0) {
    try {
      const int id = std::stoi(name.substr(5));
      if (id >= 4) return id;
    } catch (const std::exception&) {
    }
  }
  throw ValidationError("manifest: unknown label name '" + raw + "'");
}

}  // namespace

void write_embeddings(const EmbeddingSet& set,
                      const std::filesystem::path& vectors_path) {
  detail::BinWriter w(vectors_path);
  w.magic("EMBV");
  w.u16(kEmbeddingVersion);
  w.u8(kDtypeFloat32);
  w.u64(set.rows());
  w.u32(static_cast<std::uint32_t>(set.dim()));
  w.bytes(set.data().data(), set.data().size() * sizeof(float));
  w.close();
}

void write_embeddings(const EmbeddingSet& set,
                      const std::filesystem::path& vectors_path,
                      const std::filesystem::path& manifest_path) {
  write_embeddings(set, vectors_path);
  write_manifest(set, manifest_path);
}

void write_manifest(const EmbeddingSet& set,
                    const std::filesystem::path& manifest_path) {
  std::ofstream os(manifest_path, std::ios::trunc | std::ios::binary);
  if (!os)
    throw DataError("cannot open '" + manifest_path.string() + "' for write");
  for (const auto& u : set.utterances()) {
    nlohmann::json j;
    j["uid"] = u.uid;
    j["label"] = set.taxonomy().name(u.label);
    if (u.soft) {
      j["soft"] = u.soft->probs();
    } else {
      j["soft"] = nullptr;
    }
    j["frames"] = {u.frame_begin, u.frame_end};
    j["corpus"] = u.corpus;
    os << j.dump() << '\n';
  }
  os.flush();
  if (!os) throw DataError("write failed for '" + manifest_path.string() + "'");
}

std::pair<int, std::vector<float>> read_embedding_matrix(
    const std::filesystem::path& vectors_path) {
  detail::BinReader r(vectors_path);
  r.expect_magic("EMBV");
  const std::uint16_t version = r.u16();
  if (version != kEmbeddingVersion)
    throw DataError("embedding file '" + vectors_path.string() +
                    "': unsupported version " + std::to_string(version) +
                    " at offset 4");
  const std::uint8_t dtype = r.u8();
  if (dtype != kDtypeFloat32)
    throw DataError("embedding file '" + vectors_path.string() +
                    "': unsupported dtype " + std::to_string(dtype) +
                    " at offset 6");
  const std::uint64_t n_rows = r.u64();
  const std::uint32_t dim = r.u32();
  if (dim == 0)
    throw DataError("embedding file '" + vectors_path.string() +
                    "': zero dim at offset 15");
  std::vector<float> data(n_rows * dim);
  r.bytes(data.data(), data.size() * sizeof(float));
  r.expect_exhausted();
  return {static_cast<int>(dim), std::move(data)};
}

namespace {

std::vector<Utterance> read_manifest_records(
    const std::filesystem::path& manifest_path, int* num_classes) {
  std::ifstream is(manifest_path, std::ios::binary);
  if (!is)
    throw DataError("cannot open '" + manifest_path.string() + "' for read");
  std::vector<Utterance> utts;
  std::vector<std::string> labels;
  int soft_size = 0;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(is, line)) {
    ++line_no;
    if (line.empty()) continue;
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception& e) {
      throw DataError("manifest '" + manifest_path.string() + "' line " +
                      std::to_string(line_no) + ": " + e.what());
    }
    try {
      Utterance u;
      u.uid = j.at("uid").get<std::string>();
      labels.push_back(j.at("label").get<std::string>());
      if (!j.at("soft").is_null()) {
        auto probs = j.at("soft").get<std::vector<double>>();
        if (soft_size == 0) soft_size = static_cast<int>(probs.size());
        if (static_cast<int>(probs.size()) != soft_size)
          throw ValidationError("inconsistent soft label sizes");
        u.soft = SoftLabel(std::move(probs));
      }
      const auto& frames = j.at("frames");
      u.frame_begin = frames.at(0).get<std::uint64_t>();
      u.frame_end = frames.at(1).get<std::uint64_t>();
      u.corpus = j.value("corpus", "");
      utts.push_back(std::move(u));
    } catch (const nlohmann::json::exception& e) {
      throw DataError("manifest '" + manifest_path.string() + "' line " +
                      std::to_string(line_no) + ": " + e.what());
    }
  }
  int max_id = -1;
  for (const auto& name : labels) max_id = std::max(max_id, label_name_to_id(name));
  int c = std::max(4, max_id + 1);
  if (soft_size > 0) {
    if (soft_size < max_id + 1)
      throw ValidationError("manifest: soft labels narrower than the label set");
    c = std::max(c, soft_size);
  }
  *num_classes = c;
  for (std::size_t i = 0; i < utts.size(); ++i)
    utts[i].label = label_name_to_id(labels[i]);
  return utts;
}

}  // namespace

std::pair<std::vector<Utterance>, Taxonomy> read_manifest(
    const std::filesystem::path& manifest_path) {
  int num_classes = 4;
  auto utts = read_manifest_records(manifest_path, &num_classes);
  return {std::move(utts), Taxonomy::canonical(num_classes)};
}

EmbeddingSet read_embeddings(const std::filesystem::path& vectors_path,
                             const std::filesystem::path& manifest_path) {
  auto [dim, data] = read_embedding_matrix(vectors_path);
  auto [utts, tax] = read_manifest(manifest_path);
  const bool all_single = std::all_of(
      utts.begin(), utts.end(),
      [](const Utterance& u) { return u.frame_count() == 1; });
  const Level level = (!utts.empty() && all_single) ? Level::kUtterance
                                                    : Level::kFrame;
  return EmbeddingSet(dim, std::move(data), std::move(utts), std::move(tax),
                      level);
}

void write_codebook(const RvqStack& stack, const std::filesystem::path& path) {
  detail::BinWriter w(path);
  w.magic("RVQC");
  w.u16(kCodebookVersion);
  w.u32(static_cast<std::uint32_t>(stack.depth()));
  w.u32(static_cast<std::uint32_t>(stack.entries()));
  w.u32(static_cast<std::uint32_t>(stack.dim()));
  const RegimeInfo& regime = stack.regime();
  w.u8(static_cast<std::uint8_t>(regime.kind));
  w.u8(regime.target < 0 ? kNoByte : static_cast<std::uint8_t>(regime.target));
  w.u8(regime.bias_percent < 0 ? kNoByte
                               : static_cast<std::uint8_t>(regime.bias_percent));
  w.u64(regime.seed);
  for (const auto& stage : stack.stages()) {
    w.bytes(stage.words().data(), stage.words().size() * sizeof(float));
  }
  w.close();
}

RvqStack read_codebook(const std::filesystem::path& path) {
  detail::BinReader r(path);
  r.expect_magic("RVQC");
  const std::uint16_t version = r.u16();
  if (version != kCodebookVersion)
    throw DataError("codebook file '" + path.string() +
                    "': unsupported version " + std::to_string(version) +
                    " at offset 4");
  const std::uint32_t stages = r.u32();
  const std::uint32_t entries = r.u32();
  const std::uint32_t dim = r.u32();
  if (stages == 0 || entries == 0 || dim == 0)
    throw DataError("codebook file '" + path.string() +
                    "': zero L, K, or D in header");
  const std::uint8_t regime_tag = r.u8();
  const std::uint8_t target = r.u8();
  const std::uint8_t bias = r.u8();
  const std::uint64_t seed = r.u64();
  if (regime_tag > 2)
    throw DataError("codebook file '" + path.string() +
                    "': unknown regime tag " + std::to_string(regime_tag));
  RegimeInfo regime;
  regime.kind = static_cast<RegimeKind>(regime_tag);
  regime.target = target == kNoByte ? -1 : static_cast<int>(target);
  regime.bias_percent = bias == kNoByte ? -1 : static_cast<int>(bias);
  regime.seed = seed;
  if (regime.kind != RegimeKind::kBalanced && regime.target < 0)
    throw DataError("codebook file '" + path.string() +
                    "': specific/biased regime requires a target emotion");
  std::vector<Codebook> books;
  books.reserve(stages);
  for (std::uint32_t l = 0; l < stages; ++l) {
    std::vector<float> words(static_cast<std::size_t>(entries) * dim);
    r.bytes(words.data(), words.size() * sizeof(float));
    books.emplace_back(static_cast<int>(dim), static_cast<int>(entries),
                       std::move(words));
  }
  r.expect_exhausted();
  return RvqStack(std::move(books), regime);
}

int code_index_width(int entries) {
  if (entries < 1) throw ValidationError("code width: K must be >= 1");
  if (entries <= 256) return 1;
  if (entries <= 65536) return 2;
  return 4;
}

void write_codes(const CodeSequence& codes, const std::filesystem::path& path) {
  detail::BinWriter w(path);
  w.magic("RVQI");
  w.u64(codes.rows());
  w.u32(static_cast<std::uint32_t>(codes.stages()));
  w.u32(static_cast<std::uint32_t>(codes.entries()));
  const int width = code_index_width(codes.entries());
  for (std::uint32_t idx : codes.indices()) {
    w.bytes(&idx, static_cast<std::size_t>(width));
  }
  w.close();
}

CodeSequence read_codes(const std::filesystem::path& path) {
  detail::BinReader r(path);
  r.expect_magic("RVQI");
  const std::uint64_t rows = r.u64();
  const std::uint32_t stages = r.u32();
  const std::uint32_t entries = r.u32();
  if (stages == 0 || entries == 0)
    throw DataError("code file '" + path.string() + "': zero L or K in header");
  const int width = code_index_width(static_cast<int>(entries));
  std::vector<std::uint32_t> indices(rows * stages, 0);
  for (auto& idx : indices) {
    r.bytes(&idx, static_cast<std::size_t>(width));
  }
  r.expect_exhausted();
  return CodeSequence(rows, static_cast<int>(stages),
                      static_cast<int>(entries), std::move(indices));
}

}  // namespace emoq
