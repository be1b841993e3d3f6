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

#include "emoq/router.hpp"

#include <cmath>
#include <string>

namespace emoq {

namespace {

std::vector<float> l2_normalize(std::span<const float> v,
                                const char* what) {
  double norm2 = 0.0;
  for (float x : v) norm2 += static_cast<double>(x) * static_cast<double>(x);
  if (norm2 == 0.0)
    throw DataError(std::string("route: zero-norm ") + what);
  const double inv = 1.0 / std::sqrt(norm2);
  std::vector<float> out(v.size());
  for (std::size_t j = 0; j < v.size(); ++j)
    out[j] = static_cast<float>(static_cast<double>(v[j]) * inv);
  return out;
}

double cosine(std::span<const float> a, std::span<const float> b,
              const char* what) {
  double dot = 0.0, na = 0.0, nb = 0.0;
  for (std::size_t j = 0; j < a.size(); ++j) {
    const double x = a[j], y = b[j];
    dot += x * y;
    na += x * x;
    nb += y * y;
  }
  if (na == 0.0 || nb == 0.0)
    throw DataError(std::string("route: zero-norm ") + what);
  return dot / (std::sqrt(na) * std::sqrt(nb));
}

}  // namespace

RouterBank RouterBank::build(std::vector<RvqStack> stacks, int depth,
                             bool normalize, Taxonomy class_map) {
  if (stacks.empty()) throw ValidationError("router: bank needs >= 1 stack");
  if (static_cast<int>(stacks.size()) != class_map.size())
    throw ValidationError("router: need exactly one stack per emotion");
  const int d = stacks.front().dim();
  const int k = stacks.front().entries();
  const int l = stacks.front().depth();
  for (const auto& s : stacks) {
    if (s.dim() != d || s.entries() != k || s.depth() != l)
      throw ValidationError("router: stacks must share (L, K, D)");
  }
  if (depth < 1 || depth > l)
    throw ValidationError("router: depth out of range [1, L]");

  RouterBank bank;
  bank.depth_ = depth;
  bank.normalized_ = normalize;
  bank.class_map_ = std::move(class_map);
  if (!normalize) {
    bank.stacks_ = std::move(stacks);
    return bank;
  }
  bank.stacks_.reserve(stacks.size());
  for (auto& stack : stacks) {
    std::vector<Codebook> books;
    books.reserve(stack.depth());
    for (const auto& stage : stack.stages()) {
      std::vector<float> words;
      words.reserve(stage.words().size());
      for (int e = 0; e < stage.entries(); ++e) {
        auto unit = l2_normalize(stage.word(e), "codeword");
        words.insert(words.end(), unit.begin(), unit.end());
      }
      books.emplace_back(stage.dim(), stage.entries(), std::move(words));
    }
    bank.stacks_.emplace_back(std::move(books), stack.regime());
  }
  return bank;
}

RouteResult route(std::span<const float> z, const RouterBank& bank) {
  if (static_cast<int>(z.size()) != bank.dim())
    throw ValidationError("route: embedding dim does not match bank dim");
  std::vector<float> query(z.begin(), z.end());
  if (bank.normalized()) query = l2_normalize(z, "input");

  RouteResult out;
  out.scores.resize(bank.classes());
  out.codes.resize(bank.classes());
  int best = 0;
  for (int c = 0; c < bank.classes(); ++c) {
    const RvqStack& stack = bank.stack(c);
    out.codes[c] = encode_row(query, stack, bank.depth());
    auto recon = reconstruct_row(out.codes[c], stack, bank.depth());
    out.scores[c] = cosine(query, recon, "reconstruction");
    if (out.scores[c] > out.scores[best]) best = c;
  }
  out.label = best;
  return out;
}

RouteBatchResult route_batch(const EmbeddingSet& set, const RouterBank& bank,
                             std::optional<double> baseline_f1,
                             bool frame_vote) {
  if (set.utterances().empty())
    throw ValidationError("route: set carries no utterances");
  RouteBatchResult out;
  out.labels.reserve(set.utterances().size());

  if (frame_vote) {
    for (const auto& u : set.utterances()) {
      std::vector<std::size_t> votes(bank.classes(), 0);
      for (std::size_t r = u.frame_begin; r < u.frame_end; ++r)
        ++votes[route(set.row(r), bank).label];
      int best = 0;
      for (int c = 1; c < bank.classes(); ++c)
        if (votes[c] > votes[best]) best = c;
      out.labels.push_back(best);
    }
  } else {
    const EmbeddingSet pooled =
        set.level() == Level::kFrame ? pool_utterance(set) : set;
    for (const auto& u : pooled.utterances())
      out.labels.push_back(route(pooled.row(u.frame_begin), bank).label);
  }

  std::vector<int> truth;
  truth.reserve(set.utterances().size());
  for (const auto& u : set.utterances()) truth.push_back(u.label);
  const F1Result f1 = macro_f1(out.labels, truth, bank.class_map().size());

  out.report.set_meta("depth", std::to_string(bank.depth()));
  out.report.set_meta("normalized", bank.normalized() ? "true" : "false");
  out.report.set_meta("mode", frame_vote ? "frame_vote" : "pooled");
  out.report.add(bank.depth(), "ALL", "macro_f1", f1.macro);
  for (int c = 0; c < bank.class_map().size(); ++c) {
    out.report.add(bank.depth(), bank.class_map().name(c), "f1",
                   f1.per_class[c]);
  }
  const RecallResult recall = primary_recall(out.labels, truth,
                                             bank.class_map().size());
  out.report.add(bank.depth(), "ALL", "recall", recall.macro);
  if (baseline_f1) {
    out.report.add(bank.depth(), "ALL", "baseline_f1", *baseline_f1);
    out.report.add(bank.depth(), "ALL", "delta_f1", f1.macro - *baseline_f1);
  }
  return out;
}

}  // namespace emoq
