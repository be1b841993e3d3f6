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

#include "emoq/types.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <set>

namespace emoq {

namespace {

std::string to_lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  return out;
}

const char* kCanonicalNames[4] = {"angry", "happy", "neutral", "sad"};

}  // namespace

Taxonomy::Taxonomy(std::vector<std::string> names) {
  if (names.empty()) throw ValidationError("taxonomy: needs at least 1 class");
  names_.reserve(names.size());
  std::set<std::string> seen;
  for (auto& n : names) {
    std::string low = to_lower(n);
    if (low.empty()) throw ValidationError("taxonomy: empty class name");
    if (!seen.insert(low).second)
      throw ValidationError("taxonomy: duplicate class name '" + low + "'");
    names_.push_back(std::move(low));
  }
}

Taxonomy Taxonomy::canonical(int num_classes) {
  if (num_classes < 1)
    throw ValidationError("taxonomy: needs at least 1 class");
  std::vector<std::string> names;
  names.reserve(num_classes);
  for (int i = 0; i < num_classes; ++i) {
    if (i < 4) {
      names.emplace_back(kCanonicalNames[i]);
    } else {
      names.push_back("class" + std::to_string(i));
    }
  }
  return Taxonomy(std::move(names));
}

const std::string& Taxonomy::name(int id) const {
  if (id < 0 || id >= size())
    throw ValidationError("taxonomy: class id " + std::to_string(id) +
                          " out of range [0, " + std::to_string(size()) + ")");
  return names_[id];
}

int Taxonomy::id_of(std::string_view name) const {
  std::string low = to_lower(name);
  for (int i = 0; i < size(); ++i) {
    if (names_[i] == low) return i;
  }
  throw ValidationError("taxonomy: unknown class name '" + low + "'");
}

SoftLabel::SoftLabel(std::vector<double> raw_votes) {
  if (raw_votes.empty())
    throw ValidationError("soft label: empty vote vector");
  double total = 0.0;
  for (double v : raw_votes) {
    if (!std::isfinite(v) || v < 0.0)
      throw ValidationError("soft label: votes must be finite and >= 0");
    total += v;
  }
  if (total <= 0.0)
    throw ValidationError("soft label: votes sum to zero");
  probs_ = std::move(raw_votes);
  // Already-normalized input passes through untouched, which makes
  // renormalization idempotent and file roundtrips bit-exact.
  if (std::abs(total - 1.0) > 1e-9) {
    for (double& p : probs_) p /= total;
  }
}

double SoftLabel::max_prob() const {
  return *std::max_element(probs_.begin(), probs_.end());
}

int SoftLabel::argmax() const {
  int best = 0;
  for (int i = 1; i < size(); ++i) {
    if (probs_[i] > probs_[best]) best = i;
  }
  return best;
}

Stratum stratum_of(const SoftLabel& soft) {
  // Strict majority goes to the low-ambiguity stratum; exactly 0.5 is high.
  return soft.max_prob() > 0.5 ? Stratum::kLow : Stratum::kHigh;
}

EmbeddingSet::EmbeddingSet(int dim, std::vector<float> data,
                           std::vector<Utterance> utterances, Taxonomy taxonomy,
                           Level level)
    : dim_(dim),
      data_(std::move(data)),
      utterances_(std::move(utterances)),
      taxonomy_(std::move(taxonomy)),
      level_(level) {
  if (dim_ <= 0) throw ValidationError("embedding set: dim must be positive");
  if (data_.size() % static_cast<std::size_t>(dim_) != 0)
    throw ValidationError("embedding set: data size not a multiple of dim");
  for (std::size_t i = 0; i < data_.size(); ++i) {
    if (!std::isfinite(data_[i]))
      throw DataError("embedding set: non-finite value at flat index " +
                      std::to_string(i));
  }
  const std::size_t n = rows();
  // Frame ranges: non-empty, in bounds, pairwise disjoint.
  std::vector<std::pair<std::size_t, std::size_t>> ranges;
  ranges.reserve(utterances_.size());
  for (const auto& u : utterances_) {
    if (u.frame_end <= u.frame_begin)
      throw ValidationError("malformed manifest: empty frame range for uid '" +
                            u.uid + "'");
    if (u.frame_end > n)
      throw ValidationError("malformed manifest: frame range of uid '" + u.uid +
                            "' exceeds matrix rows");
    if (u.label < 0 || u.label >= taxonomy_.size())
      throw ValidationError("malformed manifest: label id out of taxonomy for uid '" +
                            u.uid + "'");
    if (u.soft && u.soft->size() != taxonomy_.size())
      throw ValidationError("malformed manifest: soft label size mismatch for uid '" +
                            u.uid + "'");
    if (level_ == Level::kUtterance && u.frame_count() != 1)
      throw ValidationError(
          "malformed manifest: utterance-level set requires single-row "
          "ranges (uid '" + u.uid + "')");
    ranges.emplace_back(u.frame_begin, u.frame_end);
  }
  std::sort(ranges.begin(), ranges.end());
  for (std::size_t i = 1; i < ranges.size(); ++i) {
    if (ranges[i].first < ranges[i - 1].second)
      throw ValidationError("malformed manifest: overlapping frame ranges");
  }
}

EmbeddingSet EmbeddingSet::subset(
    std::span<const std::size_t> utterance_indices) const {
  std::vector<std::size_t> order(utterance_indices.begin(),
                                 utterance_indices.end());
  std::sort(order.begin(), order.end());
  std::vector<float> data;
  std::vector<Utterance> utts;
  utts.reserve(order.size());
  std::size_t cursor = 0;
  for (std::size_t idx : order) {
    if (idx >= utterances_.size())
      throw ValidationError("subset: utterance index out of range");
    Utterance u = utterances_[idx];
    const std::size_t count = u.frame_count();
    data.insert(data.end(), data_.begin() + u.frame_begin * dim_,
                data_.begin() + u.frame_end * dim_);
    u.frame_begin = cursor;
    u.frame_end = cursor + count;
    cursor += count;
    utts.push_back(std::move(u));
  }
  return EmbeddingSet(dim_, std::move(data), std::move(utts), taxonomy_,
                      level_);
}

std::vector<std::vector<std::size_t>> EmbeddingSet::indices_by_label() const {
  std::vector<std::vector<std::size_t>> out(taxonomy_.size());
  for (std::size_t i = 0; i < utterances_.size(); ++i) {
    out[utterances_[i].label].push_back(i);
  }
  return out;
}

EmbeddingSet pool_utterance(const EmbeddingSet& set) {
  const int d = set.dim();
  std::vector<float> data;
  data.reserve(set.utterances().size() * d);
  std::vector<Utterance> utts;
  utts.reserve(set.utterances().size());
  std::vector<double> acc(d);
  std::size_t cursor = 0;
  for (const auto& u : set.utterances()) {
    std::fill(acc.begin(), acc.end(), 0.0);
    for (std::size_t r = u.frame_begin; r < u.frame_end; ++r) {
      auto row = set.row(r);
      for (int j = 0; j < d; ++j) acc[j] += row[j];
    }
    const double inv = 1.0 / static_cast<double>(u.frame_count());
    for (int j = 0; j < d; ++j)
      data.push_back(static_cast<float>(acc[j] * inv));
    Utterance pooled = u;
    pooled.frame_begin = cursor;
    pooled.frame_end = cursor + 1;
    ++cursor;
    utts.push_back(std::move(pooled));
  }
  return EmbeddingSet(d, std::move(data), std::move(utts), set.taxonomy(),
                      Level::kUtterance);
}

std::pair<EmbeddingSet, EmbeddingSet> stratify(const EmbeddingSet& set) {
  std::string missing;
  for (const auto& u : set.utterances()) {
    if (!u.soft) {
      if (!missing.empty()) missing += ", ";
      missing += u.uid;
    }
  }
  if (!missing.empty())
    throw ValidationError("stratify: utterances missing soft labels: " +
                          missing);
  std::vector<std::size_t> low, high;
  for (std::size_t i = 0; i < set.utterances().size(); ++i) {
    if (stratum_of(*set.utterances()[i].soft) == Stratum::kLow) {
      low.push_back(i);
    } else {
      high.push_back(i);
    }
  }
  return {set.subset(low), set.subset(high)};
}

}  // namespace emoq
