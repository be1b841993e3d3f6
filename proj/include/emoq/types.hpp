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

#ifndef EMOQ_TYPES_HPP_
#define EMOQ_TYPES_HPP_

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "emoq/common.hpp"

namespace emoq {

// Ordered emotion class names. Ids are positions; names are unique and
// lower-cased. The canonical four-class set is angry, happy, neutral, sad.
class Taxonomy {
 public:
  Taxonomy() = default;
  explicit Taxonomy(std::vector<std::string> names);

  // First four names are the canonical set, further classes are class4,
  // class5, ...
  static Taxonomy canonical(int num_classes);

  int size() const { return static_cast<int>(names_.size()); }
  const std::string& name(int id) const;
  // Case-insensitive lookup; throws ValidationError for unknown names.
  int id_of(std::string_view name) const;
  bool operator==(const Taxonomy& other) const = default;

 private:
  std::vector<std::string> names_;
};

// Probability distribution over emotion classes. Construction renormalizes
// raw annotator vote counts; entries are non-negative and sum to 1.
class SoftLabel {
 public:
  explicit SoftLabel(std::vector<double> raw_votes);

  const std::vector<double>& probs() const { return probs_; }
  int size() const { return static_cast<int>(probs_.size()); }
  double max_prob() const;
  // Ties resolved toward the lowest class id.
  int argmax() const;
  bool operator==(const SoftLabel& other) const = default;

 private:
  std::vector<double> probs_;
};

// Low-ambiguity: the primary emotion holds a strict majority.
enum class Stratum { kLow, kHigh };

Stratum stratum_of(const SoftLabel& soft);

struct Utterance {
  std::string uid;
  int label = 0;
  std::optional<SoftLabel> soft;
  // [frame_begin, frame_end) rows of the owning embedding matrix.
  std::size_t frame_begin = 0;
  std::size_t frame_end = 0;
  std::string corpus;

  std::size_t frame_count() const { return frame_end - frame_begin; }
};

enum class Level { kFrame, kUtterance };

// Immutable matrix of D-dimensional vectors plus the utterance manifest.
// Rows are float32 storage; all reductions over them run in 64-bit.
class EmbeddingSet {
 public:
  EmbeddingSet(int dim, std::vector<float> data,
               std::vector<Utterance> utterances, Taxonomy taxonomy,
               Level level);

  int dim() const { return dim_; }
  std::size_t rows() const { return data_.size() / dim_; }
  std::span<const float> row(std::size_t i) const {
    return {data_.data() + i * dim_, static_cast<std::size_t>(dim_)};
  }
  const std::vector<float>& data() const { return data_; }
  const std::vector<Utterance>& utterances() const { return utterances_; }
  const Taxonomy& taxonomy() const { return taxonomy_; }
  Level level() const { return level_; }

  // New set holding the chosen utterances (original manifest order is kept;
  // frame ranges are re-based onto the packed matrix).
  EmbeddingSet subset(std::span<const std::size_t> utterance_indices) const;

  // Per-class utterance indices, in manifest order.
  std::vector<std::vector<std::size_t>> indices_by_label() const;

 private:
  int dim_;
  std::vector<float> data_;
  std::vector<Utterance> utterances_;
  Taxonomy taxonomy_;
  Level level_;
};

// Collapses each utterance to the arithmetic mean of its frames
// (64-bit accumulation). Identity for utterance-level input manifests.
EmbeddingSet pool_utterance(const EmbeddingSet& set);

// Splits by ambiguity stratum: low gets max(soft) > 0.5, high the rest.
// Every utterance must carry a soft label.
std::pair<EmbeddingSet, EmbeddingSet> stratify(const EmbeddingSet& set);

}  // namespace emoq

#endif  // EMOQ_TYPES_HPP_
