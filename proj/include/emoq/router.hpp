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

#ifndef EMOQ_ROUTER_HPP_
#define EMOQ_ROUTER_HPP_

#include <optional>
#include <vector>

#include "emoq/metrics.hpp"
#include "emoq/rvq.hpp"
#include "emoq/types.hpp"

namespace emoq {

// One specialized stack per emotion; classification picks the label whose
// reconstruction stays closest (in cosine) to the input.
class RouterBank {
 public:
  // Stacks must arrive in label-id order and share (L, K, D). When
  // `normalize` is set, the input and every codeword are L2-normalized, which
  // makes routing exactly invariant to positive rescaling of the input.
  static RouterBank build(std::vector<RvqStack> stacks, int depth,
                          bool normalize, Taxonomy class_map);

  int classes() const { return static_cast<int>(stacks_.size()); }
  int depth() const { return depth_; }
  int dim() const { return stacks_.front().dim(); }
  bool normalized() const { return normalized_; }
  const RvqStack& stack(int label) const { return stacks_[label]; }
  const Taxonomy& class_map() const { return class_map_; }

 private:
  RouterBank() = default;
  std::vector<RvqStack> stacks_;
  int depth_ = 1;
  bool normalized_ = true;
  Taxonomy class_map_;
};

struct RouteResult {
  int label = 0;
  std::vector<double> scores;               // cosine per stack
  std::vector<std::vector<std::uint32_t>> codes;  // per stack, depth entries
};

RouteResult route(std::span<const float> z, const RouterBank& bank);

struct RouteBatchResult {
  std::vector<int> labels;  // one per utterance
  EvalReport report;
};

// Routes every utterance (pooling frames first by default; frame_vote routes
// each frame and takes the majority, ties to the lowest label). The report
// carries Macro-F1 against the manifest and the delta against a supplied
// baseline.
RouteBatchResult route_batch(const EmbeddingSet& set, const RouterBank& bank,
                             std::optional<double> baseline_f1 = std::nullopt,
                             bool frame_vote = false);

}  // namespace emoq

#endif  // EMOQ_ROUTER_HPP_
