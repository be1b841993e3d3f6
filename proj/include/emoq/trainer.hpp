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

#ifndef EMOQ_TRAINER_HPP_
#define EMOQ_TRAINER_HPP_

#include <cstdint>
#include <span>
#include <vector>

#include "emoq/rvq.hpp"
#include "emoq/types.hpp"

namespace emoq {

// Training-set composition. Specific is the biased regime with A = 100.
struct TrainingRegime {
  RegimeKind kind = RegimeKind::kBalanced;
  int target = -1;          // class id; required for specific/biased
  int bias_percent = -1;    // A in [50, 100]; biased only
  std::size_t total_budget = 0;  // T utterances
  std::uint64_t seed = 0;
};

struct KMeansConfig {
  int entries = 1;  // k
  int max_iters = 100;
  double tol = 1e-5;  // relative distortion change
  std::uint64_t seed = 0;
};

// Per-class utterance quotas implied by a regime. Balanced splits T evenly
// (T must divide by C); biased gives round(A*T/100) to the target and the
// remainder to the other classes, extra units round-robin in label-id order.
std::vector<std::size_t> regime_quotas(const TrainingRegime& regime,
                                       int num_classes);

// Samples utterances without replacement to meet the quotas, deterministic
// under the regime seed. Selected utterances keep manifest order.
EmbeddingSet assemble_training_set(const EmbeddingSet& set,
                                   const TrainingRegime& regime);

struct KMeansResult {
  Codebook codebook;
  std::vector<std::uint32_t> assignment;
  // Mean squared distance to the assigned centroid, one entry per
  // assignment pass; non-increasing.
  std::vector<double> distortion;
};

// Lloyd's algorithm with k-means++ seeding. Ties in assignment go to the
// lowest centroid index; empty clusters are reseeded from the point farthest
// from its centroid.
KMeansResult kmeans_fit(std::span<const float> data, std::size_t rows, int dim,
                        const KMeansConfig& cfg);

// Assembles the regime's training set from `set`, then fits one codebook per
// stage on the running residuals. cfg.entries is overridden by `entries`;
// per-stage seeds derive from the regime seed.
RvqStack train_rvq(const EmbeddingSet& set, const TrainingRegime& regime,
                   int stages, int entries, const KMeansConfig& cfg);

// Mean squared residual after each stage prefix (depth 0..L) of `stack`
// greedily applied to `data`; used for the monotonicity checks.
std::vector<double> residual_curve(const EmbeddingSet& data,
                                   const RvqStack& stack);

}  // namespace emoq

#endif  // EMOQ_TRAINER_HPP_
