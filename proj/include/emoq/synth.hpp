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

#ifndef EMOQ_SYNTH_HPP_
#define EMOQ_SYNTH_HPP_

#include <cstdint>
#include <vector>

#include "emoq/types.hpp"

namespace emoq {

// Emotion-clustered Gaussian data: class means sit at regular simplex
// vertices `separation` apart (unit per-dimension noise), an
// ambiguity_fraction of utterances draw frames from a two-class mixture and
// carry the mixture weights as their soft label.
struct SynthSpec {
  int classes = 4;
  int dim = 64;
  int per_class = 500;       // utterances per primary class
  double separation = 4.0;   // distance between class means, in sigma units
  double ambiguity_fraction = 0.0;
  int frames_min = 1;
  int frames_max = 1;
  std::uint64_t seed = 0;
};

// Class means as `classes` points in R^dim with equal pairwise distance
// `separation`; needs dim >= classes - 1.
std::vector<std::vector<double>> simplex_means(int classes, int dim,
                                               double separation);

// Deterministic under spec.seed; hard label always equals argmax(soft).
EmbeddingSet generate(const SynthSpec& spec);

}  // namespace emoq

#endif  // EMOQ_SYNTH_HPP_
