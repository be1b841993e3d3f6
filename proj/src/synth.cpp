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

#include "emoq/synth.hpp"

#include <cmath>
#include <string>

namespace emoq {

std::vector<std::vector<double>> simplex_means(int classes, int dim,
                                               double separation) {
  if (classes < 1) throw ValidationError("synth: classes must be >= 1");
  if (separation <= 0.0)
    throw ValidationError("synth: separation must be positive");
  if (dim < classes - 1)
    throw ValidationError("synth: cannot place " + std::to_string(classes) +
                          " distinct simplex vertices in dim " +
                          std::to_string(dim) + " (need dim >= classes - 1)");
  std::vector<std::vector<double>> means(classes,
                                         std::vector<double>(dim, 0.0));
  if (classes == 1) return means;

  // Unit vectors with pairwise dot -1/(C-1): the regular simplex on the
  // sphere in R^(C-1). Coordinates fill in one axis per vertex.
  const double target_dot = -1.0 / static_cast<double>(classes - 1);
  std::vector<std::vector<double>> verts(classes,
                                         std::vector<double>(classes - 1, 0.0));
  for (int i = 0; i < classes; ++i) {
    double norm2 = 0.0;
    for (int j = 0; j < i && j < classes - 1; ++j) {
      double dot = 0.0;
      for (int k = 0; k < j; ++k) dot += verts[i][k] * verts[j][k];
      verts[i][j] = (target_dot - dot) / verts[j][j];
      norm2 += verts[i][j] * verts[i][j];
    }
    if (i < classes - 1) verts[i][i] = std::sqrt(1.0 - norm2);
  }
  // Unit vertices sit sqrt(2C/(C-1)) apart; rescale to `separation`.
  const double scale =
      separation / std::sqrt(2.0 * classes / static_cast<double>(classes - 1));
  for (int i = 0; i < classes; ++i) {
    for (int j = 0; j < classes - 1; ++j) means[i][j] = scale * verts[i][j];
  }
  return means;
}

namespace {

struct VoteSplit {
  int primary_votes;
  int partner_votes;
};

// Ten-annotator splits for ambiguous items; (5,5) lands in the
// high-ambiguity stratum, the others stay low but mixed.
constexpr VoteSplit kSplits[3] = {{7, 3}, {6, 4}, {5, 5}};

}  // namespace

EmbeddingSet generate(const SynthSpec& spec) {
  if (spec.per_class < 1)
    throw ValidationError("synth: per_class must be >= 1");
  if (spec.ambiguity_fraction < 0.0 || spec.ambiguity_fraction > 1.0)
    throw ValidationError("synth: ambiguity fraction must lie in [0, 1]");
  if (spec.frames_min < 1 || spec.frames_max < spec.frames_min)
    throw ValidationError("synth: frame range must satisfy 1 <= min <= max");
  const auto means = simplex_means(spec.classes, spec.dim, spec.separation);
  const Taxonomy tax = Taxonomy::canonical(spec.classes);

  std::vector<float> data;
  std::vector<Utterance> utts;
  utts.reserve(static_cast<std::size_t>(spec.classes) * spec.per_class);
  std::size_t cursor = 0;

  const int ambiguous_per_class =
      spec.classes > 1
          ? static_cast<int>(std::llround(spec.ambiguity_fraction *
                                          spec.per_class))
          : 0;

  for (int c = 0; c < spec.classes; ++c) {
    Rng rng(derive_seed(spec.seed, "synth/class/" + std::to_string(c)));
    for (int u = 0; u < spec.per_class; ++u) {
      const bool ambiguous = u < ambiguous_per_class;
      int partner = c;
      std::vector<double> votes(spec.classes, 0.0);
      if (ambiguous) {
        VoteSplit split = kSplits[rng.uniform_below(3)];
        if (split.primary_votes == split.partner_votes && c == spec.classes - 1) {
          split = kSplits[1];  // no higher-id partner to hold the tie
        }
        if (split.primary_votes == split.partner_votes) {
          // argmax ties resolve to the lowest id, so the partner sits above.
          partner = c + 1 +
                    static_cast<int>(rng.uniform_below(spec.classes - c - 1));
        } else {
          partner = static_cast<int>(rng.uniform_below(spec.classes - 1));
          if (partner >= c) ++partner;
        }
        votes[c] = split.primary_votes;
        votes[partner] = split.partner_votes;
      } else {
        votes[c] = 10.0;
      }
      SoftLabel soft(std::move(votes));

      const int frames =
          spec.frames_min +
          static_cast<int>(rng.uniform_below(
              static_cast<std::uint64_t>(spec.frames_max - spec.frames_min) +
              1));
      for (int f = 0; f < frames; ++f) {
        const int source =
            (ambiguous && rng.uniform01() >= soft.probs()[c]) ? partner : c;
        for (int j = 0; j < spec.dim; ++j) {
          data.push_back(
              static_cast<float>(means[source][j] + rng.gaussian()));
        }
      }

      Utterance utt;
      utt.uid = tax.name(c) + "-" + std::to_string(u);
      utt.label = c;
      utt.soft = std::move(soft);
      utt.frame_begin = cursor;
      utt.frame_end = cursor + frames;
      utt.corpus = "synth";
      cursor += frames;
      utts.push_back(std::move(utt));
    }
  }
  return EmbeddingSet(spec.dim, std::move(data), std::move(utts), tax,
                      Level::kFrame);
}

}  // namespace emoq
