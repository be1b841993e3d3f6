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

#ifndef EMOQ_PIPELINE_HPP_
#define EMOQ_PIPELINE_HPP_

#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "emoq/metrics.hpp"
#include "emoq/probe.hpp"
#include "emoq/router.hpp"
#include "emoq/trainer.hpp"

namespace emoq {

// Shared experiment knobs. Every random draw descends from `seed` through
// fixed labels, so runs with equal configs are bit-identical.
struct PipelineConfig {
  int stages = 8;           // L
  int entries = 32;         // K
  std::size_t budget = 0;   // T utterances for codebook training
  std::uint64_t seed = 0;
  KMeansConfig kmeans;      // entries and seed are filled in per use
  ProbeConfig probe;        // seed is filled in per use
  double frame_rate_hz = 50.0;
  std::filesystem::path cache_dir;  // empty disables artifact caching
};

// Trains (or loads from cache) the stack for one regime over `data`.
RvqStack train_stack_cached(const EmbeddingSet& data,
                            const TrainingRegime& regime, int stages,
                            int entries, const KMeansConfig& kmeans,
                            const std::filesystem::path& cache_dir);

// Probe over the pooled continuous embeddings, cached like the stacks.
LinearProbe train_probe_cached(const EmbeddingSet& pooled,
                               const ProbeConfig& cfg,
                               const std::filesystem::path& cache_dir);

// Per-depth, per-emotion cosine fidelity and probe recall of one stack over
// `data`, plus per-stage utilization entropy and nominal bitrate.
EvalReport evaluate_stack(const EmbeddingSet& data, const RvqStack& stack,
                          const LinearProbe& probe, double frame_rate_hz);

// Layer-wise degradation under the balanced codebook: per-depth, per-emotion
// cosine fidelity and primary recall, plus per-stage entropy and bitrate.
EvalReport run_rq1(const EmbeddingSet& data, const PipelineConfig& cfg);

// Emotion-specific codebooks in matched and unmatched settings against the
// balanced baseline, with per-layer utilization entropy.
EvalReport run_rq2(const EmbeddingSet& data, const PipelineConfig& cfg);

// Soft-distribution fidelity per training regime and ambiguity stratum.
// Regime -1 is balanced; A in [50, 100] trains per-class stacks at ratio
// A+(100-A) and quantizes each utterance with its own class's stack.
std::vector<std::pair<std::string, EvalReport>> run_rq3(
    const EmbeddingSet& data, const PipelineConfig& cfg,
    const std::vector<int>& regimes);

struct SweepPair {
  int stages;
  int entries;
};

// The seven configurations swept in the downstream evaluation.
std::vector<SweepPair> default_sweep_pairs();

struct Rq4Table {
  std::vector<std::string> configs;  // "8x32", ...
  double baseline_f1 = 0.0;
  std::vector<double> bal_delta;
  std::vector<double> emoq100_delta;
  std::vector<double> emoq99_delta;
  EvalReport detail;

  std::string table_csv() const;
};

// Downstream Macro-F1 deltas against the continuous baseline for the Bal,
// Emo-Q(100), and Emo-Q(99) conditions over the sweep pairs.
Rq4Table run_rq4(const EmbeddingSet& data, const PipelineConfig& cfg,
                 const std::vector<SweepPair>& pairs);

struct SweepConfig {
  std::vector<SweepPair> pairs = default_sweep_pairs();
  // "balanced", "specific", or "biased:<A>".
  std::vector<std::string> regimes = {"balanced"};
  std::size_t budget = 0;
  std::uint64_t seed = 0;
  double frame_rate_hz = 50.0;
  int jobs = 1;
};

// Grid evaluation over (L, K) x regime; writes one CSV per cell plus
// summary.csv and summary.json under out_dir. Outputs are byte-stable for
// equal inputs and seeds.
void run_sweep(const EmbeddingSet& data, const SweepConfig& cfg,
               const std::filesystem::path& out_dir);

}  // namespace emoq

#endif  // EMOQ_PIPELINE_HPP_
