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

#ifndef EMOQ_RVQ_HPP_
#define EMOQ_RVQ_HPP_

#include <cstdint>
#include <span>
#include <vector>

#include "emoq/types.hpp"

namespace emoq {

// One quantization stage: K codewords of dimension D (float32 storage).
class Codebook {
 public:
  Codebook(int dim, int entries, std::vector<float> words);

  int dim() const { return dim_; }
  int entries() const { return entries_; }
  std::span<const float> word(int k) const {
    return {words_.data() + static_cast<std::size_t>(k) * dim_,
            static_cast<std::size_t>(dim_)};
  }
  const std::vector<float>& words() const { return words_; }

  // Index of the nearest codeword under squared Euclidean distance,
  // 64-bit accumulation, ties to the lowest index.
  int nearest(std::span<const float> v) const;

 private:
  int dim_;
  int entries_;
  std::vector<float> words_;
};

// How the training set for a stack was composed.
enum class RegimeKind : std::uint8_t {
  kBalanced = 0,
  kSpecific = 1,
  kBiased = 2,
};

struct RegimeInfo {
  RegimeKind kind = RegimeKind::kBalanced;
  int target = -1;        // class id, specific/biased only
  int bias_percent = -1;  // A, biased only
  std::uint64_t seed = 0;
};

// A trained residual quantizer: L codebooks applied in sequence, each stage
// encoding what the previous stages left behind.
class RvqStack {
 public:
  RvqStack(std::vector<Codebook> stages, RegimeInfo regime);

  int depth() const { return static_cast<int>(stages_.size()); }  // L
  int entries() const { return stages_.front().entries(); }       // K
  int dim() const { return stages_.front().dim(); }
  const Codebook& stage(int l) const { return stages_[l]; }  // 0-based
  const std::vector<Codebook>& stages() const { return stages_; }
  const RegimeInfo& regime() const { return regime_; }

  // FNV over codeword bytes; identifies the producing stack in codes.
  std::uint64_t fingerprint() const { return fingerprint_; }

 private:
  std::vector<Codebook> stages_;
  RegimeInfo regime_;
  std::uint64_t fingerprint_;
};

// Per-vector stage indices: the discrete tokens.
class CodeSequence {
 public:
  CodeSequence(std::size_t rows, int stages, int entries,
               std::vector<std::uint32_t> indices,
               std::uint64_t stack_fingerprint = 0);

  std::size_t rows() const { return rows_; }
  int stages() const { return stages_; }   // L
  int entries() const { return entries_; }  // K
  std::uint32_t at(std::size_t row, int stage) const {
    return indices_[row * stages_ + stage];
  }
  const std::vector<std::uint32_t>& indices() const { return indices_; }
  std::uint64_t stack_fingerprint() const { return stack_fingerprint_; }

 private:
  std::size_t rows_;
  int stages_;
  int entries_;
  std::vector<std::uint32_t> indices_;
  std::uint64_t stack_fingerprint_;
};

// Greedy residual encoding: r_0 = z, stage l picks the nearest codeword to
// r_{l-1} and r_l = r_{l-1} - chosen (float32 residual storage, 64-bit
// distances, ties to the lowest index).
CodeSequence encode(const EmbeddingSet& set, const RvqStack& stack);

// Single-vector variant over the first `depth` stages.
std::vector<std::uint32_t> encode_row(std::span<const float> z,
                                      const RvqStack& stack, int depth);

// Sum of the selected codewords over stages 1..depth, accumulated in 64-bit
// stage order per element. Manifest of `source` is carried through unchanged.
EmbeddingSet reconstruct(const CodeSequence& codes, const RvqStack& stack,
                         int depth, const EmbeddingSet& source);

// Raw reconstruction of one row (no manifest) for router-style callers.
std::vector<float> reconstruct_row(std::span<const std::uint32_t> codes,
                                   const RvqStack& stack, int depth);

// depth * ceil(log2 K) * frame_rate_hz; K = 1 carries zero bits per frame.
double nominal_bitrate(int depth, int entries, double frame_rate_hz);
double nominal_bitrate(const RvqStack& stack, int depth, double frame_rate_hz);

// Bits per code index: 0 for K = 1, else ceil(log2 K).
int bits_per_index(int entries);

}  // namespace emoq

#endif  // EMOQ_RVQ_HPP_
