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

#include "emoq/rvq.hpp"

#include <cmath>
#include <string>

namespace emoq {

Codebook::Codebook(int dim, int entries, std::vector<float> words)
    : dim_(dim), entries_(entries), words_(std::move(words)) {
  if (dim_ <= 0 || entries_ <= 0)
    throw ValidationError("codebook: dim and entries must be positive");
  if (words_.size() !=
      static_cast<std::size_t>(dim_) * static_cast<std::size_t>(entries_))
    throw ValidationError("codebook: words size does not match K*D");
  for (float w : words_) {
    if (!std::isfinite(w)) throw DataError("codebook: non-finite codeword");
  }
}

int Codebook::nearest(std::span<const float> v) const {
  if (static_cast<int>(v.size()) != dim_)
    throw ValidationError("codebook: query dimension mismatch");
  int best = 0;
  double best_dist = 0.0;
  for (int k = 0; k < entries_; ++k) {
    const float* w = words_.data() + static_cast<std::size_t>(k) * dim_;
    double dist = 0.0;
    for (int j = 0; j < dim_; ++j) {
      const double diff = static_cast<double>(v[j]) - static_cast<double>(w[j]);
      dist += diff * diff;
    }
    if (k == 0 || dist < best_dist) {
      best = k;
      best_dist = dist;
    }
  }
  return best;
}

RvqStack::RvqStack(std::vector<Codebook> stages, RegimeInfo regime)
    : stages_(std::move(stages)), regime_(regime) {
  if (stages_.empty()) throw ValidationError("rvq stack: needs >= 1 stage");
  const int d = stages_.front().dim();
  const int k = stages_.front().entries();
  for (const auto& s : stages_) {
    if (s.dim() != d || s.entries() != k)
      throw ValidationError("rvq stack: all stages must share D and K");
  }
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (const auto& s : stages_) {
    h = fnv1a64(s.words().data(), s.words().size() * sizeof(float), h);
  }
  fingerprint_ = h;
}

CodeSequence::CodeSequence(std::size_t rows, int stages, int entries,
                           std::vector<std::uint32_t> indices,
                           std::uint64_t stack_fingerprint)
    : rows_(rows),
      stages_(stages),
      entries_(entries),
      indices_(std::move(indices)),
      stack_fingerprint_(stack_fingerprint) {
  if (stages_ <= 0 || entries_ <= 0)
    throw ValidationError("code sequence: stages and entries must be positive");
  if (indices_.size() != rows_ * static_cast<std::size_t>(stages_))
    throw ValidationError("code sequence: index count does not match rows*L");
  for (std::uint32_t idx : indices_) {
    if (idx >= static_cast<std::uint32_t>(entries_))
      throw ValidationError("code sequence: index " + std::to_string(idx) +
                            " out of range [0, " + std::to_string(entries_) +
                            ")");
  }
}

std::vector<std::uint32_t> encode_row(std::span<const float> z,
                                      const RvqStack& stack, int depth) {
  if (static_cast<int>(z.size()) != stack.dim())
    throw ValidationError("encode: embedding dim " + std::to_string(z.size()) +
                          " does not match stack dim " +
                          std::to_string(stack.dim()));
  if (depth < 1 || depth > stack.depth())
    throw ValidationError("encode: depth out of range [1, L]");
  std::vector<float> residual(z.begin(), z.end());
  std::vector<std::uint32_t> codes(depth);
  for (int l = 0; l < depth; ++l) {
    const Codebook& cb = stack.stage(l);
    const int k = cb.nearest(residual);
    codes[l] = static_cast<std::uint32_t>(k);
    auto w = cb.word(k);
    for (int j = 0; j < stack.dim(); ++j) residual[j] -= w[j];
  }
  return codes;
}

CodeSequence encode(const EmbeddingSet& set, const RvqStack& stack) {
  if (set.dim() != stack.dim())
    throw ValidationError("encode: embedding dim " + std::to_string(set.dim()) +
                          " does not match stack dim " +
                          std::to_string(stack.dim()));
  const int L = stack.depth();
  std::vector<std::uint32_t> indices(set.rows() * static_cast<std::size_t>(L));
  for (std::size_t r = 0; r < set.rows(); ++r) {
    auto codes = encode_row(set.row(r), stack, L);
    std::copy(codes.begin(), codes.end(), indices.begin() + r * L);
  }
  return CodeSequence(set.rows(), L, stack.entries(), std::move(indices),
                      stack.fingerprint());
}

std::vector<float> reconstruct_row(std::span<const std::uint32_t> codes,
                                   const RvqStack& stack, int depth) {
  const int d = stack.dim();
  std::vector<double> acc(d, 0.0);
  for (int l = 0; l < depth; ++l) {
    auto w = stack.stage(l).word(static_cast<int>(codes[l]));
    for (int j = 0; j < d; ++j) acc[j] += static_cast<double>(w[j]);
  }
  std::vector<float> out(d);
  for (int j = 0; j < d; ++j) out[j] = static_cast<float>(acc[j]);
  return out;
}

EmbeddingSet reconstruct(const CodeSequence& codes, const RvqStack& stack,
                         int depth, const EmbeddingSet& source) {
  if (depth < 1 || depth > stack.depth())
    throw ValidationError("reconstruct: depth " + std::to_string(depth) +
                          " out of range [1, " + std::to_string(stack.depth()) +
                          "]");
  if (codes.stages() > stack.depth() || codes.entries() != stack.entries())
    throw ValidationError("reconstruct: codes do not match stack shape");
  if (depth > codes.stages())
    throw ValidationError("reconstruct: depth exceeds encoded stages");
  if (codes.stack_fingerprint() != 0 &&
      codes.stack_fingerprint() != stack.fingerprint())
    throw ValidationError("reconstruct: codes were produced by a different stack");
  if (codes.rows() != source.rows())
    throw ValidationError("reconstruct: row count does not match source manifest");
  const int d = stack.dim();
  std::vector<float> data(codes.rows() * static_cast<std::size_t>(d));
  std::vector<double> acc(d);
  for (std::size_t r = 0; r < codes.rows(); ++r) {
    std::fill(acc.begin(), acc.end(), 0.0);
    for (int l = 0; l < depth; ++l) {
      auto w = stack.stage(l).word(static_cast<int>(codes.at(r, l)));
      for (int j = 0; j < d; ++j) acc[j] += static_cast<double>(w[j]);
    }
    for (int j = 0; j < d; ++j)
      data[r * d + j] = static_cast<float>(acc[j]);
  }
  return EmbeddingSet(d, std::move(data), source.utterances(),
                      source.taxonomy(), source.level());
}

int bits_per_index(int entries) {
  if (entries < 1) throw ValidationError("bits_per_index: K must be >= 1");
  int bits = 0;
  while ((1 << bits) < entries) ++bits;
  return bits;  // ceil(log2 K); 0 for K = 1
}

double nominal_bitrate(int depth, int entries, double frame_rate_hz) {
  if (depth < 1) throw ValidationError("nominal_bitrate: depth must be >= 1");
  if (frame_rate_hz <= 0.0)
    throw ValidationError("nominal_bitrate: frame rate must be positive");
  return static_cast<double>(depth) * bits_per_index(entries) * frame_rate_hz;
}

double nominal_bitrate(const RvqStack& stack, int depth,
                       double frame_rate_hz) {
  if (depth > stack.depth())
    throw ValidationError("nominal_bitrate: depth exceeds stack depth");
  return nominal_bitrate(depth, stack.entries(), frame_rate_hz);
}

}  // namespace emoq
