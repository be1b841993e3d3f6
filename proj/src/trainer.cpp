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

#include "emoq/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace emoq {

namespace {

double sq_dist(const float* a, const float* b, int dim) {
  double d = 0.0;
  for (int j = 0; j < dim; ++j) {
    const double diff = static_cast<double>(a[j]) - static_cast<double>(b[j]);
    d += diff * diff;
  }
  return d;
}

// k-means++: first centroid uniform, the rest proportional to the squared
// distance from the nearest centroid chosen so far.
std::vector<float> kmeanspp_init(std::span<const float> data, std::size_t rows,
                                 int dim, int k, Rng& rng) {
  std::vector<float> centroids(static_cast<std::size_t>(k) * dim);
  std::vector<double> dist2(rows, std::numeric_limits<double>::infinity());
  std::size_t first = rng.uniform_below(rows);
  std::copy_n(data.data() + first * dim, dim, centroids.begin());
  for (int c = 1; c < k; ++c) {
    const float* last = centroids.data() + static_cast<std::size_t>(c - 1) * dim;
    double total = 0.0;
    for (std::size_t r = 0; r < rows; ++r) {
      const double d = sq_dist(data.data() + r * dim, last, dim);
      if (d < dist2[r]) dist2[r] = d;
      total += dist2[r];
    }
    std::size_t pick = 0;
    if (total > 0.0) {
      const double target = rng.uniform01() * total;
      double cum = 0.0;
      pick = rows - 1;
      for (std::size_t r = 0; r < rows; ++r) {
        cum += dist2[r];
        if (cum > target) {
          pick = r;
          break;
        }
      }
    } else {
      // All mass already covered (duplicate points); fall back to uniform.
      pick = rng.uniform_below(rows);
    }
    std::copy_n(data.data() + pick * dim,
                dim, centroids.begin() + static_cast<std::size_t>(c) * dim);
  }
  return centroids;
}

}  // namespace

std::vector<std::size_t> regime_quotas(const TrainingRegime& regime,
                                       int num_classes) {
  const std::size_t T = regime.total_budget;
  const int C = num_classes;
  if (C < 1) throw ValidationError("regime: taxonomy must have >= 1 class");
  if (T == 0) throw ValidationError("regime: total budget must be positive");
  std::vector<std::size_t> quotas(C, 0);
  switch (regime.kind) {
    case RegimeKind::kBalanced: {
      if (T % static_cast<std::size_t>(C) != 0)
        throw ValidationError("regime: balanced budget " + std::to_string(T) +
                              " is not divisible by " + std::to_string(C) +
                              " classes");
      std::fill(quotas.begin(), quotas.end(), T / C);
      return quotas;
    }
    case RegimeKind::kSpecific:
    case RegimeKind::kBiased: {
      const int A =
          regime.kind == RegimeKind::kSpecific ? 100 : regime.bias_percent;
      if (A < 50 || A > 100)
        throw ValidationError("regime: bias percent must lie in [50, 100]");
      if (regime.target < 0 || regime.target >= C)
        throw ValidationError("regime: target class id out of taxonomy");
      // round(A*T/100), half away from zero; remainder split over the other
      // classes with the extra units handed out round-robin in label-id order.
      const std::size_t n_target = (2 * A * T + 100) / 200;
      quotas[regime.target] = n_target;
      const std::size_t rest = T - n_target;
      if (C == 1) {
        quotas[0] = T;
        return quotas;
      }
      const std::size_t base = rest / static_cast<std::size_t>(C - 1);
      std::size_t extra = rest % static_cast<std::size_t>(C - 1);
      for (int c = 0; c < C; ++c) {
        if (c == regime.target) continue;
        quotas[c] = base + (extra > 0 ? 1 : 0);
        if (extra > 0) --extra;
      }
      return quotas;
    }
  }
  throw ValidationError("regime: unknown kind");
}

EmbeddingSet assemble_training_set(const EmbeddingSet& set,
                                   const TrainingRegime& regime) {
  const int C = set.taxonomy().size();
  const auto quotas = regime_quotas(regime, C);
  const auto by_label = set.indices_by_label();
  std::vector<std::size_t> chosen;
  chosen.reserve(regime.total_budget);
  for (int c = 0; c < C; ++c) {
    if (quotas[c] == 0) continue;
    if (by_label[c].size() < quotas[c])
      throw ValidationError(
          "regime: class '" + set.taxonomy().name(c) + "' has " +
          std::to_string(by_label[c].size()) + " utterances, quota needs " +
          std::to_string(quotas[c]) + " (short by " +
          std::to_string(quotas[c] - by_label[c].size()) + ")");
    std::vector<std::size_t> pool = by_label[c];
    Rng rng(derive_seed(regime.seed, "regime/sample/" + set.taxonomy().name(c)));
    rng.shuffle(pool);
    chosen.insert(chosen.end(), pool.begin(), pool.begin() + quotas[c]);
  }
  return set.subset(chosen);
}

KMeansResult kmeans_fit(std::span<const float> data, std::size_t rows, int dim,
                        const KMeansConfig& cfg) {
  const int k = cfg.entries;
  if (k < 1) throw ValidationError("kmeans: k must be >= 1");
  if (cfg.tol <= 0.0) throw ValidationError("kmeans: tol must be positive");
  if (rows < static_cast<std::size_t>(k))
    throw ValidationError("kmeans: " + std::to_string(rows) +
                          " rows cannot seed " + std::to_string(k) +
                          " clusters");
  if (data.size() != rows * static_cast<std::size_t>(dim))
    throw ValidationError("kmeans: data size does not match rows*dim");
  for (float v : data) {
    if (!std::isfinite(v)) throw DataError("kmeans: non-finite input value");
  }

  Rng rng(cfg.seed);
  std::vector<float> centroids = kmeanspp_init(data, rows, dim, k, rng);
  std::vector<std::uint32_t> assignment(rows, 0);
  std::vector<double> assign_dist(rows, 0.0);
  std::vector<double> distortion;

  auto assign_pass = [&]() {
    double total = 0.0;
    for (std::size_t r = 0; r < rows; ++r) {
      const float* x = data.data() + r * dim;
      int best = 0;
      double best_d = sq_dist(x, centroids.data(), dim);
      for (int c = 1; c < k; ++c) {
        const double d =
            sq_dist(x, centroids.data() + static_cast<std::size_t>(c) * dim, dim);
        if (d < best_d) {
          best = c;
          best_d = d;
        }
      }
      assignment[r] = static_cast<std::uint32_t>(best);
      assign_dist[r] = best_d;
      total += best_d;
    }
    return total / static_cast<double>(rows);
  };

  auto update_pass = [&]() {
    std::vector<double> sums(static_cast<std::size_t>(k) * dim, 0.0);
    std::vector<std::size_t> counts(k, 0);
    for (std::size_t r = 0; r < rows; ++r) {
      const float* x = data.data() + r * dim;
      double* s = sums.data() + static_cast<std::size_t>(assignment[r]) * dim;
      for (int j = 0; j < dim; ++j) s[j] += x[j];
      ++counts[assignment[r]];
    }
    for (int c = 0; c < k; ++c) {
      if (counts[c] == 0) continue;
      const double inv = 1.0 / static_cast<double>(counts[c]);
      float* w = centroids.data() + static_cast<std::size_t>(c) * dim;
      const double* s = sums.data() + static_cast<std::size_t>(c) * dim;
      for (int j = 0; j < dim; ++j) w[j] = static_cast<float>(s[j] * inv);
    }
    // Reseed empty clusters from the farthest assigned point, one each.
    for (int c = 0; c < k; ++c) {
      if (counts[c] != 0) continue;
      std::size_t far = 0;
      double far_d = -1.0;
      for (std::size_t r = 0; r < rows; ++r) {
        if (assign_dist[r] > far_d) {
          far_d = assign_dist[r];
          far = r;
        }
      }
      std::copy_n(data.data() + far * dim, dim,
                  centroids.begin() + static_cast<std::size_t>(c) * dim);
      assign_dist[far] = 0.0;  // do not hand the same point to two clusters
    }
  };

  double prev = std::numeric_limits<double>::infinity();
  for (int iter = 0; iter < std::max(cfg.max_iters, 1); ++iter) {
    const double cur = assign_pass();
    distortion.push_back(cur);
    if (std::isfinite(prev)) {
      const double denom = std::max(prev, 1e-300);
      if (prev - cur <= cfg.tol * denom) break;
    }
    prev = cur;
    update_pass();
  }
  // Land on a mean-updated state: one more update + assignment keeps the
  // recorded distortion curve non-increasing and guarantees the final SSE
  // is no worse than the single-mean solution.
  update_pass();
  distortion.push_back(assign_pass());

  return KMeansResult{Codebook(dim, k, std::move(centroids)),
                      std::move(assignment), std::move(distortion)};
}

RvqStack train_rvq(const EmbeddingSet& set, const TrainingRegime& regime,
                   int stages, int entries, const KMeansConfig& cfg) {
  if (stages < 1) throw ValidationError("train_rvq: stages must be >= 1");
  if (entries < 1) throw ValidationError("train_rvq: entries must be >= 1");
  const EmbeddingSet training = assemble_training_set(set, regime);
  const int d = training.dim();
  std::vector<float> residual = training.data();
  const std::size_t rows = training.rows();

  std::vector<Codebook> books;
  books.reserve(stages);
  for (int l = 0; l < stages; ++l) {
    KMeansConfig stage_cfg = cfg;
    stage_cfg.entries = entries;
    stage_cfg.seed = derive_seed(regime.seed, "rvq/stage/" + std::to_string(l));
    KMeansResult res = kmeans_fit(residual, rows, d, stage_cfg);
    for (std::size_t r = 0; r < rows; ++r) {
      auto w = res.codebook.word(static_cast<int>(res.assignment[r]));
      float* x = residual.data() + r * d;
      for (int j = 0; j < d; ++j) x[j] -= w[j];
    }
    books.push_back(std::move(res.codebook));
  }
  RegimeInfo info;
  info.kind = regime.kind;
  info.target = regime.kind == RegimeKind::kBalanced ? -1 : regime.target;
  info.bias_percent = regime.kind == RegimeKind::kBiased ? regime.bias_percent
                      : regime.kind == RegimeKind::kSpecific ? 100
                                                             : -1;
  info.seed = regime.seed;
  return RvqStack(std::move(books), info);
}

std::vector<double> residual_curve(const EmbeddingSet& data,
                                   const RvqStack& stack) {
  const int d = data.dim();
  const int L = stack.depth();
  std::vector<double> sums(L + 1, 0.0);
  std::vector<float> residual(d);
  for (std::size_t r = 0; r < data.rows(); ++r) {
    auto row = data.row(r);
    std::copy(row.begin(), row.end(), residual.begin());
    double norm = 0.0;
    for (int j = 0; j < d; ++j)
      norm += static_cast<double>(residual[j]) * residual[j];
    sums[0] += norm;
    for (int l = 0; l < L; ++l) {
      const Codebook& cb = stack.stage(l);
      auto w = cb.word(cb.nearest(residual));
      norm = 0.0;
      for (int j = 0; j < d; ++j) {
        residual[j] -= w[j];
        norm += static_cast<double>(residual[j]) * residual[j];
      }
      sums[l + 1] += norm;
    }
  }
  const double inv = data.rows() ? 1.0 / static_cast<double>(data.rows()) : 0.0;
  for (double& s : sums) s *= inv;
  return sums;
}

}  // namespace emoq
