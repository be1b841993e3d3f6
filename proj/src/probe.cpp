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

#include "emoq/probe.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "emoq/detail/binio.hpp"

namespace emoq {

namespace {

constexpr std::uint16_t kProbeVersion = 1;

// Softmax of one logit row in place, max-subtracted.
void softmax_row(std::span<double> logits) {
  double hi = logits[0];
  for (double v : logits) hi = std::max(hi, v);
  double total = 0.0;
  for (double& v : logits) {
    v = std::exp(v - hi);
    total += v;
  }
  for (double& v : logits) v /= total;
}

void check_train_set(const EmbeddingSet& train) {
  if (train.level() != Level::kUtterance)
    throw ValidationError("probe: training set must be utterance-level (pool first)");
  if (train.utterances().empty())
    throw ValidationError("probe: empty training set");
  std::vector<std::size_t> counts(train.taxonomy().size(), 0);
  for (const auto& u : train.utterances()) ++counts[u.label];
  for (int c = 0; c < train.taxonomy().size(); ++c) {
    if (counts[c] == 0)
      throw ValidationError("probe: class '" + train.taxonomy().name(c) +
                            "' has no training examples");
  }
}

}  // namespace

LinearProbe::LinearProbe(int classes, int dim, std::vector<float> weights,
                         std::vector<float> bias, Taxonomy class_map,
                         ProbeConfig train_meta)
    : classes_(classes),
      dim_(dim),
      weights_(std::move(weights)),
      bias_(std::move(bias)),
      class_map_(std::move(class_map)),
      train_meta_(train_meta) {
  if (classes_ < 1 || dim_ < 1)
    throw ValidationError("probe: classes and dim must be positive");
  if (class_map_.size() != classes_)
    throw ValidationError("probe: class map does not cover all classes");
  if (weights_.size() != static_cast<std::size_t>(classes_) * dim_ ||
      bias_.size() != static_cast<std::size_t>(classes_))
    throw ValidationError("probe: parameter shapes do not match C, D");
  for (float v : weights_)
    if (!std::isfinite(v)) throw DataError("probe: non-finite weight");
  for (float v : bias_)
    if (!std::isfinite(v)) throw DataError("probe: non-finite bias");
}

double probe_objective(std::span<const double> weights,
                       std::span<const double> bias, const EmbeddingSet& train,
                       double l2, std::span<double> grad_weights,
                       std::span<double> grad_bias) {
  const int d = train.dim();
  const int c_count = train.taxonomy().size();
  const auto& utts = train.utterances();
  const std::size_t n = utts.size();
  if (weights.size() != static_cast<std::size_t>(c_count) * d ||
      bias.size() != static_cast<std::size_t>(c_count))
    throw ValidationError("probe objective: parameter shapes do not match");

  std::fill(grad_weights.begin(), grad_weights.end(), 0.0);
  std::fill(grad_bias.begin(), grad_bias.end(), 0.0);
  std::vector<double> logits(c_count);
  double loss = 0.0;
  for (const auto& u : utts) {
    auto x = train.row(u.frame_begin);
    for (int c = 0; c < c_count; ++c) {
      double dot = bias[c];
      const double* w = weights.data() + static_cast<std::size_t>(c) * d;
      for (int j = 0; j < d; ++j) dot += w[j] * static_cast<double>(x[j]);
      logits[c] = dot;
    }
    softmax_row(logits);
    loss -= std::log(std::max(logits[u.label], 1e-300));
    for (int c = 0; c < c_count; ++c) {
      const double delta = logits[c] - (c == u.label ? 1.0 : 0.0);
      grad_bias[c] += delta;
      double* g = grad_weights.data() + static_cast<std::size_t>(c) * d;
      for (int j = 0; j < d; ++j) g[j] += delta * static_cast<double>(x[j]);
    }
  }
  const double inv = 1.0 / static_cast<double>(n);
  loss *= inv;
  for (double& g : grad_bias) g *= inv;
  double penalty = 0.0;
  for (std::size_t i = 0; i < grad_weights.size(); ++i) {
    grad_weights[i] = grad_weights[i] * inv + 2.0 * l2 * weights[i];
    penalty += weights[i] * weights[i];
  }
  return loss + l2 * penalty;
}

LinearProbe probe_train(const EmbeddingSet& train, const ProbeConfig& cfg,
                        ProbeTrainInfo* info) {
  check_train_set(train);
  const int d = train.dim();
  const int c_count = train.taxonomy().size();
  const std::size_t p = static_cast<std::size_t>(c_count) * d;

  Rng rng(derive_seed(cfg.seed, "probe/init"));
  std::vector<double> w(p), b(c_count, 0.0);
  for (double& v : w) v = cfg.init_scale * rng.gaussian();

  std::vector<double> gw(p), gb(c_count);
  std::vector<double> cw(p), cb(c_count);
  std::vector<double> dummy_w(p), dummy_b(c_count);

  double loss = probe_objective(w, b, train, cfg.l2, gw, gb);
  ProbeTrainInfo local;
  ProbeTrainInfo& out = info ? *info : local;
  out.loss_per_epoch.clear();
  out.loss_per_epoch.push_back(loss);

  double lr = cfg.learning_rate;
  int epoch = 0;
  for (; epoch < cfg.epochs; ++epoch) {
    bool stepped = false;
    double cand_loss = 0.0;
    while (lr >= 1e-15) {
      for (std::size_t i = 0; i < p; ++i) cw[i] = w[i] - lr * gw[i];
      for (int c = 0; c < c_count; ++c) cb[c] = b[c] - lr * gb[c];
      cand_loss = probe_objective(cw, cb, train, cfg.l2, dummy_w, dummy_b);
      if (cand_loss <= loss) {
        stepped = true;
        break;
      }
      lr *= 0.5;
    }
    if (!stepped) break;  // no descent step representable
    w.swap(cw);
    b.swap(cb);
    gw.swap(dummy_w);
    gb.swap(dummy_b);
    const double improvement = loss - cand_loss;
    loss = cand_loss;
    out.loss_per_epoch.push_back(loss);
    if (improvement <= cfg.tol * std::max(std::abs(loss), 1e-12)) {
      ++epoch;
      break;
    }
  }
  out.final_loss = loss;
  out.epochs_run = epoch;

  std::vector<float> wf(p), bf(c_count);
  for (std::size_t i = 0; i < p; ++i) wf[i] = static_cast<float>(w[i]);
  for (int c = 0; c < c_count; ++c) bf[c] = static_cast<float>(b[c]);
  return LinearProbe(c_count, d, std::move(wf), std::move(bf),
                     train.taxonomy(), cfg);
}

ProbePrediction probe_predict(const LinearProbe& probe,
                              const EmbeddingSet& set) {
  if (set.dim() != probe.dim())
    throw ValidationError("probe: embedding dim " + std::to_string(set.dim()) +
                          " does not match probe dim " +
                          std::to_string(probe.dim()));
  const int d = probe.dim();
  const int c_count = probe.classes();
  const std::size_t n = set.rows();
  ProbePrediction pred;
  pred.hard.resize(n);
  pred.soft.resize(n * static_cast<std::size_t>(c_count));
  std::vector<double> logits(c_count);
  for (std::size_t r = 0; r < n; ++r) {
    auto x = set.row(r);
    for (int c = 0; c < c_count; ++c) {
      double dot = static_cast<double>(probe.bias()[c]);
      const float* w = probe.weights().data() + static_cast<std::size_t>(c) * d;
      for (int j = 0; j < d; ++j)
        dot += static_cast<double>(w[j]) * static_cast<double>(x[j]);
      logits[c] = dot;
    }
    softmax_row(logits);
    int best = 0;
    for (int c = 1; c < c_count; ++c) {
      if (logits[c] > logits[best]) best = c;
    }
    pred.hard[r] = best;
    std::copy(logits.begin(), logits.end(),
              pred.soft.begin() + r * c_count);
  }
  return pred;
}

void save_probe(const LinearProbe& probe, const std::filesystem::path& path) {
  detail::BinWriter w(path);
  w.magic("PRBE");
  w.u16(kProbeVersion);
  w.u32(static_cast<std::uint32_t>(probe.classes()));
  w.u32(static_cast<std::uint32_t>(probe.dim()));
  w.bytes(probe.weights().data(), probe.weights().size() * sizeof(float));
  w.bytes(probe.bias().data(), probe.bias().size() * sizeof(float));
  w.close();
}

LinearProbe load_probe(const std::filesystem::path& path) {
  detail::BinReader r(path);
  r.expect_magic("PRBE");
  const std::uint16_t version = r.u16();
  if (version != kProbeVersion)
    throw DataError("probe file '" + path.string() + "': unsupported version " +
                    std::to_string(version));
  const std::uint32_t c_count = r.u32();
  const std::uint32_t d = r.u32();
  if (c_count == 0 || d == 0)
    throw DataError("probe file '" + path.string() + "': zero C or D in header");
  std::vector<float> weights(static_cast<std::size_t>(c_count) * d);
  std::vector<float> bias(c_count);
  r.bytes(weights.data(), weights.size() * sizeof(float));
  r.bytes(bias.data(), bias.size() * sizeof(float));
  r.expect_exhausted();
  return LinearProbe(static_cast<int>(c_count), static_cast<int>(d),
                     std::move(weights), std::move(bias),
                     Taxonomy::canonical(static_cast<int>(c_count)));
}

}  // namespace emoq
