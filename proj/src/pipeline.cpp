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

#include "emoq/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <exception>
#include <fstream>
#include <functional>
#include <optional>
#include <thread>

#include <json.hpp>

#include "emoq/io.hpp"
#include "emoq/synth.hpp"

namespace emoq {

namespace {

std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx",
                static_cast<unsigned long long>(v));
  return buf;
}

std::uint64_t mix(std::uint64_t h, const void* data, std::size_t size) {
  return fnv1a64(data, size, h);
}

template <typename T>
std::uint64_t mix_value(std::uint64_t h, const T& v) {
  return fnv1a64(&v, sizeof(v), h);
}

std::uint64_t set_fingerprint(const EmbeddingSet& set) {
  std::uint64_t h = fnv1a64(set.data().data(), set.data().size() * sizeof(float));
  const int d = set.dim();
  h = mix_value(h, d);
  for (const auto& u : set.utterances()) {
    h = mix(h, u.uid.data(), u.uid.size());
    h = mix_value(h, u.label);
    h = mix_value(h, u.frame_begin);
    h = mix_value(h, u.frame_end);
  }
  return h;
}

// Atomic-enough cache write: dump to a tmp name, then rename into place so
// concurrent sweep workers never observe partial files.
template <typename WriteFn>
void write_via_tmp(const std::filesystem::path& path, WriteFn&& write_fn) {
  auto tmp = path;
  tmp += ".tmp" + hex64(std::hash<std::thread::id>{}(std::this_thread::get_id()));
  write_fn(tmp);
  std::filesystem::rename(tmp, path);
}

// Per-utterance evaluation of one stack at one depth: cosine against the
// pooled continuous reference plus probe predictions on the pooled
// reconstruction.
struct DepthEval {
  std::vector<double> cosine;
  std::vector<int> hard;
  std::vector<double> soft;  // N x C
};

DepthEval eval_depth(const EmbeddingSet& frames,
                     const EmbeddingSet& pooled_cont, const CodeSequence& codes,
                     const RvqStack& stack, int depth,
                     const LinearProbe& probe) {
  const EmbeddingSet recon = reconstruct(codes, stack, depth, frames);
  const EmbeddingSet pooled = pool_utterance(recon);
  CosineResult cos = cosine_fidelity(pooled_cont, pooled);
  ProbePrediction pred = probe_predict(probe, pooled);
  return DepthEval{std::move(cos.per_row), std::move(pred.hard),
                   std::move(pred.soft)};
}

std::vector<int> hard_labels(const EmbeddingSet& set) {
  std::vector<int> out;
  out.reserve(set.utterances().size());
  for (const auto& u : set.utterances()) out.push_back(u.label);
  return out;
}

double mean_of(const std::vector<double>& v) {
  double acc = 0.0;
  for (double x : v) acc += x;
  return v.empty() ? 0.0 : acc / static_cast<double>(v.size());
}

void echo_config(EvalReport& rep, const PipelineConfig& cfg) {
  rep.set_meta("stages", std::to_string(cfg.stages));
  rep.set_meta("entries", std::to_string(cfg.entries));
  rep.set_meta("budget", std::to_string(cfg.budget));
  rep.set_meta("seed", std::to_string(cfg.seed));
  rep.set_meta("frame_rate_hz", std::to_string(cfg.frame_rate_hz));
}

TrainingRegime make_regime(const PipelineConfig& cfg, RegimeKind kind,
                           int target, int bias, std::string_view seed_label) {
  TrainingRegime regime;
  regime.kind = kind;
  regime.target = target;
  regime.bias_percent = bias;
  regime.total_budget = cfg.budget;
  regime.seed = derive_seed(cfg.seed, seed_label);
  return regime;
}

// Stack per class for the A+(100-A) family; A = 100 is the specific regime
// and shares its seed label so the two spellings train identical stacks.
std::vector<RvqStack> per_class_stacks(const EmbeddingSet& data,
                                       const PipelineConfig& cfg, int bias) {
  const Taxonomy& tax = data.taxonomy();
  std::vector<RvqStack> stacks;
  stacks.reserve(tax.size());
  for (int c = 0; c < tax.size(); ++c) {
    TrainingRegime regime =
        bias == 100
            ? make_regime(cfg, RegimeKind::kSpecific, c, -1,
                          "train/specific/" + tax.name(c))
            : make_regime(cfg, RegimeKind::kBiased, c, bias,
                          "train/biased/" + std::to_string(bias) + "/" +
                              tax.name(c));
    stacks.push_back(train_stack_cached(data, regime, cfg.stages, cfg.entries,
                                        cfg.kmeans, cfg.cache_dir));
  }
  return stacks;
}

}  // namespace

RvqStack train_stack_cached(const EmbeddingSet& data,
                            const TrainingRegime& regime, int stages,
                            int entries, const KMeansConfig& kmeans,
                            const std::filesystem::path& cache_dir) {
  if (cache_dir.empty())
    return train_rvq(data, regime, stages, entries, kmeans);
  std::uint64_t h = set_fingerprint(data);
  h = mix_value(h, regime.kind);
  h = mix_value(h, regime.target);
  h = mix_value(h, regime.bias_percent);
  h = mix_value(h, regime.total_budget);
  h = mix_value(h, regime.seed);
  h = mix_value(h, stages);
  h = mix_value(h, entries);
  h = mix_value(h, kmeans.max_iters);
  h = mix_value(h, kmeans.tol);
  const auto path = cache_dir / ("stack_" + hex64(h) + ".rvqc");
  if (std::filesystem::exists(path)) return read_codebook(path);
  RvqStack stack = train_rvq(data, regime, stages, entries, kmeans);
  std::filesystem::create_directories(cache_dir);
  write_via_tmp(path, [&](const std::filesystem::path& tmp) {
    write_codebook(stack, tmp);
  });
  return stack;
}

LinearProbe train_probe_cached(const EmbeddingSet& pooled,
                               const ProbeConfig& cfg,
                               const std::filesystem::path& cache_dir) {
  if (cache_dir.empty()) return probe_train(pooled, cfg);
  std::uint64_t h = set_fingerprint(pooled);
  h = mix_value(h, cfg.epochs);
  h = mix_value(h, cfg.learning_rate);
  h = mix_value(h, cfg.l2);
  h = mix_value(h, cfg.seed);
  h = mix_value(h, cfg.init_scale);
  h = mix_value(h, cfg.tol);
  const auto path = cache_dir / ("probe_" + hex64(h) + ".prbe");
  if (std::filesystem::exists(path)) return load_probe(path);
  LinearProbe probe = probe_train(pooled, cfg);
  std::filesystem::create_directories(cache_dir);
  write_via_tmp(path, [&](const std::filesystem::path& tmp) {
    save_probe(probe, tmp);
  });
  return probe;
}

EvalReport evaluate_stack(const EmbeddingSet& data, const RvqStack& stack,
                          const LinearProbe& probe, double frame_rate_hz) {
  const EmbeddingSet pooled_cont = pool_utterance(data);
  const CodeSequence codes = encode(data, stack);
  const std::vector<int> truth = hard_labels(pooled_cont);
  const Taxonomy& tax = data.taxonomy();

  EvalReport rep;
  for (int depth = 1; depth <= stack.depth(); ++depth) {
    const DepthEval de =
        eval_depth(data, pooled_cont, codes, stack, depth, probe);
    // Cosine per emotion and overall.
    std::vector<double> class_sum(tax.size(), 0.0);
    std::vector<std::size_t> class_n(tax.size(), 0);
    for (std::size_t i = 0; i < truth.size(); ++i) {
      class_sum[truth[i]] += de.cosine[i];
      ++class_n[truth[i]];
    }
    for (int c = 0; c < tax.size(); ++c) {
      if (class_n[c] == 0) continue;
      rep.add(depth, tax.name(c), "cosine",
              class_sum[c] / static_cast<double>(class_n[c]));
    }
    rep.add(depth, "ALL", "cosine", mean_of(de.cosine));

    const RecallResult recall = primary_recall(de.hard, truth, tax.size());
    for (int c = 0; c < tax.size(); ++c) {
      if (recall.defined[c]) rep.add(depth, tax.name(c), "recall",
                                     recall.per_class[c]);
    }
    rep.add(depth, "ALL", "recall", recall.macro);
    rep.add(depth, "ALL", "bitrate_bps",
            nominal_bitrate(depth, stack.entries(), frame_rate_hz));
  }
  for (int l = 1; l <= stack.depth(); ++l) {
    rep.add(l, "ALL", "entropy", codebook_entropy(codes, l - 1));
  }
  return rep;
}

EvalReport run_rq1(const EmbeddingSet& data, const PipelineConfig& cfg) {
  const EmbeddingSet pooled_cont = pool_utterance(data);
  ProbeConfig probe_cfg = cfg.probe;
  probe_cfg.seed = derive_seed(cfg.seed, "probe");
  const LinearProbe probe =
      train_probe_cached(pooled_cont, probe_cfg, cfg.cache_dir);
  const TrainingRegime regime =
      make_regime(cfg, RegimeKind::kBalanced, -1, -1, "train/balanced");
  const RvqStack stack = train_stack_cached(data, regime, cfg.stages,
                                            cfg.entries, cfg.kmeans,
                                            cfg.cache_dir);
  EvalReport rep = evaluate_stack(data, stack, probe, cfg.frame_rate_hz);
  echo_config(rep, cfg);
  rep.set_meta("rq", "rq1");
  rep.set_meta("regime", "balanced");
  return rep;
}

EvalReport run_rq2(const EmbeddingSet& data, const PipelineConfig& cfg) {
  const EmbeddingSet pooled_cont = pool_utterance(data);
  ProbeConfig probe_cfg = cfg.probe;
  probe_cfg.seed = derive_seed(cfg.seed, "probe");
  const LinearProbe probe =
      train_probe_cached(pooled_cont, probe_cfg, cfg.cache_dir);
  const Taxonomy& tax = data.taxonomy();
  const int c_count = tax.size();

  const RvqStack balanced = train_stack_cached(
      data, make_regime(cfg, RegimeKind::kBalanced, -1, -1, "train/balanced"),
      cfg.stages, cfg.entries, cfg.kmeans, cfg.cache_dir);
  const std::vector<RvqStack> specific = per_class_stacks(data, cfg, 100);

  const auto by_label = data.indices_by_label();
  std::vector<EmbeddingSet> frames_by_class, pooled_by_class;
  frames_by_class.reserve(c_count);
  pooled_by_class.reserve(c_count);
  for (int c = 0; c < c_count; ++c) {
    frames_by_class.push_back(data.subset(by_label[c]));
    pooled_by_class.push_back(pooled_cont.subset(by_label[c]));
  }

  EvalReport rep;
  echo_config(rep, cfg);
  rep.set_meta("rq", "rq2");

  for (int c = 0; c < c_count; ++c) {
    if (by_label[c].empty()) continue;
    const EmbeddingSet& frames_c = frames_by_class[c];
    const EmbeddingSet& pooled_c = pooled_by_class[c];
    const std::size_t n_c = pooled_c.utterances().size();

    // Balanced baseline on this class.
    const CodeSequence bal_codes = encode(frames_c, balanced);
    // Every specific stack on this class (matched when owner == c).
    std::vector<CodeSequence> spec_codes;
    spec_codes.reserve(c_count);
    for (int e = 0; e < c_count; ++e)
      spec_codes.push_back(encode(frames_c, specific[e]));

    for (int depth = 1; depth <= cfg.stages; ++depth) {
      const DepthEval bal =
          eval_depth(frames_c, pooled_c, bal_codes, balanced, depth, probe);
      double bal_recall = 0.0;
      for (int h : bal.hard) bal_recall += h == c ? 1.0 : 0.0;
      bal_recall /= static_cast<double>(n_c);
      rep.add(depth, tax.name(c), "cosine.balanced", mean_of(bal.cosine));
      rep.add(depth, tax.name(c), "recall.balanced", bal_recall);

      double unmatched_cos = 0.0, unmatched_rec = 0.0;
      for (int e = 0; e < c_count; ++e) {
        const DepthEval de = eval_depth(frames_c, pooled_c, spec_codes[e],
                                        specific[e], depth, probe);
        const double cos_mean = mean_of(de.cosine);
        double rec = 0.0;
        for (int h : de.hard) rec += h == c ? 1.0 : 0.0;
        rec /= static_cast<double>(n_c);
        rep.add(depth, tax.name(c), "cosine.stack_" + tax.name(e), cos_mean);
        rep.add(depth, tax.name(c), "recall.stack_" + tax.name(e), rec);
        if (e == c) {
          rep.add(depth, tax.name(c), "cosine.matched", cos_mean);
          rep.add(depth, tax.name(c), "recall.matched", rec);
        } else {
          unmatched_cos += cos_mean;
          unmatched_rec += rec;
        }
      }
      if (c_count > 1) {
        rep.add(depth, tax.name(c), "cosine.unmatched",
                unmatched_cos / (c_count - 1));
        rep.add(depth, tax.name(c), "recall.unmatched",
                unmatched_rec / (c_count - 1));
      }
    }
    // Utilization of the matched stack on its own emotion.
    const CodeSequence& matched_codes = spec_codes[c];
    for (int l = 1; l <= cfg.stages; ++l) {
      rep.add(l, tax.name(c), "entropy.matched",
              codebook_entropy(matched_codes, l - 1));
    }
  }
  const CodeSequence bal_all = encode(data, balanced);
  for (int l = 1; l <= cfg.stages; ++l) {
    rep.add(l, "ALL", "entropy.balanced", codebook_entropy(bal_all, l - 1));
  }
  return rep;
}

std::vector<std::pair<std::string, EvalReport>> run_rq3(
    const EmbeddingSet& data, const PipelineConfig& cfg,
    const std::vector<int>& regimes) {
  std::string missing;
  for (const auto& u : data.utterances()) {
    if (!u.soft) {
      if (!missing.empty()) missing += ", ";
      missing += u.uid;
    }
  }
  if (!missing.empty())
    throw ValidationError("rq3: utterances missing soft labels: " + missing);
  if (regimes.empty()) throw ValidationError("rq3: no regimes requested");

  const EmbeddingSet pooled_cont = pool_utterance(data);
  ProbeConfig probe_cfg = cfg.probe;
  probe_cfg.seed = derive_seed(cfg.seed, "probe");
  const LinearProbe probe =
      train_probe_cached(pooled_cont, probe_cfg, cfg.cache_dir);
  const Taxonomy& tax = data.taxonomy();
  const int c_count = tax.size();
  const std::size_t n = pooled_cont.utterances().size();

  std::vector<std::size_t> low_idx, high_idx;
  for (std::size_t i = 0; i < n; ++i) {
    if (stratum_of(*pooled_cont.utterances()[i].soft) == Stratum::kLow) {
      low_idx.push_back(i);
    } else {
      high_idx.push_back(i);
    }
  }

  const auto by_label = data.indices_by_label();
  std::vector<EmbeddingSet> frames_by_class;
  frames_by_class.reserve(c_count);
  for (int c = 0; c < c_count; ++c)
    frames_by_class.push_back(data.subset(by_label[c]));

  std::vector<std::pair<std::string, EvalReport>> out;
  for (int regime : regimes) {
    if (regime != -1 && (regime < 50 || regime > 100))
      throw ValidationError("rq3: regime must be -1 (balanced) or in [50, 100]");
    const std::string name =
        regime < 0 ? "balanced"
                   : std::to_string(regime) + "+" + std::to_string(100 - regime);

    // One stack per class (matched routing by the true hard label), or a
    // single shared stack for the balanced condition.
    std::vector<const RvqStack*> stack_of_class(c_count, nullptr);
    std::optional<RvqStack> balanced_stack;
    std::vector<RvqStack> class_stacks;
    if (regime < 0) {
      balanced_stack = train_stack_cached(
          data,
          make_regime(cfg, RegimeKind::kBalanced, -1, -1, "train/balanced"),
          cfg.stages, cfg.entries, cfg.kmeans, cfg.cache_dir);
    } else {
      class_stacks = per_class_stacks(data, cfg, regime);
    }
    for (int c = 0; c < c_count; ++c)
      stack_of_class[c] = regime < 0 ? &*balanced_stack : &class_stacks[c];

    // Encode each class subset with its stack once; reconstruct per depth and
    // scatter pooled rows back into manifest order.
    std::vector<CodeSequence> codes_by_class;
    codes_by_class.reserve(c_count);
    for (int c = 0; c < c_count; ++c)
      codes_by_class.push_back(encode(frames_by_class[c], *stack_of_class[c]));

    EvalReport rep;
    echo_config(rep, cfg);
    rep.set_meta("rq", "rq3");
    rep.set_meta("regime", name);
    rep.set_meta("n_low", std::to_string(low_idx.size()));
    rep.set_meta("n_high", std::to_string(high_idx.size()));

    for (int depth = 1; depth <= cfg.stages; ++depth) {
      std::vector<float> recon_rows(n * static_cast<std::size_t>(data.dim()));
      for (int c = 0; c < c_count; ++c) {
        if (by_label[c].empty()) continue;
        const EmbeddingSet recon = reconstruct(
            codes_by_class[c], *stack_of_class[c], depth, frames_by_class[c]);
        const EmbeddingSet pooled = pool_utterance(recon);
        // subset() kept manifest order, so row i is utterance by_label[c][i].
        for (std::size_t i = 0; i < by_label[c].size(); ++i) {
          auto row = pooled.row(i);
          std::copy(row.begin(), row.end(),
                    recon_rows.begin() + by_label[c][i] * data.dim());
        }
      }
      const EmbeddingSet pooled_recon(data.dim(), std::move(recon_rows),
                                      pooled_cont.utterances(), tax,
                                      Level::kUtterance);
      const ProbePrediction pred = probe_predict(probe, pooled_recon);

      std::vector<double> jsd(n);
      std::vector<double> top2(n);
      for (std::size_t i = 0; i < n; ++i) {
        const auto& soft_true = pooled_cont.utterances()[i].soft->probs();
        std::span<const double> soft_pred(pred.soft.data() + i * c_count,
                                          static_cast<std::size_t>(c_count));
        jsd[i] = js_divergence(soft_pred, std::span<const double>(soft_true));
        const auto a = top2_set(soft_pred);
        const auto b = top2_set(std::span<const double>(soft_true));
        const bool match = (a[0] == b[0] && a[1] == b[1]) ||
                           (a[0] == b[1] && a[1] == b[0]);
        top2[i] = match ? 1.0 : 0.0;
      }
      auto stratum_mean = [&](const std::vector<double>& v,
                              const std::vector<std::size_t>& idx) {
        double acc = 0.0;
        for (std::size_t i : idx) acc += v[i];
        return idx.empty() ? 0.0 : acc / static_cast<double>(idx.size());
      };
      rep.add(depth, "ALL", "jsd", mean_of(jsd));
      rep.add(depth, "ALL", "top2", mean_of(top2));
      if (!low_idx.empty()) {
        rep.add(depth, "ALL", "jsd_low", stratum_mean(jsd, low_idx));
        rep.add(depth, "ALL", "top2_low", stratum_mean(top2, low_idx));
      }
      if (!high_idx.empty()) {
        rep.add(depth, "ALL", "jsd_high", stratum_mean(jsd, high_idx));
        rep.add(depth, "ALL", "top2_high", stratum_mean(top2, high_idx));
      }
    }
    out.emplace_back(name, std::move(rep));
  }
  return out;
}

std::vector<SweepPair> default_sweep_pairs() {
  return {{8, 32}, {8, 64}, {8, 128}, {32, 2}, {32, 4}, {64, 2}, {128, 2}};
}

std::string Rq4Table::table_csv() const {
  std::string out = "Config";
  for (const auto& c : configs) out += "," + c;
  out += "\n";
  auto emit_row = [&](const char* label, const std::vector<double>& deltas) {
    out += label;
    for (double d : deltas) {
      char buf[32];
      std::snprintf(buf, sizeof(buf), ",%+.4f", d);
      out += buf;
    }
    out += "\n";
  };
  emit_row("Bal", bal_delta);
  emit_row("Emo-Q(100)", emoq100_delta);
  emit_row("Emo-Q(99)", emoq99_delta);
  return out;
}

Rq4Table run_rq4(const EmbeddingSet& data, const PipelineConfig& cfg,
                 const std::vector<SweepPair>& pairs) {
  if (pairs.empty()) throw ValidationError("rq4: sweep pairs must be non-empty");
  const EmbeddingSet pooled_cont = pool_utterance(data);
  ProbeConfig probe_cfg = cfg.probe;
  probe_cfg.seed = derive_seed(cfg.seed, "probe");
  const LinearProbe probe =
      train_probe_cached(pooled_cont, probe_cfg, cfg.cache_dir);
  const std::vector<int> truth = hard_labels(pooled_cont);
  const Taxonomy& tax = data.taxonomy();

  Rq4Table table;
  echo_config(table.detail, cfg);
  table.detail.set_meta("rq", "rq4");

  const ProbePrediction base_pred = probe_predict(probe, pooled_cont);
  table.baseline_f1 = macro_f1(base_pred.hard, truth, tax.size()).macro;
  table.detail.add(0, "ALL", "baseline_f1", table.baseline_f1);
  table.detail.add(0, "ALL", "baseline_delta", 0.0);

  for (const SweepPair& pair : pairs) {
    PipelineConfig sub = cfg;
    sub.stages = pair.stages;
    sub.entries = pair.entries;
    const std::string config_name =
        std::to_string(pair.stages) + "x" + std::to_string(pair.entries);
    table.configs.push_back(config_name);

    // Bal: probe on balanced-quantized features at the best depth.
    const RvqStack balanced = train_stack_cached(
        data, make_regime(sub, RegimeKind::kBalanced, -1, -1, "train/balanced"),
        sub.stages, sub.entries, sub.kmeans, sub.cache_dir);
    const CodeSequence codes = encode(data, balanced);
    double best_f1 = 0.0;
    int best_depth = 1;
    for (int depth = 1; depth <= sub.stages; ++depth) {
      const DepthEval de =
          eval_depth(data, pooled_cont, codes, balanced, depth, probe);
      const double f1 = macro_f1(de.hard, truth, tax.size()).macro;
      if (depth == 1 || f1 > best_f1) {
        best_f1 = f1;
        best_depth = depth;
      }
    }
    table.bal_delta.push_back(best_f1 - table.baseline_f1);
    table.detail.add(best_depth, "ALL", config_name + ".bal.f1", best_f1);
    table.detail.add(best_depth, "ALL", config_name + ".bal.delta",
                     best_f1 - table.baseline_f1);

    // Emo-Q over the specialized banks. Routing runs at depth 1: the
    // reconstruction gap between matched and unmatched codebooks is largest
    // under the strongest compression and washes out as depth grows.
    for (int bias : {100, 99}) {
      const RouterBank bank =
          RouterBank::build(per_class_stacks(data, sub, bias), 1, true, tax);
      const RouteBatchResult routed =
          route_batch(data, bank, table.baseline_f1);
      const double f1 = macro_f1(routed.labels, truth, tax.size()).macro;
      auto& column = bias == 100 ? table.emoq100_delta : table.emoq99_delta;
      column.push_back(f1 - table.baseline_f1);
      const std::string cond = bias == 100 ? "emoq100" : "emoq99";
      table.detail.add(1, "ALL", config_name + "." + cond + ".f1", f1);
      table.detail.add(1, "ALL", config_name + "." + cond + ".delta",
                       f1 - table.baseline_f1);
    }
  }
  return table;
}

namespace {

// Matched-only evaluation of per-class stacks (sweep's specific/biased cells).
EvalReport eval_matched_regime(const EmbeddingSet& data,
                               const PipelineConfig& cfg, int bias) {
  const EmbeddingSet pooled_cont = pool_utterance(data);
  ProbeConfig probe_cfg = cfg.probe;
  probe_cfg.seed = derive_seed(cfg.seed, "probe");
  const LinearProbe probe =
      train_probe_cached(pooled_cont, probe_cfg, cfg.cache_dir);
  const Taxonomy& tax = data.taxonomy();
  const std::vector<RvqStack> stacks = per_class_stacks(data, cfg, bias);
  const auto by_label = data.indices_by_label();

  EvalReport rep;
  echo_config(rep, cfg);
  rep.set_meta("regime", bias == 100 ? std::string("specific")
                                     : "biased:" + std::to_string(bias));
  for (int c = 0; c < tax.size(); ++c) {
    if (by_label[c].empty()) continue;
    const EmbeddingSet frames_c = data.subset(by_label[c]);
    const EmbeddingSet pooled_c = pooled_cont.subset(by_label[c]);
    const CodeSequence codes = encode(frames_c, stacks[c]);
    for (int depth = 1; depth <= cfg.stages; ++depth) {
      const DepthEval de =
          eval_depth(frames_c, pooled_c, codes, stacks[c], depth, probe);
      double rec = 0.0;
      for (int h : de.hard) rec += h == c ? 1.0 : 0.0;
      rec /= static_cast<double>(pooled_c.utterances().size());
      rep.add(depth, tax.name(c), "cosine.matched", mean_of(de.cosine));
      rep.add(depth, tax.name(c), "recall.matched", rec);
    }
    for (int l = 1; l <= cfg.stages; ++l)
      rep.add(l, tax.name(c), "entropy.matched", codebook_entropy(codes, l - 1));
  }
  for (int depth = 1; depth <= cfg.stages; ++depth)
    rep.add(depth, "ALL", "bitrate_bps",
            nominal_bitrate(depth, cfg.entries, cfg.frame_rate_hz));
  return rep;
}

struct SweepCell {
  SweepPair pair;
  std::string regime;
  std::string file_stem;
  EvalReport report;
};

void run_tasks(std::vector<std::function<void()>>& tasks, int jobs) {
  if (jobs <= 1) {
    for (auto& t : tasks) t();
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::exception_ptr> errors(tasks.size());
  auto worker = [&] {
    while (true) {
      const std::size_t i = next.fetch_add(1);
      if (i >= tasks.size()) break;
      try {
        tasks[i]();
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  const int n = std::min<int>(jobs, static_cast<int>(tasks.size()));
  std::vector<std::thread> pool;
  pool.reserve(n);
  for (int i = 0; i < n; ++i) pool.emplace_back(worker);
  for (auto& t : pool) t.join();
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

}  // namespace

void run_sweep(const EmbeddingSet& data, const SweepConfig& cfg,
               const std::filesystem::path& out_dir) {
  if (cfg.pairs.empty()) throw ValidationError("sweep: no (L, K) pairs");
  if (cfg.regimes.empty()) throw ValidationError("sweep: no regimes");
  std::filesystem::create_directories(out_dir);
  const auto cache_dir = out_dir / "cache";

  std::vector<SweepCell> cells;
  for (const SweepPair& pair : cfg.pairs) {
    for (const std::string& regime : cfg.regimes) {
      SweepCell cell;
      cell.pair = pair;
      cell.regime = regime;
      std::string tag = regime;
      std::replace(tag.begin(), tag.end(), ':', '_');
      cell.file_stem = "sweep_L" + std::to_string(pair.stages) + "_K" +
                       std::to_string(pair.entries) + "_" + tag;
      cells.push_back(std::move(cell));
    }
  }

  std::vector<std::function<void()>> tasks;
  tasks.reserve(cells.size());
  for (SweepCell& cell : cells) {
    tasks.push_back([&cell, &data, &cfg, &cache_dir, &out_dir] {
      PipelineConfig sub;
      sub.stages = cell.pair.stages;
      sub.entries = cell.pair.entries;
      sub.budget = cfg.budget;
      sub.seed = cfg.seed;
      sub.frame_rate_hz = cfg.frame_rate_hz;
      sub.cache_dir = cache_dir;
      if (cell.regime == "balanced") {
        cell.report = run_rq1(data, sub);
      } else if (cell.regime == "specific") {
        cell.report = eval_matched_regime(data, sub, 100);
      } else if (cell.regime.rfind("biased:", 0) == 0) {
        const int bias = std::stoi(cell.regime.substr(7));
        cell.report = eval_matched_regime(data, sub, bias);
      } else {
        throw ValidationError("sweep: unknown regime '" + cell.regime + "'");
      }
      cell.report.set_meta("sweep_config", std::to_string(cell.pair.stages) +
                                               "x" +
                                               std::to_string(cell.pair.entries));
      cell.report.write_csv(out_dir / (cell.file_stem + ".csv"));
      cell.report.write_json(out_dir / (cell.file_stem + ".json"));
    });
  }
  run_tasks(tasks, std::max(cfg.jobs, 1));

  // Deterministic summary in cell order.
  EvalReport summary;
  summary.set_meta("seed", std::to_string(cfg.seed));
  summary.set_meta("budget", std::to_string(cfg.budget));
  for (const SweepCell& cell : cells) {
    const std::string prefix = std::to_string(cell.pair.stages) + "x" +
                               std::to_string(cell.pair.entries) + "/" +
                               cell.regime + "/";
    for (const auto& row : cell.report.rows()) {
      summary.add(row.layer, row.emotion, prefix + row.metric, row.value);
    }
  }
  summary.write_csv(out_dir / "summary.csv");
  summary.write_json(out_dir / "summary.json");
}

}  // namespace emoq
