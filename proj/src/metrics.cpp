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

#include "emoq/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <ostream>

#include <json.hpp>

namespace emoq {

CosineResult cosine_fidelity(const EmbeddingSet& orig,
                             const EmbeddingSet& recon) {
  if (orig.dim() != recon.dim() || orig.rows() != recon.rows())
    throw ValidationError("cosine: sets must share shape");
  const int d = orig.dim();
  CosineResult out;
  out.per_row.resize(orig.rows());
  double total = 0.0;
  for (std::size_t r = 0; r < orig.rows(); ++r) {
    auto a = orig.row(r);
    auto b = recon.row(r);
    double dot = 0.0, na = 0.0, nb = 0.0;
    for (int j = 0; j < d; ++j) {
      const double x = a[j], y = b[j];
      dot += x * y;
      na += x * x;
      nb += y * y;
    }
    if (na == 0.0 || nb == 0.0)
      throw DataError("cosine: zero-norm vector at row " + std::to_string(r));
    out.per_row[r] = dot / (std::sqrt(na) * std::sqrt(nb));
    total += out.per_row[r];
  }
  out.mean = orig.rows() ? total / static_cast<double>(orig.rows()) : 0.0;
  return out;
}

RecallResult primary_recall(std::span<const int> pred,
                            std::span<const int> truth, int num_classes) {
  if (pred.size() != truth.size())
    throw ValidationError("recall: pred and truth lengths differ");
  if (pred.empty()) throw ValidationError("recall: empty input");
  std::vector<std::size_t> hits(num_classes, 0), counts(num_classes, 0);
  for (std::size_t i = 0; i < truth.size(); ++i) {
    if (truth[i] < 0 || truth[i] >= num_classes || pred[i] < 0 ||
        pred[i] >= num_classes)
      throw ValidationError("recall: label outside taxonomy at item " +
                            std::to_string(i));
    ++counts[truth[i]];
    if (pred[i] == truth[i]) ++hits[truth[i]];
  }
  RecallResult out;
  out.per_class.resize(num_classes, 0.0);
  out.defined.resize(num_classes, false);
  double sum = 0.0;
  int defined_count = 0;
  for (int c = 0; c < num_classes; ++c) {
    if (counts[c] == 0) continue;  // absent from truth: flagged undefined
    out.defined[c] = true;
    out.per_class[c] =
        static_cast<double>(hits[c]) / static_cast<double>(counts[c]);
    sum += out.per_class[c];
    ++defined_count;
  }
  out.macro = defined_count ? sum / defined_count : 0.0;
  return out;
}

double normalized_entropy(std::span<const double> usage) {
  const std::size_t k = usage.size();
  if (k == 0) throw ValidationError("entropy: empty usage vector");
  if (k == 1) return 0.0;
  double h = 0.0;
  for (double p : usage) {
    if (p < 0.0) throw ValidationError("entropy: negative usage");
    if (p > 0.0) h -= p * std::log(p);
  }
  double value = h / std::log(static_cast<double>(k));
  // Clamp rounding spill; the quantity lives in [0, 1].
  return std::min(std::max(value, 0.0), 1.0);
}

double codebook_entropy(const CodeSequence& codes, int stage) {
  if (stage < 0 || stage >= codes.stages())
    throw ValidationError("entropy: stage out of range");
  if (codes.rows() == 0) throw ValidationError("entropy: no codes emitted");
  std::vector<double> usage(codes.entries(), 0.0);
  for (std::size_t r = 0; r < codes.rows(); ++r)
    usage[codes.at(r, stage)] += 1.0;
  for (double& u : usage) u /= static_cast<double>(codes.rows());
  return normalized_entropy(usage);
}

double js_divergence(std::span<const double> p, std::span<const double> q) {
  if (p.size() != q.size())
    throw ValidationError("jsd: distributions must share support size");
  if (p.empty()) throw ValidationError("jsd: empty distributions");
  double sp = 0.0, sq = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (p[i] < 0.0 || q[i] < 0.0)
      throw ValidationError("jsd: negative probability");
    sp += p[i];
    sq += q[i];
  }
  if (std::abs(sp - 1.0) > 1e-6 || std::abs(sq - 1.0) > 1e-6)
    throw ValidationError("jsd: inputs must be normalized within 1e-6");
  double acc = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    const double m = 0.5 * (p[i] + q[i]);
    // One commutative add per support point keeps js(p,q) == js(q,p) exact.
    const double from_p = p[i] > 0.0 ? 0.5 * p[i] * std::log2(p[i] / m) : 0.0;
    const double from_q = q[i] > 0.0 ? 0.5 * q[i] * std::log2(q[i] / m) : 0.0;
    acc += from_p + from_q;
  }
  return std::min(std::max(acc, 0.0), 1.0);
}

double js_divergence(const SoftLabel& p, const SoftLabel& q) {
  return js_divergence(std::span<const double>(p.probs()),
                       std::span<const double>(q.probs()));
}

std::array<int, 2> top2_set(std::span<const double> probs) {
  if (probs.size() < 2)
    throw ValidationError("top2: needs at least two classes");
  int first = 0;
  for (int c = 1; c < static_cast<int>(probs.size()); ++c)
    if (probs[c] > probs[first]) first = c;
  int second = -1;
  for (int c = 0; c < static_cast<int>(probs.size()); ++c) {
    if (c == first) continue;
    if (second < 0 || probs[c] > probs[second]) second = c;
  }
  return {first, second};
}

double top2_set_accuracy(std::span<const double> pred,
                         std::span<const double> truth, std::size_t n,
                         int num_classes) {
  if (num_classes < 2)
    throw ValidationError("top2: needs at least two classes");
  if (pred.size() != n * num_classes || truth.size() != n * num_classes)
    throw ValidationError("top2: flattened sizes do not match n*C");
  if (n == 0) throw ValidationError("top2: empty input");
  std::size_t hits = 0;
  for (std::size_t i = 0; i < n; ++i) {
    auto a = top2_set(pred.subspan(i * num_classes, num_classes));
    auto b = top2_set(truth.subspan(i * num_classes, num_classes));
    const bool match = (a[0] == b[0] && a[1] == b[1]) ||
                       (a[0] == b[1] && a[1] == b[0]);
    if (match) ++hits;
  }
  return static_cast<double>(hits) / static_cast<double>(n);
}

F1Result macro_f1(std::span<const int> pred, std::span<const int> truth,
                  int num_classes) {
  if (pred.size() != truth.size())
    throw ValidationError("macro_f1: pred and truth lengths differ");
  if (pred.empty()) throw ValidationError("macro_f1: empty input");
  std::vector<std::size_t> tp(num_classes, 0), pred_n(num_classes, 0),
      true_n(num_classes, 0);
  for (std::size_t i = 0; i < pred.size(); ++i) {
    if (pred[i] < 0 || pred[i] >= num_classes || truth[i] < 0 ||
        truth[i] >= num_classes)
      throw ValidationError("macro_f1: label outside taxonomy at item " +
                            std::to_string(i));
    ++pred_n[pred[i]];
    ++true_n[truth[i]];
    if (pred[i] == truth[i]) ++tp[pred[i]];
  }
  F1Result out;
  out.per_class.resize(num_classes, 0.0);
  out.flagged.resize(num_classes, false);
  double sum = 0.0;
  for (int c = 0; c < num_classes; ++c) {
    if (pred_n[c] == 0 && true_n[c] == 0) {
      out.flagged[c] = true;  // contributes 0 to the macro mean
      continue;
    }
    const double denom = static_cast<double>(pred_n[c] + true_n[c]);
    out.per_class[c] = 2.0 * static_cast<double>(tp[c]) / denom;
    sum += out.per_class[c];
  }
  out.macro = sum / static_cast<double>(num_classes);
  return out;
}

void EvalReport::add(int layer, const std::string& emotion,
                     const std::string& metric, double value) {
  if (!std::isfinite(value))
    throw DataError("report: non-finite value for metric '" + metric + "'");
  rows_.push_back(Row{layer, emotion, metric, value});
}

void EvalReport::set_meta(const std::string& key, const std::string& value) {
  meta_[key] = value;
}

void EvalReport::merge(const EvalReport& other) {
  rows_.insert(rows_.end(), other.rows_.begin(), other.rows_.end());
  for (const auto& [k, v] : other.meta_) meta_[k] = v;
}

double EvalReport::value(int layer, const std::string& emotion,
                         const std::string& metric) const {
  for (const auto& row : rows_) {
    if (row.layer == layer && row.emotion == emotion && row.metric == metric)
      return row.value;
  }
  throw ValidationError("report: no row (" + std::to_string(layer) + ", " +
                        emotion + ", " + metric + ")");
}

namespace {

std::string format_value(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.10g", v);
  return buf;
}

}  // namespace

void EvalReport::to_csv(std::ostream& os) const {
  os << "layer,emotion,metric,value\n";
  for (const auto& row : rows_) {
    os << row.layer << ',' << row.emotion << ',' << row.metric << ','
       << format_value(row.value) << '\n';
  }
}

std::string EvalReport::to_json() const {
  nlohmann::json j;
  j["meta"] = meta_;
  auto& rows = j["rows"] = nlohmann::json::array();
  for (const auto& row : rows_) {
    rows.push_back({{"layer", row.layer},
                    {"emotion", row.emotion},
                    {"metric", row.metric},
                    {"value", row.value}});
  }
  return j.dump(2);
}

void EvalReport::write_csv(const std::filesystem::path& path) const {
  std::ofstream os(path, std::ios::trunc);
  if (!os) throw DataError("cannot open '" + path.string() + "' for write");
  to_csv(os);
  os.flush();
  if (!os) throw DataError("write failed for '" + path.string() + "'");
}

void EvalReport::write_json(const std::filesystem::path& path) const {
  std::ofstream os(path, std::ios::trunc);
  if (!os) throw DataError("cannot open '" + path.string() + "' for write");
  os << to_json() << '\n';
  os.flush();
  if (!os) throw DataError("write failed for '" + path.string() + "'");
}

}  // namespace emoq
