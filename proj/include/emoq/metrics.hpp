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

#ifndef EMOQ_METRICS_HPP_
#define EMOQ_METRICS_HPP_

#include <array>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "emoq/rvq.hpp"
#include "emoq/types.hpp"

namespace emoq {

struct CosineResult {
  std::vector<double> per_row;
  double mean = 0.0;
};

// cos(z, z_hat) per aligned row, 64-bit accumulation. Zero-norm rows are a
// degenerate-input error naming the row.
CosineResult cosine_fidelity(const EmbeddingSet& orig,
                             const EmbeddingSet& recon);

struct RecallResult {
  std::vector<double> per_class;  // undefined classes hold 0
  std::vector<bool> defined;      // false when the class is absent from truth
  double macro = 0.0;             // over defined classes only
};

RecallResult primary_recall(std::span<const int> pred,
                            std::span<const int> truth, int num_classes);

// Normalized Shannon entropy of empirical code usage at one stage:
// (-sum p ln p) / ln K, with 0 ln 0 = 0; defined as 0 for K = 1.
double codebook_entropy(const CodeSequence& codes, int stage);
double normalized_entropy(std::span<const double> usage);

// Jensen-Shannon divergence, base-2 logs so the range is [0, 1]. Inputs must
// each sum to 1 within 1e-6.
double js_divergence(std::span<const double> p, std::span<const double> q);
double js_divergence(const SoftLabel& p, const SoftLabel& q);

// Indices of the two most probable classes, rank ties to the lowest id.
std::array<int, 2> top2_set(std::span<const double> probs);

// Share of items whose top-2 class sets match as unordered sets. Rows are
// N x C flattened distributions.
double top2_set_accuracy(std::span<const double> pred,
                         std::span<const double> truth, std::size_t n,
                         int num_classes);

struct F1Result {
  std::vector<double> per_class;
  // True for classes with no true and no predicted instances; their F1
  // contributes 0 to the macro average.
  std::vector<bool> flagged;
  double macro = 0.0;
};

F1Result macro_f1(std::span<const int> pred, std::span<const int> truth,
                  int num_classes);

// Flat table of (layer, emotion|ALL, metric) -> value rows plus a config
// echo, serialized as CSV and JSON.
class EvalReport {
 public:
  struct Row {
    int layer;
    std::string emotion;
    std::string metric;
    double value;
  };

  void add(int layer, const std::string& emotion, const std::string& metric,
           double value);
  void set_meta(const std::string& key, const std::string& value);
  void merge(const EvalReport& other);

  const std::vector<Row>& rows() const { return rows_; }
  const std::map<std::string, std::string>& meta() const { return meta_; }
  // First match or error; for tests and the acceptance harness.
  double value(int layer, const std::string& emotion,
               const std::string& metric) const;

  void to_csv(std::ostream& os) const;
  std::string to_json() const;
  void write_csv(const std::filesystem::path& path) const;
  void write_json(const std::filesystem::path& path) const;

 private:
  std::vector<Row> rows_;
  std::map<std::string, std::string> meta_;
};

}  // namespace emoq

#endif  // EMOQ_METRICS_HPP_
