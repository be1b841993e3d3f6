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

#ifndef EMOQ_PROBE_HPP_
#define EMOQ_PROBE_HPP_

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "emoq/types.hpp"

namespace emoq {

struct ProbeConfig {
  int epochs = 500;
  double learning_rate = 1.0;
  double l2 = 1e-4;
  std::uint64_t seed = 0;
  double init_scale = 1e-2;
  // Stop once the relative loss improvement falls below this.
  double tol = 1e-10;
};

// Softmax classifier over embeddings: logits = W x + b.
class LinearProbe {
 public:
  LinearProbe(int classes, int dim, std::vector<float> weights,
              std::vector<float> bias, Taxonomy class_map,
              ProbeConfig train_meta = {});

  int classes() const { return classes_; }
  int dim() const { return dim_; }
  const std::vector<float>& weights() const { return weights_; }  // C x D
  const std::vector<float>& bias() const { return bias_; }        // C
  const Taxonomy& class_map() const { return class_map_; }
  // Training configuration echo; defaulted for probes loaded from disk.
  const ProbeConfig& train_meta() const { return train_meta_; }

 private:
  int classes_;
  int dim_;
  std::vector<float> weights_;
  std::vector<float> bias_;
  Taxonomy class_map_;
  ProbeConfig train_meta_;
};

struct ProbeTrainInfo {
  std::vector<double> loss_per_epoch;  // non-increasing
  double final_loss = 0.0;
  int epochs_run = 0;
};

// Mean cross-entropy plus l2*||W||^2 and its gradient at (W, b); everything
// in 64-bit. Parameters and gradients are row-major C x D (W) and C (b).
double probe_objective(std::span<const double> weights,
                       std::span<const double> bias, const EmbeddingSet& train,
                       double l2, std::span<double> grad_weights,
                       std::span<double> grad_bias);

// Full-batch gradient descent, step halved whenever a step would raise the
// loss. Deterministic under cfg.seed. Training data must be utterance-level
// with every class represented.
LinearProbe probe_train(const EmbeddingSet& train, const ProbeConfig& cfg,
                        ProbeTrainInfo* info = nullptr);

struct ProbePrediction {
  std::vector<int> hard;     // argmax, ties to the lowest class id
  std::vector<double> soft;  // row-major N x C, rows sum to 1
};

ProbePrediction probe_predict(const LinearProbe& probe,
                              const EmbeddingSet& set);

// "PRBE" binary: version, C, D, float32 W then b.
void save_probe(const LinearProbe& probe, const std::filesystem::path& path);
LinearProbe load_probe(const std::filesystem::path& path);

}  // namespace emoq

#endif  // EMOQ_PROBE_HPP_
