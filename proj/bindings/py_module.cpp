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

#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <optional>

#include "emoq/io.hpp"
#include "emoq/pipeline.hpp"
#include "emoq/synth.hpp"

namespace py = pybind11;
using namespace emoq;

namespace {

py::array_t<float> matrix_view(const std::vector<float>& data,
                               std::size_t rows, int dim) {
  py::array_t<float> out({rows, static_cast<std::size_t>(dim)});
  std::copy(data.begin(), data.end(), out.mutable_data());
  return out;
}

EmbeddingSet set_from_arrays(
    py::array_t<float, py::array::c_style | py::array::forcecast> vectors,
    const std::vector<int>& labels,
    std::optional<py::array_t<double,
                              py::array::c_style | py::array::forcecast>>
        soft,
    std::optional<std::vector<std::pair<std::size_t, std::size_t>>> frames,
    int classes) {
  if (vectors.ndim() != 2)
    throw ValidationError("vectors must be a 2-D float32 array");
  const std::size_t n = vectors.shape(0);
  const int dim = static_cast<int>(vectors.shape(1));
  std::vector<float> data(vectors.data(), vectors.data() + n * dim);

  const Taxonomy tax = Taxonomy::canonical(classes);
  std::vector<Utterance> utts(labels.size());
  for (std::size_t i = 0; i < labels.size(); ++i) {
    Utterance& u = utts[i];
    u.uid = "u" + std::to_string(i);
    u.label = labels[i];
    u.corpus = "python";
    if (frames) {
      u.frame_begin = (*frames)[i].first;
      u.frame_end = (*frames)[i].second;
    } else {
      u.frame_begin = i;
      u.frame_end = i + 1;
    }
    if (soft) {
      if (soft->ndim() != 2 ||
          static_cast<std::size_t>(soft->shape(0)) != labels.size() ||
          soft->shape(1) != classes)
        throw ValidationError("soft must be (n_utterances, classes)");
      const double* row = soft->data() + i * classes;
      u.soft = SoftLabel(std::vector<double>(row, row + classes));
    }
  }
  if (frames && frames->size() != labels.size())
    throw ValidationError("frames and labels must have equal length");
  const Level level = frames ? Level::kFrame : Level::kUtterance;
  return EmbeddingSet(dim, std::move(data), std::move(utts), tax, level);
}

TrainingRegime make_regime(const std::string& kind, int target, int bias,
                           std::size_t budget, std::uint64_t seed) {
  TrainingRegime regime;
  if (kind == "balanced") {
    regime.kind = RegimeKind::kBalanced;
  } else if (kind == "specific") {
    regime.kind = RegimeKind::kSpecific;
    regime.target = target;
  } else if (kind == "biased") {
    regime.kind = RegimeKind::kBiased;
    regime.target = target;
    regime.bias_percent = bias;
  } else {
    throw ValidationError("regime must be balanced, specific, or biased");
  }
  regime.total_budget = budget;
  regime.seed = seed;
  return regime;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Emotion-aware residual vector quantization toolkit";

  py::register_exception<ValidationError>(m, "ValidationError",
                                          PyExc_ValueError);
  py::register_exception<DataError>(m, "DataError", PyExc_RuntimeError);

  py::enum_<Level>(m, "Level")
      .value("FRAME", Level::kFrame)
      .value("UTTERANCE", Level::kUtterance);

  py::class_<EmbeddingSet>(m, "EmbeddingSet")
      .def_property_readonly("dim", &EmbeddingSet::dim)
      .def_property_readonly("rows", &EmbeddingSet::rows)
      .def_property_readonly("level", &EmbeddingSet::level)
      .def_property_readonly("num_classes",
                             [](const EmbeddingSet& s) {
                               return s.taxonomy().size();
                             })
      .def("vectors",
           [](const EmbeddingSet& s) {
             return matrix_view(s.data(), s.rows(), s.dim());
           })
      .def("labels",
           [](const EmbeddingSet& s) {
             std::vector<int> out;
             for (const auto& u : s.utterances()) out.push_back(u.label);
             return out;
           })
      .def("uids",
           [](const EmbeddingSet& s) {
             std::vector<std::string> out;
             for (const auto& u : s.utterances()) out.push_back(u.uid);
             return out;
           })
      .def("frames",
           [](const EmbeddingSet& s) {
             std::vector<std::pair<std::size_t, std::size_t>> out;
             for (const auto& u : s.utterances())
               out.emplace_back(u.frame_begin, u.frame_end);
             return out;
           })
      .def("soft_labels",
           [](const EmbeddingSet& s) -> py::object {
             const int c = s.taxonomy().size();
             for (const auto& u : s.utterances()) {
               if (!u.soft) return py::none();
             }
             py::array_t<double> out(
                 {s.utterances().size(), static_cast<std::size_t>(c)});
             double* ptr = out.mutable_data();
             for (const auto& u : s.utterances()) {
               std::copy(u.soft->probs().begin(), u.soft->probs().end(), ptr);
               ptr += c;
             }
             return out;
           })
      .def("class_names", [](const EmbeddingSet& s) {
        std::vector<std::string> out;
        for (int c = 0; c < s.taxonomy().size(); ++c)
          out.push_back(s.taxonomy().name(c));
        return out;
      });

  m.def("from_arrays", &set_from_arrays, py::arg("vectors"), py::arg("labels"),
        py::arg("soft") = std::nullopt, py::arg("frames") = std::nullopt,
        py::arg("classes") = 4,
        "Build an embedding set from a float32 matrix and labels");

  m.def(
      "generate",
      [](int classes, int dim, int per_class, double separation,
         double ambiguity, int frames_min, int frames_max,
         std::uint64_t seed) {
        SynthSpec spec;
        spec.classes = classes;
        spec.dim = dim;
        spec.per_class = per_class;
        spec.separation = separation;
        spec.ambiguity_fraction = ambiguity;
        spec.frames_min = frames_min;
        spec.frames_max = frames_max;
        spec.seed = seed;
        return generate(spec);
      },
      py::arg("classes") = 4, py::arg("dim") = 64, py::arg("per_class") = 500,
      py::arg("separation") = 4.0, py::arg("ambiguity") = 0.0,
      py::arg("frames_min") = 1, py::arg("frames_max") = 1,
      py::arg("seed") = 0,
      "Deterministic emotion-clustered synthetic dataset");

  m.def("pool_utterance", &pool_utterance,
        "Mean-pool frames to one vector per utterance");
  m.def("stratify", &stratify,
        "Split into (low, high) ambiguity strata by vote share");

  py::class_<RvqStack>(m, "RvqStack")
      .def_property_readonly("depth", &RvqStack::depth)
      .def_property_readonly("entries", &RvqStack::entries)
      .def_property_readonly("dim", &RvqStack::dim)
      .def_property_readonly("fingerprint", &RvqStack::fingerprint)
      .def("codewords", [](const RvqStack& s, int stage) {
        const Codebook& cb = s.stage(stage);
        return matrix_view(cb.words(), cb.entries(), cb.dim());
      });

  py::class_<CodeSequence>(m, "CodeSequence")
      .def_property_readonly("rows", &CodeSequence::rows)
      .def_property_readonly("stages", &CodeSequence::stages)
      .def_property_readonly("entries", &CodeSequence::entries)
      .def("indices", [](const CodeSequence& c) {
        py::array_t<std::uint32_t> out(
            {c.rows(), static_cast<std::size_t>(c.stages())});
        std::copy(c.indices().begin(), c.indices().end(), out.mutable_data());
        return out;
      });

  m.def(
      "train_rvq",
      [](const EmbeddingSet& set, int stages, int entries, std::size_t budget,
         const std::string& regime, int target, int bias, std::uint64_t seed,
         int max_iters, double tol) {
        KMeansConfig km;
        km.max_iters = max_iters;
        km.tol = tol;
        return train_rvq(set, make_regime(regime, target, bias, budget, seed),
                         stages, entries, km);
      },
      py::arg("set"), py::arg("stages"), py::arg("entries"), py::arg("budget"),
      py::arg("regime") = "balanced", py::arg("target") = -1,
      py::arg("bias") = -1, py::arg("seed") = 0, py::arg("max_iters") = 100,
      py::arg("tol") = 1e-5,
      "Train an RVQ stack on the regime's sampled training set");

  m.def("encode", &encode, py::arg("set"), py::arg("stack"),
        "Greedy residual encoding to per-stage indices");
  m.def("reconstruct", &reconstruct, py::arg("codes"), py::arg("stack"),
        py::arg("depth"), py::arg("source"),
        "Sum the selected codewords over stages 1..depth");
  m.def("nominal_bitrate",
        py::overload_cast<int, int, double>(&nominal_bitrate),
        py::arg("depth"), py::arg("entries"), py::arg("frame_rate_hz"));

  py::class_<LinearProbe>(m, "LinearProbe")
      .def_property_readonly("classes", &LinearProbe::classes)
      .def_property_readonly("dim", &LinearProbe::dim)
      .def("weights",
           [](const LinearProbe& p) {
             return matrix_view(p.weights(), p.classes(), p.dim());
           })
      .def("bias", [](const LinearProbe& p) { return p.bias(); });

  m.def(
      "probe_train",
      [](const EmbeddingSet& train, int epochs, double learning_rate,
         double l2, std::uint64_t seed) {
        ProbeConfig cfg;
        cfg.epochs = epochs;
        cfg.learning_rate = learning_rate;
        cfg.l2 = l2;
        cfg.seed = seed;
        return probe_train(train, cfg);
      },
      py::arg("train"), py::arg("epochs") = 500,
      py::arg("learning_rate") = 1.0, py::arg("l2") = 1e-4,
      py::arg("seed") = 0,
      "Full-batch softmax regression on utterance-level embeddings");

  m.def(
      "probe_predict",
      [](const LinearProbe& probe, const EmbeddingSet& set) {
        ProbePrediction pred = probe_predict(probe, set);
        py::array_t<double> soft(
            {pred.hard.size(), static_cast<std::size_t>(probe.classes())});
        std::copy(pred.soft.begin(), pred.soft.end(), soft.mutable_data());
        return py::make_tuple(pred.hard, soft);
      },
      py::arg("probe"), py::arg("set"),
      "Hard labels and softmax rows per input row");

  m.def("cosine_fidelity",
        [](const EmbeddingSet& a, const EmbeddingSet& b) {
          CosineResult r = cosine_fidelity(a, b);
          return py::make_tuple(r.per_row, r.mean);
        });
  m.def("js_divergence",
        [](const std::vector<double>& p, const std::vector<double>& q) {
          return js_divergence(std::span<const double>(p),
                               std::span<const double>(q));
        });
  m.def("normalized_entropy", [](const std::vector<double>& usage) {
    return normalized_entropy(std::span<const double>(usage));
  });
  m.def("codebook_entropy", &codebook_entropy, py::arg("codes"),
        py::arg("stage"));
  m.def("macro_f1",
        [](const std::vector<int>& pred, const std::vector<int>& truth,
           int classes) {
          return macro_f1(pred, truth, classes).macro;
        });
  m.def("primary_recall",
        [](const std::vector<int>& pred, const std::vector<int>& truth,
           int classes) {
          RecallResult r = primary_recall(pred, truth, classes);
          return py::make_tuple(r.per_class, r.defined, r.macro);
        });
  m.def("top2_set_accuracy",
        [](py::array_t<double, py::array::c_style | py::array::forcecast> pred,
           py::array_t<double, py::array::c_style | py::array::forcecast>
               truth) {
          if (pred.ndim() != 2 || truth.ndim() != 2)
            throw ValidationError("top2 inputs must be 2-D (n, classes)");
          const std::size_t n = pred.shape(0);
          const int c = static_cast<int>(pred.shape(1));
          return top2_set_accuracy(
              std::span<const double>(pred.data(), n * c),
              std::span<const double>(truth.data(), n * c), n, c);
        });

  py::class_<RouterBank>(m, "RouterBank")
      .def_property_readonly("classes", &RouterBank::classes)
      .def_property_readonly("depth", &RouterBank::depth)
      .def_property_readonly("normalized", &RouterBank::normalized);

  m.def(
      "build_bank",
      [](std::vector<RvqStack> stacks, int depth, bool normalize) {
        const int c = static_cast<int>(stacks.size());
        return RouterBank::build(std::move(stacks), depth, normalize,
                                 Taxonomy::canonical(c));
      },
      py::arg("stacks"), py::arg("depth") = 1, py::arg("normalize") = true,
      "Bank of per-emotion stacks in label order");

  m.def(
      "route_batch",
      [](const EmbeddingSet& set, const RouterBank& bank,
         std::optional<double> baseline_f1, bool frame_vote) {
        RouteBatchResult r = route_batch(set, bank, baseline_f1, frame_vote);
        return py::make_tuple(
            r.labels, r.report.value(bank.depth(), "ALL", "macro_f1"));
      },
      py::arg("set"), py::arg("bank"), py::arg("baseline_f1") = std::nullopt,
      py::arg("frame_vote") = false,
      "Route every utterance; returns (labels, macro_f1)");

  m.def("write_embeddings",
        py::overload_cast<const EmbeddingSet&, const std::filesystem::path&,
                          const std::filesystem::path&>(&write_embeddings),
        py::arg("set"), py::arg("vectors_path"), py::arg("manifest_path"));
  m.def("read_embeddings", &read_embeddings, py::arg("vectors_path"),
        py::arg("manifest_path"));
  m.def("write_codebook", &write_codebook, py::arg("stack"), py::arg("path"));
  m.def("read_codebook", &read_codebook, py::arg("path"));
  m.def("write_codes", &write_codes, py::arg("codes"), py::arg("path"));
  m.def("read_codes", &read_codes, py::arg("path"));
  m.def("save_probe", &save_probe, py::arg("probe"), py::arg("path"));
  m.def("load_probe", &load_probe, py::arg("path"));
}
