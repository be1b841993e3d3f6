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

// emoq: discretize speech-embedding datasets with residual vector
// quantization, train emotion-aware codebooks, evaluate affective retention,
// and classify emotion by similarity routing.

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "emoq/io.hpp"
#include "emoq/pipeline.hpp"
#include "emoq/synth.hpp"

namespace {

using namespace emoq;

constexpr int kExitOk = 0;
constexpr int kExitValidation = 2;
constexpr int kExitData = 3;

struct IoArgs {
  std::string embeddings;
  std::string manifest;
};

void add_io_options(CLI::App* cmd, IoArgs& io) {
  cmd->add_option("--embeddings", io.embeddings, "Input .embv matrix")
      ->required();
  cmd->add_option("--manifest", io.manifest, "Input .jsonl manifest")
      ->required();
}

RegimeKind parse_regime_kind(const std::string& name) {
  if (name == "balanced") return RegimeKind::kBalanced;
  if (name == "specific") return RegimeKind::kSpecific;
  if (name == "biased") return RegimeKind::kBiased;
  throw ValidationError("unknown regime '" + name + "'");
}

std::vector<SweepPair> parse_pairs(const std::string& text) {
  if (text.empty()) return default_sweep_pairs();
  std::vector<SweepPair> pairs;
  std::stringstream ss(text);
  std::string token;
  while (std::getline(ss, token, ',')) {
    const auto x = token.find('x');
    if (x == std::string::npos)
      throw ValidationError("sweep pair '" + token + "' must look like 8x32");
    pairs.push_back(SweepPair{std::stoi(token.substr(0, x)),
                              std::stoi(token.substr(x + 1))});
  }
  if (pairs.empty()) throw ValidationError("no sweep pairs given");
  return pairs;
}

// rq3 regime tokens: "balanced", "100", or "99+1" style ratios.
std::vector<int> parse_rq3_regimes(const std::string& text) {
  std::vector<int> out;
  std::stringstream ss(text);
  std::string token;
  while (std::getline(ss, token, ',')) {
    if (token == "balanced") {
      out.push_back(-1);
      continue;
    }
    const auto plus = token.find('+');
    out.push_back(std::stoi(plus == std::string::npos
                                ? token
                                : token.substr(0, plus)));
  }
  if (out.empty()) throw ValidationError("no rq3 regimes given");
  return out;
}

RouterBank load_bank(const std::string& dir, int depth, bool normalize,
                     const Taxonomy& tax) {
  std::vector<std::filesystem::path> files;
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    if (entry.path().extension() == ".rvqc") files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());
  if (static_cast<int>(files.size()) != tax.size())
    throw ValidationError("bank dir '" + dir + "' holds " +
                          std::to_string(files.size()) + " codebooks, need " +
                          std::to_string(tax.size()));
  std::vector<std::optional<RvqStack>> slots(tax.size());
  for (const auto& file : files) {
    RvqStack stack = read_codebook(file);
    const int target = stack.regime().target;
    if (target < 0 || target >= tax.size())
      throw ValidationError("codebook '" + file.string() +
                            "' carries no target emotion; banks need "
                            "specific or biased stacks");
    if (slots[target])
      throw ValidationError("duplicate codebook for emotion '" +
                            tax.name(target) + "' in bank dir");
    slots[target] = std::move(stack);
  }
  std::vector<RvqStack> stacks;
  stacks.reserve(tax.size());
  for (int c = 0; c < tax.size(); ++c) stacks.push_back(std::move(*slots[c]));
  return RouterBank::build(std::move(stacks), depth, normalize, tax);
}

std::vector<float> read_raw_f32(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open '" + path + "' for read");
  in.seekg(0, std::ios::end);
  const auto bytes = static_cast<std::size_t>(in.tellg());
  in.seekg(0, std::ios::beg);
  if (bytes % sizeof(float) != 0)
    throw DataError("raw vector file '" + path +
                    "' length is not a multiple of 4 bytes");
  std::vector<float> data(bytes / sizeof(float));
  in.read(reinterpret_cast<char*>(data.data()),
          static_cast<std::streamsize>(bytes));
  if (!in) throw DataError("read failed for '" + path + "'");
  return data;
}

std::pair<int, std::vector<float>> read_csv_matrix(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open '" + path + "' for read");
  std::vector<float> data;
  int dim = -1;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string cell;
    int cols = 0;
    while (std::getline(ss, cell, ',')) {
      try {
        data.push_back(std::stof(cell));
      } catch (const std::exception&) {
        throw DataError("csv '" + path + "' line " + std::to_string(line_no) +
                        ": bad float '" + cell + "'");
      }
      ++cols;
    }
    if (dim < 0) dim = cols;
    if (cols != dim)
      throw DataError("csv '" + path + "' line " + std::to_string(line_no) +
                      ": expected " + std::to_string(dim) + " columns");
  }
  if (dim <= 0) throw DataError("csv '" + path + "' holds no rows");
  return {dim, std::move(data)};
}

int run(int argc, char** argv) {
  CLI::App app{"emotion-aware residual vector quantization toolkit"};
  app.set_config("--config", "", "Key-value config file; flags win");
  app.require_subcommand(1);

  // ---- synth ----
  auto* synth = app.add_subcommand(
      "synth", "Generate an emotion-clustered synthetic dataset");
  SynthSpec spec;
  std::string synth_out, synth_manifest;
  synth->add_option("--classes", spec.classes)->default_val(4);
  synth->add_option("--dim", spec.dim)->default_val(64);
  synth->add_option("--per-class", spec.per_class)->default_val(500);
  synth->add_option("--sep", spec.separation, "Mean separation in sigma units")
      ->default_val(4.0);
  synth->add_option("--ambiguity", spec.ambiguity_fraction)->default_val(0.0);
  synth->add_option("--frames-min", spec.frames_min)->default_val(1);
  synth->add_option("--frames-max", spec.frames_max)->default_val(1);
  synth->add_option("--seed", spec.seed)->default_val(0);
  synth->add_option("--out", synth_out, "Output .embv path")->required();
  synth->add_option("--manifest", synth_manifest, "Output .jsonl path")
      ->required();
  synth->callback([&] {
    const EmbeddingSet set = generate(spec);
    write_embeddings(set, synth_out, synth_manifest);
    std::printf("synth: wrote %zu rows x %d dims, %zu utterances\n",
                set.rows(), set.dim(), set.utterances().size());
  });

  // ---- import ----
  auto* import_cmd = app.add_subcommand(
      "import", "Convert raw float32 or CSV vectors into the .embv format");
  std::string import_vectors, import_csv, import_manifest, import_out;
  int import_dim = 0;
  import_cmd->add_option("--vectors", import_vectors,
                         "Raw little-endian float32 file");
  import_cmd->add_option("--csv", import_csv, "CSV matrix, one row per line");
  import_cmd->add_option("--dim", import_dim,
                         "Row width for --vectors input");
  import_cmd->add_option("--manifest", import_manifest, "Input .jsonl manifest")
      ->required();
  import_cmd->add_option("--out", import_out, "Output .embv path")->required();
  import_cmd->callback([&] {
    int dim = 0;
    std::vector<float> data;
    if (!import_vectors.empty() == !import_csv.empty())
      throw ValidationError("import: give exactly one of --vectors or --csv");
    if (!import_vectors.empty()) {
      if (import_dim <= 0)
        throw ValidationError("import: --vectors needs --dim");
      data = read_raw_f32(import_vectors);
      dim = import_dim;
      if (data.size() % static_cast<std::size_t>(dim) != 0)
        throw DataError("import: vector count is not a multiple of --dim");
    } else {
      std::tie(dim, data) = read_csv_matrix(import_csv);
    }
    auto [utts, tax] = read_manifest(import_manifest);
    const bool all_single =
        std::all_of(utts.begin(), utts.end(),
                    [](const Utterance& u) { return u.frame_count() == 1; });
    const Level level =
        (!utts.empty() && all_single) ? Level::kUtterance : Level::kFrame;
    // The constructor validates frame ranges, finiteness, and label ids.
    const EmbeddingSet set(dim, std::move(data), std::move(utts),
                           std::move(tax), level);
    write_embeddings(set, import_out);
    std::printf("import: wrote %zu rows x %d dims, %zu utterances\n",
                set.rows(), set.dim(), set.utterances().size());
  });

  // ---- train-codebook ----
  auto* train = app.add_subcommand("train-codebook",
                                   "Train an RVQ stack under a regime");
  IoArgs train_io;
  add_io_options(train, train_io);
  std::string regime_name = "balanced", target_name;
  int bias = -1, stages = 8, entries = 32;
  std::size_t budget = 0;
  std::uint64_t seed = 0;
  int max_iters = 100;
  double tol = 1e-5;
  std::string train_out;
  bool train_pool = false;
  train->add_option("--regime", regime_name, "balanced|specific|biased")
      ->check(CLI::IsMember({"balanced", "specific", "biased"}));
  train->add_option("--target", target_name, "Target emotion name");
  train->add_option("--bias", bias, "A percent for the biased regime");
  train->add_option("--stages", stages, "L")->required();
  train->add_option("--entries", entries, "K")->required();
  train->add_option("--budget", budget, "T training utterances")->required();
  train->add_option("--seed", seed)->default_val(0);
  train->add_option("--max-iters", max_iters)->default_val(100);
  train->add_option("--tol", tol)->default_val(1e-5);
  train->add_flag("--pool", train_pool,
                  "Pool to utterance level before training");
  train->add_option("--out", train_out, "Output .rvqc path")->required();
  train->callback([&] {
    EmbeddingSet set = read_embeddings(train_io.embeddings, train_io.manifest);
    if (train_pool && set.level() == Level::kFrame) set = pool_utterance(set);
    TrainingRegime regime;
    regime.kind = parse_regime_kind(regime_name);
    if (regime.kind != RegimeKind::kBalanced) {
      if (target_name.empty())
        throw ValidationError("train-codebook: --target required for " +
                              regime_name);
      regime.target = set.taxonomy().id_of(target_name);
    }
    if (regime.kind == RegimeKind::kBiased) {
      if (bias < 0)
        throw ValidationError("train-codebook: --bias required for biased");
      regime.bias_percent = bias;
    }
    regime.total_budget = budget;
    regime.seed = seed;
    KMeansConfig km;
    km.max_iters = max_iters;
    km.tol = tol;
    const RvqStack stack = train_rvq(set, regime, stages, entries, km);
    write_codebook(stack, train_out);
    std::printf("train-codebook: wrote %s (L=%d K=%d D=%d)\n",
                train_out.c_str(), stack.depth(), stack.entries(), stack.dim());
  });

  // ---- quantize ----
  auto* quant = app.add_subcommand(
      "quantize", "Encode embeddings to stage indices, optionally reconstruct");
  IoArgs quant_io;
  add_io_options(quant, quant_io);
  std::string quant_codebook, quant_out, quant_recon;
  int quant_depth = 0;
  quant->add_option("--codebook", quant_codebook, "Trained .rvqc stack")
      ->required();
  quant->add_option("--depth", quant_depth,
                    "Reconstruction depth (default: full stack)");
  quant->add_option("--out", quant_out, "Output .rvqi codes")->required();
  quant->add_option("--recon", quant_recon,
                    "Also write the depth-limited reconstruction .embv");
  quant->callback([&] {
    const EmbeddingSet set =
        read_embeddings(quant_io.embeddings, quant_io.manifest);
    const RvqStack stack = read_codebook(quant_codebook);
    const CodeSequence codes = encode(set, stack);
    write_codes(codes, quant_out);
    const int depth = quant_depth > 0 ? quant_depth : stack.depth();
    std::printf("quantize: %zu rows -> %s (L=%d, %.1f bps nominal @50Hz)\n",
                codes.rows(), quant_out.c_str(), codes.stages(),
                nominal_bitrate(depth, stack.entries(), 50.0));
    if (!quant_recon.empty()) {
      write_embeddings(reconstruct(codes, stack, depth, set), quant_recon);
      std::printf("quantize: wrote reconstruction %s at depth %d\n",
                  quant_recon.c_str(), depth);
    }
  });

  // ---- probe-train ----
  auto* ptrain = app.add_subcommand("probe-train",
                                    "Train the linear softmax probe");
  IoArgs ptrain_io;
  add_io_options(ptrain, ptrain_io);
  ProbeConfig probe_cfg;
  std::string probe_out;
  ptrain->add_option("--epochs", probe_cfg.epochs)->default_val(500);
  ptrain->add_option("--lr", probe_cfg.learning_rate)->default_val(1.0);
  ptrain->add_option("--l2", probe_cfg.l2)->default_val(1e-4);
  ptrain->add_option("--seed", probe_cfg.seed)->default_val(0);
  ptrain->add_option("--out", probe_out, "Output .prbe path")->required();
  ptrain->callback([&] {
    EmbeddingSet set = read_embeddings(ptrain_io.embeddings, ptrain_io.manifest);
    if (set.level() == Level::kFrame) set = pool_utterance(set);
    ProbeTrainInfo info;
    const LinearProbe probe = probe_train(set, probe_cfg, &info);
    save_probe(probe, probe_out);
    std::printf("probe-train: wrote %s (loss %.6f after %d epochs)\n",
                probe_out.c_str(), info.final_loss, info.epochs_run);
  });

  // ---- evaluate ----
  auto* eval = app.add_subcommand(
      "evaluate", "Layer-wise fidelity/retention report for one codebook");
  IoArgs eval_io;
  add_io_options(eval, eval_io);
  std::string eval_codebook, eval_probe, eval_out_dir = "eval_out";
  double eval_rate = 50.0;
  std::uint64_t eval_seed = 0;
  eval->add_option("--codebook", eval_codebook)->required();
  eval->add_option("--probe", eval_probe,
                   "Pretrained .prbe (default: train on the continuous pool)");
  eval->add_option("--frame-rate", eval_rate)->default_val(50.0);
  eval->add_option("--seed", eval_seed)->default_val(0);
  eval->add_option("--out-dir", eval_out_dir)->required();
  eval->callback([&] {
    const EmbeddingSet set =
        read_embeddings(eval_io.embeddings, eval_io.manifest);
    const RvqStack stack = read_codebook(eval_codebook);
    const LinearProbe probe = [&] {
      if (!eval_probe.empty()) return load_probe(eval_probe);
      ProbeConfig cfg;
      cfg.seed = derive_seed(eval_seed, "probe");
      return probe_train(pool_utterance(set), cfg);
    }();
    EvalReport rep = evaluate_stack(set, stack, probe, eval_rate);
    rep.set_meta("codebook", eval_codebook);
    std::filesystem::create_directories(eval_out_dir);
    rep.write_csv(std::filesystem::path(eval_out_dir) / "evaluate.csv");
    rep.write_json(std::filesystem::path(eval_out_dir) / "evaluate.json");
    std::printf("evaluate: wrote %s/evaluate.{csv,json}\n",
                eval_out_dir.c_str());
  });

  // ---- route ----
  auto* route_cmd = app.add_subcommand(
      "route", "Classify by best-reconstructing emotion codebook");
  IoArgs route_io;
  add_io_options(route_cmd, route_io);
  std::string bank_dir, route_out;
  int route_depth = 1;
  bool normalize = true, frame_vote = false;
  double baseline_f1 = -1.0;
  route_cmd->add_option("--bank", bank_dir,
                        "Directory holding one .rvqc per emotion")
      ->required();
  route_cmd->add_option("--depth", route_depth)->default_val(1);
  route_cmd->add_flag("--normalize,!--no-normalize", normalize,
                      "L2-normalize input and codewords (default on)");
  route_cmd->add_flag("--frame-vote", frame_vote,
                      "Route frames and take the majority per utterance");
  route_cmd->add_option("--baseline-f1", baseline_f1,
                        "Continuous baseline Macro-F1 for delta reporting");
  route_cmd->add_option("--out", route_out, "Output report .json")->required();
  route_cmd->callback([&] {
    const EmbeddingSet set =
        read_embeddings(route_io.embeddings, route_io.manifest);
    const RouterBank bank =
        load_bank(bank_dir, route_depth, normalize, set.taxonomy());
    const auto result = route_batch(
        set, bank,
        baseline_f1 >= 0.0 ? std::optional<double>(baseline_f1) : std::nullopt,
        frame_vote);
    std::ofstream os(route_out, std::ios::trunc);
    if (!os) throw DataError("cannot open '" + route_out + "' for write");
    os << result.report.to_json() << '\n';
    std::printf("route: macro-F1 %.4f over %zu utterances -> %s\n",
                result.report.value(route_depth, "ALL", "macro_f1"),
                result.labels.size(), route_out.c_str());
  });

  // ---- rq1 / rq2 ----
  struct RqArgs {
    IoArgs io;
    PipelineConfig cfg;
    std::string out_dir;
    bool cache = false;
    bool pool = false;
  };
  auto add_rq_options = [](CLI::App* cmd, RqArgs& args) {
    add_io_options(cmd, args.io);
    cmd->add_option("--stages", args.cfg.stages, "L")->default_val(8);
    cmd->add_option("--entries", args.cfg.entries, "K")->default_val(32);
    cmd->add_option("--budget", args.cfg.budget, "T training utterances")
        ->required();
    cmd->add_option("--seed", args.cfg.seed)->default_val(0);
    cmd->add_option("--frame-rate", args.cfg.frame_rate_hz)->default_val(50.0);
    cmd->add_option("--out-dir", args.out_dir)->required();
    cmd->add_flag("--cache", args.cache,
                  "Reuse cached codebooks/probes under out-dir/cache");
    cmd->add_flag("--pool", args.pool,
                  "Quantize pooled utterance embeddings instead of frames");
  };
  auto load_rq_set = [](const RqArgs& args) {
    EmbeddingSet set = read_embeddings(args.io.embeddings, args.io.manifest);
    if (args.pool && set.level() == Level::kFrame) set = pool_utterance(set);
    return set;
  };
  auto finish_rq = [](const RqArgs& args, const std::string& name,
                      EvalReport rep) {
    std::filesystem::create_directories(args.out_dir);
    rep.write_csv(std::filesystem::path(args.out_dir) / (name + ".csv"));
    rep.write_json(std::filesystem::path(args.out_dir) / (name + ".json"));
    std::printf("%s: wrote %s/%s.{csv,json}\n", name.c_str(),
                args.out_dir.c_str(), name.c_str());
  };

  RqArgs rq1_args;
  auto* rq1 = app.add_subcommand(
      "rq1", "Layer-wise degradation with a balanced codebook");
  add_rq_options(rq1, rq1_args);
  rq1->callback([&] {
    if (rq1_args.cache)
      rq1_args.cfg.cache_dir = std::filesystem::path(rq1_args.out_dir) / "cache";
    const EmbeddingSet set = load_rq_set(rq1_args);
    finish_rq(rq1_args, "rq1", run_rq1(set, rq1_args.cfg));
  });

  RqArgs rq2_args;
  auto* rq2 = app.add_subcommand(
      "rq2", "Matched/unmatched emotion-specific codebook evaluation");
  add_rq_options(rq2, rq2_args);
  rq2->callback([&] {
    if (rq2_args.cache)
      rq2_args.cfg.cache_dir = std::filesystem::path(rq2_args.out_dir) / "cache";
    const EmbeddingSet set = load_rq_set(rq2_args);
    finish_rq(rq2_args, "rq2", run_rq2(set, rq2_args.cfg));
  });

  // ---- rq3 ----
  RqArgs rq3_args;
  std::string rq3_regimes = "balanced,100+0,99+1,95+5";
  auto* rq3 = app.add_subcommand(
      "rq3", "Soft-distribution fidelity per regime and ambiguity stratum");
  add_rq_options(rq3, rq3_args);
  rq3->add_option("--regimes", rq3_regimes,
                  "Comma list: balanced and A+(100-A) ratios");
  rq3->callback([&] {
    if (rq3_args.cache)
      rq3_args.cfg.cache_dir = std::filesystem::path(rq3_args.out_dir) / "cache";
    const EmbeddingSet set = load_rq_set(rq3_args);
    const auto reports =
        run_rq3(set, rq3_args.cfg, parse_rq3_regimes(rq3_regimes));
    std::filesystem::create_directories(rq3_args.out_dir);
    for (const auto& [name, rep] : reports) {
      std::string tag = name;
      std::replace(tag.begin(), tag.end(), '+', '_');
      rep.write_csv(std::filesystem::path(rq3_args.out_dir) /
                    ("rq3_" + tag + ".csv"));
      rep.write_json(std::filesystem::path(rq3_args.out_dir) /
                     ("rq3_" + tag + ".json"));
    }
    std::printf("rq3: wrote %zu regime reports under %s\n", reports.size(),
                rq3_args.out_dir.c_str());
  });

  // ---- rq4 ----
  RqArgs rq4_args;
  std::string rq4_pairs;
  auto* rq4 = app.add_subcommand(
      "rq4", "Downstream Macro-F1 deltas: Bal vs Emo-Q(100) vs Emo-Q(99)");
  add_rq_options(rq4, rq4_args);
  rq4->add_option("--pairs", rq4_pairs,
                  "Comma list of LxK (default: the seven swept configs)");
  rq4->callback([&] {
    if (rq4_args.cache)
      rq4_args.cfg.cache_dir = std::filesystem::path(rq4_args.out_dir) / "cache";
    const EmbeddingSet set = load_rq_set(rq4_args);
    const Rq4Table table = run_rq4(set, rq4_args.cfg, parse_pairs(rq4_pairs));
    std::filesystem::create_directories(rq4_args.out_dir);
    {
      std::ofstream os(std::filesystem::path(rq4_args.out_dir) / "rq4_table.csv",
                       std::ios::trunc);
      os << table.table_csv();
    }
    table.detail.write_csv(std::filesystem::path(rq4_args.out_dir) /
                           "rq4_detail.csv");
    table.detail.write_json(std::filesystem::path(rq4_args.out_dir) /
                            "rq4_detail.json");
    std::printf("rq4: baseline F1 %.4f; wrote %s/rq4_table.csv\n",
                table.baseline_f1, rq4_args.out_dir.c_str());
  });

  // ---- sweep ----
  auto* sweep = app.add_subcommand(
      "sweep", "Grid evaluation over (L, K) pairs and regimes");
  IoArgs sweep_io;
  add_io_options(sweep, sweep_io);
  SweepConfig sweep_cfg;
  std::string sweep_pairs, sweep_regimes = "balanced", sweep_out;
  sweep->add_option("--pairs", sweep_pairs,
                    "Comma list of LxK (default: the seven swept configs)");
  sweep->add_option("--regimes", sweep_regimes,
                    "Comma list: balanced, specific, biased:<A>");
  sweep->add_option("--budget", sweep_cfg.budget)->required();
  sweep->add_option("--seed", sweep_cfg.seed)->default_val(0);
  sweep->add_option("--frame-rate", sweep_cfg.frame_rate_hz)->default_val(50.0);
  sweep->add_option("--jobs", sweep_cfg.jobs)->default_val(1);
  sweep->add_option("--out-dir", sweep_out)->required();
  bool sweep_pool = false;
  sweep->add_flag("--pool", sweep_pool,
                  "Quantize pooled utterance embeddings instead of frames");
  sweep->callback([&] {
    EmbeddingSet set =
        read_embeddings(sweep_io.embeddings, sweep_io.manifest);
    if (sweep_pool && set.level() == Level::kFrame) set = pool_utterance(set);
    sweep_cfg.pairs = parse_pairs(sweep_pairs);
    sweep_cfg.regimes.clear();
    std::stringstream ss(sweep_regimes);
    std::string token;
    while (std::getline(ss, token, ',')) sweep_cfg.regimes.push_back(token);
    run_sweep(set, sweep_cfg, sweep_out);
    std::printf("sweep: wrote %zu cells under %s\n",
                sweep_cfg.pairs.size() * sweep_cfg.regimes.size(),
                sweep_out.c_str());
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitValidation;
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const emoq::ValidationError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitValidation;
  } catch (const emoq::DataError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitData;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitData;
  }
}
