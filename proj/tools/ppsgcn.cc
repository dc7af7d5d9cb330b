// Copyright 2026 The ppsgcn Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Command-line front end: training, evaluation, ablation, ledger and oracle
// checks, synthetic data and key generation.

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "ppsgcn/config.h"
#include "ppsgcn/error.h"
#include "ppsgcn/oracle.h"
#include "ppsgcn/report.h"
#include "ppsgcn/secure_aggregation.h"
#include "ppsgcn/synth.h"
#include "ppsgcn/trainer.h"

namespace {

namespace fs = std::filesystem;
using namespace ppsgcn;

struct ConfigArgs {
  std::string path;
  std::vector<std::string> overrides;
};

void AddConfigOptions(CLI::App* cmd, ConfigArgs& args, bool required) {
  auto* opt = cmd->add_option("--config", args.path, "TOML config file");
  if (required) opt->required()->check(CLI::ExistingFile);
  cmd->add_option("--set", args.overrides, "Override a config key: key=value");
}

config::RunConfig Resolve(const ConfigArgs& args) {
  config::RunConfig cfg = args.path.empty() ? config::RunConfig{} : config::LoadConfig(args.path);
  for (const auto& o : args.overrides) config::ApplyOverride(cfg, o);
  cfg.train.Validate();
  return cfg;
}

std::string OutPath(const config::RunConfig& cfg, const std::string& name) {
  return (fs::path(cfg.output.dir) / name).string();
}

std::ofstream OpenOut(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path);
  return out;
}

int RunTrain(const ConfigArgs& args) {
  const config::RunConfig cfg = Resolve(args);
  config::Dataset data = config::LoadDataset(cfg.data);
  trainer::Federation fed(cfg.train, data.shards);
  const trainer::TrainResult result = trainer::Train(fed);

  fs::create_directories(cfg.output.dir);
  {
    auto out = OpenOut(OutPath(cfg, cfg.output.metrics));
    report::WriteMetricsCsv(result.records, out);
  }
  {
    auto out = OpenOut(OutPath(cfg, cfg.output.ledger));
    fed.ledger().WriteCsv(out);
  }
  {
    auto out = OpenOut(OutPath(cfg, cfg.output.model));
    report::SaveParams(result.params, out);
  }
  report::Summary summary = report::Summarize(result.records, fed.ledger());
  summary.val_f1 = fed.Evaluate(trainer::Split::kVal);
  summary.test_f1 = fed.Evaluate(trainer::Split::kTest);
  {
    auto out = OpenOut(OutPath(cfg, cfg.output.summary));
    report::WriteSummary(summary, out);
  }
  report::WriteSummary(summary, std::cout);
  if (result.stopped_early) std::cout << "stopped_early: true\n";
  return 0;
}

int RunEval(const ConfigArgs& args, std::string model_path, const std::string& split) {
  const config::RunConfig cfg = Resolve(args);
  if (model_path.empty()) model_path = OutPath(cfg, cfg.output.model);
  std::ifstream in(model_path);
  if (!in) throw Error("cannot open model " + model_path);
  const gcn::ModelParams params = report::LoadParams(in);
  config::Dataset data = config::LoadDataset(cfg.data);
  trainer::Federation fed(cfg.train, data.shards);
  fed.SetParams(params);
  trainer::Split s = trainer::Split::kTest;
  if (split == "train") s = trainer::Split::kTrain;
  if (split == "val") s = trainer::Split::kVal;
  std::printf("%s_micro_f1: %.6f\n", split.c_str(), fed.Evaluate(s));
  return 0;
}

int RunAblate(const ConfigArgs& args, const std::string& out_path) {
  const config::RunConfig cfg = Resolve(args);
  config::Dataset data = config::LoadDataset(cfg.data);
  const auto rows = trainer::RunAblation(cfg.train, data.shards);
  report::WriteAblationTable(rows, std::cout);
  std::printf("majority_baseline_test: %.6f\n",
              trainer::MajorityBaseline(data.shards, trainer::Split::kTest));
  if (!out_path.empty()) {
    auto out = OpenOut(out_path);
    report::WriteAblationTable(rows, out);
  }
  return 0;
}

struct SynthArgs {
  int nodes = 100;
  int clients = 4;
  int layers = 2;
  int width = 128;
  int batch = 0;
  std::uint64_t seed = 1;
};

// Graph with `width`-dimensional features and `width` classes, so every
// layer of the model has the same width.
graph::GlobalGraph UniformWidthGraph(const SynthArgs& a) {
  synth::SynthSpec spec;
  spec.nodes = a.nodes;
  spec.blocks = std::min(4, a.nodes);
  spec.p_in = 0.3;
  spec.p_out = 0.05;
  spec.feature_dim = a.width;
  spec.seed = a.seed;
  graph::GlobalGraph g = synth::GenerateSbm(spec);
  g.num_classes = std::max(g.num_classes, a.width);
  return g;
}

int RunLedgerCheck(const ConfigArgs& args, const SynthArgs& a) {
  config::RunConfig cfg = Resolve(args);
  std::vector<graph::ClientShard> shards;
  if (!args.path.empty()) {
    shards = config::LoadDataset(cfg.data).shards;
  } else {
    const graph::GlobalGraph g = UniformWidthGraph(a);
    shards = graph::Shard(g, graph::PartitionRandom(g.n, a.clients, a.seed));
    cfg.train.layers = a.layers;
    cfg.train.hidden_dim = a.width;
    cfg.train.sampling = a.batch > 0;
    cfg.train.batch_size = std::max(a.batch, 1);
    cfg.train.seed = a.seed;
  }
  trainer::Federation fed(cfg.train, shards);
  const transport::LedgerCheck c = trainer::CheckIteration(fed, 0);
  std::printf("measured_scalars: %lld\nformula_scalars: %lld\n",
              static_cast<long long>(c.measured_scalars), static_cast<long long>(c.formula_scalars));
  std::printf("forward_measured: %lld\nforward_paper_convention: %lld\n",
              static_cast<long long>(c.measured_forward), static_cast<long long>(c.paper_forward));
  std::printf("sample_id_scalars: %lld\n", static_cast<long long>(c.sample_ids));
  std::printf("activations: %lld (formula %lld)\nparameters: %lld (formula %lld)\n",
              static_cast<long long>(c.measured_activations),
              static_cast<long long>(c.formula_activations),
              static_cast<long long>(c.measured_parameters),
              static_cast<long long>(c.formula_parameters));
  std::printf("ok: %s\n", c.ok ? "true" : "false");
  return c.ok ? 0 : 1;
}

int RunOracleCompare(const ConfigArgs& args, const SynthArgs& a, double tol) {
  config::RunConfig cfg = Resolve(args);
  cfg.train.sampling = false;
  graph::GlobalGraph g;
  std::vector<graph::ClientShard> shards;
  if (!args.path.empty()) {
    config::Dataset data = config::LoadDataset(cfg.data);
    g = std::move(data.graph);
    shards = std::move(data.shards);
  } else {
    synth::SynthSpec spec;
    spec.nodes = a.nodes;
    spec.feature_dim = 16;
    spec.seed = a.seed;
    g = synth::GenerateSbm(spec);
    shards = graph::Shard(g, graph::PartitionRandom(g.n, a.clients, a.seed));
    cfg.train.layers = a.layers;
    cfg.train.hidden_dim = 16;
    cfg.train.seed = a.seed;
  }
  trainer::Federation fed(cfg.train, shards);
  const oracle::Comparison c = oracle::CompareFullBatch(fed, g);
  std::printf("activations_rel_err: %.3e\nloss_rel_err: %.3e\ngradients_rel_err: %.3e\n",
              c.activations, c.loss, c.gradients);
  const bool ok = c.max() <= tol;
  std::printf("ok: %s\n", ok ? "true" : "false");
  return ok ? 0 : 1;
}

int RunGenSynth(const synth::SynthSpec& spec, const std::string& model, const std::string& dir) {
  if (model != "sbm") throw ValidationError("unsupported model '" + model + "'");
  const graph::GlobalGraph g = synth::GenerateSbm(spec);
  fs::create_directories(dir);
  const std::string nodes = (fs::path(dir) / "nodes.txt").string();
  const std::string edges = (fs::path(dir) / "edges.txt").string();
  synth::WriteFiles(g, nodes, edges);
  std::printf("nodes: %d\nedges: %zu\nwrote: %s %s\n", g.n, g.edges.size(), nodes.c_str(),
              edges.c_str());
  return 0;
}

int RunKeygen(int bits, int clients, std::uint64_t seed, const std::string& out_path) {
  const auto start = std::chrono::steady_clock::now();
  const crypto::KeySetup keys = crypto::SetupKeys(clients, bits, seed);
  const double secs =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  nlohmann::json j = nlohmann::json::array();
  for (const auto& [owner, pk] : keys.server_directory.entries()) {
    std::printf("owner %d: %d-bit modulus, fingerprint %016llx\n", owner, pk.modulus_bits(),
                static_cast<unsigned long long>(pk.fingerprint()));
    j.push_back({{"owner", owner}, {"n", pk.n().get_str(16)}});
  }
  std::printf("keygen_seconds: %.3f\n", secs);
  if (!out_path.empty()) {
    auto out = OpenOut(out_path);
    out << j.dump(2) << '\n';
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Privacy-preserving sampled GCN training over a simulated federation"};
  app.require_subcommand(1);

  ConfigArgs train_args, eval_args, ablate_args, ledger_args, oracle_args;
  auto* train = app.add_subcommand("train", "Train and write metrics, ledger, model, summary");
  AddConfigOptions(train, train_args, true);

  auto* eval = app.add_subcommand("eval", "Evaluate a saved model");
  AddConfigOptions(eval, eval_args, true);
  std::string model_path, split = "test";
  eval->add_option("--model", model_path, "Model JSON (default: output.dir/output.model)");
  eval->add_option("--split", split, "train, val or test")
      ->check(CLI::IsMember({"train", "val", "test"}));

  auto* ablate = app.add_subcommand("ablate", "Compare PPSGCN, PPSGCN* and PPSGCN-full");
  AddConfigOptions(ablate, ablate_args, true);
  std::string ablate_out;
  ablate->add_option("--out", ablate_out, "Also write the table as CSV");

  SynthArgs ledger_synth, oracle_synth;
  ledger_synth.nodes = 100;
  auto* ledger = app.add_subcommand("ledger-check", "Compare one iteration with the overhead formulas");
  AddConfigOptions(ledger, ledger_args, false);
  ledger->add_option("--nodes", ledger_synth.nodes, "Synthetic graph size");
  ledger->add_option("--clients", ledger_synth.clients);
  ledger->add_option("--layers", ledger_synth.layers);
  ledger->add_option("--width", ledger_synth.width, "Feature, hidden and class width");
  ledger->add_option("--batch", ledger_synth.batch, "Sampling draws per round (0 = full graph)");
  ledger->add_option("--seed", ledger_synth.seed);

  oracle_synth.nodes = 64;
  double tol = 1e-10;
  auto* oracle_cmd = app.add_subcommand("oracle-compare", "Full-batch pass against the dense oracle");
  AddConfigOptions(oracle_cmd, oracle_args, false);
  oracle_cmd->add_option("--nodes", oracle_synth.nodes);
  oracle_cmd->add_option("--clients", oracle_synth.clients);
  oracle_cmd->add_option("--layers", oracle_synth.layers);
  oracle_cmd->add_option("--seed", oracle_synth.seed);
  oracle_cmd->add_option("--tol", tol, "Maximum relative error");

  synth::SynthSpec spec;
  std::string synth_model = "sbm", synth_out = ".";
  auto* gen = app.add_subcommand("gen-synth", "Write a stochastic block model graph");
  gen->add_option("--model", synth_model)->check(CLI::IsMember({"sbm"}));
  gen->add_option("--nodes", spec.nodes);
  gen->add_option("--blocks", spec.blocks);
  gen->add_option("--p-in", spec.p_in);
  gen->add_option("--p-out", spec.p_out);
  gen->add_option("--feature-dim", spec.feature_dim);
  gen->add_option("--sigma", spec.sigma);
  gen->add_option("--mean-scale", spec.mean_scale);
  gen->add_option("--seed", spec.seed);
  gen->add_option("--out", synth_out, "Output directory");

  int key_bits = 512, key_clients = 4;
  std::uint64_t key_seed = 0;
  std::string key_out;
  auto* keygen = app.add_subcommand("keygen", "Generate the federation's Paillier keys");
  keygen->add_option("--bits", key_bits, "Modulus size");
  keygen->add_option("--clients", key_clients);
  keygen->add_option("--seed", key_seed);
  keygen->add_option("--out", key_out, "Write the public keys as JSON");

  CLI11_PARSE(app, argc, argv);
  try {
    if (*train) return RunTrain(train_args);
    if (*eval) return RunEval(eval_args, model_path, split);
    if (*ablate) return RunAblate(ablate_args, ablate_out);
    if (*ledger) return RunLedgerCheck(ledger_args, ledger_synth);
    if (*oracle_cmd) return RunOracleCompare(oracle_args, oracle_synth, tol);
    if (*gen) return RunGenSynth(spec, synth_model, synth_out);
    if (*keygen) return RunKeygen(key_bits, key_clients, key_seed, key_out);
  } catch (const ppsgcn::Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
  return 0;
}
