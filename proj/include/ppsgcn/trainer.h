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

#ifndef PPSGCN_TRAINER_H_
#define PPSGCN_TRAINER_H_

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "ppsgcn/gcn.h"
#include "ppsgcn/graph.h"
#include "ppsgcn/paillier.h"
#include "ppsgcn/sampling.h"
#include "ppsgcn/secure_aggregation.h"
#include "ppsgcn/transport.h"

namespace ppsgcn::trainer {

enum class Optimizer { kSgd, kAdam };

struct TrainConfig {
  int iterations = 200;
  double learning_rate = 0.01;
  Optimizer optimizer = Optimizer::kSgd;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;

  int layers = 2;
  int hidden_dim = 128;
  double dropout = 0.2;  // on hidden activations, training passes only
  gcn::Activation activation = gcn::Activation::kRelu;  // hidden layers

  int batch_size = 256;  // total draws per round across clients
  sampling::Distribution distribution = sampling::Distribution::kUniform;
  bool sampling = true;   // off: every round is the full graph
  bool normalize = true;  // off: no 1/p factors

  bool encrypted = false;
  int key_bits = 512;
  int frac_bits = 40;
  transport::BusOptions bus;

  std::uint64_t seed = 0;
  int eval_every = 1;  // 0 disables validation during training
  int patience = 0;    // early-stopping patience on val F1; 0 disables

  void Validate() const;
};

std::vector<int> ModelDims(const TrainConfig& config, int feature_dim,
                           int num_classes);

struct EpochRecord {
  int iteration = 0;
  double time_s = 0;
  double loss = 0;
  std::optional<double> val_f1;
  double grad_norm = 0;
  int n_sampled = 0;
  std::int64_t comm_scalars = 0;
  std::int64_t mem_scalars = 0;
};

// One application of 1/p column factors by a client.
struct ScalingEvent {
  int iteration = 0;
  int client = 0;
  int columns = 0;
};

struct PassResult {
  double loss = 0;                // sampled objective over all clients
  std::vector<Matrix> gradients;  // dL/dW^l as decoded by client 0
  int n_sampled = 0;
  int loss_rows = 0;
};

enum class Split { kTrain, kVal, kTest };

std::uint64_t HashParams(const gcn::ModelParams& params);

// Pooled micro-F1 over single-label predictions; equals accuracy.
double MicroF1(const std::vector<int>& predicted, const std::vector<int>& truth);

// The m clients, each with its own parameter replica, optimizer moments,
// keys and caches, plus the bus connecting them to the server.
class Federation {
 public:
  Federation(const TrainConfig& config, std::vector<graph::ClientShard> shards);
  ~Federation();

  int num_clients() const { return static_cast<int>(clients_.size()); }
  const TrainConfig& config() const { return config_; }
  const gcn::ModelParams& params(int client) const;
  // Overwrites every replica, e.g. for finite differences.
  void SetParams(const gcn::ModelParams& params);
  const gcn::LayerCache& cache(int client) const;
  const sampling::SamplePlan& plan() const { return plan_; }
  const std::vector<graph::ClientShard>& shards() const { return shards_; }
  const std::vector<graph::LaplacianBlocks>& blocks() const { return blocks_; }
  transport::Bus& bus() { return *bus_; }
  const transport::CommLedger& ledger() const;
  const transport::MemoryLedger& memory() const { return memory_; }
  const std::vector<ScalingEvent>& scaling_ledger() const { return scaling_; }
  // Activation scalars held across clients during the last pass.
  std::int64_t last_activation_scalars() const { return last_activation_; }

  sampling::SampleRound RoundFor(int iteration) const;

  // Forward, loss and backward on the given round without updating.
  PassResult Pass(int iteration, const sampling::SampleRound& round,
                  bool training);
  // One full iteration: sample, pass, synchronized update.
  PassResult Step(int iteration);
  // Applies the same gradient to every replica.
  void Update(const std::vector<Matrix>& gradients);

  // Full-batch distributed inference; predictions indexed by client and
  // local id.
  std::vector<std::vector<int>> Predict();
  double Evaluate(Split split);

 private:
  struct Client;

  Matrix Deliver(const transport::Message& message, int client) const;
  transport::Payload Seal(int client, int owner, const Matrix& m);
  // Runs one aggregation round of per-destination terms; returns, for each
  // client, the decoded sum of the terms addressed to it.
  std::vector<Matrix> ExchangeTerms(transport::Bus& bus, const transport::RoundTag& tag,
                                    const std::vector<gcn::SendTerms>& terms,
                                    bool encrypted);
  void Forward(transport::Bus* bus, int iteration,
               const std::vector<gcn::ClientView>& views,
               const std::vector<Matrix>& features, bool training, bool encrypted,
               std::vector<gcn::LayerCache*> caches);
  void ApplyGradients(int iteration);
  void BroadcastSample(int iteration, const sampling::SampleRound& round);

  TrainConfig config_;
  std::vector<graph::ClientShard> shards_;
  std::vector<graph::LaplacianBlocks> blocks_;
  sampling::SamplePlan plan_;
  std::vector<std::unique_ptr<Client>> clients_;
  std::unique_ptr<transport::Bus> bus_;
  std::unique_ptr<transport::Bus> eval_bus_;
  transport::MemoryLedger memory_;
  std::vector<ScalingEvent> scaling_;
  std::int64_t last_activation_ = 0;
};

struct TrainResult {
  std::vector<EpochRecord> records;
  gcn::ModelParams params;
  bool stopped_early = false;
  double best_val_f1 = 0;
};

// Runs config.iterations steps, evaluating on the validation split every
// eval_every iterations. With patience set, stops after that many
// evaluations without improvement and restores the best parameters.
TrainResult Train(Federation& federation);

struct AblationRow {
  std::string variant;
  double val_f1 = 0;
  double test_f1 = 0;
  std::size_t scaling_events = 0;
};

// PPSGCN, PPSGCN* (no normalization) and PPSGCN-full (no sampling) under
// the same seed.
std::vector<AblationRow> RunAblation(const TrainConfig& config,
                                     const std::vector<graph::ClientShard>& shards);

struct ConvergenceProbe {
  double mean_short = 0;
  double mean_long = 0;
  bool decreasing = false;      // strictly
  bool non_increasing = false;
};

// Running means of the logged gradient norms over the first `short_horizon`
// and first `long_horizon` iterations.
ConvergenceProbe ProbeConvergence(const std::vector<EpochRecord>& records,
                                  int short_horizon = 100, int long_horizon = 400);

// Runs iteration `iteration` as a training step and compares its measured
// communication and memory with the closed-form counts.
transport::LedgerCheck CheckIteration(Federation& federation, int iteration);

// Fraction of the split carried by its most common label.
double MajorityBaseline(const std::vector<graph::ClientShard>& shards, Split split);

}  // namespace ppsgcn::trainer

#endif  // PPSGCN_TRAINER_H_
