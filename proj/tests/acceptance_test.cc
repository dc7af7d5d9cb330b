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

// Acceptance suite: prints one PASS / FAIL / SKIP line per criterion and
// exits nonzero if any criterion fails.

#include <chrono>
#include <cstdarg>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <string>
#include <type_traits>
#include <utility>
#include <vector>

#include "ppsgcn/common.h"
#include "ppsgcn/config.h"
#include "ppsgcn/error.h"
#include "ppsgcn/graph.h"
#include "ppsgcn/oracle.h"
#include "ppsgcn/sampling.h"
#include "ppsgcn/secure_aggregation.h"
#include "ppsgcn/synth.h"
#include "ppsgcn/trainer.h"
#include "ppsgcn/transport.h"
#include "test_util.h"

namespace ppsgcn {
namespace {

using testing::RandomMatrix;
using testing::RandomShards;
using testing::Sbm;

enum class Status { kPass, kFail, kSkip };

struct Outcome {
  Status status = Status::kFail;
  std::string detail;
};

Outcome Check(bool ok, std::string detail) {
  return {ok ? Status::kPass : Status::kFail, std::move(detail)};
}

std::string Fmt(const char* format, ...) __attribute__((format(printf, 1, 2)));
std::string Fmt(const char* format, ...) {
  char buf[512];
  va_list args;
  va_start(args, format);
  std::vsnprintf(buf, sizeof buf, format, args);
  va_end(args);
  return buf;
}

trainer::TrainConfig BaseConfig() {
  trainer::TrainConfig c;
  c.hidden_dim = 16;
  c.dropout = 0;
  c.eval_every = 0;
  c.seed = 1;
  return c;
}

Outcome CentralizedEquivalence() {
  const graph::GlobalGraph g = Sbm(64, 4, 8, 1);
  std::string detail;
  double worst = 0;
  for (int m : {1, 2, 4}) {
    trainer::TrainConfig c = BaseConfig();
    c.sampling = false;
    trainer::Federation fed(c, RandomShards(g, m, 1));
    const oracle::Comparison cmp = oracle::CompareFullBatch(fed, g);
    worst = std::max(worst, cmp.max());
    detail += Fmt("m=%d act %.1e loss %.1e grad %.1e; ", m, cmp.activations, cmp.loss, cmp.gradients);
  }
  return Check(worst <= 1e-10, detail + Fmt("max %.2e <= 1e-10", worst));
}

Outcome SampledGradients() {
  const graph::GlobalGraph g = Sbm(32, 4, 6, 2, 0.3, 0.1);
  trainer::TrainConfig c = BaseConfig();
  c.hidden_dim = 8;
  c.batch_size = 16;
  c.distribution = sampling::Distribution::kDegree;
  trainer::Federation fed(c, RandomShards(g, 2, 2));
  const sampling::SampleRound round = fed.RoundFor(0);
  const gcn::ModelParams base = fed.params(0);
  const trainer::PassResult r = fed.Pass(0, round, false);
  const double h = 1e-5;
  double worst = 0;
  int entries = 0;
  for (int l = 0; l < base.num_layers(); ++l)
    for (Eigen::Index e = 0; e < base.weights[l].size(); ++e) {
      gcn::ModelParams plus = base, minus = base;
      plus.weights[l].data()[e] += h;
      minus.weights[l].data()[e] -= h;
      fed.SetParams(plus);
      const double lp = fed.Pass(0, round, false).loss;
      fed.SetParams(minus);
      const double lm = fed.Pass(0, round, false).loss;
      const double fd = (lp - lm) / (2 * h);
      const double got = r.gradients[l].data()[e];
      worst = std::max(worst, std::abs(got - fd) / std::max({std::abs(got), std::abs(fd), 1e-8}));
      ++entries;
    }
  return Check(worst <= 1e-4, Fmt("n_S=%d, %d entries, max entrywise rel err %.2e <= 1e-4",
                                  round.total(), entries, worst));
}

Outcome Unbiasedness() {
  // Exhaustive: 4 nodes on 2 clients, one draw each.
  const graph::GlobalGraph small =
      testing::MakeSmallGraph(4, {{0, 1}, {1, 2}, {2, 3}, {0, 3}, {0, 2}}, 3, 2, 3);
  const auto shards = testing::AssignedShards(small, {0, 0, 1, 1}, 2);
  const auto blocks = graph::BuildLaplacianBlocks(shards);
  const sampling::SamplePlan plan = sampling::MakePlan(shards, 2, sampling::Distribution::kDegree, false);
  if (plan.clients[0].draws != 1 || plan.clients[1].draws != 1)
    return Check(false, "expected one draw per client");
  const std::vector<Matrix> inputs{RandomMatrix(2, 3, 4), RandomMatrix(2, 3, 5)};
  double exact_err = 0;
  for (int i = 0; i < 2; ++i) {
    Matrix expect = Matrix::Zero(2, 3);
    for (int a : plan.clients[0].candidates)
      for (int b : plan.clients[1].candidates) {
        const sampling::SampleRound round = sampling::MakeRound(plan, {{a}, {b}});
        expect += plan.clients[0].Q(a) * plan.clients[1].Q(b) *
                  sampling::EstimateHidden(i, blocks, round, inputs);
      }
    exact_err = std::max(exact_err, (expect - sampling::ExactHidden(i, blocks, inputs)).cwiseAbs().maxCoeff());
  }

  // Monte Carlo: 32 nodes, 10^5 rounds.
  const graph::GlobalGraph g = Sbm(32, 4, 4, 6, 0.3, 0.1);
  const auto mshards = RandomShards(g, 2, 6);
  const auto mblocks = graph::BuildLaplacianBlocks(mshards);
  const sampling::SamplePlan mplan = sampling::MakePlan(mshards, 12, sampling::Distribution::kDegree, false);
  std::vector<Matrix> o;
  for (const auto& s : mshards) o.push_back(RandomMatrix(s.num_local, 4, 7 + s.client_id));
  constexpr int kRounds = 100000;
  std::vector<Matrix> sum(2), sq(2);
  for (int i = 0; i < 2; ++i) {
    sum[i] = Matrix::Zero(mshards[i].num_local, 4);
    sq[i] = sum[i];
  }
  for (int t = 0; t < kRounds; ++t) {
    const sampling::SampleRound round = sampling::DrawRound(mplan, DeriveSeed(11, {static_cast<std::uint64_t>(t)}));
    for (int i = 0; i < 2; ++i) {
      const Matrix est = sampling::EstimateHidden(i, mblocks, round, o);
      sum[i] += est;
      sq[i] += est.cwiseProduct(est);
    }
  }
  int total = 0, within = 0;
  for (int i = 0; i < 2; ++i) {
    const Matrix exact = sampling::ExactHidden(i, mblocks, o);
    for (Eigen::Index e = 0; e < exact.size(); ++e) {
      const double mean = sum[i].data()[e] / kRounds;
      const double var = std::max(0.0, sq[i].data()[e] / kRounds - mean * mean) * kRounds / (kRounds - 1);
      const double se = std::sqrt(var / kRounds);
      const double diff = std::abs(mean - exact.data()[e]);
      ++total;
      within += se > 0 ? diff <= 3 * se : diff <= 1e-10;
    }
  }
  const double frac = static_cast<double>(within) / total;
  return Check(exact_err <= 1e-10 && frac >= 0.99,
               Fmt("exhaustive max err %.1e <= 1e-10; MC %d/%d entries (%.2f%%) within 3 SE, need >= 99%%",
                   exact_err, within, total, 100 * frac));
}

Outcome VarianceBound() {
  const graph::GlobalGraph g = testing::MakeSmallGraph(
      8, {{0, 1}, {1, 2}, {2, 3}, {3, 4}, {4, 5}, {5, 6}, {6, 7}, {0, 7}, {1, 5}}, 4, 2, 8);
  const auto shards = RandomShards(g, 2, 8);
  const auto blocks = graph::BuildLaplacianBlocks(shards);
  const sampling::SamplePlan plan = sampling::MakePlan(shards, 4, sampling::Distribution::kDegree, false);
  std::vector<Matrix> z;
  for (const auto& s : shards) z.push_back(RandomMatrix(s.num_local, 4, 20 + s.client_id));
  const sampling::VarianceCheck v =
      sampling::CheckVarianceBound(plan, blocks, z, RandomMatrix(4, 3, 30), 10000, 9);
  std::string detail;
  for (std::size_t i = 0; i < v.bound.size(); ++i)
    detail += Fmt("client %zu: %.4g <= %.4g; ", i, v.empirical[i], v.bound[i]);
  return Check(v.ok, detail);
}

// The server's aggregation types cannot express decryption.
template <typename T>
concept CanDecrypt = requires(const T& t, const crypto::CipherMatrix& c) { t.Decrypt(c); };
static_assert(!CanDecrypt<crypto::BlindAggregator>);
static_assert(!CanDecrypt<transport::AggregationServer>);
static_assert(!std::is_constructible_v<crypto::BlindAggregator, crypto::SecretKey>);
static_assert(std::is_same_v<std::decay_t<decltype(std::declval<crypto::PublicDirectory>().entries())>::mapped_type,
                             crypto::PublicKey>);

Outcome HomomorphicProtocol() {
  const crypto::KeySetup keys = crypto::SetupKeys(5, 512, 40);
  constexpr double kTol = 4 * 0x1p-40;
  int passed = 0;
  double worst = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    std::vector<crypto::Contribution> round;
    const int dest = trial % 5;
    Matrix plain = Matrix::Zero(8, 8);
    for (int k = 1; k <= 4; ++k) {
      const int src = (dest + k) % 5;
      round.push_back({src, dest, RandomMatrix(8, 8, 1000 * trial + k, 100.0)});
      plain += round.back().value;
    }
    const auto out = crypto::SecureAggregate(round, keys, 40, 50 + trial);
    const double err = (out.at(dest) - plain).cwiseAbs().maxCoeff();
    worst = std::max(worst, err);
    passed += err <= kTol;
  }
  return Check(passed == 1000, Fmt("%d/1000 trials within 4*2^-40 (worst %.2e); "
                                   "server secret-key absence checked at compile time",
                                   passed, worst));
}

Outcome LedgerExactness() {
  constexpr int kNodes = 100, kWidth = 128, kClients = 4;
  synth::SynthSpec spec;
  spec.nodes = kNodes;
  spec.feature_dim = kWidth;
  spec.seed = 1;
  graph::GlobalGraph g = synth::GenerateSbm(spec);
  g.num_classes = kWidth;
  trainer::TrainConfig c = BaseConfig();
  c.hidden_dim = kWidth;
  c.sampling = false;
  trainer::Federation fed(c, RandomShards(g, kClients, 1));
  const transport::LedgerCheck chk = trainer::CheckIteration(fed, 0);
  // 2 L m d (n_S + d) and m L d^2 with L = 2, m = 4, d = 128, n_S = 100.
  constexpr std::int64_t kScalars = 466944, kParams = 131072;
  return Check(chk.ok && chk.measured_scalars == kScalars && chk.formula_scalars == kScalars &&
                   chk.measured_parameters == kParams,
               Fmt("measured %lld, formula %lld, expected %lld; params %lld, expected %lld",
                   static_cast<long long>(chk.measured_scalars),
                   static_cast<long long>(chk.formula_scalars), static_cast<long long>(kScalars),
                   static_cast<long long>(chk.measured_parameters),
                   static_cast<long long>(kParams)));
}

Outcome EncryptedParity() {
  const auto shards = RandomShards(Sbm(64, 4, 8, 3), 4, 3);
  trainer::TrainConfig c = BaseConfig();
  c.batch_size = 32;
  c.learning_rate = 0.1;
  trainer::Federation plain(c, shards);
  c.encrypted = true;
  trainer::Federation sealed(c, shards);
  for (int t = 0; t < 5; ++t) {
    plain.Step(t);
    sealed.Step(t);
  }
  double diff = 0;
  for (int l = 0; l < plain.params(0).num_layers(); ++l)
    diff = std::max(diff, (plain.params(0).weights[l] - sealed.params(0).weights[l]).cwiseAbs().maxCoeff());
  return Check(diff <= 1e-6, Fmt("max-norm divergence %.2e <= 1e-6", diff));
}

Outcome Convergence() {
  synth::SynthSpec spec;
  spec.nodes = 256;
  spec.blocks = 4;
  spec.p_in = 0.1;
  spec.p_out = 0.01;
  spec.feature_dim = 16;
  spec.mean_scale = 3;
  spec.seed = 12;
  const auto shards = RandomShards(synth::GenerateSbm(spec), 4, 12);
  trainer::TrainConfig c = BaseConfig();
  c.iterations = 400;
  c.learning_rate = 0.01;
  c.batch_size = 64;
  trainer::Federation fed(c, shards);
  const trainer::TrainResult r = trainer::Train(fed);
  const trainer::ConvergenceProbe p = trainer::ProbeConvergence(r.records, 100, 400);
  const double f1 = fed.Evaluate(trainer::Split::kVal);
  const double base = trainer::MajorityBaseline(shards, trainer::Split::kVal);
  return Check(p.decreasing && f1 >= base + 0.20,
               Fmt("mean grad norm first 100 %.4f, first 400 %.4f; val F1 %.3f vs majority %.3f + 0.20",
                   p.mean_short, p.mean_long, f1, base));
}

Outcome PubmedReplication() {
  const char* dir = std::getenv("PPSGCN_PUBMED_DIR");
  if (dir == nullptr) return {Status::kSkip, "PPSGCN_PUBMED_DIR not set"};
  const std::filesystem::path base(dir);
  config::DataConfig data;
  data.nodes = (base / "nodes.txt").string();
  data.edges = (base / "edges.txt").string();
  if (std::filesystem::exists(base / "masks.json")) {
    data.masks = (base / "masks.json").string();
  } else {
    // 18,217 / 500 / 1,000 of 19,717 nodes.
    data.train_fraction = 18217.0 / 19717;
    data.val_fraction = 500.0 / 19717;
    data.test_fraction = 1000.0 / 19717;
  }
  data.clients = 8;
  data.partition_seed = 1;
  const config::Dataset d = config::LoadDataset(data);
  trainer::TrainConfig c;
  c.optimizer = trainer::Optimizer::kAdam;
  c.learning_rate = 0.01;
  c.hidden_dim = 128;
  c.dropout = 0.2;
  c.batch_size = 5000;
  c.iterations = 400;
  c.eval_every = 5;
  c.patience = 20;
  c.seed = 1;
  trainer::Federation fed(c, d.shards);
  const trainer::TrainResult r = trainer::Train(fed);
  const double f1 = fed.Evaluate(trainer::Split::kTest);
  return Check(f1 >= 0.885, Fmt("test micro-F1 %.4f >= 0.885 after %zu iterations", f1, r.records.size()));
}

struct Criterion {
  int id;
  const char* name;
  double limit_s;
  std::function<Outcome()> run;
};

}  // namespace
}  // namespace ppsgcn

int main() {
  using namespace ppsgcn;
  const std::vector<Criterion> criteria{
      {1, "centralized equivalence", 10, CentralizedEquivalence},
      {2, "sampled gradients vs finite differences", 60, SampledGradients},
      {3, "estimator unbiasedness", 300, Unbiasedness},
      {4, "variance bound", 120, VarianceBound},
      {5, "homomorphic aggregation protocol", 120, HomomorphicProtocol},
      {6, "ledger exactness", 10, LedgerExactness},
      {7, "encrypted/plaintext parity", 300, EncryptedParity},
      {8, "convergence property", 300, Convergence},
      {9, "Pubmed replication (optional)", 1800, PubmedReplication},
  };
  int failures = 0;
  for (const Criterion& c : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {Status::kFail, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (o.status == Status::kPass && secs >= c.limit_s) {
      o.status = Status::kFail;
      o.detail += Fmt(" (runtime over the %.0f s limit)", c.limit_s);
    }
    const char* tag = o.status == Status::kPass ? "PASS" : o.status == Status::kSkip ? "SKIP" : "FAIL";
    std::printf("%s criterion %d: %s [%.2f s] %s\n", tag, c.id, c.name, secs, o.detail.c_str());
    std::fflush(stdout);
    failures += o.status == Status::kFail;
  }
  return failures == 0 ? 0 : 1;
}
