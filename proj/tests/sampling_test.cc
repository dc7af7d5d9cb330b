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

#include "ppsgcn/sampling.h"

#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "ppsgcn/error.h"
#include "ppsgcn/oracle.h"
#include "test_util.h"

namespace ppsgcn::sampling {
namespace {

using ::ppsgcn::testing::AssignedShards;
using ::ppsgcn::testing::PathGraph;
using ::ppsgcn::testing::RandomMatrix;
using ::ppsgcn::testing::RandomShards;
using ::ppsgcn::testing::Sbm;

ClientPlan UniformPlan(int n, int draws) {
  ClientPlan c;
  c.num_local = n;
  for (int v = 0; v < n; ++v) {
    c.candidates.push_back(v);
    c.probs.push_back(1.0 / n);
  }
  c.draws = draws;
  c.ComputeCdf();
  return c;
}

ClientPlan WeightedPlan(std::vector<double> probs, int draws) {
  ClientPlan c;
  c.num_local = static_cast<int>(probs.size());
  for (int v = 0; v < c.num_local; ++v) c.candidates.push_back(v);
  c.probs = std::move(probs);
  c.draws = draws;
  c.ComputeCdf();
  return c;
}

TEST(InclusionTest, SingleNodeIsCertain) {
  const ClientPlan c = UniformPlan(1, 3);
  std::mt19937_64 rng(1);
  EXPECT_EQ(DrawClient(c, rng), std::vector<int>{0});
  EXPECT_EQ(InclusionProbability(1.0, 3), 1.0);
}

TEST(InclusionTest, UniformFourNodesTwoDraws) {
  EXPECT_DOUBLE_EQ(InclusionProbability(0.25, 2), 0.4375);
  const ClientPlan c = UniformPlan(4, 2);
  std::mt19937_64 rng(2024);
  const int trials = 1000000;
  std::vector<int> hits(4, 0);
  for (int t = 0; t < trials; ++t)
    for (int v : DrawClient(c, rng)) ++hits[v];
  const double sd = std::sqrt(0.4375 * 0.5625 / trials);
  for (int v = 0; v < 4; ++v) EXPECT_NEAR(hits[v] / double(trials), 0.4375, 3 * sd);
}

TEST(InclusionTest, EmpiricalFrequencyMatchesClosedForm) {
  SamplePlan plan;
  plan.clients.push_back(WeightedPlan({0.1, 0.2, 0.3, 0.4}, 3));
  plan.clients.push_back(WeightedPlan({0.5, 0.25, 0.25}, 1));
  const int rounds = 100000;
  std::vector<std::vector<int>> hits{std::vector<int>(4), std::vector<int>(3)};
  SampleRound first;
  for (int r = 0; r < rounds; ++r) {
    const SampleRound round = DrawRound(plan, DeriveSeed(9, {std::uint64_t(r)}));
    if (r == 0) first = round;
    for (int i = 0; i < 2; ++i)
      for (int v : round.sampled[i]) ++hits[i][v];
  }
  for (int i = 0; i < 2; ++i)
    for (int v = 0; v < plan.clients[i].num_local; ++v) {
      const double p = first.inclusion[i][v];
      EXPECT_DOUBLE_EQ(p, InclusionProbability(plan.clients[i].Q(v), plan.clients[i].draws));
      EXPECT_NEAR(hits[i][v] / double(rounds), p, 3 * std::sqrt(p * (1 - p) / rounds));
    }
}

TEST(InclusionTest, SmallProbabilityKeepsPrecision) {
  // 1 - (1 - q)^s computed naively loses everything below ~1e-16.
  EXPECT_NEAR(InclusionProbability(1e-18, 3), 3e-18, 1e-30);
}

TEST(RoundTest, SampledSetsAreSortedAndUnique) {
  SamplePlan plan;
  plan.clients.push_back(UniformPlan(5, 20));
  const SampleRound r = DrawRound(plan, 4);
  for (std::size_t k = 1; k < r.sampled[0].size(); ++k)
    EXPECT_LT(r.sampled[0][k - 1], r.sampled[0][k]);
}

TEST(RoundTest, ClientStreamsAreIndependent) {
  SamplePlan a, b;
  a.clients = {UniformPlan(6, 2), UniformPlan(6, 3)};
  b.clients = {UniformPlan(9, 7), UniformPlan(6, 3)};
  EXPECT_EQ(DrawRound(a, 77).sampled[1], DrawRound(b, 77).sampled[1]);
  EXPECT_EQ(DrawRound(a, 77).sampled, DrawRound(a, 77).sampled);
}

TEST(PlanTest, TrainOnlyCandidatesAndDrawSplit) {
  const graph::GlobalGraph g = Sbm(50, 2, 3, 1);
  const auto shards = RandomShards(g, 3, 1);
  const SamplePlan plan = MakePlan(shards, 20, Distribution::kDegree, true);
  int draws = 0;
  for (std::size_t i = 0; i < shards.size(); ++i) {
    const ClientPlan& c = plan.clients[i];
    double sum = 0;
    for (double q : c.probs) sum += q;
    EXPECT_NEAR(sum, 1.0, 1e-12);
    for (int v = 0; v < c.num_local; ++v) {
      if (shards[i].masks.train[v]) {
        EXPECT_NEAR(c.Q(v), (shards[i].degree[v] + 1.0) /
                                [&] {
                                  double t = 0;
                                  for (int u : c.candidates) t += shards[i].degree[u] + 1.0;
                                  return t;
                                }(),
                    1e-15);
      } else {
        EXPECT_EQ(c.Q(v), 0.0);
      }
    }
    EXPECT_GE(c.draws, 1);
    draws += c.draws;
  }
  EXPECT_EQ(draws, 20);
}

TEST(PlanTest, RejectsEmptyBatch) {
  const auto shards = RandomShards(Sbm(10, 2, 2, 1), 2, 1);
  EXPECT_THROW(MakePlan(shards, 0, Distribution::kUniform, false), ValidationError);
}

Matrix Dense(const SparseMatrix& m) { return Matrix(m); }

TEST(RestrictTest, FullRoundIsIdentity) {
  const auto shards = RandomShards(Sbm(20, 2, 2, 3), 3, 3);
  const auto blocks = graph::BuildLaplacianBlocks(shards);
  std::vector<int> sizes;
  for (const auto& s : shards) sizes.push_back(s.num_local);
  const SampleRound full = FullRound(sizes);
  for (const auto& b : blocks) {
    const RestrictedBlocks r = RestrictBlocks(b, full, true);
    EXPECT_EQ(Dense(r.self), Dense(b.self));
    for (int i = 0; i < 3; ++i) EXPECT_EQ(Dense(r.outgoing[i]), Dense(b.outgoing[i]));
    EXPECT_EQ(r.scaler, b.scaler);
  }
}

TEST(RestrictTest, SingleNodePerClientOnPath) {
  const graph::GlobalGraph g = PathGraph();
  const auto shards = AssignedShards(g, {0, 0, 1}, 2);
  const auto blocks = graph::BuildLaplacianBlocks(shards);
  SamplePlan plan;
  plan.clients = {UniformPlan(2, 1), UniformPlan(1, 1)};
  // Client 0 keeps global node 1, client 1 keeps node 2.
  const SampleRound round = MakeRound(plan, {{1}, {0}});
  const double p0 = 0.5, p1 = 1.0;
  EXPECT_DOUBLE_EQ(round.inclusion[0][1], p0);
  const Matrix dense = oracle::DenseLaplacian(g);

  const RestrictedBlocks r0 = RestrictBlocks(blocks[0], round, true);
  const RestrictedBlocks r1 = RestrictBlocks(blocks[1], round, true);
  ASSERT_EQ(r0.self.rows(), 1);
  EXPECT_NEAR(r0.self.coeff(0, 0), dense(1, 1) / p0, 1e-15);
  EXPECT_NEAR(r1.self.coeff(0, 0), dense(2, 2) / p1, 1e-15);
  // Column node 2 (client 1) into row node 1 (client 0).
  EXPECT_NEAR(r0.scaler[0] * r1.outgoing[0].coeff(0, 0), dense(1, 2) / p1, 1e-15);
  EXPECT_NEAR(r1.scaler[0] * r0.outgoing[1].coeff(0, 0), dense(2, 1) / p0, 1e-15);

  const RestrictedBlocks plain = RestrictBlocks(blocks[0], round, false);
  EXPECT_NEAR(plain.self.coeff(0, 0), dense(1, 1), 1e-15);
}

TEST(EstimateTest, FullRoundEqualsExact) {
  const auto shards = RandomShards(Sbm(24, 3, 2, 5), 3, 5);
  const auto blocks = graph::BuildLaplacianBlocks(shards);
  std::vector<Matrix> inputs;
  std::vector<int> sizes;
  for (const auto& s : shards) {
    inputs.push_back(RandomMatrix(s.num_local, 3, 100 + s.client_id));
    sizes.push_back(s.num_local);
  }
  const SampleRound full = FullRound(sizes);
  for (int i = 0; i < 3; ++i)
    EXPECT_LE((EstimateHidden(i, blocks, full, inputs) - ExactHidden(i, blocks, inputs))
                  .cwiseAbs()
                  .maxCoeff(),
              1e-14);
}

TEST(VarianceTest, DeterministicSamplingHasZeroVariance) {
  const auto shards = AssignedShards(PathGraph(), {0, 1, 2}, 3);
  const auto blocks = graph::BuildLaplacianBlocks(shards);
  SamplePlan plan;
  plan.clients = {UniformPlan(1, 1), UniformPlan(1, 1), UniformPlan(1, 1)};
  std::vector<Matrix> z;
  for (int i = 0; i < 3; ++i) z.push_back(RandomMatrix(1, 2, i));
  const VarianceCheck v = CheckVarianceBound(plan, blocks, z, RandomMatrix(2, 2, 9), 200, 1);
  for (int i = 0; i < 3; ++i) {
    EXPECT_EQ(v.empirical[i], 0.0);
    EXPECT_LE(v.empirical[i], v.bound[i]);
  }
  EXPECT_TRUE(v.ok);
}

TEST(VarianceTest, EightNodesTwoClientsWithinBound) {
  const graph::GlobalGraph g = testing::MakeSmallGraph(
      8, {{0, 1}, {1, 2}, {2, 3}, {3, 4}, {4, 5}, {5, 6}, {6, 7}, {0, 4}, {2, 6}}, 3, 2, 4);
  const auto shards = AssignedShards(g, {0, 1, 0, 1, 0, 1, 0, 1}, 2);
  const auto blocks = graph::BuildLaplacianBlocks(shards);
  SamplePlan plan;
  plan.clients = {UniformPlan(4, 2), UniformPlan(4, 2)};
  std::vector<Matrix> z{RandomMatrix(4, 3, 1), RandomMatrix(4, 3, 2)};
  const VarianceCheck v = CheckVarianceBound(plan, blocks, z, RandomMatrix(3, 2, 3), 10000, 8);
  EXPECT_TRUE(v.ok);
  for (int i = 0; i < 2; ++i) {
    EXPECT_GT(v.empirical[i], 0.0);
    EXPECT_LE(v.empirical[i], v.bound[i]);
  }
}

TEST(VarianceTest, SkewedDistributionRaisesQTerm) {
  const auto shards = AssignedShards(PathGraph(), {0, 0, 1}, 2);
  const auto blocks = graph::BuildLaplacianBlocks(shards);
  std::vector<Matrix> z{RandomMatrix(2, 2, 1), RandomMatrix(1, 2, 2)};
  SamplePlan uniform, skewed;
  uniform.clients = {UniformPlan(2, 1), UniformPlan(1, 1)};
  skewed.clients = {WeightedPlan({0.2, 0.8}, 1), UniformPlan(1, 1)};
  const Matrix w = RandomMatrix(2, 2, 5);
  const double qu = CheckVarianceBound(uniform, blocks, z, w, 10, 1).q_term;
  const double qs = CheckVarianceBound(skewed, blocks, z, w, 10, 1).q_term;
  EXPECT_DOUBLE_EQ(qu, 2.0);
  EXPECT_GT(qs, qu);
}

}  // namespace
}  // namespace ppsgcn::sampling
