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

#ifndef PPSGCN_SAMPLING_H_
#define PPSGCN_SAMPLING_H_

#include <cstdint>
#include <random>
#include <vector>

#include "ppsgcn/common.h"
#include "ppsgcn/graph.h"

namespace ppsgcn::sampling {

enum class Distribution { kUniform, kDegree };

// Draw distribution Q_i of one client over its candidate local nodes.
struct ClientPlan {
  int num_local = 0;
  std::vector<int> candidates;  // ascending local ids with Q > 0
  std::vector<double> probs;    // Q over candidates, sums to 1
  int draws = 0;                // s_i
  std::vector<double> cdf;      // running sum of probs; see ComputeCdf

  void ComputeCdf();
  // Q(v) for any local node; zero outside the candidate set.
  double Q(int local) const;
  void Validate() const;
};

struct SamplePlan {
  std::vector<ClientPlan> clients;
  void Validate() const;
};

// Builds Q_i (uniform or (degree+1)-proportional) over every local node, or
// only over train-mask nodes when train_only is set, and splits batch_size
// draws across clients proportionally to their candidate counts (largest
// remainder, at least one draw for clients with candidates).
SamplePlan MakePlan(const std::vector<graph::ClientShard>& shards,
                    int batch_size, Distribution distribution,
                    bool train_only);

// 1 - (1 - q)^s.
double InclusionProbability(double q, int draws);

struct SampleRound {
  std::vector<std::vector<int>> sampled;     // sorted, unique local ids
  std::vector<std::vector<double>> inclusion;  // p(v) for every local node

  int total() const;  // n_S
  int size(int client) const {
    return static_cast<int>(sampled[client].size());
  }
  // p(v) for each sampled node of a client, in sampled order.
  Vector SampledInclusion(int client) const;
};

// s_i independent draws with replacement from Q_i, deduplicated.
std::vector<int> DrawClient(const ClientPlan& plan, std::mt19937_64& rng);

// Fills in closed-form inclusion probabilities for the given sampled sets.
SampleRound MakeRound(const SamplePlan& plan,
                      std::vector<std::vector<int>> sampled);

// Each client draws from its own sub-stream derived from (seed, client), so
// the result does not depend on the order clients are visited.
SampleRound DrawRound(const SamplePlan& plan, std::uint64_t seed);

// Every node of every client with p = 1.
SampleRound FullRound(const std::vector<int>& client_sizes);

// Laplacian blocks of one client restricted to sampled rows and columns.
struct RestrictedBlocks {
  SparseMatrix self;                  // |S_j| x |S_j|
  std::vector<SparseMatrix> outgoing;  // [i]: |S_i| x |S_j|; [j] is empty
  Vector scaler;                      // |S_j|
};

// Restriction of `blocks` (owned by blocks.client_id) to the round's sampled
// nodes. With `normalize`, every column u is multiplied by 1/p(u).
RestrictedBlocks RestrictBlocks(const graph::LaplacianBlocks& blocks,
                                const SampleRound& round, bool normalize);

// Horvitz-Thompson estimate of H_i = sum_j L_ij O_j for every local row of
// client i (not only sampled rows): column u contributes only if sampled and
// is weighted by 1/p(u). `inputs[j]` is the full n_j x d matrix O_j.
Matrix EstimateHidden(int client, const std::vector<graph::LaplacianBlocks>& blocks,
                      const SampleRound& round,
                      const std::vector<Matrix>& inputs);

// Exact H_i = sum_j L_ij O_j from the blocks.
Matrix ExactHidden(int client, const std::vector<graph::LaplacianBlocks>& blocks,
                   const std::vector<Matrix>& inputs);

struct VarianceCheck {
  std::vector<double> empirical;  // per client: sum_v sum_k Var(H_hat[v,k])
  std::vector<double> bound;      // per client closed-form bound
  double w = 0;                   // max_k ||W[:,k]||^2
  double z = 0;                   // max_v ||Z[v,:]||^2
  double l_inf = 0;               // max |L[v,u]|
  double q_term = 0;              // sum_j sum_u (1/Q_j(u) - 1)
  bool ok = false;
};

// Monte Carlo estimate of the per-client total variance of EstimateHidden
// for one layer with input activations `layer_input[j]` (n_j x d^{l-1}) and
// weight `weight` (d^{l-1} x d^l), compared with
//   w * z * n_i * d^l * max|L|^2 * sum_j sum_u (1/Q_j(u) - 1).
// Every local node must be a candidate of the plan.
VarianceCheck CheckVarianceBound(const SamplePlan& plan,
                                 const std::vector<graph::LaplacianBlocks>& blocks,
                                 const std::vector<Matrix>& layer_input,
                                 const Matrix& weight, int rounds,
                                 std::uint64_t seed);

}  // namespace ppsgcn::sampling

#endif  // PPSGCN_SAMPLING_H_
