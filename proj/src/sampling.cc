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

#include <algorithm>
#include <cmath>
#include <numeric>

#include "ppsgcn/error.h"

namespace ppsgcn::sampling {

void ClientPlan::ComputeCdf() {
  cdf.resize(probs.size());
  std::partial_sum(probs.begin(), probs.end(), cdf.begin());
  if (!cdf.empty()) cdf.back() = 1.0;
}

double ClientPlan::Q(int local) const {
  auto it = std::lower_bound(candidates.begin(), candidates.end(), local);
  if (it == candidates.end() || *it != local) return 0.0;
  return probs[it - candidates.begin()];
}

void ClientPlan::Validate() const {
  if (candidates.size() != probs.size())
    throw ValidationError("plan: candidates/probs size mismatch");
  if (candidates.empty()) {
    if (draws != 0) throw ValidationError("plan: draws without candidates");
    return;
  }
  if (draws < 1) throw ValidationError("plan: draw count must be >= 1");
  double sum = 0;
  for (std::size_t k = 0; k < probs.size(); ++k) {
    if (!(probs[k] > 0)) throw ValidationError("plan: Q must be positive");
    if (candidates[k] < 0 || candidates[k] >= num_local)
      throw RangeError("plan: candidate out of range");
    if (k > 0 && candidates[k] <= candidates[k - 1])
      throw ValidationError("plan: candidates must be ascending");
    sum += probs[k];
  }
  if (std::abs(sum - 1.0) > 1e-12)
    throw ValidationError("plan: Q does not sum to 1");
}

void SamplePlan::Validate() const {
  for (const ClientPlan& c : clients) c.Validate();
}

SamplePlan MakePlan(const std::vector<graph::ClientShard>& shards,
                    int batch_size, Distribution distribution,
                    bool train_only) {
  SamplePlan plan;
  plan.clients.resize(shards.size());
  long long total_candidates = 0;
  for (std::size_t i = 0; i < shards.size(); ++i) {
    const auto& s = shards[i];
    ClientPlan& c = plan.clients[i];
    c.num_local = s.num_local;
    std::vector<double> weight;
    for (int v = 0; v < s.num_local; ++v) {
      if (train_only && (s.masks.train.empty() || !s.masks.train[v])) continue;
      c.candidates.push_back(v);
      weight.push_back(distribution == Distribution::kDegree
                           ? static_cast<double>(s.degree[v]) + 1.0
                           : 1.0);
    }
    const double sum = std::accumulate(weight.begin(), weight.end(), 0.0);
    for (double w : weight) c.probs.push_back(w / sum);
    total_candidates += static_cast<long long>(c.candidates.size());
  }
  if (total_candidates == 0) throw ValidationError("plan: no candidate nodes");
  if (batch_size < 1) throw ValidationError("plan: batch size must be >= 1");

  // Largest-remainder apportionment of batch_size over candidate counts.
  std::vector<std::pair<double, std::size_t>> remainders;
  int assigned = 0;
  for (std::size_t i = 0; i < shards.size(); ++i) {
    ClientPlan& c = plan.clients[i];
    if (c.candidates.empty()) continue;
    const double exact = static_cast<double>(batch_size) *
                         static_cast<double>(c.candidates.size()) /
                         static_cast<double>(total_candidates);
    c.draws = static_cast<int>(std::floor(exact));
    assigned += c.draws;
    remainders.emplace_back(exact - c.draws, i);
  }
  std::stable_sort(remainders.begin(), remainders.end(),
                   [](const auto& a, const auto& b) { return a.first > b.first; });
  for (std::size_t k = 0; assigned < batch_size && k < remainders.size(); ++k) {
    ++plan.clients[remainders[k].second].draws;
    ++assigned;
  }
  for (ClientPlan& c : plan.clients) {
    if (!c.candidates.empty()) c.draws = std::max(c.draws, 1);
    c.ComputeCdf();
  }
  plan.Validate();
  return plan;
}

double InclusionProbability(double q, int draws) {
  if (q <= 0) return 0.0;
  if (q >= 1) return 1.0;
  return -std::expm1(static_cast<double>(draws) * std::log1p(-q));
}

int SampleRound::total() const {
  int n = 0;
  for (const auto& s : sampled) n += static_cast<int>(s.size());
  return n;
}

Vector SampleRound::SampledInclusion(int client) const {
  const auto& ids = sampled[client];
  Vector p(ids.size());
  for (std::size_t k = 0; k < ids.size(); ++k) p[k] = inclusion[client][ids[k]];
  return p;
}

std::vector<int> DrawClient(const ClientPlan& plan, std::mt19937_64& rng) {
  std::vector<int> out;
  if (plan.candidates.empty()) return out;
  std::vector<double> local_cdf;
  const std::vector<double>* cdf = &plan.cdf;
  if (plan.cdf.size() != plan.probs.size()) {
    local_cdf.resize(plan.probs.size());
    std::partial_sum(plan.probs.begin(), plan.probs.end(), local_cdf.begin());
    local_cdf.back() = 1.0;
    cdf = &local_cdf;
  }
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  out.reserve(plan.draws);
  for (int k = 0; k < plan.draws; ++k) {
    const double u = unit(rng);
    auto it = std::upper_bound(cdf->begin(), cdf->end(), u);
    if (it == cdf->end()) --it;
    out.push_back(plan.candidates[it - cdf->begin()]);
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

SampleRound MakeRound(const SamplePlan& plan,
                      std::vector<std::vector<int>> sampled) {
  if (sampled.size() != plan.clients.size())
    throw ValidationError("round: client count mismatch");
  SampleRound round;
  round.inclusion.resize(plan.clients.size());
  for (std::size_t i = 0; i < plan.clients.size(); ++i) {
    const ClientPlan& c = plan.clients[i];
    round.inclusion[i].assign(c.num_local, 0.0);
    for (std::size_t k = 0; k < c.candidates.size(); ++k)
      round.inclusion[i][c.candidates[k]] =
          InclusionProbability(c.probs[k], c.draws);
    auto& ids = sampled[i];
    std::sort(ids.begin(), ids.end());
    ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
    for (int v : ids)
      if (v < 0 || v >= c.num_local || round.inclusion[i][v] <= 0)
        throw ValidationError("round: sampled node outside plan support");
  }
  round.sampled = std::move(sampled);
  return round;
}

SampleRound DrawRound(const SamplePlan& plan, std::uint64_t seed) {
  std::vector<std::vector<int>> sampled(plan.clients.size());
  for (std::size_t i = 0; i < plan.clients.size(); ++i) {
    std::mt19937_64 rng(DeriveSeed(seed, {i}));
    sampled[i] = DrawClient(plan.clients[i], rng);
  }
  return MakeRound(plan, std::move(sampled));
}

SampleRound FullRound(const std::vector<int>& client_sizes) {
  SampleRound round;
  for (int n : client_sizes) {
    std::vector<int> ids(n);
    std::iota(ids.begin(), ids.end(), 0);
    round.sampled.push_back(std::move(ids));
    round.inclusion.emplace_back(n, 1.0);
  }
  return round;
}

namespace {

// Rows `rows`, columns `cols` of `a`; column c scaled by col_scale[c] when
// given. Index lists are ascending.
SparseMatrix Restrict(const SparseMatrix& a, const std::vector<int>& rows,
                      const std::vector<int>& cols, const Vector* col_scale) {
  std::vector<int> col_pos(a.cols(), -1);
  for (std::size_t k = 0; k < cols.size(); ++k) col_pos[cols[k]] = static_cast<int>(k);
  std::vector<Eigen::Triplet<double>> trips;
  for (std::size_t r = 0; r < rows.size(); ++r)
    for (SparseMatrix::InnerIterator it(a, rows[r]); it; ++it) {
      const int c = col_pos[it.col()];
      if (c < 0) continue;
      const double v = col_scale ? it.value() * (*col_scale)[c] : it.value();
      trips.emplace_back(static_cast<int>(r), c, v);
    }
  SparseMatrix out(static_cast<Eigen::Index>(rows.size()),
                   static_cast<Eigen::Index>(cols.size()));
  out.setFromTriplets(trips.begin(), trips.end());
  return out;
}

}  // namespace

RestrictedBlocks RestrictBlocks(const graph::LaplacianBlocks& blocks,
                                const SampleRound& round, bool normalize) {
  const int j = blocks.client_id;
  const auto& own = round.sampled[j];
  Vector inv_p;
  if (normalize) inv_p = round.SampledInclusion(j).cwiseInverse();
  const Vector* scale = normalize ? &inv_p : nullptr;
  RestrictedBlocks out;
  out.self = Restrict(blocks.self, own, own, scale);
  out.outgoing.resize(blocks.outgoing.size());
  for (std::size_t i = 0; i < blocks.outgoing.size(); ++i) {
    const Eigen::Index n = static_cast<Eigen::Index>(own.size());
    out.outgoing[i] = static_cast<int>(i) == j
                          ? SparseMatrix(n, n)
                          : Restrict(blocks.outgoing[i], round.sampled[i], own, scale);
  }
  out.scaler.resize(static_cast<Eigen::Index>(own.size()));
  for (std::size_t k = 0; k < own.size(); ++k) out.scaler[k] = blocks.scaler[own[k]];
  return out;
}

namespace {

// diag(I_u / p(u)) * input for one client.
Matrix WeightedSampledRows(const SampleRound& round, int client,
                           const Matrix& input) {
  Matrix out = Matrix::Zero(input.rows(), input.cols());
  for (int u : round.sampled[client])
    out.row(u) = input.row(u) / round.inclusion[client][u];
  return out;
}

}  // namespace

Matrix EstimateHidden(int client, const std::vector<graph::LaplacianBlocks>& blocks,
                      const SampleRound& round,
                      const std::vector<Matrix>& inputs) {
  Matrix remote = Matrix::Zero(blocks[client].self.rows(), inputs[client].cols());
  for (std::size_t j = 0; j < blocks.size(); ++j) {
    if (static_cast<int>(j) == client) continue;
    remote += blocks[j].outgoing[client] *
              WeightedSampledRows(round, static_cast<int>(j), inputs[j]);
  }
  return blocks[client].self * WeightedSampledRows(round, client, inputs[client]) +
         blocks[client].scaler.asDiagonal() * remote;
}

Matrix ExactHidden(int client, const std::vector<graph::LaplacianBlocks>& blocks,
                   const std::vector<Matrix>& inputs) {
  Matrix remote = Matrix::Zero(blocks[client].self.rows(), inputs[client].cols());
  for (std::size_t j = 0; j < blocks.size(); ++j)
    if (static_cast<int>(j) != client)
      remote += blocks[j].outgoing[client] * inputs[j];
  return blocks[client].self * inputs[client] +
         blocks[client].scaler.asDiagonal() * remote;
}

VarianceCheck CheckVarianceBound(const SamplePlan& plan,
                                 const std::vector<graph::LaplacianBlocks>& blocks,
                                 const std::vector<Matrix>& layer_input,
                                 const Matrix& weight, int rounds,
                                 std::uint64_t seed) {
  if (rounds < 2) throw ValidationError("variance check needs >= 2 rounds");
  const std::size_t m = blocks.size();
  VarianceCheck out;
  for (Eigen::Index k = 0; k < weight.cols(); ++k)
    out.w = std::max(out.w, weight.col(k).squaredNorm());
  for (const Matrix& z : layer_input)
    for (Eigen::Index v = 0; v < z.rows(); ++v)
      out.z = std::max(out.z, z.row(v).squaredNorm());
  for (const auto& b : blocks) {
    for (int r = 0; r < b.self.outerSize(); ++r)
      for (SparseMatrix::InnerIterator it(b.self, r); it; ++it)
        out.l_inf = std::max(out.l_inf, std::abs(it.value()));
    // Off-diagonal blocks of L are scaler_i (row) * outgoing entries; the
    // row scaler is not visible to the column owner, so assemble it here.
    for (std::size_t i = 0; i < m; ++i) {
      if (static_cast<int>(i) == b.client_id) continue;
      const SparseMatrix& t = b.outgoing[i];
      for (int r = 0; r < t.outerSize(); ++r)
        for (SparseMatrix::InnerIterator it(t, r); it; ++it)
          out.l_inf = std::max(out.l_inf, std::abs(blocks[i].scaler[r] * it.value()));
    }
  }
  for (const ClientPlan& c : plan.clients) {
    if (static_cast<int>(c.candidates.size()) != c.num_local)
      throw ValidationError("variance check requires full-support Q");
    for (double q : c.probs) out.q_term += 1.0 / q - 1.0;
  }

  std::vector<Matrix> projected(m);
  for (std::size_t j = 0; j < m; ++j) projected[j] = layer_input[j] * weight;
  // Welford accumulation: exact zero variance when every round agrees.
  std::vector<Matrix> mean(m), m2(m);
  for (std::size_t i = 0; i < m; ++i) {
    mean[i] = Matrix::Zero(projected[i].rows(), projected[i].cols());
    m2[i] = mean[i];
  }
  for (int r = 0; r < rounds; ++r) {
    const SampleRound round =
        DrawRound(plan, DeriveSeed(seed, {static_cast<std::uint64_t>(r)}));
    for (std::size_t i = 0; i < m; ++i) {
      const Matrix h = EstimateHidden(static_cast<int>(i), blocks, round, projected);
      const Matrix delta = h - mean[i];
      mean[i] += delta / (r + 1.0);
      m2[i] += delta.cwiseProduct(h - mean[i]);
    }
  }
  out.ok = true;
  const double width = static_cast<double>(weight.cols());
  for (std::size_t i = 0; i < m; ++i) {
    const double empirical = m2[i].cwiseMax(0.0).sum() / (rounds - 1.0);
    const double bound = out.w * out.z * static_cast<double>(projected[i].rows()) *
                         width * out.l_inf * out.l_inf * out.q_term;
    out.empirical.push_back(empirical);
    out.bound.push_back(bound);
    out.ok = out.ok && empirical <= bound;
  }
  return out;
}

}  // namespace ppsgcn::sampling
