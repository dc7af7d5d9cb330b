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

#include "ppsgcn/synth.h"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <ostream>
#include <random>

#include "ppsgcn/common.h"
#include "ppsgcn/error.h"

namespace ppsgcn::synth {
namespace {

std::string Format(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

void SynthSpec::Validate() const {
  if (nodes < 1 || blocks < 1) throw ValidationError("nodes and blocks must be >= 1");
  if (blocks > nodes) throw ValidationError("more blocks than nodes");
  if (feature_dim < 1) throw ValidationError("feature_dim must be >= 1");
  if (!(p_in >= 0 && p_in <= 1) || !(p_out >= 0 && p_out <= 1))
    throw RangeError("edge probabilities must lie in [0, 1]");
  if (p_out > p_in) throw ValidationError("p_out must not exceed p_in");
  if (!(sigma >= 0) || !std::isfinite(sigma) || !std::isfinite(mean_scale))
    throw ValidationError("sigma must be finite and non-negative");
}

graph::GlobalGraph GenerateSbm(const SynthSpec& spec) {
  spec.Validate();
  const int n = spec.nodes, b = spec.blocks, d = spec.feature_dim;
  std::vector<int> block(n);
  for (int v = 0; v < n; ++v)
    block[v] = static_cast<int>(static_cast<std::int64_t>(v) * b / n);

  std::mt19937_64 feat_rng(DeriveSeed(spec.seed, {1}));
  std::normal_distribution<double> gauss(0.0, 1.0);
  Matrix means = Matrix::Zero(b, d);
  if (d >= b) {
    for (int k = 0; k < b; ++k) means(k, k) = spec.mean_scale;
  } else {
    for (int k = 0; k < b; ++k) {
      for (int j = 0; j < d; ++j) means(k, j) = gauss(feat_rng);
      means.row(k) *= spec.mean_scale / means.row(k).norm();
    }
  }
  graph::NodeTable nodes;
  nodes.features.resize(n, d);
  nodes.labels = block;
  for (int v = 0; v < n; ++v)
    for (int j = 0; j < d; ++j)
      nodes.features(v, j) = means(block[v], j) + spec.sigma * gauss(feat_rng);

  std::mt19937_64 edge_rng(DeriveSeed(spec.seed, {2}));
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  std::vector<std::pair<int, int>> edges;
  for (int u = 0; u < n; ++u)
    for (int v = u + 1; v < n; ++v) {
      const double p = block[u] == block[v] ? spec.p_in : spec.p_out;
      if (unif(edge_rng) < p) edges.emplace_back(u, v);
    }
  graph::Masks masks = graph::RandomSplit(n, 0.7, 0.1, 0.2, DeriveSeed(spec.seed, {3}));
  graph::GlobalGraph g = graph::MakeGraph(std::move(nodes), std::move(edges), std::move(masks));
  g.num_classes = b;
  return g;
}

void WriteNodes(const graph::GlobalGraph& g, std::ostream& out) {
  for (int v = 0; v < g.n; ++v) {
    out << v;
    for (Eigen::Index j = 0; j < g.features.cols(); ++j) out << ' ' << Format(g.features(v, j));
    out << ' ' << g.labels[v] << '\n';
  }
}

void WriteEdges(const graph::GlobalGraph& g, std::ostream& out) {
  for (const auto& [u, v] : g.edges) out << u << ' ' << v << '\n';
}

void WriteFiles(const graph::GlobalGraph& g, const std::string& node_path,
                const std::string& edge_path) {
  std::ofstream nodes(node_path), edges(edge_path);
  if (!nodes || !edges) throw ValidationError("cannot write synthetic graph files");
  WriteNodes(g, nodes);
  WriteEdges(g, edges);
  if (!nodes || !edges) throw ValidationError("write failed");
}

}  // namespace ppsgcn::synth
