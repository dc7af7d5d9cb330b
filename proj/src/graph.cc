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

#include "ppsgcn/graph.h"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <numeric>
#include <random>
#include <sstream>
#include <string_view>

#include "json.hpp"
#include "ppsgcn/error.h"

namespace ppsgcn::graph {
namespace {

std::vector<std::string_view> SplitFields(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i])))
      ++i;
    std::size_t j = i;
    while (j < line.size() &&
           !std::isspace(static_cast<unsigned char>(line[j])))
      ++j;
    if (j > i) out.push_back(line.substr(i, j - i));
    i = j;
  }
  return out;
}

bool IsBlank(std::string_view line) {
  for (char c : line) {
    if (c == '#') return true;
    if (!std::isspace(static_cast<unsigned char>(c))) return false;
  }
  return true;
}

template <typename T>
bool ParseNumber(std::string_view s, T* out) {
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), *out);
  return ec == std::errc() && ptr == s.data() + s.size();
}

std::ifstream OpenOrThrow(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open " + path);
  return in;
}

}  // namespace

std::vector<int> GlobalGraph::Degrees() const {
  std::vector<int> deg(n, 0);
  for (const auto& [u, v] : edges) {
    ++deg[u];
    ++deg[v];
  }
  return deg;
}

void GlobalGraph::Validate() const {
  if (features.rows() != n) throw ValidationError("feature rows != n");
  if (static_cast<int>(labels.size()) != n)
    throw ValidationError("label count != n");
  for (int y : labels)
    if (y < 0 || y >= num_classes) throw RangeError("label out of range");
  for (std::size_t k = 0; k < edges.size(); ++k) {
    const auto& [u, v] = edges[k];
    if (u < 0 || v < 0 || u >= n || v >= n)
      throw RangeError("edge endpoint out of range");
    if (u == v) throw ValidationError("self-loop stored");
    if (u > v) throw ValidationError("edge not normalized to u < v");
    if (k > 0 && !(edges[k - 1] < edges[k]))
      throw ValidationError("edges not sorted and unique");
  }
  const std::vector<bool>* ms[] = {&masks.train, &masks.val, &masks.test};
  for (const auto* mk : ms)
    if (!mk->empty() && static_cast<int>(mk->size()) != n)
      throw ValidationError("mask length != n");
  for (int v = 0; v < n; ++v) {
    int count = 0;
    for (const auto* mk : ms) count += !mk->empty() && (*mk)[v];
    if (count > 1)
      throw ValidationError("node " + std::to_string(v) +
                            " appears in more than one mask");
  }
}

NodeTable ParseNodes(std::istream& in, const std::string& source) {
  struct Row {
    int id;
    std::vector<double> feats;
    int label;
  };
  std::vector<Row> rows;
  std::string line;
  std::size_t lineno = 0;
  int dim = -1;
  while (std::getline(in, line)) {
    ++lineno;
    if (IsBlank(line)) continue;
    auto fields = SplitFields(line);
    if (fields.size() < 2)
      throw ParseError(source, lineno, "expected '<id> <features...> <label>'");
    Row row;
    if (!ParseNumber(fields.front(), &row.id) || row.id < 0)
      throw ParseError(source, lineno, "bad node id");
    if (!ParseNumber(fields.back(), &row.label) || row.label < 0)
      throw ParseError(source, lineno, "bad label");
    const int d = static_cast<int>(fields.size()) - 2;
    if (dim < 0) dim = d;
    if (d != dim)
      throw ParseError(source, lineno,
                       "feature dimension " + std::to_string(d) +
                           " differs from " + std::to_string(dim));
    row.feats.resize(d);
    for (int k = 0; k < d; ++k)
      if (!ParseNumber(fields[k + 1], &row.feats[k]))
        throw ParseError(source, lineno, "bad feature value");
    rows.push_back(std::move(row));
  }
  const int n = static_cast<int>(rows.size());
  NodeTable table;
  table.features = Matrix::Zero(n, std::max(dim, 0));
  table.labels.assign(n, -1);
  std::vector<bool> seen(n, false);
  for (const Row& row : rows) {
    if (row.id >= n)
      throw RangeError(source + ": node id " + std::to_string(row.id) +
                       " >= node count " + std::to_string(n));
    if (seen[row.id])
      throw ValidationError(source + ": duplicate node id " +
                            std::to_string(row.id));
    seen[row.id] = true;
    for (int k = 0; k < dim; ++k) table.features(row.id, k) = row.feats[k];
    table.labels[row.id] = row.label;
  }
  return table;
}

std::vector<std::pair<int, int>> ParseEdges(std::istream& in, int n,
                                            const std::string& source) {
  std::vector<std::pair<int, int>> edges;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (IsBlank(line)) continue;
    auto fields = SplitFields(line);
    int u = 0, v = 0;
    if (fields.size() != 2 || !ParseNumber(fields[0], &u) ||
        !ParseNumber(fields[1], &v) || u < 0 || v < 0)
      throw ParseError(source, lineno, "expected '<u> <v>'");
    if (u >= n || v >= n)
      throw RangeError(source + ":" + std::to_string(lineno) +
                       ": node id >= node count " + std::to_string(n));
    if (u == v)
      throw ValidationError(source + ":" + std::to_string(lineno) +
                            ": self-loop (" + std::to_string(u) + "," +
                            std::to_string(v) + ")");
    edges.emplace_back(std::min(u, v), std::max(u, v));
  }
  std::sort(edges.begin(), edges.end());
  edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
  return edges;
}

Masks ParseMasksJson(std::istream& in, int n) {
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError("<masks>", 0, e.what());
  }
  Masks masks;
  auto fill = [&](const char* key, std::vector<bool>* out) {
    out->assign(n, false);
    if (!j.contains(key)) return;
    for (const auto& id : j.at(key)) {
      if (!id.is_number_integer()) throw ParseError("<masks>", 0, "bad id");
      const long long v = id.get<long long>();
      if (v < 0 || v >= n)
        throw RangeError(std::string("mask '") + key + "' id " +
                         std::to_string(v) + " out of range");
      (*out)[v] = true;
    }
  };
  fill("train", &masks.train);
  fill("val", &masks.val);
  fill("test", &masks.test);
  for (int v = 0; v < n; ++v)
    if (masks.train[v] + masks.val[v] + masks.test[v] > 1)
      throw ValidationError("masks overlap at node " + std::to_string(v));
  return masks;
}

Masks RandomSplit(int n, double train, double val, double test,
                  std::uint64_t seed) {
  if (train < 0 || val < 0 || test < 0 || train + val + test > 1.0 + 1e-9)
    throw ValidationError("split fractions must be nonnegative, sum <= 1");
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::mt19937_64 rng(seed);
  std::shuffle(order.begin(), order.end(), rng);
  const int n_train = static_cast<int>(std::llround(train * n));
  const int n_val = std::min(n - n_train, static_cast<int>(std::llround(val * n)));
  const int n_test =
      std::min(n - n_train - n_val, static_cast<int>(std::llround(test * n)));
  Masks masks{std::vector<bool>(n), std::vector<bool>(n), std::vector<bool>(n)};
  for (int k = 0; k < n_train; ++k) masks.train[order[k]] = true;
  for (int k = n_train; k < n_train + n_val; ++k) masks.val[order[k]] = true;
  for (int k = n_train + n_val; k < n_train + n_val + n_test; ++k)
    masks.test[order[k]] = true;
  return masks;
}

GlobalGraph MakeGraph(NodeTable nodes, std::vector<std::pair<int, int>> edges,
                      Masks masks) {
  GlobalGraph g;
  g.n = static_cast<int>(nodes.labels.size());
  g.features = std::move(nodes.features);
  g.labels = std::move(nodes.labels);
  g.num_classes = g.labels.empty()
                      ? 0
                      : *std::max_element(g.labels.begin(), g.labels.end()) + 1;
  for (auto& [u, v] : edges)
    if (u > v) std::swap(u, v);
  std::sort(edges.begin(), edges.end());
  edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
  g.edges = std::move(edges);
  g.masks = std::move(masks);
  g.Validate();
  return g;
}

GlobalGraph BuildGlobal(const std::string& node_file,
                        const std::string& edge_file, const MaskSpec& spec) {
  auto node_in = OpenOrThrow(node_file);
  NodeTable nodes = ParseNodes(node_in, node_file);
  const int n = static_cast<int>(nodes.labels.size());
  auto edge_in = OpenOrThrow(edge_file);
  auto edges = ParseEdges(edge_in, n, edge_file);
  Masks masks;
  if (spec.json_path) {
    auto mask_in = OpenOrThrow(*spec.json_path);
    masks = ParseMasksJson(mask_in, n);
  } else {
    masks = RandomSplit(n, spec.train, spec.val, spec.test, spec.seed);
  }
  return MakeGraph(std::move(nodes), std::move(edges), std::move(masks));
}

Partition PartitionFromAssignment(std::vector<int> assignment, int m) {
  if (m < 1) throw InfeasibleError("client count must be >= 1");
  Partition p;
  p.m = m;
  p.members.assign(m, {});
  p.local_index.assign(assignment.size(), -1);
  for (std::size_t v = 0; v < assignment.size(); ++v) {
    const int c = assignment[v];
    if (c < 0 || c >= m)
      throw RangeError("client id " + std::to_string(c) + " out of range");
    p.local_index[v] = static_cast<int>(p.members[c].size());
    p.members[c].push_back(static_cast<int>(v));
  }
  for (int c = 0; c < m; ++c)
    if (p.members[c].empty())
      throw ValidationError("client " + std::to_string(c) + " owns no nodes");
  p.assignment = std::move(assignment);
  return p;
}

Partition PartitionRandom(int n, int m, std::uint64_t seed) {
  if (m < 1) throw InfeasibleError("client count must be >= 1");
  if (m > n)
    throw InfeasibleError("cannot place " + std::to_string(n) +
                          " nodes on " + std::to_string(m) +
                          " nonempty clients");
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> pick(0, m - 1);
  std::vector<int> assignment(n);
  // Uniform assignment conditioned on every client being nonempty, by
  // rejection; falls back to seeding one node per client when rejection
  // would be too slow (n close to m).
  for (int attempt = 0; attempt < 256; ++attempt) {
    std::vector<int> count(m, 0);
    for (int v = 0; v < n; ++v) ++count[assignment[v] = pick(rng)];
    if (std::find(count.begin(), count.end(), 0) == count.end())
      return PartitionFromAssignment(std::move(assignment), m);
  }
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::shuffle(order.begin(), order.end(), rng);
  for (int k = 0; k < n; ++k) assignment[order[k]] = k < m ? k : pick(rng);
  return PartitionFromAssignment(std::move(assignment), m);
}

Partition ParsePartition(std::istream& in, int n, const std::string& source) {
  std::vector<int> assignment(n, -1);
  std::string line;
  std::size_t lineno = 0;
  int m = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (IsBlank(line)) continue;
    auto fields = SplitFields(line);
    int id = 0, client = 0;
    if (fields.size() != 2 || !ParseNumber(fields[0], &id) ||
        !ParseNumber(fields[1], &client) || id < 0 || client < 0)
      throw ParseError(source, lineno, "expected '<id> <client>'");
    if (id >= n) throw RangeError(source + ": node id out of range");
    assignment[id] = client;
    m = std::max(m, client + 1);
  }
  for (int v = 0; v < n; ++v)
    if (assignment[v] < 0)
      throw ValidationError(source + ": node " + std::to_string(v) +
                            " has no client");
  return PartitionFromAssignment(std::move(assignment), m);
}

Partition LoadPartition(const std::string& path, int n) {
  auto in = OpenOrThrow(path);
  return ParsePartition(in, n, path);
}

std::vector<ClientShard> Shard(const GlobalGraph& g, const Partition& p) {
  if (static_cast<int>(p.assignment.size()) != g.n)
    throw ValidationError("partition size != node count");
  const int m = p.m;
  const std::vector<int> degree = g.Degrees();
  using Triplet = Eigen::Triplet<double>;
  std::vector<std::vector<std::vector<Triplet>>> trips(
      m, std::vector<std::vector<Triplet>>(m));
  for (const auto& [u, v] : g.edges) {
    const int cu = p.assignment[u], cv = p.assignment[v];
    const int lu = p.local_index[u], lv = p.local_index[v];
    trips[cu][cv].emplace_back(lu, lv, 1.0);
    trips[cv][cu].emplace_back(lv, lu, 1.0);
  }
  auto restrict = [&](const std::vector<bool>& mask, const std::vector<int>& ids) {
    std::vector<bool> out;
    if (mask.empty()) return out;
    out.reserve(ids.size());
    for (int v : ids) out.push_back(mask[v]);
    return out;
  };
  std::vector<ClientShard> shards(m);
  for (int i = 0; i < m; ++i) {
    ClientShard& s = shards[i];
    s.client_id = i;
    s.num_clients = m;
    s.global_ids = p.members[i];
    s.num_local = static_cast<int>(s.global_ids.size());
    s.cross.resize(m);
    for (int j = 0; j < m; ++j) {
      SparseMatrix block(s.num_local, p.size(j));
      block.setFromTriplets(trips[i][j].begin(), trips[i][j].end());
      if (i == j) {
        s.intra = std::move(block);
        s.cross[j] = SparseMatrix(s.num_local, s.num_local);
      } else {
        s.cross[j] = std::move(block);
      }
    }
    s.degree.resize(s.num_local);
    s.features.resize(s.num_local, g.feature_dim());
    s.labels.resize(s.num_local);
    for (int l = 0; l < s.num_local; ++l) {
      const int v = s.global_ids[l];
      s.degree[l] = degree[v];
      s.features.row(l) = g.features.row(v);
      s.labels[l] = g.labels[v];
    }
    s.num_classes = g.num_classes;
    s.masks.train = restrict(g.masks.train, s.global_ids);
    s.masks.val = restrict(g.masks.val, s.global_ids);
    s.masks.test = restrict(g.masks.test, s.global_ids);
  }
  return shards;
}

std::vector<std::pair<int, int>> ReassembleEdges(
    const std::vector<ClientShard>& shards) {
  std::vector<std::pair<int, int>> edges;
  for (const ClientShard& s : shards) {
    auto collect = [&](const SparseMatrix& a, const ClientShard& col_owner) {
      for (int r = 0; r < a.outerSize(); ++r)
        for (SparseMatrix::InnerIterator it(a, r); it; ++it) {
          const int u = s.global_ids[r];
          const int v = col_owner.global_ids[it.col()];
          if (u < v) edges.emplace_back(u, v);
        }
    };
    collect(s.intra, s);
    for (int j = 0; j < s.num_clients; ++j)
      if (j != s.client_id) collect(s.cross[j], shards[j]);
  }
  std::sort(edges.begin(), edges.end());
  return edges;
}

LaplacianBlocks BuildLaplacianBlock(const ClientShard& shard) {
  LaplacianBlocks b;
  b.client_id = shard.client_id;
  const int n = shard.num_local;
  b.scaler.resize(n);
  for (int v = 0; v < n; ++v)
    b.scaler[v] = 1.0 / std::sqrt(static_cast<double>(shard.degree[v]) + 1.0);

  using Triplet = Eigen::Triplet<double>;
  std::vector<Triplet> trips;
  trips.reserve(shard.intra.nonZeros() + n);
  for (int v = 0; v < n; ++v) {
    trips.emplace_back(v, v, b.scaler[v] * b.scaler[v]);
    for (SparseMatrix::InnerIterator it(shard.intra, v); it; ++it)
      trips.emplace_back(v, it.col(), b.scaler[v] * it.value() * b.scaler[it.col()]);
  }
  b.self.resize(n, n);
  b.self.setFromTriplets(trips.begin(), trips.end());

  b.outgoing.resize(shard.num_clients);
  for (int i = 0; i < shard.num_clients; ++i) {
    if (i == shard.client_id) {
      b.outgoing[i] = SparseMatrix(n, n);
      continue;
    }
    const SparseMatrix& a = shard.cross[i];  // n_self x n_i
    std::vector<Triplet> t;
    t.reserve(a.nonZeros());
    for (int v = 0; v < a.outerSize(); ++v)
      for (SparseMatrix::InnerIterator it(a, v); it; ++it)
        t.emplace_back(it.col(), v, it.value() * b.scaler[v]);
    b.outgoing[i].resize(a.cols(), n);
    b.outgoing[i].setFromTriplets(t.begin(), t.end());
  }
  return b;
}

std::vector<LaplacianBlocks> BuildLaplacianBlocks(
    const std::vector<ClientShard>& shards) {
  std::vector<LaplacianBlocks> out;
  out.reserve(shards.size());
  for (const ClientShard& s : shards) out.push_back(BuildLaplacianBlock(s));
  return out;
}

}  // namespace ppsgcn::graph
