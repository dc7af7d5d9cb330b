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

#ifndef PPSGCN_GRAPH_H_
#define PPSGCN_GRAPH_H_

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "ppsgcn/common.h"

namespace ppsgcn::graph {

struct Masks {
  std::vector<bool> train;
  std::vector<bool> val;
  std::vector<bool> test;
};

// Undirected, unweighted graph with node features and labels. Self-loops are
// never stored; the +I of the propagation operator is applied analytically.
struct GlobalGraph {
  int n = 0;
  // Unordered pairs stored as (u, v) with u < v, sorted, unique.
  std::vector<std::pair<int, int>> edges;
  Matrix features;  // n x d
  std::vector<int> labels;
  int num_classes = 0;
  Masks masks;

  int feature_dim() const { return static_cast<int>(features.cols()); }
  std::vector<int> Degrees() const;
  // Throws ValidationError / RangeError when an invariant does not hold.
  void Validate() const;
};

// Either a JSON file {"train":[..],"val":[..],"test":[..]} or a seeded
// fractional split.
struct MaskSpec {
  std::optional<std::string> json_path;
  double train = 0.7;
  double val = 0.1;
  double test = 0.2;
  std::uint64_t seed = 0;
};

struct NodeTable {
  Matrix features;
  std::vector<int> labels;
};

NodeTable ParseNodes(std::istream& in, const std::string& source = "<nodes>");
std::vector<std::pair<int, int>> ParseEdges(std::istream& in, int n,
                                            const std::string& source =
                                                "<edges>");
Masks ParseMasksJson(std::istream& in, int n);
Masks RandomSplit(int n, double train, double val, double test,
                  std::uint64_t seed);

// Assembles and validates a graph from parsed parts.
GlobalGraph MakeGraph(NodeTable nodes, std::vector<std::pair<int, int>> edges,
                      Masks masks);
GlobalGraph BuildGlobal(const std::string& node_file,
                        const std::string& edge_file, const MaskSpec& masks);

struct Partition {
  int m = 0;
  std::vector<int> assignment;            // global id -> client
  std::vector<int> local_index;           // global id -> local id
  std::vector<std::vector<int>> members;  // client -> ascending global ids

  int size(int client) const {
    return static_cast<int>(members[client].size());
  }
};

// Builds the per-client index maps; every client must own at least one node.
Partition PartitionFromAssignment(std::vector<int> assignment, int m);
Partition PartitionRandom(int n, int m, std::uint64_t seed);
Partition ParsePartition(std::istream& in, int n,
                         const std::string& source = "<partition>");
Partition LoadPartition(const std::string& path, int n);

struct ClientShard {
  int client_id = 0;
  int num_clients = 0;
  int num_local = 0;
  std::vector<int> global_ids;  // local id -> global id
  SparseMatrix intra;           // n_i x n_i
  // cross[j] is the n_i x n_j adjacency to client j; cross[client_id] is
  // an empty n_i x n_i matrix.
  std::vector<SparseMatrix> cross;
  std::vector<int> degree;  // global degree of each local node
  Matrix features;
  std::vector<int> labels;
  int num_classes = 0;
  Masks masks;
};

std::vector<ClientShard> Shard(const GlobalGraph& g, const Partition& p);

// Recovers the global undirected edge list (u < v, sorted) from the shards.
std::vector<std::pair<int, int>> ReassembleEdges(
    const std::vector<ClientShard>& shards);

// Locally computable pieces of the normalized propagation operator
// L = (D+I)^-1/2 (A+I) (D+I)^-1/2 for one client j.
struct LaplacianBlocks {
  int client_id = 0;
  // L_jj = (D_j+I)^-1/2 (A_jj+I) (D_j+I)^-1/2.
  SparseMatrix self;
  // outgoing[i] = A_ij (D_j+I)^-1/2, an n_i x n_j matrix, for i != j. This is
  // the factor client j multiplies into its own rows before sending to i.
  std::vector<SparseMatrix> outgoing;
  // (D_j[v]+1)^-1/2 for every local node v.
  Vector scaler;
};

// Each block is built only from the owning client's shard.
LaplacianBlocks BuildLaplacianBlock(const ClientShard& shard);
std::vector<LaplacianBlocks> BuildLaplacianBlocks(
    const std::vector<ClientShard>& shards);

}  // namespace ppsgcn::graph

#endif  // PPSGCN_GRAPH_H_
