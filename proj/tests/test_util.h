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

#ifndef PPSGCN_TESTS_TEST_UTIL_H_
#define PPSGCN_TESTS_TEST_UTIL_H_

#include <cstdint>
#include <utility>
#include <vector>

#include "ppsgcn/common.h"
#include "ppsgcn/graph.h"

namespace ppsgcn::testing {

Matrix RandomMatrix(Eigen::Index rows, Eigen::Index cols, std::uint64_t seed,
                    double scale = 1.0);

// Graph from explicit parts; every node is a train node unless masks are
// given.
graph::GlobalGraph MakeSmallGraph(int n, std::vector<std::pair<int, int>> edges,
                                  int feature_dim, int num_classes, std::uint64_t seed);

// 0 - 1 - 2 with features [[1, 0], [0, 1], [1, 1]] and labels [0, 1, 0].
graph::GlobalGraph PathGraph();

graph::GlobalGraph Sbm(int nodes, int blocks, int feature_dim, std::uint64_t seed,
                       double p_in = 0.3, double p_out = 0.05, double mean_scale = 3.0);

std::vector<graph::ClientShard> RandomShards(const graph::GlobalGraph& g, int m,
                                             std::uint64_t seed);

// Shards for an explicit global-id -> client assignment.
std::vector<graph::ClientShard> AssignedShards(const graph::GlobalGraph& g,
                                               std::vector<int> assignment, int m);

}  // namespace ppsgcn::testing

#endif  // PPSGCN_TESTS_TEST_UTIL_H_
