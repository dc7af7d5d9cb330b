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

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <set>
#include <sstream>

#include <gtest/gtest.h>

#include "ppsgcn/error.h"
#include "ppsgcn/oracle.h"
#include "test_util.h"

namespace ppsgcn::graph {
namespace {

using ::ppsgcn::testing::AssignedShards;
using ::ppsgcn::testing::PathGraph;
using ::ppsgcn::testing::RandomShards;
using ::ppsgcn::testing::Sbm;

GlobalGraph ParsePath() {
  std::istringstream nodes("0 1 0 0\n1 0 1 1\n\n2 1 1 0\n");
  std::istringstream edges("0 1\n1 2\n");
  NodeTable table = ParseNodes(nodes);
  auto e = ParseEdges(edges, 3);
  return MakeGraph(std::move(table), std::move(e), RandomSplit(3, 1, 0, 0, 0));
}

TEST(ParseTest, PathDegrees) {
  const GlobalGraph g = ParsePath();
  EXPECT_EQ(g.n, 3);
  EXPECT_EQ(g.feature_dim(), 2);
  EXPECT_EQ(g.num_classes, 2);
  EXPECT_EQ(g.Degrees(), (std::vector<int>{1, 2, 1}));
}

TEST(ParseTest, SelfLoopRejected) {
  std::istringstream edges("0 1\n5 5\n");
  EXPECT_THROW(ParseEdges(edges, 8), ValidationError);
}

TEST(ParseTest, EdgeEndpointOutOfRange) {
  std::istringstream edges("0 3\n");
  EXPECT_THROW(ParseEdges(edges, 3), RangeError);
}

TEST(ParseTest, DuplicateAndReversedEdgesCollapse) {
  std::istringstream edges("1 0\n0 1\n2 1\n");
  const auto e = ParseEdges(edges, 3);
  EXPECT_EQ(e, (std::vector<std::pair<int, int>>{{0, 1}, {1, 2}}));
}

TEST(ParseTest, MalformedLineReportsLineNumber) {
  std::istringstream edges("0 1\n1 x\n");
  try {
    ParseEdges(edges, 3);
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 2u);
  }
}

TEST(ParseTest, InconsistentFeatureDimension) {
  std::istringstream nodes("0 1.0 2.0 0\n1 1.0 1\n");
  try {
    ParseNodes(nodes);
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 2u);
  }
}

TEST(ParseTest, NodeIdsMustBeDense) {
  std::istringstream nodes("0 1.0 0\n5 1.0 1\n");
  EXPECT_THROW(ParseNodes(nodes), RangeError);
  std::istringstream dup("0 1.0 0\n0 1.0 1\n");
  EXPECT_THROW(ParseNodes(dup), ValidationError);
}

TEST(MaskTest, JsonMasks) {
  std::istringstream in(R"({"train": [0, 2], "val": [1], "test": []})");
  const Masks m = ParseMasksJson(in, 3);
  EXPECT_EQ(m.train, (std::vector<bool>{true, false, true}));
  EXPECT_EQ(m.val, (std::vector<bool>{false, true, false}));
  EXPECT_EQ(m.test, (std::vector<bool>{false, false, false}));
}

TEST(MaskTest, JsonOverlapAndRange) {
  std::istringstream overlap(R"({"train": [0], "val": [0]})");
  EXPECT_THROW(ParseMasksJson(overlap, 3), ValidationError);
  std::istringstream range(R"({"train": [3]})");
  EXPECT_THROW(ParseMasksJson(range, 3), RangeError);
}

TEST(MaskTest, RandomSplitIsDisjointAndSized) {
  const Masks m = RandomSplit(100, 0.7, 0.1, 0.2, 5);
  int tr = 0, va = 0, te = 0;
  for (int v = 0; v < 100; ++v) {
    EXPECT_LE(m.train[v] + m.val[v] + m.test[v], 1);
    tr += m.train[v];
    va += m.val[v];
    te += m.test[v];
  }
  EXPECT_EQ(tr, 70);
  EXPECT_EQ(va, 10);
  EXPECT_EQ(te, 20);
  EXPECT_THROW(RandomSplit(10, 0.8, 0.3, 0.0, 0), ValidationError);
}

TEST(PartitionTest, SingleClient) {
  const Partition p = PartitionRandom(4, 1, 3);
  EXPECT_EQ(p.assignment, (std::vector<int>{0, 0, 0, 0}));
  EXPECT_EQ(p.local_index, (std::vector<int>{0, 1, 2, 3}));
}

TEST(PartitionTest, OneNodePerClient) {
  const Partition p = PartitionRandom(4, 4, 11);
  for (int c = 0; c < 4; ++c) EXPECT_EQ(p.size(c), 1);
}

TEST(PartitionTest, RandomSizesAreNonEmpty) {
  const Partition p = PartitionRandom(100, 4, 7);
  int total = 0;
  for (int c = 0; c < 4; ++c) {
    EXPECT_GE(p.size(c), 1);
    total += p.size(c);
  }
  EXPECT_EQ(total, 100);
  EXPECT_EQ(PartitionRandom(100, 4, 7).assignment, p.assignment);
}

TEST(PartitionTest, MoreClientsThanNodes) {
  EXPECT_THROW(PartitionRandom(3, 4, 0), InfeasibleError);
}

TEST(PartitionTest, FileMissingNode) {
  std::istringstream in("0 0\n2 1\n");
  EXPECT_THROW(ParsePartition(in, 3), ValidationError);
  std::istringstream ok("0 0\n1 1\n2 1\n");
  EXPECT_EQ(ParsePartition(ok, 3).m, 2);
}

TEST(ShardTest, SingleClientHoldsEverything) {
  const GlobalGraph g = PathGraph();
  const auto shards = AssignedShards(g, {0, 0, 0}, 1);
  ASSERT_EQ(shards.size(), 1u);
  EXPECT_EQ(shards[0].cross[0].nonZeros(), 0);
  Matrix dense = Matrix(shards[0].intra);
  Matrix expected(3, 3);
  expected << 0, 1, 0, 1, 0, 1, 0, 1, 0;
  EXPECT_EQ(dense, expected);
}

TEST(ShardTest, PathSplitCrossBlock) {
  const auto shards = AssignedShards(PathGraph(), {0, 0, 1}, 2);
  const ClientShard& s0 = shards[0];
  EXPECT_EQ(s0.degree, (std::vector<int>{1, 2}));
  ASSERT_EQ(s0.cross[1].rows(), 2);
  ASSERT_EQ(s0.cross[1].cols(), 1);
  EXPECT_EQ(s0.cross[1].nonZeros(), 1);
  EXPECT_EQ(s0.cross[1].coeff(1, 0), 1.0);
  EXPECT_EQ(shards[1].degree, (std::vector<int>{1}));
}

TEST(ShardTest, ReassemblyIsLossless) {
  for (std::uint64_t seed = 0; seed < 6; ++seed) {
    const GlobalGraph g = Sbm(40, 3, 4, seed);
    for (int m : {1, 2, 5}) {
      const auto shards = RandomShards(g, m, seed + 100);
      EXPECT_EQ(ReassembleEdges(shards), g.edges) << "seed " << seed << " m " << m;
    }
  }
}

TEST(LaplacianTest, EdgelessGraphIsIdentity) {
  const GlobalGraph g = testing::MakeSmallGraph(5, {}, 2, 2, 1);
  const auto blocks = BuildLaplacianBlocks(RandomShards(g, 2, 3));
  for (const auto& b : blocks) {
    const Matrix self = Matrix(b.self);
    EXPECT_TRUE(self.isApprox(Matrix::Identity(self.rows(), self.cols())));
  }
}

TEST(LaplacianTest, PathSingleClientEntry) {
  const auto blocks = BuildLaplacianBlocks(AssignedShards(PathGraph(), {0, 0, 0}, 1));
  EXPECT_NEAR(blocks[0].self.coeff(0, 1), 1.0 / (std::sqrt(2.0) * std::sqrt(3.0)), 1e-15);
}

TEST(LaplacianTest, PathSplitCrossEntryMatchesDense) {
  const GlobalGraph g = PathGraph();
  const auto blocks = BuildLaplacianBlocks(AssignedShards(g, {0, 0, 1}, 2));
  const Matrix dense = oracle::DenseLaplacian(g);
  // Ltilde_01 lives on client 1, the column owner.
  EXPECT_NEAR(blocks[0].scaler[1] * blocks[1].outgoing[0].coeff(1, 0), dense(1, 2), 1e-15);
}

TEST(LaplacianTest, BlocksReassembleDenseOperator) {
  for (std::uint64_t seed = 0; seed < 4; ++seed) {
    const GlobalGraph g = Sbm(30, 3, 2, seed);
    const Matrix dense = oracle::DenseLaplacian(g);
    for (int m : {1, 3}) {
      const Partition p = PartitionRandom(g.n, m, seed);
      const auto blocks = BuildLaplacianBlocks(Shard(g, p));
      Matrix rebuilt = Matrix::Zero(g.n, g.n);
      for (int j = 0; j < m; ++j) {
        for (int i = 0; i < m; ++i) {
          const Matrix block = i == j ? Matrix(blocks[j].self)
                                      : Matrix(blocks[i].scaler.asDiagonal() *
                                               Matrix(blocks[j].outgoing[i]));
          for (int a = 0; a < p.size(i); ++a)
            for (int b = 0; b < p.size(j); ++b)
              rebuilt(p.members[i][a], p.members[j][b]) = block(a, b);
        }
      }
      EXPECT_LE((rebuilt - dense).cwiseAbs().maxCoeff(), 1e-15);
    }
  }
}

TEST(LaplacianTest, IsolatedNodeRowIsUnit) {
  const GlobalGraph g = testing::MakeSmallGraph(4, {{0, 1}, {1, 2}}, 2, 2, 1);
  const auto blocks = BuildLaplacianBlocks(AssignedShards(g, {0, 0, 0, 0}, 1));
  const Matrix self = Matrix(blocks[0].self);
  EXPECT_EQ(self(3, 3), 1.0);
  EXPECT_EQ(self.row(3).sum(), 1.0);
}

// Runs only when PPSGCN_PUBMED_DIR points at nodes.txt / edges.txt in the
// ingestion format.
TEST(DatasetTest, PubmedStatistics) {
  const char* dir = std::getenv("PPSGCN_PUBMED_DIR");
  if (dir == nullptr) GTEST_SKIP() << "PPSGCN_PUBMED_DIR not set";
  const std::filesystem::path base(dir);
  MaskSpec masks;
  const GlobalGraph g = BuildGlobal((base / "nodes.txt").string(), (base / "edges.txt").string(), masks);
  EXPECT_EQ(g.n, 19717);
  EXPECT_EQ(g.edges.size(), 44338u);
  EXPECT_EQ(g.feature_dim(), 500);
  EXPECT_EQ(g.num_classes, 3);
}

}  // namespace
}  // namespace ppsgcn::graph
