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

#ifndef PPSGCN_ORACLE_H_
#define PPSGCN_ORACLE_H_

#include <optional>
#include <vector>

#include "ppsgcn/common.h"
#include "ppsgcn/gcn.h"
#include "ppsgcn/graph.h"
#include "ppsgcn/trainer.h"

namespace ppsgcn::oracle {

// Dense single-machine GCN used as ground truth. It reads the global graph
// directly and shares no propagation, sampling or aggregation code with the
// distributed path.
struct OracleOptions {
  // Rows/columns kept, as global ids in output order; all nodes if unset.
  std::optional<std::vector<int>> subset;
  // Weight multiplied into each kept column (e.g. 1/p); ones if unset.
  std::optional<std::vector<double>> column_weights;
  // Global ids whose loss is averaged; the train mask if unset.
  std::optional<std::vector<bool>> loss_mask;
  bool identity_hidden = false;  // identity instead of ReLU on hidden layers
  bool identity_output = false;  // identity output and no loss
  int max_nodes = 4096;
};

struct OracleResult {
  Matrix laplacian;          // restricted, column-weighted
  std::vector<Matrix> pre;   // H^l, l = 1..L
  std::vector<Matrix> out;   // Z^l
  double loss = 0;
  std::vector<Matrix> gradients;  // dL/dW^l
};

// (D+I)^-1/2 (A+I) (D+I)^-1/2 as a dense matrix.
Matrix DenseLaplacian(const graph::GlobalGraph& g, int max_nodes = 4096);

OracleResult ForwardBackward(const graph::GlobalGraph& g, const gcn::ModelParams& params,
                             const OracleOptions& options = {});

// max |a - b| / max |b|, the error relative to the reference's largest entry.
double MaxRelativeError(const Matrix& a, const Matrix& b);

struct Comparison {
  double activations = 0;  // worst layer, pre- and post-activation
  double loss = 0;
  double gradients = 0;    // worst layer
  double max() const;
};

// Runs one full-batch, non-updating pass of the federation and compares
// every client's activations, the loss and the weight gradients with the
// oracle on the same global graph. Shards must come from `g`.
Comparison CompareFullBatch(trainer::Federation& federation, const graph::GlobalGraph& g);

}  // namespace ppsgcn::oracle

#endif  // PPSGCN_ORACLE_H_
