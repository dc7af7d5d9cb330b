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

#ifndef PPSGCN_SYNTH_H_
#define PPSGCN_SYNTH_H_

#include <cstdint>
#include <iosfwd>
#include <string>

#include "ppsgcn/graph.h"

namespace ppsgcn::synth {

// Stochastic block model with contiguous blocks: node v belongs to block
// floor(v * blocks / nodes), which is also its label.
struct SynthSpec {
  int nodes = 64;
  int blocks = 4;
  double p_in = 0.5;
  double p_out = 0.05;
  int feature_dim = 16;
  double sigma = 1.0;       // per-coordinate feature noise
  double mean_scale = 1.0;  // norm of each block mean
  std::uint64_t seed = 0;

  void Validate() const;
};

// Block means are scaled unit vectors e_b when feature_dim >= blocks and
// scaled Gaussian directions otherwise. Masks come from a seeded
// 0.7/0.1/0.2 split.
graph::GlobalGraph GenerateSbm(const SynthSpec& spec);

// Node and edge files in the ingestion format. Values are printed with 17
// significant digits so a reload reproduces the features bit for bit.
void WriteNodes(const graph::GlobalGraph& g, std::ostream& out);
void WriteEdges(const graph::GlobalGraph& g, std::ostream& out);
void WriteFiles(const graph::GlobalGraph& g, const std::string& node_path,
                const std::string& edge_path);

}  // namespace ppsgcn::synth

#endif  // PPSGCN_SYNTH_H_
