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

#ifndef PPSGCN_GCN_H_
#define PPSGCN_GCN_H_

#include <cstdint>
#include <vector>

#include "ppsgcn/common.h"
#include "ppsgcn/graph.h"
#include "ppsgcn/sampling.h"

namespace ppsgcn::gcn {

// Probability floor inside the cross-entropy log.
inline constexpr double kLogClamp = 1e-12;

enum class Activation { kRelu, kIdentity, kSoftmax };

struct ModelParams {
  std::vector<int> dims;        // d^0 = feature dim, ..., d^L = classes
  std::vector<Matrix> weights;  // weights[l - 1] = W^l, d^{l-1} x d^l

  int num_layers() const { return static_cast<int>(weights.size()); }
  std::int64_t scalar_count() const;
  void Validate() const;

  // Glorot-uniform U(-a, a), a = sqrt(6 / (fan_in + fan_out)), one seeded
  // stream so every replica built from the same seed is identical.
  static ModelParams Glorot(std::vector<int> dims, std::uint64_t seed);
};

// Per-round view of a client's sampled Laplacian blocks.
struct ClientView {
  int client_id = 0;
  int num_clients = 0;
  int rows = 0;                        // |V_S_i|
  sampling::RestrictedBlocks forward;  // columns carry 1/p when normalized
  sampling::RestrictedBlocks backward;  // unscaled
  Vector inv_p;                        // 1/p(v) per sampled row, or ones
};

ClientView MakeView(const graph::LaplacianBlocks& blocks,
                    const sampling::SampleRound& round, bool normalize);

// Terms a client produces for one aggregation round: `local` stays on the
// client, `remote[i]` (i != client) goes to client i through the server.
struct SendTerms {
  Matrix local;
  std::vector<Matrix> remote;
};

// local = L_S_jj diag(1/p) O_j, remote[i] = Ltilde_S_ij diag(1/p) O_j.
SendTerms LocalSendTermsForward(const ClientView& view, const Matrix& projected);

struct LayerOutput {
  Matrix pre;  // H
  Matrix out;  // sigma(H)
};

Matrix Activate(const Matrix& pre, Activation act);

// H = local + scaler (.) remote_sum, Z = sigma(H). An empty remote_sum is
// treated as zero. Throws NumericError on non-finite H.
LayerOutput CombineForward(const ClientView& view, const Matrix& local,
                           const Matrix& remote_sum, Activation act);

// Mean of -log(max(Z[v, y_v], kLogClamp)) over rows with loss_rows[v] set;
// zero when no row is selected.
double LocalLoss(const Matrix& probs, const std::vector<int>& labels,
                 const std::vector<bool>& loss_rows);

// Gradient of weight * sum_v NLL(v) with respect to Z^L.
Matrix LossGradientZ(const Matrix& probs, const std::vector<int>& labels,
                     const std::vector<bool>& loss_rows, double weight);

// Gradient of weight * sum_v NLL(v) with respect to the softmax input H^L:
// weight * (Z - Y) on loss rows, zero elsewhere.
Matrix BackwardSeed(const Matrix& probs, const std::vector<int>& labels,
                    const std::vector<bool>& loss_rows, double weight);

// grad_out (.) sigma'(pre) for element-wise activations (ReLU'(0) = 0).
Matrix ActivationBackward(const Matrix& grad_out, const Matrix& pre,
                          Activation act);

// local = L_S_jj M_j, remote[i] = Ltilde_S_ij M_j. No 1/p: the transpose
// of a column-scaled operator scales rows, which CombineBackward applies.
SendTerms LocalSendTermsBackward(const ClientView& view, const Matrix& pre_grad);

// N_i = diag(1/p) (local + scaler (.) remote_sum): the gradient of the loss
// with respect to the layer's aggregated input, before the W^T factor.
Matrix CombineBackward(const ClientView& view, const Matrix& local,
                       const Matrix& remote_sum);

// (Z^{l-1}_S_j)^T N_j; summing over clients gives the gradient of W^l.
Matrix WeightGradientSummand(const Matrix& layer_input, const Matrix& aggregated);

// Gradient with respect to the layer input Z^{l-1}: N W^T.
Matrix InputGradient(const Matrix& aggregated, const Matrix& weight);

// Per-layer matrices of one client for one forward/backward pass. Index
// l - 1 refers to layer l.
struct LayerCache {
  std::vector<Matrix> input;      // Z^{l-1} as fed to layer l (after dropout)
  std::vector<Matrix> projected;  // O^{l-1} = input * W^l
  std::vector<Matrix> pre;        // H^l
  std::vector<Matrix> out;        // Z^l
  std::vector<Matrix> dropout;    // mask * 1/(1-rate) applied to out, or empty
  std::vector<Matrix> pre_grad;   // M^l
  std::vector<Matrix> aggregated;  // N^l

  void Reset(int layers);
  // Scalars held by the cached layer inputs.
  std::int64_t ActivationScalars() const;
};

}  // namespace ppsgcn::gcn

#endif  // PPSGCN_GCN_H_
