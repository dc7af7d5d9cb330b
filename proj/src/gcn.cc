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

#include "ppsgcn/gcn.h"

#include <algorithm>
#include <cmath>
#include <random>

#include "ppsgcn/error.h"

namespace ppsgcn::gcn {

std::int64_t ModelParams::scalar_count() const {
  std::int64_t n = 0;
  for (const Matrix& w : weights) n += w.size();
  return n;
}

void ModelParams::Validate() const {
  if (dims.size() != weights.size() + 1)
    throw InvariantError("dims/weights length mismatch");
  for (std::size_t l = 0; l < weights.size(); ++l) {
    if (weights[l].rows() != dims[l] || weights[l].cols() != dims[l + 1])
      throw InvariantError("weight " + std::to_string(l + 1) + " has wrong shape");
    if (!weights[l].allFinite())
      throw NumericError("weight " + std::to_string(l + 1) + " not finite");
  }
}

ModelParams ModelParams::Glorot(std::vector<int> dims, std::uint64_t seed) {
  if (dims.size() < 2) throw ValidationError("model needs at least one layer");
  ModelParams p;
  std::mt19937_64 rng(seed);
  for (std::size_t l = 0; l + 1 < dims.size(); ++l) {
    const double a = std::sqrt(6.0 / (dims[l] + dims[l + 1]));
    std::uniform_real_distribution<double> dist(-a, a);
    Matrix w(dims[l], dims[l + 1]);
    for (Eigen::Index c = 0; c < w.cols(); ++c)
      for (Eigen::Index r = 0; r < w.rows(); ++r) w(r, c) = dist(rng);
    p.weights.push_back(std::move(w));
  }
  p.dims = std::move(dims);
  return p;
}

ClientView MakeView(const graph::LaplacianBlocks& blocks,
                    const sampling::SampleRound& round, bool normalize) {
  ClientView v;
  v.client_id = blocks.client_id;
  v.num_clients = static_cast<int>(blocks.outgoing.size());
  v.rows = round.size(v.client_id);
  v.forward = sampling::RestrictBlocks(blocks, round, normalize);
  v.backward = sampling::RestrictBlocks(blocks, round, false);
  v.inv_p = normalize ? Vector(round.SampledInclusion(v.client_id).cwiseInverse())
                      : Vector::Ones(v.rows);
  return v;
}

namespace {

void CheckRows(const Matrix& m, Eigen::Index rows, const char* what) {
  if (m.rows() != rows)
    throw InvariantError(std::string(what) + ": expected " + std::to_string(rows) +
                         " rows, got " + std::to_string(m.rows()));
}

SendTerms Terms(const sampling::RestrictedBlocks& b, int self, const Matrix& x) {
  SendTerms t;
  t.local = b.self * x;
  t.remote.resize(b.outgoing.size());
  for (std::size_t i = 0; i < b.outgoing.size(); ++i)
    if (static_cast<int>(i) != self) t.remote[i] = b.outgoing[i] * x;
  return t;
}

}  // namespace

SendTerms LocalSendTermsForward(const ClientView& view, const Matrix& projected) {
  CheckRows(projected, view.rows, "forward input");
  return Terms(view.forward, view.client_id, projected);
}

Matrix Activate(const Matrix& pre, Activation act) {
  switch (act) {
    case Activation::kIdentity:
      return pre;
    case Activation::kRelu:
      return pre.cwiseMax(0.0);
    case Activation::kSoftmax: {
      Matrix out(pre.rows(), pre.cols());
      for (Eigen::Index r = 0; r < pre.rows(); ++r) {
        const double mx = pre.row(r).maxCoeff();
        out.row(r) = (pre.row(r).array() - mx).exp();
        out.row(r) /= out.row(r).sum();
      }
      return out;
    }
  }
  return pre;
}

LayerOutput CombineForward(const ClientView& view, const Matrix& local,
                           const Matrix& remote_sum, Activation act) {
  CheckRows(local, view.rows, "forward local term");
  LayerOutput out;
  if (remote_sum.size() == 0) {
    out.pre = local;
  } else {
    CheckRows(remote_sum, view.rows, "forward remote sum");
    out.pre = local + view.forward.scaler.asDiagonal() * remote_sum;
  }
  if (!out.pre.allFinite()) throw NumericError("non-finite pre-activation");
  out.out = Activate(out.pre, act);
  return out;
}

double LocalLoss(const Matrix& probs, const std::vector<int>& labels,
                 const std::vector<bool>& loss_rows) {
  double total = 0;
  int count = 0;
  for (Eigen::Index r = 0; r < probs.rows(); ++r) {
    if (!loss_rows[r]) continue;
    total -= std::log(std::max(probs(r, labels[r]), kLogClamp));
    ++count;
  }
  return count == 0 ? 0.0 : total / count;
}

Matrix LossGradientZ(const Matrix& probs, const std::vector<int>& labels,
                     const std::vector<bool>& loss_rows, double weight) {
  Matrix g = Matrix::Zero(probs.rows(), probs.cols());
  for (Eigen::Index r = 0; r < probs.rows(); ++r) {
    if (!loss_rows[r]) continue;
    const double z = probs(r, labels[r]);
    if (z > kLogClamp) g(r, labels[r]) = -weight / z;
  }
  return g;
}

Matrix BackwardSeed(const Matrix& probs, const std::vector<int>& labels,
                    const std::vector<bool>& loss_rows, double weight) {
  Matrix g = Matrix::Zero(probs.rows(), probs.cols());
  for (Eigen::Index r = 0; r < probs.rows(); ++r) {
    if (!loss_rows[r]) continue;
    g.row(r) = weight * probs.row(r);
    g(r, labels[r]) -= weight;
  }
  return g;
}

Matrix ActivationBackward(const Matrix& grad_out, const Matrix& pre,
                          Activation act) {
  switch (act) {
    case Activation::kIdentity:
      return grad_out;
    case Activation::kRelu:
      return (pre.array() > 0.0).select(grad_out, 0.0);
    case Activation::kSoftmax:
      break;
  }
  throw InvariantError("softmax backward is fused into BackwardSeed");
}

SendTerms LocalSendTermsBackward(const ClientView& view, const Matrix& pre_grad) {
  CheckRows(pre_grad, view.rows, "backward input");
  return Terms(view.backward, view.client_id, pre_grad);
}

Matrix CombineBackward(const ClientView& view, const Matrix& local,
                       const Matrix& remote_sum) {
  CheckRows(local, view.rows, "backward local term");
  Matrix sum = local;
  if (remote_sum.size() != 0) {
    CheckRows(remote_sum, view.rows, "backward remote sum");
    sum += view.backward.scaler.asDiagonal() * remote_sum;
  }
  return view.inv_p.asDiagonal() * sum;
}

Matrix WeightGradientSummand(const Matrix& layer_input, const Matrix& aggregated) {
  if (layer_input.rows() != aggregated.rows())
    throw InvariantError("weight gradient: row mismatch");
  return layer_input.transpose() * aggregated;
}

Matrix InputGradient(const Matrix& aggregated, const Matrix& weight) {
  if (aggregated.cols() != weight.cols())
    throw InvariantError("input gradient: width mismatch");
  return aggregated * weight.transpose();
}

void LayerCache::Reset(int layers) {
  for (auto* v : {&input, &projected, &pre, &out, &dropout, &pre_grad, &aggregated}) {
    v->assign(layers, Matrix());
  }
}

std::int64_t LayerCache::ActivationScalars() const {
  std::int64_t n = 0;
  for (const Matrix& z : input) n += z.size();
  return n;
}

}  // namespace ppsgcn::gcn
