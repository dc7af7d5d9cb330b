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

#include "ppsgcn/oracle.h"

#include <algorithm>
#include <cmath>

#include "ppsgcn/error.h"

namespace ppsgcn::oracle {

Matrix DenseLaplacian(const graph::GlobalGraph& g, int max_nodes) {
  if (g.n > max_nodes)
    throw RangeError("dense oracle limited to " + std::to_string(max_nodes) + " nodes");
  Matrix a = Matrix::Identity(g.n, g.n);
  for (const auto& [u, v] : g.edges) {
    a(u, v) = 1;
    a(v, u) = 1;
  }
  Vector deg = a.rowwise().sum();  // D + I
  Vector s = deg.array().rsqrt();
  return s.asDiagonal() * a * s.asDiagonal();
}

OracleResult ForwardBackward(const graph::GlobalGraph& g, const gcn::ModelParams& params,
                             const OracleOptions& options) {
  const Matrix full = DenseLaplacian(g, options.max_nodes);
  std::vector<int> keep;
  if (options.subset) {
    keep = *options.subset;
  } else {
    for (int v = 0; v < g.n; ++v) keep.push_back(v);
  }
  const int k = static_cast<int>(keep.size());
  OracleResult r;
  r.laplacian.resize(k, k);
  for (int a = 0; a < k; ++a)
    for (int b = 0; b < k; ++b)
      r.laplacian(a, b) = full(keep[a], keep[b]) *
                          (options.column_weights ? (*options.column_weights)[b] : 1.0);
  Matrix x(k, g.features.cols());
  for (int a = 0; a < k; ++a) x.row(a) = g.features.row(keep[a]);

  const int layers = params.num_layers();
  std::vector<Matrix> inputs;
  Matrix z = x;
  for (int l = 0; l < layers; ++l) {
    inputs.push_back(z);
    Matrix h = r.laplacian * z * params.weights[l];
    const bool last = l + 1 == layers;
    Matrix o(h.rows(), h.cols());
    if (last && !options.identity_output) {
      for (Eigen::Index i = 0; i < h.rows(); ++i) {
        const double mx = h.row(i).maxCoeff();
        double total = 0;
        for (Eigen::Index c = 0; c < h.cols(); ++c) total += std::exp(h(i, c) - mx);
        for (Eigen::Index c = 0; c < h.cols(); ++c) o(i, c) = std::exp(h(i, c) - mx) / total;
      }
    } else if (!last && !options.identity_hidden) {
      o = h.unaryExpr([](double t) { return t > 0 ? t : 0.0; });
    } else {
      o = h;
    }
    r.pre.push_back(h);
    r.out.push_back(o);
    z = o;
  }
  if (options.identity_output) return r;

  std::vector<int> rows;
  for (int a = 0; a < k; ++a) {
    const int v = keep[a];
    if (options.loss_mask ? (*options.loss_mask)[v] : g.masks.train[v]) rows.push_back(a);
  }
  const Matrix& probs = r.out.back();
  Matrix grad = Matrix::Zero(k, probs.cols());
  for (int a : rows) {
    const int y = g.labels[keep[a]];
    r.loss -= std::log(std::max(probs(a, y), 1e-12));
    grad.row(a) = probs.row(a);
    grad(a, y) -= 1.0;
  }
  if (!rows.empty()) {
    r.loss /= static_cast<double>(rows.size());
    grad /= static_cast<double>(rows.size());
  }
  r.gradients.resize(layers);
  for (int l = layers - 1; l >= 0; --l) {
    const Matrix dxw = r.laplacian.transpose() * grad;  // d loss / d (Z W)
    r.gradients[l] = inputs[l].transpose() * dxw;
    if (l == 0) break;
    Matrix dz = dxw * params.weights[l].transpose();
    if (!options.identity_hidden)
      for (Eigen::Index i = 0; i < dz.size(); ++i)
        if (!(r.pre[l - 1].data()[i] > 0)) dz.data()[i] = 0;
    grad = dz;
  }
  return r;
}

double MaxRelativeError(const Matrix& a, const Matrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols())
    throw ValidationError("compared matrices differ in shape");
  if (a.size() == 0) return 0;
  const double scale = b.cwiseAbs().maxCoeff();
  const double diff = (a - b).cwiseAbs().maxCoeff();
  if (scale == 0) return diff;
  return diff / scale;
}

double Comparison::max() const { return std::max({activations, loss, gradients}); }

Comparison CompareFullBatch(trainer::Federation& federation, const graph::GlobalGraph& g) {
  const auto& shards = federation.shards();
  std::vector<int> sizes;
  for (const auto& s : shards) sizes.push_back(s.num_local);
  const trainer::PassResult pass =
      federation.Pass(0, sampling::FullRound(sizes), false);
  OracleOptions opt;
  opt.identity_hidden = federation.config().activation == gcn::Activation::kIdentity;
  const OracleResult ref = ForwardBackward(g, federation.params(0), opt);

  Comparison c;
  for (int i = 0; i < federation.num_clients(); ++i) {
    const auto& cache = federation.cache(i);
    const auto& ids = shards[i].global_ids;
    for (std::size_t l = 0; l < ref.pre.size(); ++l) {
      Matrix pre(ids.size(), ref.pre[l].cols()), out(ids.size(), ref.out[l].cols());
      for (std::size_t r = 0; r < ids.size(); ++r) {
        pre.row(r) = ref.pre[l].row(ids[r]);
        out.row(r) = ref.out[l].row(ids[r]);
      }
      c.activations = std::max({c.activations, MaxRelativeError(cache.pre[l], pre),
                                MaxRelativeError(cache.out[l], out)});
    }
  }
  c.loss = std::abs(pass.loss - ref.loss) / std::max(std::abs(ref.loss), 1e-300);
  for (std::size_t l = 0; l < ref.gradients.size(); ++l)
    c.gradients = std::max(c.gradients, MaxRelativeError(pass.gradients[l], ref.gradients[l]));
  return c;
}

}  // namespace ppsgcn::oracle
