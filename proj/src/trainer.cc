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

#include "ppsgcn/trainer.h"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstring>
#include <map>
#include <random>

#include "ppsgcn/error.h"

namespace ppsgcn::trainer {
namespace {

using transport::Message;
using transport::Phase;
using transport::RoundTag;

constexpr std::uint64_t kInitStream = 1;
constexpr std::uint64_t kKeyStream = 2;
constexpr std::uint64_t kSampleStream = 3;
constexpr std::uint64_t kDropoutStream = 4;
constexpr std::uint64_t kCipherStream = 5;

const std::vector<bool>& SplitMask(const graph::ClientShard& s, Split split) {
  switch (split) {
    case Split::kTrain:
      return s.masks.train;
    case Split::kVal:
      return s.masks.val;
    case Split::kTest:
      return s.masks.test;
  }
  return s.masks.test;
}

Matrix Rows(const Matrix& m, const std::vector<int>& rows) {
  Matrix out(static_cast<Eigen::Index>(rows.size()), m.cols());
  for (std::size_t r = 0; r < rows.size(); ++r) out.row(r) = m.row(rows[r]);
  return out;
}

}  // namespace

void TrainConfig::Validate() const {
  if (iterations < 1) throw ValidationError("train.iterations must be >= 1");
  if (!(learning_rate >= 0) || !std::isfinite(learning_rate))
    throw ValidationError("train.learning_rate must be finite and non-negative");
  if (layers < 1) throw ValidationError("model.layers must be >= 1");
  if (hidden_dim < 1) throw ValidationError("model.hidden_dim must be >= 1");
  if (!(dropout >= 0 && dropout < 1)) throw ValidationError("model.dropout must be in [0, 1)");
  if (activation == gcn::Activation::kSoftmax)
    throw ValidationError("model.activation must be relu or identity");
  if (sampling && batch_size < 1) throw ValidationError("sampler.batch_size must be >= 1");
  if (frac_bits < 1 || frac_bits > 60) throw ValidationError("crypto.frac_bits must be in [1, 60]");
  if (eval_every < 0 || patience < 0)
    throw ValidationError("train.eval_every and train.patience must be >= 0");
  if (optimizer == Optimizer::kAdam &&
      !(beta1 >= 0 && beta1 < 1 && beta2 >= 0 && beta2 < 1 && epsilon > 0))
    throw ValidationError("invalid Adam hyperparameters");
}

std::vector<int> ModelDims(const TrainConfig& config, int feature_dim,
                           int num_classes) {
  std::vector<int> dims{feature_dim};
  for (int l = 1; l < config.layers; ++l) dims.push_back(config.hidden_dim);
  dims.push_back(num_classes);
  return dims;
}

std::uint64_t HashParams(const gcn::ModelParams& params) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  auto mix = [&h](std::uint64_t v) {
    for (int i = 0; i < 8; ++i) {
      h ^= (v >> (8 * i)) & 0xFF;
      h *= 0x100000001b3ULL;
    }
  };
  for (int d : params.dims) mix(static_cast<std::uint64_t>(d));
  for (const Matrix& w : params.weights)
    for (Eigen::Index i = 0; i < w.size(); ++i) {
      std::uint64_t bits;
      const double v = w.data()[i];
      std::memcpy(&bits, &v, sizeof bits);
      mix(bits);
    }
  return h;
}

double MicroF1(const std::vector<int>& predicted, const std::vector<int>& truth) {
  if (predicted.size() != truth.size()) throw ValidationError("prediction/label length mismatch");
  if (truth.empty()) throw UndefinedMetricError("micro-F1 of an empty split");
  // Single-label: each miss is one FP (predicted class) and one FN (true class).
  std::int64_t tp = 0, fp = 0, fn = 0;
  for (std::size_t i = 0; i < truth.size(); ++i) {
    if (predicted[i] == truth[i]) {
      ++tp;
    } else {
      ++fp;
      ++fn;
    }
  }
  return tp / (tp + 0.5 * (fp + fn));
}

struct Federation::Client {
  int id = 0;
  gcn::ModelParams params;
  std::vector<Matrix> moment1, moment2;
  int adam_steps = 0;
  std::optional<crypto::ClientKeyring> keys;
  std::unique_ptr<crypto::Randomness> cipher_rng;
  gcn::LayerCache cache;
  std::vector<Matrix> gradients;
};

Federation::Federation(const TrainConfig& config, std::vector<graph::ClientShard> shards)
    : config_(config), shards_(std::move(shards)) {
  config_.Validate();
  if (shards_.empty()) throw ValidationError("federation needs at least one client");
  const int m = static_cast<int>(shards_.size());
  blocks_ = graph::BuildLaplacianBlocks(shards_);
  if (config_.sampling)
    plan_ = sampling::MakePlan(shards_, config_.batch_size, config_.distribution, true);

  const auto dims = ModelDims(config_, static_cast<int>(shards_[0].features.cols()),
                              shards_[0].num_classes);
  const gcn::ModelParams init =
      gcn::ModelParams::Glorot(dims, DeriveSeed(config_.seed, {kInitStream}));

  crypto::PublicDirectory server_directory;
  std::optional<crypto::KeySetup> keys;
  if (config_.encrypted) {
    keys = crypto::SetupKeys(m, config_.key_bits, DeriveSeed(config_.seed, {kKeyStream}));
    server_directory = keys->server_directory;
  }
  for (int i = 0; i < m; ++i) {
    auto c = std::make_unique<Client>();
    c->id = i;
    c->params = init;
    for (const Matrix& w : init.weights) {
      c->moment1.push_back(Matrix::Zero(w.rows(), w.cols()));
      c->moment2.push_back(Matrix::Zero(w.rows(), w.cols()));
    }
    if (keys) c->keys = keys->clients[i];
    c->cipher_rng = std::make_unique<crypto::Randomness>(
        DeriveSeed(config_.seed, {kCipherStream, static_cast<std::uint64_t>(i)}));
    c->cache.Reset(init.num_layers());
    clients_.push_back(std::move(c));
  }
  bus_ = transport::MakeBus(config_.bus, m, config_.encrypted, server_directory);
  eval_bus_ = std::make_unique<transport::InProcBus>(m, false, crypto::PublicDirectory{});
}

Federation::~Federation() = default;

const gcn::ModelParams& Federation::params(int client) const {
  return clients_.at(client)->params;
}

void Federation::SetParams(const gcn::ModelParams& params) {
  params.Validate();
  for (auto& c : clients_) {
    if (c->params.dims != params.dims) throw ValidationError("parameter shape mismatch");
    c->params = params;
  }
}

const gcn::LayerCache& Federation::cache(int client) const {
  return clients_.at(client)->cache;
}

const transport::CommLedger& Federation::ledger() const { return bus_->ledger(); }

sampling::SampleRound Federation::RoundFor(int iteration) const {
  if (!config_.sampling) {
    std::vector<int> sizes;
    for (const auto& s : shards_) sizes.push_back(s.num_local);
    return sampling::FullRound(sizes);
  }
  return sampling::DrawRound(
      plan_, DeriveSeed(config_.seed, {kSampleStream, static_cast<std::uint64_t>(iteration)}));
}

transport::Payload Federation::Seal(int client, int owner, const Matrix& m) {
  Client& c = *clients_[client];
  return crypto::EncryptMatrix(m, c.keys->directory.Get(owner), owner, config_.frac_bits,
                               num_clients(), *c.cipher_rng);
}

Matrix Federation::Deliver(const Message& message, int client) const {
  if (const auto* c = std::get_if<crypto::CipherMatrix>(&message.payload)) {
    const Client& me = *clients_[client];
    if (!me.keys) throw ProtocolError("ciphertext delivered to a client without keys");
    return crypto::DecryptMatrix(*c, me.keys->SecretFor(c->owner), config_.frac_bits,
                                 num_clients());
  }
  if (const auto* p = std::get_if<Matrix>(&message.payload)) return *p;
  throw ProtocolError("expected a matrix payload");
}

std::vector<Matrix> Federation::ExchangeTerms(transport::Bus& bus, const RoundTag& tag,
                                              const std::vector<gcn::SendTerms>& terms,
                                              bool encrypted) {
  const int m = num_clients();
  std::vector<std::optional<transport::Outbox>> outboxes(m);
  for (int j = 0; j < m; ++j) {
    transport::Outbox out;
    for (int i = 0; i < m; ++i) {
      if (i == j) continue;
      transport::Payload p = encrypted ? Seal(j, i, terms[j].remote[i])
                                       : transport::Payload(terms[j].remote[i]);
      out.push_back({j, i, tag, std::move(p)});
    }
    outboxes[j] = std::move(out);
  }
  auto inboxes = bus.RunRound(tag, std::move(outboxes));
  std::vector<Matrix> sums(m);
  for (int i = 0; i < m; ++i) {
    if (inboxes[i].size() != 1)
      throw ProtocolError("client " + std::to_string(i) + " expected one aggregate");
    sums[i] = Deliver(inboxes[i][0], i);
  }
  return sums;
}

void Federation::BroadcastSample(int iteration, const sampling::SampleRound& round) {
  const int m = num_clients();
  const RoundTag tag{iteration, 0, Phase::kSampleBroadcast};
  std::vector<std::optional<transport::Outbox>> outboxes(m);
  for (int j = 0; j < m; ++j) {
    transport::IdSet ids(round.sampled[j].begin(), round.sampled[j].end());
    outboxes[j] = transport::Outbox{{j, transport::kAllClients, tag, std::move(ids)}};
  }
  auto inboxes = bus_->RunRound(tag, std::move(outboxes));
  for (int i = 0; i < m; ++i) {
    if (static_cast<int>(inboxes[i].size()) != m - 1)
      throw ProtocolError("incomplete sample broadcast");
    for (const Message& msg : inboxes[i]) {
      const auto& ids = std::get<transport::IdSet>(msg.payload);
      if (!std::equal(ids.begin(), ids.end(), round.sampled.at(msg.src).begin(),
                      round.sampled.at(msg.src).end()))
        throw InvariantError("sample broadcast does not match the drawn round");
    }
  }
}

void Federation::Forward(transport::Bus* bus, int iteration,
                         const std::vector<gcn::ClientView>& views,
                         const std::vector<Matrix>& features, bool training,
                         bool encrypted, std::vector<gcn::LayerCache*> caches) {
  const int m = num_clients();
  const int layers = clients_[0]->params.num_layers();
  for (int l = 1; l <= layers; ++l) {
    const gcn::Activation act = l == layers ? gcn::Activation::kSoftmax : config_.activation;
    std::vector<gcn::SendTerms> terms(m);
    for (int j = 0; j < m; ++j) {
      gcn::LayerCache& c = *caches[j];
      if (l == 1) {
        c.input[0] = features[j];
      } else if (c.dropout[l - 2].size() != 0) {
        c.input[l - 1] = c.out[l - 2].cwiseProduct(c.dropout[l - 2]);
      } else {
        c.input[l - 1] = c.out[l - 2];
      }
      c.projected[l - 1] = c.input[l - 1] * clients_[j]->params.weights[l - 1];
      terms[j] = gcn::LocalSendTermsForward(views[j], c.projected[l - 1]);
    }
    std::vector<Matrix> remote(m);
    if (m > 1) remote = ExchangeTerms(*bus, {iteration, l, Phase::kForward}, terms, encrypted);
    for (int i = 0; i < m; ++i) {
      gcn::LayerCache& c = *caches[i];
      gcn::LayerOutput o = gcn::CombineForward(views[i], terms[i].local, remote[i], act);
      c.pre[l - 1] = std::move(o.pre);
      c.out[l - 1] = std::move(o.out);
      c.dropout[l - 1] = Matrix();
      if (training && l < layers && config_.dropout > 0) {
        std::mt19937_64 rng(DeriveSeed(config_.seed, {kDropoutStream,
                                                      static_cast<std::uint64_t>(iteration),
                                                      static_cast<std::uint64_t>(l),
                                                      static_cast<std::uint64_t>(i)}));
        std::bernoulli_distribution keep(1.0 - config_.dropout);
        const double scale = 1.0 / (1.0 - config_.dropout);
        Matrix mask(c.out[l - 1].rows(), c.out[l - 1].cols());
        for (Eigen::Index k = 0; k < mask.size(); ++k) mask.data()[k] = keep(rng) ? scale : 0.0;
        c.dropout[l - 1] = std::move(mask);
      }
    }
  }
}

PassResult Federation::Pass(int iteration, const sampling::SampleRound& round,
                            bool training) {
  const int m = num_clients();
  const int layers = clients_[0]->params.num_layers();
  if (static_cast<int>(round.sampled.size()) != m)
    throw ValidationError("round does not match the federation size");
  const bool normalize = config_.normalize && config_.sampling;
  if (m > 1 && config_.sampling) BroadcastSample(iteration, round);

  std::vector<gcn::ClientView> views;
  std::vector<Matrix> features;
  std::vector<std::vector<int>> labels(m);
  std::vector<std::vector<bool>> loss_rows(m);
  int loss_total = 0;
  for (int i = 0; i < m; ++i) {
    views.push_back(gcn::MakeView(blocks_[i], round, normalize));
    if (normalize && training)
      scaling_.push_back({iteration, i, round.size(i)});
    features.push_back(Rows(shards_[i].features, round.sampled[i]));
    for (int v : round.sampled[i]) {
      labels[i].push_back(shards_[i].labels[v]);
      const bool train = shards_[i].masks.train[v];
      loss_rows[i].push_back(train);
      loss_total += train;
    }
    clients_[i]->cache.Reset(layers);
  }
  if (loss_total == 0) throw ValidationError("round contains no labeled training node");

  std::vector<gcn::LayerCache*> caches;
  for (auto& c : clients_) caches.push_back(&c->cache);
  Forward(bus_.get(), iteration, views, features, training, config_.encrypted, caches);

  PassResult result;
  result.n_sampled = round.total();
  result.loss_rows = loss_total;
  double nll = 0;
  std::vector<Matrix> pre_grad(m);
  for (int i = 0; i < m; ++i) {
    const Matrix& probs = clients_[i]->cache.out[layers - 1];
    int rows = 0;
    for (bool b : loss_rows[i]) rows += b;
    nll += gcn::LocalLoss(probs, labels[i], loss_rows[i]) * rows;
    pre_grad[i] = gcn::BackwardSeed(probs, labels[i], loss_rows[i], 1.0 / loss_total);
  }
  result.loss = nll / loss_total;
  if (!std::isfinite(result.loss))
    throw DivergenceError(iteration, "loss is " + std::to_string(result.loss));

  for (auto& c : clients_) c->gradients.assign(layers, Matrix());
  for (int l = layers; l >= 1; --l) {
    std::vector<gcn::SendTerms> terms(m);
    for (int j = 0; j < m; ++j) {
      clients_[j]->cache.pre_grad[l - 1] = pre_grad[j];
      terms[j] = gcn::LocalSendTermsBackward(views[j], pre_grad[j]);
    }
    std::vector<Matrix> remote(m);
    if (m > 1)
      remote = ExchangeTerms(*bus_, {iteration, l, Phase::kBackwardZ}, terms, config_.encrypted);
    std::vector<Matrix> summand(m);
    for (int i = 0; i < m; ++i) {
      gcn::LayerCache& c = clients_[i]->cache;
      c.aggregated[l - 1] = gcn::CombineBackward(views[i], terms[i].local, remote[i]);
      summand[i] = gcn::WeightGradientSummand(c.input[l - 1], c.aggregated[l - 1]);
    }
    if (m > 1) {
      const RoundTag tag{iteration, l, Phase::kBackwardW};
      std::vector<std::optional<transport::Outbox>> outboxes(m);
      for (int j = 0; j < m; ++j) {
        transport::Payload p = config_.encrypted
                                   ? Seal(j, crypto::kGradientKeyOwner, summand[j])
                                   : transport::Payload(summand[j]);
        outboxes[j] = transport::Outbox{{j, transport::kAllClients, tag, std::move(p)}};
      }
      auto inboxes = bus_->RunRound(tag, std::move(outboxes));
      for (int i = 0; i < m; ++i) {
        if (inboxes[i].size() != 1) throw ProtocolError("expected one gradient broadcast");
        clients_[i]->gradients[l - 1] = Deliver(inboxes[i][0], i);
      }
    } else {
      clients_[0]->gradients[l - 1] = summand[0];
    }
    if (l > 1) {
      for (int i = 0; i < m; ++i) {
        gcn::LayerCache& c = clients_[i]->cache;
        Matrix dz = gcn::InputGradient(c.aggregated[l - 1], clients_[i]->params.weights[l - 1]);
        if (c.dropout[l - 2].size() != 0) dz = dz.cwiseProduct(c.dropout[l - 2]);
        pre_grad[i] = gcn::ActivationBackward(dz, c.pre[l - 2], config_.activation);
      }
    }
  }

  last_activation_ = 0;
  for (auto& c : clients_) {
    const std::int64_t act = c->cache.ActivationScalars();
    memory_.Observe(c->id, act, c->params.scalar_count());
    last_activation_ += act;
  }
  result.gradients = clients_[0]->gradients;
  return result;
}

void Federation::Update(const std::vector<Matrix>& gradients) {
  for (auto& c : clients_) c->gradients = gradients;
  ApplyGradients(-1);
}

void Federation::ApplyGradients(int iteration) {
  // Every client applies the aggregate it decoded itself.
  for (auto& c : clients_) {
    if (config_.optimizer == Optimizer::kAdam) ++c->adam_steps;
    for (int l = 0; l < c->params.num_layers(); ++l) {
      Matrix& w = c->params.weights[l];
      const Matrix& g = c->gradients.at(l);
      if (g.rows() != w.rows() || g.cols() != w.cols())
        throw InvariantError("gradient shape does not match weight");
      if (config_.optimizer == Optimizer::kSgd) {
        w -= config_.learning_rate * g;
        continue;
      }
      c->moment1[l] = config_.beta1 * c->moment1[l] + (1 - config_.beta1) * g;
      c->moment2[l] = config_.beta2 * c->moment2[l] + (1 - config_.beta2) * g.cwiseAbs2();
      const double b1 = 1 - std::pow(config_.beta1, c->adam_steps);
      const double b2 = 1 - std::pow(config_.beta2, c->adam_steps);
      w.array() -= config_.learning_rate * (c->moment1[l].array() / b1) /
                   ((c->moment2[l].array() / b2).sqrt() + config_.epsilon);
    }
    for (const Matrix& w : c->params.weights)
      if (!w.allFinite()) throw DivergenceError(iteration, "non-finite weights after update");
  }
}

PassResult Federation::Step(int iteration) {
  PassResult r;
  try {
    r = Pass(iteration, RoundFor(iteration), true);
  } catch (const DivergenceError&) {
    throw;
  } catch (const NumericError& e) {
    throw DivergenceError(iteration, e.what());
  }
  ApplyGradients(iteration);
  return r;
}

std::vector<std::vector<int>> Federation::Predict() {
  const int m = num_clients();
  const int layers = clients_[0]->params.num_layers();
  std::vector<int> sizes;
  for (const auto& s : shards_) sizes.push_back(s.num_local);
  const sampling::SampleRound full = sampling::FullRound(sizes);
  std::vector<gcn::ClientView> views;
  std::vector<Matrix> features;
  std::vector<gcn::LayerCache> caches(m);
  std::vector<gcn::LayerCache*> ptrs;
  for (int i = 0; i < m; ++i) {
    views.push_back(gcn::MakeView(blocks_[i], full, false));
    features.push_back(shards_[i].features);
    caches[i].Reset(layers);
    ptrs.push_back(&caches[i]);
  }
  Forward(eval_bus_.get(), 0, views, features, false, false, ptrs);
  std::vector<std::vector<int>> pred(m);
  for (int i = 0; i < m; ++i) {
    const Matrix& z = caches[i].out[layers - 1];
    for (Eigen::Index r = 0; r < z.rows(); ++r) {
      Eigen::Index k;
      z.row(r).maxCoeff(&k);
      pred[i].push_back(static_cast<int>(k));
    }
  }
  return pred;
}

double Federation::Evaluate(Split split) {
  const auto pred = Predict();
  std::vector<int> p, t;
  for (int i = 0; i < num_clients(); ++i) {
    const auto& mask = SplitMask(shards_[i], split);
    for (int v = 0; v < shards_[i].num_local; ++v)
      if (mask[v]) {
        p.push_back(pred[i][v]);
        t.push_back(shards_[i].labels[v]);
      }
  }
  return MicroF1(p, t);
}

TrainResult Train(Federation& federation) {
  const TrainConfig& cfg = federation.config();
  TrainResult result;
  const auto start = std::chrono::steady_clock::now();
  double best = -1;
  gcn::ModelParams best_params = federation.params(0);
  int stale = 0;
  for (int it = 0; it < cfg.iterations; ++it) {
    const PassResult r = federation.Step(it);
    EpochRecord rec;
    rec.iteration = it;
    rec.loss = r.loss;
    rec.n_sampled = r.n_sampled;
    double sq = 0;
    for (const Matrix& g : r.gradients) sq += g.squaredNorm();
    rec.grad_norm = std::sqrt(sq);
    for (const auto& row : federation.ledger().rows())
      if (row.iteration == it) rec.comm_scalars += row.scalars;
    std::int64_t params = 0;
    for (int i = 0; i < federation.num_clients(); ++i)
      params += federation.params(i).scalar_count();
    rec.mem_scalars = federation.last_activation_scalars() + params;
    if (cfg.eval_every > 0 && ((it + 1) % cfg.eval_every == 0 || it + 1 == cfg.iterations)) {
      rec.val_f1 = federation.Evaluate(Split::kVal);
      if (*rec.val_f1 > best) {
        best = *rec.val_f1;
        best_params = federation.params(0);
        stale = 0;
      } else {
        ++stale;
      }
    }
    rec.time_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    result.records.push_back(rec);
    if (cfg.patience > 0 && stale >= cfg.patience) {
      result.stopped_early = true;
      break;
    }
  }
  if (cfg.patience > 0 && best >= 0) federation.SetParams(best_params);
  result.best_val_f1 = std::max(best, 0.0);
  result.params = federation.params(0);
  return result;
}

std::vector<AblationRow> RunAblation(const TrainConfig& config,
                                     const std::vector<graph::ClientShard>& shards) {
  std::vector<std::pair<std::string, TrainConfig>> variants;
  TrainConfig base = config;
  base.sampling = true;
  base.normalize = true;
  variants.emplace_back("PPSGCN", base);
  TrainConfig star = base;
  star.normalize = false;
  variants.emplace_back("PPSGCN*", star);
  TrainConfig full = base;
  full.sampling = false;
  variants.emplace_back("PPSGCN-full", full);

  std::vector<AblationRow> rows;
  for (const auto& [name, cfg] : variants) {
    Federation fed(cfg, shards);
    Train(fed);
    AblationRow row;
    row.variant = name;
    row.val_f1 = fed.Evaluate(Split::kVal);
    row.test_f1 = fed.Evaluate(Split::kTest);
    row.scaling_events = fed.scaling_ledger().size();
    rows.push_back(row);
  }
  return rows;
}

ConvergenceProbe ProbeConvergence(const std::vector<EpochRecord>& records,
                                  int short_horizon, int long_horizon) {
  if (short_horizon < 1 || long_horizon < short_horizon)
    throw ValidationError("invalid probe horizons");
  if (static_cast<int>(records.size()) < long_horizon)
    throw ValidationError("probe needs " + std::to_string(long_horizon) + " logged iterations");
  ConvergenceProbe p;
  for (int t = 0; t < long_horizon; ++t) {
    if (t < short_horizon) p.mean_short += records[t].grad_norm;
    p.mean_long += records[t].grad_norm;
  }
  p.mean_short /= short_horizon;
  p.mean_long /= long_horizon;
  p.decreasing = p.mean_long < p.mean_short;
  p.non_increasing = p.mean_long <= p.mean_short;
  return p;
}

transport::LedgerCheck CheckIteration(Federation& federation, int iteration) {
  const PassResult r = federation.Step(iteration);
  std::int64_t params = 0;
  for (int i = 0; i < federation.num_clients(); ++i)
    params += federation.params(i).scalar_count();
  return transport::CheckLedger(federation.ledger(), iteration, federation.num_clients(),
                                federation.params(0).dims, r.n_sampled,
                                federation.last_activation_scalars(), params);
}

double MajorityBaseline(const std::vector<graph::ClientShard>& shards, Split split) {
  std::map<int, int> counts;
  int total = 0;
  for (const auto& s : shards) {
    const auto& mask = SplitMask(s, split);
    for (int v = 0; v < s.num_local; ++v)
      if (mask[v]) {
        ++counts[s.labels[v]];
        ++total;
      }
  }
  if (total == 0) throw UndefinedMetricError("majority baseline of an empty split");
  int best = 0;
  for (const auto& [label, n] : counts) best = std::max(best, n);
  return static_cast<double>(best) / total;
}

}  // namespace ppsgcn::trainer
