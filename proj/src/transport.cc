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

#include "ppsgcn/transport.h"

#include <algorithm>
#include <map>
#include <ostream>
#include <set>

#include "ppsgcn/error.h"
#include "ppsgcn/tcp_bus.h"

namespace ppsgcn::transport {

const char* PhaseName(Phase phase) {
  switch (phase) {
    case Phase::kSampleBroadcast:
      return "SAMPLE_BCAST";
    case Phase::kForward:
      return "FWD";
    case Phase::kBackwardZ:
      return "BWD_Z";
    case Phase::kBackwardW:
      return "BWD_W";
  }
  return "?";
}

std::int64_t Message::scalar_count() const {
  return std::visit(
      [](const auto& p) -> std::int64_t {
        using T = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<T, Matrix>) {
          return p.size();
        } else if constexpr (std::is_same_v<T, crypto::CipherMatrix>) {
          return p.size();
        } else {
          return static_cast<std::int64_t>(p.size());
        }
      },
      payload);
}

LedgerRow& CommLedger::Row(const RoundTag& tag) {
  for (LedgerRow& r : rows_)
    if (r.iteration == tag.iteration && r.phase == tag.phase && r.layer == tag.layer)
      return r;
  LedgerRow r;
  r.iteration = tag.iteration;
  r.phase = tag.phase;
  r.layer = tag.layer;
  rows_.push_back(r);
  return rows_.back();
}

void CommLedger::RecordRound(const RoundTag& tag) { ++Row(tag).rounds; }

void CommLedger::RecordLink(const Message& message) {
  LedgerRow& r = Row(message.tag);
  const std::int64_t n = message.scalar_count();
  r.scalars += n;
  if (message.encrypted()) r.ciphertexts += n;
  ++r.messages;
}

LedgerRow CommLedger::Totals(int iteration) const {
  LedgerRow t;
  t.iteration = iteration;
  for (const LedgerRow& r : rows_) {
    if (r.iteration != iteration || r.phase == Phase::kSampleBroadcast) continue;
    t.scalars += r.scalars;
    t.ciphertexts += r.ciphertexts;
    t.messages += r.messages;
    t.rounds += r.rounds;
  }
  return t;
}

LedgerRow CommLedger::PhaseTotals(int iteration, Phase phase) const {
  LedgerRow t;
  t.iteration = iteration;
  t.phase = phase;
  for (const LedgerRow& r : rows_) {
    if (r.iteration != iteration || r.phase != phase) continue;
    t.scalars += r.scalars;
    t.ciphertexts += r.ciphertexts;
    t.messages += r.messages;
    t.rounds += r.rounds;
  }
  return t;
}

std::int64_t CommLedger::TotalScalars() const {
  std::int64_t n = 0;
  for (const LedgerRow& r : rows_) n += r.scalars;
  return n;
}

void CommLedger::WriteCsv(std::ostream& out) const {
  out << "iteration,phase,layer,scalars,ciphertexts,messages\n";
  for (const LedgerRow& r : rows_)
    out << r.iteration << ',' << PhaseName(r.phase) << ',' << r.layer << ','
        << r.scalars << ',' << r.ciphertexts << ',' << r.messages << '\n';
}

void MemoryLedger::Observe(int client, std::int64_t activation,
                           std::int64_t params) {
  if (static_cast<int>(peak_activation.size()) <= client) {
    peak_activation.resize(client + 1, 0);
    parameters.resize(client + 1, 0);
  }
  peak_activation[client] = std::max(peak_activation[client], activation);
  parameters[client] = params;
}

std::int64_t MemoryLedger::TotalPeakActivation() const {
  std::int64_t n = 0;
  for (auto v : peak_activation) n += v;
  return n;
}

std::int64_t MemoryLedger::TotalParameters() const {
  std::int64_t n = 0;
  for (auto v : parameters) n += v;
  return n;
}

AggregationServer::AggregationServer(int num_clients, bool encrypted,
                                     crypto::PublicDirectory directory)
    : num_clients_(num_clients), encrypted_(encrypted), blind_(std::move(directory)) {
  if (num_clients < 1) throw ValidationError("server needs at least one client");
}

Payload AggregationServer::Sum(const std::vector<const Message*>& terms) const {
  if (encrypted_) {
    std::vector<const crypto::CipherMatrix*> cipher;
    for (const Message* m : terms) cipher.push_back(&std::get<crypto::CipherMatrix>(m->payload));
    return blind_.Sum(cipher);
  }
  Matrix acc = std::get<Matrix>(terms.front()->payload);
  for (std::size_t t = 1; t < terms.size(); ++t) {
    const Matrix& x = std::get<Matrix>(terms[t]->payload);
    if (x.rows() != acc.rows() || x.cols() != acc.cols())
      throw ProtocolError("aggregation shape mismatch");
    acc += x;
  }
  return acc;
}

std::vector<Message> AggregationServer::Aggregate(const RoundTag& tag,
                                                  const std::vector<Message>& uplink) {
  const int m = num_clients_;
  const bool compute = tag.phase != Phase::kSampleBroadcast;
  std::set<std::pair<int, int>> seen;
  std::vector<int> posts(m, 0);
  for (const Message& msg : uplink) {
    if (!(msg.tag == tag)) throw ProtocolError("message tag does not match round");
    if (msg.src < 0 || msg.src >= m)
      throw ProtocolError("unknown sender " + std::to_string(msg.src));
    const bool broadcast = tag.phase == Phase::kSampleBroadcast ||
                           tag.phase == Phase::kBackwardW;
    if (broadcast ? msg.dest != kAllClients
                  : (msg.dest < 0 || msg.dest >= m || msg.dest == msg.src))
      throw ProtocolError("invalid destination " + std::to_string(msg.dest) +
                          " for " + PhaseName(tag.phase));
    if (!seen.emplace(msg.src, msg.dest).second)
      throw ProtocolError("duplicate post from client " + std::to_string(msg.src));
    ++posts[msg.src];
    if (!compute) {
      if (!std::holds_alternative<IdSet>(msg.payload))
        throw ProtocolError("sample broadcast must carry an id set");
      continue;
    }
    if (encrypted_) {
      const auto* c = std::get_if<crypto::CipherMatrix>(&msg.payload);
      if (c == nullptr)
        throw ProtocolError("encrypted round received a plaintext payload");
      const int owner = tag.phase == Phase::kBackwardW ? crypto::kGradientKeyOwner : msg.dest;
      if (c->owner != owner) throw ProtocolError("ciphertext under the wrong key");
    } else if (!std::holds_alternative<Matrix>(msg.payload)) {
      throw ProtocolError("plaintext round received a non-matrix payload");
    }
  }
  const int expected = (tag.phase == Phase::kForward || tag.phase == Phase::kBackwardZ) ? m - 1 : 1;
  for (int j = 0; j < m; ++j)
    if (posts[j] != expected)
      throw ProtocolError("client " + std::to_string(j) + " posted " +
                          std::to_string(posts[j]) + " of " + std::to_string(expected) +
                          " messages for " + PhaseName(tag.phase));

  ledger_.RecordRound(tag);
  for (const Message& msg : uplink) ledger_.RecordLink(msg);

  std::vector<Message> downlink;
  switch (tag.phase) {
    case Phase::kSampleBroadcast:
      for (const Message& msg : uplink)
        for (int i = 0; i < m; ++i)
          if (i != msg.src) downlink.push_back({msg.src, i, tag, msg.payload});
      break;
    case Phase::kForward:
    case Phase::kBackwardZ: {
      std::map<int, std::vector<const Message*>> by_dest;
      for (const Message& msg : uplink) by_dest[msg.dest].push_back(&msg);
      for (const auto& [dest, terms] : by_dest)
        downlink.push_back({kServer, dest, tag, Sum(terms)});
      break;
    }
    case Phase::kBackwardW: {
      std::vector<const Message*> terms;
      for (const Message& msg : uplink) terms.push_back(&msg);
      const Payload sum = Sum(terms);
      for (int i = 0; i < m; ++i) downlink.push_back({kServer, i, tag, sum});
      break;
    }
  }
  for (const Message& msg : downlink) ledger_.RecordLink(msg);
  return downlink;
}

std::vector<Inbox> InProcBus::RunRound(const RoundTag& tag,
                                       std::vector<std::optional<Outbox>> outboxes) {
  const int m = num_clients();
  if (static_cast<int>(outboxes.size()) != m)
    throw ProtocolError("round needs one outbox slot per client");
  std::vector<Message> uplink;
  for (int j = 0; j < m; ++j) {
    if (!outboxes[j])
      throw BarrierTimeout("client " + std::to_string(j) + " never reached the " +
                           PhaseName(tag.phase) + " barrier");
    for (Message& msg : *outboxes[j]) {
      if (msg.src != j) throw ProtocolError("message src does not match poster");
      uplink.push_back(std::move(msg));
    }
  }
  std::vector<Inbox> inboxes(m);
  for (Message& msg : server_.Aggregate(tag, uplink))
    inboxes[msg.dest].push_back(std::move(msg));
  return inboxes;
}

std::unique_ptr<Bus> MakeBus(const BusOptions& options, int num_clients,
                             bool encrypted, crypto::PublicDirectory directory) {
  if (options.backend == Backend::kTcp)
    return std::make_unique<TcpBus>(num_clients, encrypted, std::move(directory),
                                    options.timeout_ms);
  return std::make_unique<InProcBus>(num_clients, encrypted, std::move(directory));
}

std::int64_t FormulaScalars(int m, const std::vector<int>& dims,
                            std::int64_t n_sampled) {
  if (m < 2) return 0;
  std::int64_t total = 0;
  for (std::size_t l = 1; l < dims.size(); ++l)
    total += 2LL * m * n_sampled * dims[l] + 2LL * m * dims[l - 1] * dims[l];
  return total;
}

std::int64_t FormulaActivations(const std::vector<int>& dims, std::int64_t n_sampled) {
  std::int64_t total = 0;
  for (std::size_t l = 1; l < dims.size(); ++l) total += n_sampled * dims[l - 1];
  return total;
}

std::int64_t FormulaParameters(int m, const std::vector<int>& dims) {
  std::int64_t total = 0;
  for (std::size_t l = 1; l < dims.size(); ++l)
    total += static_cast<std::int64_t>(dims[l - 1]) * dims[l];
  return m * total;
}

LedgerCheck CheckLedger(const CommLedger& ledger, int iteration, int m,
                        const std::vector<int>& dims, std::int64_t n_sampled,
                        std::int64_t measured_activations,
                        std::int64_t measured_parameters) {
  LedgerCheck c;
  c.measured_scalars = ledger.Totals(iteration).scalars;
  c.formula_scalars = FormulaScalars(m, dims, n_sampled);
  c.measured_forward = ledger.PhaseTotals(iteration, Phase::kForward).scalars;
  for (std::size_t l = 1; l < dims.size(); ++l)
    c.paper_forward += static_cast<std::int64_t>(m) * n_sampled * dims[l];
  c.sample_ids = ledger.PhaseTotals(iteration, Phase::kSampleBroadcast).scalars;
  c.measured_activations = measured_activations;
  c.formula_activations = FormulaActivations(dims, n_sampled);
  c.measured_parameters = measured_parameters;
  c.formula_parameters = FormulaParameters(m, dims);
  c.ok = c.measured_scalars == c.formula_scalars &&
         c.measured_activations == c.formula_activations &&
         c.measured_parameters == c.formula_parameters;
  return c;
}

}  // namespace ppsgcn::transport
