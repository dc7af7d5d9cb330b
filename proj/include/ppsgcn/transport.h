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

#ifndef PPSGCN_TRANSPORT_H_
#define PPSGCN_TRANSPORT_H_

#include <cstdint>
#include <iosfwd>
#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "ppsgcn/common.h"
#include "ppsgcn/secure_aggregation.h"

namespace ppsgcn::transport {

enum class Phase : std::uint8_t {
  kSampleBroadcast = 0,
  kForward = 1,
  kBackwardZ = 2,
  kBackwardW = 3,
};

const char* PhaseName(Phase phase);

inline constexpr int kServer = -1;
// Destination of posts the server fans out to every client.
inline constexpr int kAllClients = -2;

struct RoundTag {
  int iteration = 0;
  int layer = 0;
  Phase phase = Phase::kForward;

  bool operator==(const RoundTag&) const = default;
};

using IdSet = std::vector<std::int32_t>;
using Payload = std::variant<Matrix, crypto::CipherMatrix, IdSet>;

struct Message {
  int src = 0;
  int dest = 0;
  RoundTag tag;
  Payload payload;

  // Number of scalars (matrix entries, ciphertexts or ids) carried.
  std::int64_t scalar_count() const;
  bool encrypted() const {
    return std::holds_alternative<crypto::CipherMatrix>(payload);
  }
};

struct LedgerRow {
  int iteration = 0;
  Phase phase = Phase::kForward;
  int layer = 0;
  std::int64_t scalars = 0;
  std::int64_t ciphertexts = 0;
  std::int64_t messages = 0;
  std::int64_t rounds = 0;
};

// Scalars that crossed any client-server link, uplink and downlink alike,
// one row per (iteration, phase, layer) in first-seen order.
class CommLedger {
 public:
  void RecordRound(const RoundTag& tag);
  void RecordLink(const Message& message);

  const std::vector<LedgerRow>& rows() const { return rows_; }
  LedgerRow Totals(int iteration) const;
  LedgerRow PhaseTotals(int iteration, Phase phase) const;
  std::int64_t TotalScalars() const;
  void Clear() { rows_.clear(); }

  // iteration,phase,layer,scalars,ciphertexts,messages
  void WriteCsv(std::ostream& out) const;

 private:
  LedgerRow& Row(const RoundTag& tag);
  std::vector<LedgerRow> rows_;
};

// Per-client activation and parameter scalars.
struct MemoryLedger {
  std::vector<std::int64_t> peak_activation;
  std::vector<std::int64_t> parameters;

  void Observe(int client, std::int64_t activation, std::int64_t params);
  std::int64_t TotalPeakActivation() const;
  std::int64_t TotalParameters() const;
};

// The central server. It holds public keys and ciphertext sums only; there
// is no way to give it a secret key or ask it to decrypt.
class AggregationServer {
 public:
  AggregationServer(int num_clients, bool encrypted,
                    crypto::PublicDirectory directory);

  // Validates the complete uplink of one round, records every link
  // crossing, and returns the downlink messages.
  std::vector<Message> Aggregate(const RoundTag& tag,
                                 const std::vector<Message>& uplink);

  int num_clients() const { return num_clients_; }
  bool encrypted() const { return encrypted_; }
  const CommLedger& ledger() const { return ledger_; }
  CommLedger& mutable_ledger() { return ledger_; }

 private:
  Payload Sum(const std::vector<const Message*>& terms) const;

  int num_clients_;
  bool encrypted_;
  crypto::BlindAggregator blind_;
  CommLedger ledger_;
};

using Outbox = std::vector<Message>;
using Inbox = std::vector<Message>;

// Star-topology bus with one barrier per round.
class Bus {
 public:
  virtual ~Bus() = default;
  // outboxes[j] holds client j's posts for the round, or nullopt if the
  // client never reached the barrier. Returns each client's inbox.
  virtual std::vector<Inbox> RunRound(const RoundTag& tag,
                                      std::vector<std::optional<Outbox>> outboxes) = 0;
  virtual const CommLedger& ledger() const = 0;
  virtual int num_clients() const = 0;
};

class InProcBus : public Bus {
 public:
  InProcBus(int num_clients, bool encrypted, crypto::PublicDirectory directory)
      : server_(num_clients, encrypted, std::move(directory)) {}

  std::vector<Inbox> RunRound(const RoundTag& tag,
                              std::vector<std::optional<Outbox>> outboxes) override;
  const CommLedger& ledger() const override { return server_.ledger(); }
  int num_clients() const override { return server_.num_clients(); }

 private:
  AggregationServer server_;
};

enum class Backend { kInProc, kTcp };

struct BusOptions {
  Backend backend = Backend::kInProc;
  int timeout_ms = 10000;
};

std::unique_ptr<Bus> MakeBus(const BusOptions& options, int num_clients,
                             bool encrypted, crypto::PublicDirectory directory);

// Comparison of a measured iteration against the closed-form overhead,
// evaluated layer by layer:
//   scalars     = sum_l 2 m n_S d^l + 2 m d^{l-1} d^l      (m >= 2; 0 if m = 1)
//   activations = n_S sum_l d^{l-1}
//   parameters  = m sum_l d^{l-1} d^l
// Scalars count every link crossing of the forward, backward and weight
// gradient rounds: per layer the forward uplink carries (m-1) n_S d^l and
// the downlink n_S d^l. Sample-id broadcasts are reported separately.
struct LedgerCheck {
  std::int64_t measured_scalars = 0;
  std::int64_t formula_scalars = 0;
  std::int64_t measured_forward = 0;
  std::int64_t paper_forward = 0;  // L m n_S d evaluated per layer
  std::int64_t sample_ids = 0;
  std::int64_t measured_activations = 0;
  std::int64_t formula_activations = 0;
  std::int64_t measured_parameters = 0;
  std::int64_t formula_parameters = 0;
  bool ok = false;
};

std::int64_t FormulaScalars(int m, const std::vector<int>& dims, std::int64_t n_sampled);
std::int64_t FormulaActivations(const std::vector<int>& dims, std::int64_t n_sampled);
std::int64_t FormulaParameters(int m, const std::vector<int>& dims);

LedgerCheck CheckLedger(const CommLedger& ledger, int iteration, int m,
                        const std::vector<int>& dims, std::int64_t n_sampled,
                        std::int64_t measured_activations,
                        std::int64_t measured_parameters);

}  // namespace ppsgcn::transport

#endif  // PPSGCN_TRANSPORT_H_
