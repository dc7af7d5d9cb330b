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

#ifndef PPSGCN_TCP_BUS_H_
#define PPSGCN_TCP_BUS_H_

#include <atomic>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "ppsgcn/transport.h"

namespace ppsgcn::transport {

// Bus whose clients and server exchange framed messages over loopback TCP.
// The server runs on its own thread with its own sockets and state; the
// only thing shared with the client side is the byte stream.
class TcpBus : public Bus {
 public:
  TcpBus(int num_clients, bool encrypted, crypto::PublicDirectory directory,
         int timeout_ms);
  ~TcpBus() override;
  TcpBus(const TcpBus&) = delete;
  TcpBus& operator=(const TcpBus&) = delete;

  std::vector<Inbox> RunRound(const RoundTag& tag,
                              std::vector<std::optional<Outbox>> outboxes) override;
  const CommLedger& ledger() const override;
  int num_clients() const override { return num_clients_; }

  // Closes client j's connection, as if its process died.
  void DisconnectClient(int client);
  int port() const { return port_; }

 private:
  void Serve();
  void ServeRounds(const std::vector<int>& fds);

  int num_clients_;
  int timeout_ms_;
  int port_ = 0;
  int listen_fd_ = -1;
  std::vector<int> client_fds_;
  AggregationServer server_;
  mutable std::mutex server_mu_;
  std::thread thread_;
  std::atomic<bool> stopping_{false};
  std::optional<std::string> failure_;
  bool failure_is_timeout_ = false;
};

}  // namespace ppsgcn::transport

#endif  // PPSGCN_TCP_BUS_H_
