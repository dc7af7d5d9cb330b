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

#include "ppsgcn/tcp_bus.h"

#include <arpa/inet.h>
#include <netinet/in.h>
#include <netinet/tcp.h>
#include <poll.h>
#include <sys/socket.h>
#include <unistd.h>

#include <cerrno>
#include <chrono>
#include <cstring>

#include "ppsgcn/error.h"
#include "ppsgcn/wire.h"

namespace ppsgcn::transport {
namespace {

using wire::Bytes;
using wire::Header;
using wire::Kind;

constexpr std::uint64_t kMaxPayload = std::uint64_t{1} << 36;

enum class Io { kOk, kClosed, kTimeout };

std::string Errno(const char* what) { return std::string(what) + ": " + std::strerror(errno); }

Io ReadFull(int fd, std::uint8_t* buf, std::size_t n, int timeout_ms) {
  const auto deadline = std::chrono::steady_clock::now() + std::chrono::milliseconds(timeout_ms);
  std::size_t got = 0;
  while (got < n) {
    const auto left = std::chrono::duration_cast<std::chrono::milliseconds>(
                          deadline - std::chrono::steady_clock::now()).count();
    if (left <= 0) return Io::kTimeout;
    pollfd p{fd, POLLIN, 0};
    const int r = ::poll(&p, 1, static_cast<int>(left));
    if (r < 0) {
      if (errno == EINTR) continue;
      return Io::kClosed;
    }
    if (r == 0) return Io::kTimeout;
    const ssize_t k = ::recv(fd, buf + got, n - got, 0);
    if (k == 0) return Io::kClosed;
    if (k < 0) {
      if (errno == EINTR || errno == EAGAIN) continue;
      return Io::kClosed;
    }
    got += static_cast<std::size_t>(k);
  }
  return Io::kOk;
}

bool WriteFull(int fd, const Bytes& b) {
  std::size_t sent = 0;
  while (sent < b.size()) {
    const ssize_t k = ::send(fd, b.data() + sent, b.size() - sent, MSG_NOSIGNAL);
    if (k < 0) {
      if (errno == EINTR) continue;
      return false;
    }
    sent += static_cast<std::size_t>(k);
  }
  return true;
}

struct Frame {
  Header header;
  Bytes payload;
};

Io ReadFrame(int fd, Frame& f, int timeout_ms) {
  std::uint8_t head[wire::kHeaderBytes];
  Io io = ReadFull(fd, head, sizeof head, timeout_ms);
  if (io != Io::kOk) return io;
  f.header = wire::DecodeHeader(head);
  if (f.header.length > kMaxPayload) throw ProtocolError("oversized frame");
  f.payload.resize(f.header.length);
  if (f.header.length == 0) return Io::kOk;
  return ReadFull(fd, f.payload.data(), f.payload.size(), timeout_ms);
}

void CloseFd(int& fd) {
  if (fd >= 0) {
    ::shutdown(fd, SHUT_RDWR);
    ::close(fd);
    fd = -1;
  }
}

}  // namespace

TcpBus::TcpBus(int num_clients, bool encrypted, crypto::PublicDirectory directory,
               int timeout_ms)
    : num_clients_(num_clients),
      timeout_ms_(timeout_ms),
      client_fds_(num_clients, -1),
      server_(num_clients, encrypted, std::move(directory)) {
  if (timeout_ms <= 0) throw ValidationError("tcp timeout must be positive");
  listen_fd_ = ::socket(AF_INET, SOCK_STREAM, 0);
  if (listen_fd_ < 0) throw TransportError(Errno("socket"));
  sockaddr_in addr{};
  addr.sin_family = AF_INET;
  addr.sin_addr.s_addr = htonl(INADDR_LOOPBACK);
  addr.sin_port = 0;
  socklen_t len = sizeof addr;
  if (::bind(listen_fd_, reinterpret_cast<sockaddr*>(&addr), sizeof addr) != 0 ||
      ::listen(listen_fd_, num_clients + 4) != 0 ||
      ::getsockname(listen_fd_, reinterpret_cast<sockaddr*>(&addr), &len) != 0) {
    const std::string why = Errno("bind");
    CloseFd(listen_fd_);
    throw TransportError(why);
  }
  port_ = ntohs(addr.sin_port);

  thread_ = std::thread([this] { Serve(); });

  for (int j = 0; j < num_clients; ++j) {
    int fd = ::socket(AF_INET, SOCK_STREAM, 0);
    if (fd < 0 || ::connect(fd, reinterpret_cast<sockaddr*>(&addr), sizeof addr) != 0) {
      const std::string why = Errno("connect");
      if (fd >= 0) ::close(fd);
      stopping_ = true;
      for (int& c : client_fds_) CloseFd(c);
      CloseFd(listen_fd_);
      thread_.join();
      throw TransportError(why);
    }
    const int one = 1;
    ::setsockopt(fd, IPPROTO_TCP, TCP_NODELAY, &one, sizeof one);
    client_fds_[j] = fd;
    WriteFull(fd, wire::EncodeControl(Kind::kHello, {}, j, kServer));
  }
}

TcpBus::~TcpBus() {
  stopping_ = true;
  for (int& fd : client_fds_) CloseFd(fd);
  CloseFd(listen_fd_);
  if (thread_.joinable()) thread_.join();
}

const CommLedger& TcpBus::ledger() const {
  std::lock_guard<std::mutex> lock(server_mu_);
  return server_.ledger();
}

void TcpBus::DisconnectClient(int client) {
  if (client < 0 || client >= num_clients_) throw RangeError("no such client");
  CloseFd(client_fds_[client]);
}

void TcpBus::Serve() {
  const int m = num_clients_;
  std::vector<int> fds(m, -1);
  int accepted = 0;
  while (accepted < m && !stopping_) {
    pollfd p{listen_fd_, POLLIN, 0};
    const int r = ::poll(&p, 1, timeout_ms_);
    if (r <= 0) {
      if (r < 0 && errno == EINTR) continue;
      break;
    }
    int fd = ::accept(listen_fd_, nullptr, nullptr);
    if (fd < 0) break;
    Frame hello;
    try {
      if (ReadFrame(fd, hello, timeout_ms_) != Io::kOk || hello.header.kind != Kind::kHello ||
          hello.header.src < 0 || hello.header.src >= m || fds[hello.header.src] >= 0) {
        ::close(fd);
        continue;
      }
    } catch (const Error&) {
      ::close(fd);
      continue;
    }
    const int one = 1;
    ::setsockopt(fd, IPPROTO_TCP, TCP_NODELAY, &one, sizeof one);
    fds[hello.header.src] = fd;
    ++accepted;
  }
  if (accepted == m) ServeRounds(fds);
  for (int& fd : fds) CloseFd(fd);
}

void TcpBus::ServeRounds(const std::vector<int>& fds) {
  const int m = num_clients_;
  std::vector<bool> alive(m, true);
  while (!stopping_) {
    std::vector<Message> uplink;
    std::optional<RoundTag> tag;
    std::string failure;
    bool timeout = false;
    int closed = 0;
    // A round starts whenever any client posts; from then on every client
    // is held to the barrier timeout.
    while (!stopping_) {
      std::vector<pollfd> ps;
      for (int j = 0; j < m; ++j)
        if (alive[j]) ps.push_back({fds[j], POLLIN, 0});
      if (ps.empty()) return;
      const int r = ::poll(ps.data(), ps.size(), 200);
      if (r > 0) break;
      if (r < 0 && errno != EINTR) return;
    }
    if (stopping_) return;
    for (int j = 0; j < m; ++j) {
      if (!alive[j]) {
        if (failure.empty()) {
          failure = "client " + std::to_string(j) + " is disconnected";
          timeout = true;
        }
        continue;
      }
      while (true) {
        Frame f;
        Io io;
        try {
          io = ReadFrame(fds[j], f, timeout_ms_);
        } catch (const ProtocolError& e) {
          failure = e.what();
          alive[j] = false;
          break;
        }
        if (io != Io::kOk) {
          if (io == Io::kClosed) {
            alive[j] = false;
            ++closed;
          }
          if (failure.empty()) {
            failure = "client " + std::to_string(j) +
                      (io == Io::kClosed ? " disconnected before" : " never reached") +
                      " the round barrier";
            timeout = true;
          }
          break;
        }
        const RoundTag t{f.header.iteration, f.header.layer, f.header.phase};
        if (f.header.kind == Kind::kEnd) {
          if (tag && !(*tag == t) && failure.empty()) failure = "clients disagree on the round";
          tag = t;
          break;
        }
        try {
          uplink.push_back(wire::DecodeMessage(f.header, f.payload));
          if (uplink.back().src != j && failure.empty())
            failure = "client " + std::to_string(j) + " posted as another client";
        } catch (const ProtocolError& e) {
          if (failure.empty()) failure = e.what();
        }
      }
    }
    if (stopping_ || closed == m) return;
    const RoundTag round = tag.value_or(RoundTag{});

    std::vector<Message> downlink;
    if (failure.empty()) {
      std::lock_guard<std::mutex> lock(server_mu_);
      try {
        downlink = server_.Aggregate(round, uplink);
      } catch (const ProtocolError& e) {
        failure = e.what();
      }
    }
    if (!failure.empty()) {
      const Bytes err = wire::EncodeControl(
          Kind::kError, round, kServer, kAllClients, failure,
          timeout ? wire::ErrorCode::kTimeout : wire::ErrorCode::kProtocol);
      for (int j = 0; j < m; ++j)
        if (alive[j]) WriteFull(fds[j], err);
      return;
    }
    for (int j = 0; j < m; ++j) {
      for (const Message& msg : downlink)
        if (msg.dest == j && !WriteFull(fds[j], wire::EncodeMessage(msg))) alive[j] = false;
      WriteFull(fds[j], wire::EncodeControl(Kind::kEnd, round, kServer, j));
    }
  }
}

std::vector<Inbox> TcpBus::RunRound(const RoundTag& tag,
                                    std::vector<std::optional<Outbox>> outboxes) {
  const int m = num_clients_;
  if (static_cast<int>(outboxes.size()) != m)
    throw ProtocolError("round needs one outbox slot per client");
  if (failure_) {
    if (failure_is_timeout_) throw BarrierTimeout(*failure_);
    throw ProtocolError(*failure_);
  }
  for (int j = 0; j < m; ++j) {
    if (!outboxes[j] || client_fds_[j] < 0) continue;
    for (const Message& msg : *outboxes[j])
      if (msg.src != j) throw ProtocolError("message src does not match poster");
  }
  for (int j = 0; j < m; ++j) {
    if (!outboxes[j] || client_fds_[j] < 0) continue;
    for (const Message& msg : *outboxes[j]) WriteFull(client_fds_[j], wire::EncodeMessage(msg));
    WriteFull(client_fds_[j], wire::EncodeControl(Kind::kEnd, tag, j, kServer));
  }

  // The server may itself wait out one barrier timeout before answering.
  const int wait_ms = 2 * timeout_ms_ + 1000;
  std::vector<Inbox> inboxes(m);
  for (int j = 0; j < m; ++j) {
    if (client_fds_[j] < 0) continue;
    while (true) {
      Frame f;
      const Io io = ReadFrame(client_fds_[j], f, wait_ms);
      if (io != Io::kOk) {
        failure_ = "client " + std::to_string(j) + " lost its server connection";
        failure_is_timeout_ = true;
        throw BarrierTimeout(*failure_);
      }
      if (f.header.kind == Kind::kEnd) break;
      if (f.header.kind == Kind::kError) {
        const bool is_timeout = !f.payload.empty() &&
                                f.payload[0] == static_cast<std::uint8_t>(wire::ErrorCode::kTimeout);
        failure_ = std::string(f.payload.begin() + (f.payload.empty() ? 0 : 1), f.payload.end());
        failure_is_timeout_ = is_timeout;
        if (is_timeout) throw BarrierTimeout(*failure_);
        throw ProtocolError(*failure_);
      }
      inboxes[j].push_back(wire::DecodeMessage(f.header, f.payload));
    }
  }
  return inboxes;
}

}  // namespace ppsgcn::transport
