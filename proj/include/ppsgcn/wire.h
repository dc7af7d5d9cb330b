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

#ifndef PPSGCN_WIRE_H_
#define PPSGCN_WIRE_H_

#include <cstdint>
#include <string>
#include <vector>

#include "ppsgcn/transport.h"

namespace ppsgcn::transport::wire {

// Frame header, little-endian:
//   u64 payload length | u8 tag | i32 src | i32 dest | i32 iteration | i16 layer
// The tag byte carries the phase in its low nibble and the payload kind in
// its high nibble.
inline constexpr std::size_t kHeaderBytes = 8 + 1 + 4 + 4 + 4 + 2;

enum class Kind : std::uint8_t {
  kMatrix = 0x0,
  kCipher = 0x1,
  kIds = 0x2,
  kEnd = 0xD,    // closes one side of a round
  kHello = 0xE,  // first frame on a connection; src names the client
  kError = 0xF,
};

struct Header {
  std::uint64_t length = 0;
  Kind kind = Kind::kMatrix;
  Phase phase = Phase::kForward;
  std::int32_t src = 0;
  std::int32_t dest = 0;
  std::int32_t iteration = 0;
  std::int16_t layer = 0;
};

using Bytes = std::vector<std::uint8_t>;

void EncodeHeader(const Header& h, std::uint8_t* out);
Header DecodeHeader(const std::uint8_t* in);

// Full frame (header followed by payload) for a message.
Bytes EncodeMessage(const Message& message);
Message DecodeMessage(const Header& header, const Bytes& payload);

// Control frames. Error payloads are a one-byte code and a UTF-8 reason.
enum class ErrorCode : std::uint8_t { kTimeout = 1, kProtocol = 2 };

Bytes EncodeControl(Kind kind, const RoundTag& tag, std::int32_t src,
                    std::int32_t dest, const std::string& text = {},
                    ErrorCode code = ErrorCode::kProtocol);

}  // namespace ppsgcn::transport::wire

#endif  // PPSGCN_WIRE_H_
