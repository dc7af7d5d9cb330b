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

#include "ppsgcn/wire.h"

#include <cstring>
#include <limits>

#include "ppsgcn/error.h"

namespace ppsgcn::transport::wire {
namespace {

template <typename T>
void Put(Bytes& out, T value) {
  using U = std::make_unsigned_t<T>;
  U u = static_cast<U>(value);
  for (std::size_t i = 0; i < sizeof(T); ++i) out.push_back(static_cast<std::uint8_t>(u >> (8 * i)));
}

template <typename T>
T Get(const std::uint8_t* in) {
  using U = std::make_unsigned_t<T>;
  U u = 0;
  for (std::size_t i = 0; i < sizeof(T); ++i) u |= static_cast<U>(in[i]) << (8 * i);
  return static_cast<T>(u);
}

class Reader {
 public:
  explicit Reader(const Bytes& b) : b_(b) {}

  template <typename T>
  T Take() {
    Need(sizeof(T));
    T v = Get<T>(b_.data() + pos_);
    pos_ += sizeof(T);
    return v;
  }
  const std::uint8_t* Raw(std::size_t n) {
    Need(n);
    const std::uint8_t* p = b_.data() + pos_;
    pos_ += n;
    return p;
  }
  void Finish() const {
    if (pos_ != b_.size()) throw ProtocolError("trailing bytes in frame payload");
  }

 private:
  void Need(std::size_t n) const {
    if (b_.size() - pos_ < n) throw ProtocolError("truncated frame payload");
  }
  const Bytes& b_;
  std::size_t pos_ = 0;
};

void PutShape(Bytes& out, Eigen::Index rows, Eigen::Index cols) {
  if (rows > std::numeric_limits<std::int32_t>::max() ||
      cols > std::numeric_limits<std::int32_t>::max())
    throw RangeError("matrix too large for a frame");
  Put<std::int32_t>(out, static_cast<std::int32_t>(rows));
  Put<std::int32_t>(out, static_cast<std::int32_t>(cols));
}

Bytes Frame(Kind kind, const RoundTag& tag, std::int32_t src, std::int32_t dest,
            const Bytes& payload) {
  Header h;
  h.length = payload.size();
  h.kind = kind;
  h.phase = tag.phase;
  h.src = src;
  h.dest = dest;
  h.iteration = tag.iteration;
  if (tag.layer < std::numeric_limits<std::int16_t>::min() ||
      tag.layer > std::numeric_limits<std::int16_t>::max())
    throw RangeError("layer index does not fit the frame header");
  h.layer = static_cast<std::int16_t>(tag.layer);
  Bytes out(kHeaderBytes);
  EncodeHeader(h, out.data());
  out.insert(out.end(), payload.begin(), payload.end());
  return out;
}

}  // namespace

void EncodeHeader(const Header& h, std::uint8_t* out) {
  Bytes b;
  b.reserve(kHeaderBytes);
  Put<std::uint64_t>(b, h.length);
  b.push_back(static_cast<std::uint8_t>(static_cast<std::uint8_t>(h.kind) << 4 |
                                        static_cast<std::uint8_t>(h.phase)));
  Put<std::int32_t>(b, h.src);
  Put<std::int32_t>(b, h.dest);
  Put<std::int32_t>(b, h.iteration);
  Put<std::int16_t>(b, h.layer);
  std::memcpy(out, b.data(), kHeaderBytes);
}

Header DecodeHeader(const std::uint8_t* in) {
  Header h;
  h.length = Get<std::uint64_t>(in);
  const std::uint8_t tag = in[8];
  h.kind = static_cast<Kind>(tag >> 4);
  const std::uint8_t phase = tag & 0x0F;
  if (phase > static_cast<std::uint8_t>(Phase::kBackwardW))
    throw ProtocolError("unknown phase " + std::to_string(phase));
  h.phase = static_cast<Phase>(phase);
  h.src = Get<std::int32_t>(in + 9);
  h.dest = Get<std::int32_t>(in + 13);
  h.iteration = Get<std::int32_t>(in + 17);
  h.layer = Get<std::int16_t>(in + 21);
  return h;
}

Bytes EncodeMessage(const Message& message) {
  Bytes payload;
  Kind kind = Kind::kMatrix;
  if (const auto* m = std::get_if<Matrix>(&message.payload)) {
    PutShape(payload, m->rows(), m->cols());
    payload.reserve(8 + 8 * m->size());
    for (Eigen::Index r = 0; r < m->rows(); ++r)
      for (Eigen::Index c = 0; c < m->cols(); ++c) {
        std::uint64_t bits;
        const double v = (*m)(r, c);
        std::memcpy(&bits, &v, sizeof bits);
        Put<std::uint64_t>(payload, bits);
      }
  } else if (const auto* c = std::get_if<crypto::CipherMatrix>(&message.payload)) {
    kind = Kind::kCipher;
    PutShape(payload, c->rows, c->cols);
    Put<std::int32_t>(payload, c->owner);
    Put<std::uint64_t>(payload, c->key);
    for (const mpz_class& v : c->data) {
      if (sgn(v) < 0) throw ProtocolError("negative ciphertext");
      const std::size_t n = sgn(v) == 0 ? 0 : (mpz_sizeinbase(v.get_mpz_t(), 2) + 7) / 8;
      Put<std::uint32_t>(payload, static_cast<std::uint32_t>(n));
      const std::size_t at = payload.size();
      payload.resize(at + n);
      if (n != 0) mpz_export(payload.data() + at, nullptr, 1, 1, 1, 0, v.get_mpz_t());
    }
  } else {
    kind = Kind::kIds;
    const IdSet& ids = std::get<IdSet>(message.payload);
    Put<std::uint32_t>(payload, static_cast<std::uint32_t>(ids.size()));
    for (std::int32_t id : ids) Put<std::int32_t>(payload, id);
  }
  return Frame(kind, message.tag, message.src, message.dest, payload);
}

Message DecodeMessage(const Header& header, const Bytes& payload) {
  if (header.length != payload.size()) throw ProtocolError("frame length mismatch");
  Message msg;
  msg.src = header.src;
  msg.dest = header.dest;
  msg.tag = {header.iteration, header.layer, header.phase};
  Reader r(payload);
  switch (header.kind) {
    case Kind::kMatrix: {
      const auto rows = r.Take<std::int32_t>();
      const auto cols = r.Take<std::int32_t>();
      if (rows < 0 || cols < 0) throw ProtocolError("negative matrix shape");
      Matrix m(rows, cols);
      for (Eigen::Index i = 0; i < rows; ++i)
        for (Eigen::Index j = 0; j < cols; ++j) {
          const auto bits = r.Take<std::uint64_t>();
          double v;
          std::memcpy(&v, &bits, sizeof v);
          m(i, j) = v;
        }
      msg.payload = std::move(m);
      break;
    }
    case Kind::kCipher: {
      crypto::CipherMatrix c;
      c.rows = r.Take<std::int32_t>();
      c.cols = r.Take<std::int32_t>();
      if (c.rows < 0 || c.cols < 0) throw ProtocolError("negative matrix shape");
      c.owner = r.Take<std::int32_t>();
      c.key = r.Take<std::uint64_t>();
      c.data.resize(static_cast<std::size_t>(c.rows * c.cols));
      for (mpz_class& v : c.data) {
        const auto n = r.Take<std::uint32_t>();
        const std::uint8_t* p = r.Raw(n);
        if (n == 0) {
          v = 0;
        } else {
          mpz_import(v.get_mpz_t(), n, 1, 1, 1, 0, p);
        }
      }
      msg.payload = std::move(c);
      break;
    }
    case Kind::kIds: {
      const auto n = r.Take<std::uint32_t>();
      IdSet ids(n);
      for (auto& id : ids) id = r.Take<std::int32_t>();
      msg.payload = std::move(ids);
      break;
    }
    default:
      throw ProtocolError("frame kind is not a data payload");
  }
  r.Finish();
  return msg;
}

Bytes EncodeControl(Kind kind, const RoundTag& tag, std::int32_t src,
                    std::int32_t dest, const std::string& text, ErrorCode code) {
  Bytes payload;
  if (kind == Kind::kError) {
    payload.push_back(static_cast<std::uint8_t>(code));
    payload.insert(payload.end(), text.begin(), text.end());
  }
  return Frame(kind, tag, src, dest, payload);
}

}  // namespace ppsgcn::transport::wire
