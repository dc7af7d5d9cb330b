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

#include "ppsgcn/secure_aggregation.h"

#include "ppsgcn/error.h"

namespace ppsgcn::crypto {

void PublicDirectory::Register(int owner, PublicKey key) {
  keys_[owner] = std::move(key);
}

const PublicKey& PublicDirectory::Get(int owner) const {
  auto it = keys_.find(owner);
  if (it == keys_.end())
    throw ProtocolError("no public key registered for " + std::to_string(owner));
  return it->second;
}

const SecretKey& ClientKeyring::SecretFor(int owner) const {
  if (owner == client_id) return own;
  if (owner == kGradientKeyOwner) return gradient;
  throw ProtocolError("client " + std::to_string(client_id) +
                      " holds no secret key for " + std::to_string(owner));
}

KeySetup SetupKeys(int num_clients, int modulus_bits, std::uint64_t seed) {
  KeySetup setup;
  std::vector<Keypair> pairs;
  for (int i = 0; i < num_clients; ++i)
    pairs.push_back(Keygen(modulus_bits, DeriveSeed(seed, {static_cast<std::uint64_t>(i)})));
  Keypair gradient = Keygen(modulus_bits, DeriveSeed(seed, {0x67726164ULL}));
  PublicDirectory dir;
  for (int i = 0; i < num_clients; ++i) dir.Register(i, pairs[i].public_key);
  dir.Register(kGradientKeyOwner, gradient.public_key);
  for (int i = 0; i < num_clients; ++i) {
    ClientKeyring ring;
    ring.client_id = i;
    ring.own = pairs[i].secret_key;
    ring.gradient = gradient.secret_key;
    ring.directory = dir;
    setup.clients.push_back(std::move(ring));
  }
  setup.server_directory = std::move(dir);
  return setup;
}

CipherMatrix EncryptMatrix(const Matrix& m, const PublicKey& key, int owner,
                           int frac_bits, int max_terms, Randomness& rng) {
  const FixedPointCodec codec(key.n(), frac_bits, max_terms);
  CipherMatrix c;
  c.rows = m.rows();
  c.cols = m.cols();
  c.owner = owner;
  c.key = key.fingerprint();
  c.data.reserve(static_cast<std::size_t>(m.size()));
  for (const mpz_class& x : codec.EncodeMatrix(m))
    c.data.push_back(std::move(key.Encrypt(x, rng).value));
  return c;
}

Matrix DecryptMatrix(const CipherMatrix& c, const SecretKey& key, int frac_bits,
                     int max_terms) {
  const PublicKey& pk = key.public_key();
  if (c.key != pk.fingerprint())
    throw ProtocolError("cipher matrix encrypted under a different key");
  const FixedPointCodec codec(pk.n(), frac_bits, max_terms);
  std::vector<mpz_class> plain;
  plain.reserve(c.data.size());
  for (const mpz_class& v : c.data) plain.push_back(key.Decrypt({v, c.key}));
  return codec.DecodeMatrix(plain, c.rows, c.cols);
}

CipherMatrix BlindAggregator::Sum(const std::vector<const CipherMatrix*>& terms) const {
  if (terms.empty()) throw ProtocolError("nothing to aggregate");
  const CipherMatrix& first = *terms.front();
  const PublicKey& pk = directory_.Get(first.owner);
  CipherMatrix acc = first;
  for (std::size_t t = 1; t < terms.size(); ++t) {
    const CipherMatrix& x = *terms[t];
    if (x.rows != acc.rows || x.cols != acc.cols)
      throw ProtocolError("aggregation shape mismatch");
    if (x.owner != acc.owner || x.key != acc.key)
      throw ProtocolError("aggregation key mismatch");
    for (std::size_t k = 0; k < acc.data.size(); ++k) {
      acc.data[k] *= x.data[k];
      acc.data[k] %= pk.n_squared();
    }
  }
  if (acc.key != pk.fingerprint())
    throw ProtocolError("ciphertext key does not match registered key");
  return acc;
}

std::map<int, Matrix> SecureAggregate(const std::vector<Contribution>& round,
                                      const KeySetup& keys, int frac_bits,
                                      std::uint64_t seed) {
  const int max_terms = std::max<int>(1, static_cast<int>(keys.clients.size()));
  // Step 2: senders encrypt under the destination's public key.
  std::map<int, std::vector<CipherMatrix>> uplink;
  for (const Contribution& item : round) {
    if (item.src < 0 || item.src >= static_cast<int>(keys.clients.size()))
      throw ProtocolError("unknown sender " + std::to_string(item.src));
    const ClientKeyring& sender = keys.clients[item.src];
    Randomness rng(DeriveSeed(seed, {static_cast<std::uint64_t>(item.src),
                                     static_cast<std::uint64_t>(item.dest + 2)}));
    uplink[item.dest].push_back(EncryptMatrix(item.value,
                                              sender.directory.Get(item.dest),
                                              item.dest, frac_bits, max_terms, rng));
  }
  // Step 3: the server multiplies ciphertexts per destination.
  const BlindAggregator server(keys.server_directory);
  std::map<int, Matrix> out;
  for (const auto& [dest, terms] : uplink) {
    std::vector<const CipherMatrix*> ptrs;
    for (const CipherMatrix& c : terms) ptrs.push_back(&c);
    const CipherMatrix sum = server.Sum(ptrs);
    // Step 4: the destination decrypts.
    if (dest < 0 || dest >= static_cast<int>(keys.clients.size()))
      throw ProtocolError("unknown destination " + std::to_string(dest));
    out[dest] = DecryptMatrix(sum, keys.clients[dest].SecretFor(dest), frac_bits,
                              max_terms);
  }
  return out;
}

}  // namespace ppsgcn::crypto
