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

#ifndef PPSGCN_SECURE_AGGREGATION_H_
#define PPSGCN_SECURE_AGGREGATION_H_

#include <cstdint>
#include <map>
#include <vector>

#include "ppsgcn/common.h"
#include "ppsgcn/fixed_point.h"
#include "ppsgcn/paillier.h"

namespace ppsgcn::crypto {

// Owner id of the keypair shared by all clients (never the server) that
// protects the broadcast weight-gradient sum.
inline constexpr int kGradientKeyOwner = -2;

struct CipherMatrix {
  Eigen::Index rows = 0;
  Eigen::Index cols = 0;
  int owner = 0;          // client whose public key encrypted the entries
  std::uint64_t key = 0;  // fingerprint of that key
  std::vector<mpz_class> data;  // row-major

  std::int64_t size() const { return static_cast<std::int64_t>(data.size()); }
};

// Public keys only; this is all the server ever holds.
class PublicDirectory {
 public:
  void Register(int owner, PublicKey key);
  const PublicKey& Get(int owner) const;
  bool Has(int owner) const { return keys_.count(owner) != 0; }
  const std::map<int, PublicKey>& entries() const { return keys_; }

 private:
  std::map<int, PublicKey> keys_;
};

// Key material of one client: its own keypair and the shared gradient
// secret, plus every public key it may encrypt to.
struct ClientKeyring {
  int client_id = 0;
  SecretKey own;
  SecretKey gradient;
  PublicDirectory directory;

  const SecretKey& SecretFor(int owner) const;
};

struct KeySetup {
  std::vector<ClientKeyring> clients;
  PublicDirectory server_directory;
};

// One keypair per client plus one shared gradient keypair.
KeySetup SetupKeys(int num_clients, int modulus_bits, std::uint64_t seed);

CipherMatrix EncryptMatrix(const Matrix& m, const PublicKey& key, int owner,
                           int frac_bits, int max_terms, Randomness& rng);
Matrix DecryptMatrix(const CipherMatrix& c, const SecretKey& key, int frac_bits,
                     int max_terms);

// Homomorphic sums over ciphertexts under public keys only.
class BlindAggregator {
 public:
  explicit BlindAggregator(PublicDirectory directory)
      : directory_(std::move(directory)) {}

  // Entry-wise homomorphic sum. All terms must share shape and owner key.
  CipherMatrix Sum(const std::vector<const CipherMatrix*>& terms) const;
  const PublicDirectory& directory() const { return directory_; }

 private:
  PublicDirectory directory_;
};

struct Contribution {
  int src = 0;
  int dest = 0;
  Matrix value;
};

// Runs the four protocol steps for one aggregation round: every sender
// encrypts its terms under the destination's public key, a blind server
// multiplies ciphertexts per destination, and each destination decrypts.
std::map<int, Matrix> SecureAggregate(const std::vector<Contribution>& round,
                                      const KeySetup& keys, int frac_bits,
                                      std::uint64_t seed);

}  // namespace ppsgcn::crypto

#endif  // PPSGCN_SECURE_AGGREGATION_H_
