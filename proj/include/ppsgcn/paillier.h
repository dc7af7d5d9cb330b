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

#ifndef PPSGCN_PAILLIER_H_
#define PPSGCN_PAILLIER_H_

#include <cstdint>
#include <memory>

#include <gmpxx.h>

namespace ppsgcn::crypto {

// Seeded source of encryption randomness.
class Randomness {
 public:
  explicit Randomness(std::uint64_t seed);
  // Uniform in [0, bound).
  mpz_class Below(const mpz_class& bound);
  mpz_class Bits(unsigned long bits);

 private:
  std::unique_ptr<gmp_randclass> state_;
};

struct Ciphertext {
  mpz_class value;
  std::uint64_t key = 0;  // fingerprint of the encrypting public key
};

// Paillier public key with generator g = n + 1.
class PublicKey {
 public:
  PublicKey() = default;
  explicit PublicKey(mpz_class n);

  const mpz_class& n() const { return n_; }
  const mpz_class& n_squared() const { return n_squared_; }
  std::uint64_t fingerprint() const { return fingerprint_; }
  int modulus_bits() const;

  // (1 + x n) r^n mod n^2 for x in [0, n).
  Ciphertext Encrypt(const mpz_class& plaintext, Randomness& rng) const;
  // Product of ciphertexts: decrypts to the sum of plaintexts mod n. Throws
  // ProtocolError when either operand was made under a different key.
  Ciphertext Add(const Ciphertext& a, const Ciphertext& b) const;
  void AddInPlace(Ciphertext& acc, const Ciphertext& b) const;
  void CheckOwned(const Ciphertext& c) const;

  bool operator==(const PublicKey& other) const { return n_ == other.n_; }

 private:
  mpz_class n_;
  mpz_class n_squared_;
  std::uint64_t fingerprint_ = 0;
};

struct Keypair;

// Secret key with CRT decryption.
class SecretKey {
 public:
  const PublicKey& public_key() const { return public_; }
  mpz_class Decrypt(const Ciphertext& c) const;
  // lambda = lcm(p-1, q-1) and mu = lambda^-1 mod n (textbook decryption).
  const mpz_class& lambda() const { return lambda_; }
  const mpz_class& mu() const { return mu_; }
  // Textbook L(c^lambda mod n^2) mu mod n; slower than Decrypt.
  mpz_class DecryptTextbook(const Ciphertext& c) const;

 private:
  friend Keypair Keygen(int, std::uint64_t);
  PublicKey public_;
  mpz_class p_, q_, p_squared_, q_squared_;
  mpz_class hp_, hq_, q_inv_p_;
  mpz_class lambda_, mu_;
};

struct Keypair {
  PublicKey public_key;
  SecretKey secret_key;
};

// Two distinct primes of modulus_bits / 2 bits each with the top two bits
// set, so n has exactly modulus_bits bits. Deterministic given the seed.
Keypair Keygen(int modulus_bits, std::uint64_t seed);

// Stable 64-bit digest of a modulus; tags ciphertexts with their key.
std::uint64_t Fingerprint(const mpz_class& n);

}  // namespace ppsgcn::crypto

#endif  // PPSGCN_PAILLIER_H_
