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

#include "ppsgcn/paillier.h"

#include "ppsgcn/common.h"
#include "ppsgcn/error.h"

namespace ppsgcn::crypto {

Randomness::Randomness(std::uint64_t seed)
    : state_(std::make_unique<gmp_randclass>(gmp_randinit_mt)) {
  mpz_class s;
  mpz_import(s.get_mpz_t(), 1, 1, sizeof(seed), 0, 0, &seed);
  state_->seed(s);
}

mpz_class Randomness::Below(const mpz_class& bound) {
  return state_->get_z_range(bound);
}

mpz_class Randomness::Bits(unsigned long bits) { return state_->get_z_bits(bits); }

std::uint64_t Fingerprint(const mpz_class& n) {
  std::uint64_t h = 0;
  const std::size_t limbs = mpz_size(n.get_mpz_t());
  for (std::size_t k = 0; k < limbs; ++k)
    h = Mix64(h ^ static_cast<std::uint64_t>(mpz_getlimbn(n.get_mpz_t(), k)));
  return h;
}

PublicKey::PublicKey(mpz_class n)
    : n_(std::move(n)), n_squared_(n_ * n_), fingerprint_(Fingerprint(n_)) {}

int PublicKey::modulus_bits() const {
  return static_cast<int>(mpz_sizeinbase(n_.get_mpz_t(), 2));
}

Ciphertext PublicKey::Encrypt(const mpz_class& plaintext, Randomness& rng) const {
  if (plaintext < 0 || plaintext >= n_)
    throw RangeError("plaintext outside [0, n)");
  mpz_class r;
  do {
    r = rng.Below(n_);
  } while (r == 0 || gcd(r, n_) != 1);
  Ciphertext c;
  c.key = fingerprint_;
  mpz_powm(c.value.get_mpz_t(), r.get_mpz_t(), n_.get_mpz_t(),
           n_squared_.get_mpz_t());
  // g^x = (1 + n)^x = 1 + x n mod n^2.
  mpz_class gx = plaintext * n_ + 1;
  c.value *= gx;
  c.value %= n_squared_;
  return c;
}

void PublicKey::CheckOwned(const Ciphertext& c) const {
  if (c.key != fingerprint_)
    throw ProtocolError("ciphertext was encrypted under a different key");
}

Ciphertext PublicKey::Add(const Ciphertext& a, const Ciphertext& b) const {
  Ciphertext out = a;
  AddInPlace(out, b);
  return out;
}

void PublicKey::AddInPlace(Ciphertext& acc, const Ciphertext& b) const {
  CheckOwned(acc);
  CheckOwned(b);
  acc.value *= b.value;
  acc.value %= n_squared_;
}

namespace {

// L(x) = (x - 1) / d.
mpz_class LFunction(const mpz_class& x, const mpz_class& d) {
  mpz_class out = x - 1;
  mpz_divexact(out.get_mpz_t(), out.get_mpz_t(), d.get_mpz_t());
  return out;
}

mpz_class PowMod(const mpz_class& base, const mpz_class& exp, const mpz_class& mod) {
  mpz_class out;
  mpz_powm(out.get_mpz_t(), base.get_mpz_t(), exp.get_mpz_t(), mod.get_mpz_t());
  return out;
}

mpz_class InvertMod(const mpz_class& a, const mpz_class& mod) {
  mpz_class out;
  if (mpz_invert(out.get_mpz_t(), a.get_mpz_t(), mod.get_mpz_t()) == 0)
    throw KeygenError("value not invertible");
  return out;
}

mpz_class RandomPrime(Randomness& rng, unsigned long bits) {
  mpz_class x = rng.Bits(bits);
  mpz_setbit(x.get_mpz_t(), bits - 1);
  mpz_setbit(x.get_mpz_t(), bits - 2);
  mpz_class p;
  mpz_nextprime(p.get_mpz_t(), x.get_mpz_t());
  return p;
}

}  // namespace

mpz_class SecretKey::Decrypt(const Ciphertext& c) const {
  public_.CheckOwned(c);
  const mpz_class& cv = c.value;
  const mpz_class mp =
      (LFunction(PowMod(cv % p_squared_, p_ - 1, p_squared_), p_) * hp_) % p_;
  const mpz_class mq =
      (LFunction(PowMod(cv % q_squared_, q_ - 1, q_squared_), q_) * hq_) % q_;
  // CRT: x = mq + q * ((mp - mq) q^-1 mod p).
  mpz_class t = ((mp - mq) * q_inv_p_) % p_;
  if (t < 0) t += p_;
  return mq + q_ * t;
}

mpz_class SecretKey::DecryptTextbook(const Ciphertext& c) const {
  public_.CheckOwned(c);
  const mpz_class& n = public_.n();
  return (LFunction(PowMod(c.value, lambda_, public_.n_squared()), n) * mu_) % n;
}

Keypair Keygen(int modulus_bits, std::uint64_t seed) {
  if (modulus_bits < 64 || modulus_bits % 2 != 0 || modulus_bits > 8192)
    throw KeygenError("modulus bits must be even and in [64, 8192]");
  Randomness rng(DeriveSeed(seed, {0x5eed}));
  const unsigned long half = static_cast<unsigned long>(modulus_bits / 2);
  for (int attempt = 0; attempt < 64; ++attempt) {
    mpz_class p = RandomPrime(rng, half);
    mpz_class q = RandomPrime(rng, half);
    if (p == q) continue;
    mpz_class n = p * q;
    if (static_cast<int>(mpz_sizeinbase(n.get_mpz_t(), 2)) != modulus_bits) continue;
    const mpz_class phi = (p - 1) * (q - 1);
    if (gcd(n, phi) != 1) continue;
    if (p < q) std::swap(p, q);
    Keypair kp;
    kp.public_key = PublicKey(n);
    SecretKey& sk = kp.secret_key;
    sk.public_ = kp.public_key;
    sk.p_ = p;
    sk.q_ = q;
    sk.p_squared_ = p * p;
    sk.q_squared_ = q * q;
    mpz_lcm(sk.lambda_.get_mpz_t(), mpz_class(p - 1).get_mpz_t(),
            mpz_class(q - 1).get_mpz_t());
    sk.mu_ = InvertMod(sk.lambda_ % n, n);
    const mpz_class g = n + 1;
    sk.hp_ = InvertMod(LFunction(PowMod(g % sk.p_squared_, p - 1, sk.p_squared_), p), p);
    sk.hq_ = InvertMod(LFunction(PowMod(g % sk.q_squared_, q - 1, sk.q_squared_), q), q);
    sk.q_inv_p_ = InvertMod(q % p, p);
    return kp;
  }
  throw KeygenError("prime generation failed after 64 attempts");
}

}  // namespace ppsgcn::crypto
