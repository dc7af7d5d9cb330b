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

#include <cmath>
#include <type_traits>

#include <gtest/gtest.h>

#include "ppsgcn/error.h"
#include "ppsgcn/fixed_point.h"
#include "ppsgcn/paillier.h"
#include "ppsgcn/secure_aggregation.h"
#include "test_util.h"

namespace ppsgcn::crypto {
namespace {

using ::ppsgcn::testing::RandomMatrix;

constexpr double kQuantum = 0x1p-40;

// 512-bit keys are slow enough to share across tests.
const Keypair& TestKeys() {
  static const Keypair k = Keygen(512, 7);
  return k;
}

TEST(KeygenTest, ModulusShape) {
  const Keypair& k = TestKeys();
  EXPECT_EQ(k.public_key.modulus_bits(), 512);
  EXPECT_EQ(mpz_probab_prime_p(k.public_key.n().get_mpz_t(), 25), 0);
  EXPECT_EQ(k.public_key.n_squared(), k.public_key.n() * k.public_key.n());
  // lambda * mu = 1 mod n is what decryption relies on.
  EXPECT_EQ((k.secret_key.lambda() * k.secret_key.mu()) % k.public_key.n(), 1);
}

TEST(KeygenTest, DeterministicGivenSeed) {
  EXPECT_EQ(Keygen(256, 3).public_key.n(), Keygen(256, 3).public_key.n());
  EXPECT_NE(Keygen(256, 3).public_key.n(), Keygen(256, 4).public_key.n());
}

TEST(KeygenTest, RejectsBadSizes) {
  EXPECT_THROW(Keygen(511, 1), KeygenError);
  EXPECT_THROW(Keygen(16, 1), KeygenError);
}

TEST(PaillierTest, ZeroRoundTrip) {
  Randomness rng(1);
  const Keypair& k = TestKeys();
  EXPECT_EQ(k.secret_key.Decrypt(k.public_key.Encrypt(0, rng)), 0);
}

TEST(PaillierTest, RandomRoundTrips) {
  Randomness rng(2);
  const Keypair& k = TestKeys();
  for (int t = 0; t < 1000; ++t) {
    const mpz_class x = rng.Below(k.public_key.n());
    const Ciphertext c = k.public_key.Encrypt(x, rng);
    ASSERT_GE(c.value, 0);
    ASSERT_LT(c.value, k.public_key.n_squared());
    ASSERT_EQ(k.secret_key.Decrypt(c), x);
  }
}

TEST(PaillierTest, CrtDecryptMatchesTextbook) {
  Randomness rng(3);
  const Keypair& k = TestKeys();
  for (int t = 0; t < 20; ++t) {
    const Ciphertext c = k.public_key.Encrypt(rng.Below(k.public_key.n()), rng);
    EXPECT_EQ(k.secret_key.Decrypt(c), k.secret_key.DecryptTextbook(c));
  }
}

TEST(PaillierTest, EncryptionIsRandomized) {
  Randomness rng(4);
  const Keypair& k = TestKeys();
  const Ciphertext a = k.public_key.Encrypt(42, rng);
  const Ciphertext b = k.public_key.Encrypt(42, rng);
  EXPECT_NE(a.value, b.value);
  EXPECT_EQ(k.secret_key.Decrypt(a), 42);
  EXPECT_EQ(k.secret_key.Decrypt(b), 42);
}

TEST(PaillierTest, OutOfRangePlaintextThrows) {
  Randomness rng(5);
  const Keypair& k = TestKeys();
  EXPECT_THROW(k.public_key.Encrypt(k.public_key.n(), rng), RangeError);
  EXPECT_THROW(k.public_key.Encrypt(-1, rng), RangeError);
}

TEST(HomomorphicTest, SmallIntegers) {
  Randomness rng(6);
  const Keypair& k = TestKeys();
  const Ciphertext s = k.public_key.Add(k.public_key.Encrypt(3, rng), k.public_key.Encrypt(4, rng));
  EXPECT_EQ(k.secret_key.Decrypt(s), 7);
}

TEST(HomomorphicTest, AdditiveIdentity) {
  Randomness rng(7);
  const Keypair& k = TestKeys();
  const mpz_class x = rng.Below(k.public_key.n());
  const Ciphertext s = k.public_key.Add(k.public_key.Encrypt(x, rng), k.public_key.Encrypt(0, rng));
  EXPECT_EQ(k.secret_key.Decrypt(s), x);
}

TEST(HomomorphicTest, EightTermSumWrapsModN) {
  Randomness rng(8);
  const Keypair& k = TestKeys();
  const mpz_class& n = k.public_key.n();
  for (int trial = 0; trial < 10; ++trial) {
    mpz_class expected = 0;
    Ciphertext acc = k.public_key.Encrypt(0, rng);
    for (int t = 0; t < 8; ++t) {
      const mpz_class x = rng.Below(n);
      expected = (expected + x) % n;
      k.public_key.AddInPlace(acc, k.public_key.Encrypt(x, rng));
    }
    EXPECT_EQ(k.secret_key.Decrypt(acc), expected);
  }
}

TEST(HomomorphicTest, PairwisePropertyOverRandomDraws) {
  Randomness rng(9);
  const Keypair& k = TestKeys();
  const mpz_class& n = k.public_key.n();
  for (int t = 0; t < 200; ++t) {
    const mpz_class x = rng.Below(n), y = rng.Below(n);
    const mpz_class sum = (x + y) % n;
    EXPECT_EQ(k.secret_key.Decrypt(k.public_key.Add(k.public_key.Encrypt(x, rng),
                                                    k.public_key.Encrypt(y, rng))),
              sum);
  }
}

TEST(HomomorphicTest, KeyMismatchThrows) {
  Randomness rng(10);
  const Keypair other = Keygen(256, 11);
  const Ciphertext a = TestKeys().public_key.Encrypt(1, rng);
  const Ciphertext b = other.public_key.Encrypt(1, rng);
  EXPECT_THROW(TestKeys().public_key.Add(a, b), ProtocolError);
  EXPECT_THROW(other.secret_key.Decrypt(a), ProtocolError);
}

class CodecTest : public ::testing::Test {
 protected:
  FixedPointCodec codec_{TestKeys().public_key.n(), 40, 8};
};

TEST_F(CodecTest, Zero) {
  EXPECT_EQ(codec_.Encode(0.0), 0);
  EXPECT_EQ(codec_.Decode(0), 0.0);
}

TEST_F(CodecTest, NegativesWrapToUpperHalf) {
  const mpz_class v = codec_.Encode(-1.0);
  EXPECT_GT(v, TestKeys().public_key.n() / 2);
  EXPECT_EQ(codec_.Decode(v), -1.0);
}

TEST_F(CodecTest, SumOfMixedSigns) {
  const mpz_class s = (codec_.Encode(-1.5) + codec_.Encode(2.75)) % TestKeys().public_key.n();
  EXPECT_NEAR(codec_.Decode(s), 1.25, 2 * kQuantum);
}

TEST_F(CodecTest, MatrixRoundTrip) {
  const Matrix m = RandomMatrix(16, 16, 12, 100.0);
  const Matrix back = codec_.DecodeMatrix(codec_.EncodeMatrix(m), 16, 16);
  EXPECT_LE((back - m).cwiseAbs().maxCoeff(), kQuantum);
}

TEST_F(CodecTest, GuardMatchesFormula) {
  // 512/2 - 40 - log2(8) - 1
  EXPECT_EQ(codec_.magnitude_limit(), std::ldexp(1.0, 212));
  EXPECT_THROW(codec_.Encode(std::ldexp(1.0, 212)), OverflowError);
  EXPECT_NO_THROW(codec_.Encode(-std::ldexp(1.0, 211)));
  EXPECT_THROW(codec_.Encode(std::nan("")), OverflowError);
  EXPECT_THROW(codec_.Encode(INFINITY), OverflowError);
}

TEST_F(CodecTest, MaxTermSumAtLimitDoesNotWrap) {
  const double x = std::nextafter(codec_.magnitude_limit(), 0.0);
  mpz_class acc = 0;
  for (int t = 0; t < 8; ++t) acc += codec_.Encode(-x);
  EXPECT_EQ(codec_.Decode(acc % TestKeys().public_key.n()), -8 * x);
}

TEST(SecureAggregateTest, SingleSenderPassThrough) {
  const KeySetup keys = SetupKeys(2, 512, 13);
  const Matrix x = RandomMatrix(3, 4, 14);
  const auto out = SecureAggregate({{0, 1, x}}, keys, 40, 15);
  ASSERT_EQ(out.size(), 1u);
  EXPECT_LE((out.at(1) - x).cwiseAbs().maxCoeff(), kQuantum);
}

TEST(SecureAggregateTest, FourSenders) {
  const KeySetup keys = SetupKeys(5, 512, 16);
  std::vector<Contribution> round;
  Matrix plain = Matrix::Zero(8, 8);
  for (int src = 1; src <= 4; ++src) {
    round.push_back({src, 0, RandomMatrix(8, 8, 20 + src, 10.0)});
    plain += round.back().value;
  }
  const auto out = SecureAggregate(round, keys, 40, 17);
  EXPECT_LE((out.at(0) - plain).cwiseAbs().maxCoeff(), 4 * kQuantum);
}

TEST(SecureAggregateTest, DecodedResultIsDeterministic) {
  const KeySetup keys = SetupKeys(3, 512, 18);
  const std::vector<Contribution> round{{0, 2, RandomMatrix(2, 2, 1)},
                                        {1, 2, RandomMatrix(2, 2, 2)}};
  EXPECT_EQ(SecureAggregate(round, keys, 40, 1).at(2), SecureAggregate(round, keys, 40, 99).at(2));
}

TEST(SecureAggregateTest, ShapeMismatchThrows) {
  const KeySetup keys = SetupKeys(3, 512, 19);
  EXPECT_THROW(SecureAggregate({{0, 2, Matrix::Zero(2, 2)}, {1, 2, Matrix::Zero(2, 3)}}, keys, 40, 1),
               ProtocolError);
}

TEST(SecureAggregateTest, OverflowBeforeEncryption) {
  const KeySetup keys = SetupKeys(2, 512, 20);
  EXPECT_THROW(SecureAggregate({{0, 1, Matrix::Constant(1, 1, 1e80)}}, keys, 40, 1),
               OverflowError);
}

TEST(SecureAggregateTest, UnknownDestinationThrows) {
  const KeySetup keys = SetupKeys(2, 512, 21);
  EXPECT_THROW(SecureAggregate({{0, 5, Matrix::Zero(1, 1)}}, keys, 40, 1), ProtocolError);
}

TEST(BlindAggregatorTest, RejectsForeignKey) {
  const KeySetup keys = SetupKeys(2, 512, 22);
  const Keypair rogue = Keygen(512, 23);
  Randomness rng(1);
  const CipherMatrix c = EncryptMatrix(Matrix::Ones(1, 1), rogue.public_key, 0, 40, 2, rng);
  const BlindAggregator server(keys.server_directory);
  EXPECT_THROW(server.Sum({&c}), ProtocolError);
}

TEST(KeySetupTest, GradientKeyIsSharedAndServerHoldsOnlyPublicKeys) {
  const KeySetup keys = SetupKeys(3, 512, 24);
  const std::uint64_t g = keys.server_directory.Get(kGradientKeyOwner).fingerprint();
  for (const ClientKeyring& c : keys.clients) {
    EXPECT_EQ(c.gradient.public_key().fingerprint(), g);
    EXPECT_EQ(c.SecretFor(c.client_id).public_key(), keys.server_directory.Get(c.client_id));
    EXPECT_THROW(c.SecretFor((c.client_id + 1) % 3), ProtocolError);
  }
  EXPECT_EQ(keys.server_directory.entries().size(), 4u);
}

// The server side is typed so that decryption cannot be expressed.
template <typename T>
concept CanDecrypt = requires(const T& t, const CipherMatrix& c) { t.Decrypt(c); };
template <typename T>
concept HoldsSecret = requires(const T& t) { t.secret_key(); } ||
                      requires(const T& t) { t.Get(0).Decrypt(Ciphertext{}); };

static_assert(!CanDecrypt<BlindAggregator>);
static_assert(!HoldsSecret<BlindAggregator>);
static_assert(!HoldsSecret<PublicDirectory>);
static_assert(!std::is_constructible_v<PublicKey, SecretKey>);
static_assert(!std::is_constructible_v<BlindAggregator, SecretKey>);
static_assert(!std::is_convertible_v<PublicKey, SecretKey>);

}  // namespace
}  // namespace ppsgcn::crypto
