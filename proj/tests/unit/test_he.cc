// Copyright 2026 The treeleak Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <random>

#include <gtest/gtest.h>

#include "treeleak/common.h"
#include "treeleak/he.h"

namespace treeleak {
namespace {

class Backends : public ::testing::TestWithParam<HeBackendKind> {};

TEST_P(Backends, AdditionAndScalarContract) {
  auto he = he_keygen(GetParam(), 512, 17);
  EXPECT_EQ(he->decrypt(he->add(he->encrypt(3), he->encrypt(4))), 7);
  EXPECT_EQ(he->decrypt(he->scalar_mul(he->encrypt(5), 3)), 15);
  EXPECT_EQ(he->decrypt(he->zero()), 0);
}

TEST_P(Backends, RandomIdentities) {
  auto he = he_keygen(GetParam(), 512, 18);
  std::mt19937_64 rng(5);
  for (int i = 0; i < 50; ++i) {
    const long a = static_cast<long>(rng() % 1000000), b = static_cast<long>(rng() % 1000000);
    const long k = static_cast<long>(rng() % 1000);
    EXPECT_EQ(he->decrypt(he->add(he->encrypt(a), he->encrypt(b))), a + b);
    EXPECT_EQ(he->decrypt(he->scalar_mul(he->encrypt(a), k)), a * k);
  }
}

TEST_P(Backends, ForeignKeyIsRejected) {
  auto a = he_keygen(GetParam(), 512, 1);
  auto b = he_keygen(GetParam(), 512, 2);
  EXPECT_THROW(b->decrypt(a->encrypt(1)), IntegrityError);
}

INSTANTIATE_TEST_SUITE_P(He, Backends,
                         ::testing::Values(HeBackendKind::kMock, HeBackendKind::kPaillier));

TEST(Paillier, ProbabilisticEncryptionAndHexBlob) {
  auto he = he_keygen(HeBackendKind::kPaillier, 512, 3);
  const Ciphertext a = he->encrypt(42), b = he->encrypt(42);
  EXPECT_NE(a.value, b.value);
  EXPECT_EQ(he->key_bits(), 512);
  // Ciphertexts live mod n^2.
  EXPECT_EQ(he->ciphertext_bytes(), 128u);
  const std::string hex = he->hex(a);
  EXPECT_FALSE(hex.empty());
  EXPECT_EQ(hex.find_first_not_of("0123456789abcdef"), std::string::npos);
}

TEST(Paillier, KeySizesAndNames) {
  EXPECT_THROW(he_keygen(HeBackendKind::kPaillier, 300, 0), InvalidArgumentError);
  EXPECT_EQ(he_backend_from_string("paillier"), HeBackendKind::kPaillier);
  EXPECT_EQ(he_backend_from_string("mock"), HeBackendKind::kMock);
  EXPECT_THROW(he_backend_from_string("rsa"), InvalidArgumentError);
}

TEST(Paillier, DeterministicKeysPerSeed) {
  auto a = he_keygen(HeBackendKind::kPaillier, 512, 9);
  auto b = he_keygen(HeBackendKind::kPaillier, 512, 9);
  EXPECT_EQ(a->key_id(), b->key_id());
  EXPECT_EQ(b->decrypt(a->encrypt(11)), 11);
}

}  // namespace
}  // namespace treeleak
