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

// Additively homomorphic encryption backends.
//
// Two interchangeable backends share one interface:
//   - paillier: textbook Paillier with g = n + 1 over GMP integers.
//   - mock: the "ciphertext" is the plaintext wrapped in an envelope. Same
//     API and the same ciphertext accounting, none of the cost.
//
// Plaintexts are signed integers; Paillier decodes values above n/2 as
// negative.

#ifndef TREELEAK_HE_H_
#define TREELEAK_HE_H_

#include <gmpxx.h>

#include <cstdint>
#include <memory>
#include <string>

namespace treeleak {

enum class HeBackendKind { kMock, kPaillier };

std::string to_string(HeBackendKind kind);
HeBackendKind he_backend_from_string(const std::string& s);

struct Ciphertext {
  mpz_class value;
  std::uint64_t key_id = 0;  // fingerprint of the key that produced it
};

class HeBackend {
 public:
  virtual ~HeBackend() = default;

  virtual HeBackendKind kind() const = 0;
  virtual int key_bits() const = 0;
  virtual std::uint64_t key_id() const = 0;
  // Serialized ciphertext size on the wire.
  virtual std::size_t ciphertext_bytes() const = 0;

  virtual Ciphertext encrypt(const mpz_class& plaintext) = 0;
  Ciphertext encrypt(long plaintext) { return encrypt(mpz_class(plaintext)); }
  // Dec(add(a, b)) = Dec(a) + Dec(b)
  virtual Ciphertext add(const Ciphertext& a, const Ciphertext& b) const = 0;
  // Dec(scalar_mul(a, k)) = k * Dec(a)
  virtual Ciphertext scalar_mul(const Ciphertext& a, long k) const = 0;
  // Throws IntegrityError if `c` was produced under another key.
  virtual mpz_class decrypt(const Ciphertext& c) const = 0;

  // Encryption of zero that needs no randomness; identity for add().
  virtual Ciphertext zero() const = 0;

  // Big-endian base-16 rendering, padded to ciphertext_bytes().
  std::string hex(const Ciphertext& c) const;
};

// `bits` is the modulus size for Paillier (512, 1024 or 2048) and ignored by
// the mock backend. `seed` drives key generation and encryption randomness.
std::unique_ptr<HeBackend> he_keygen(HeBackendKind kind, int bits,
                                     std::uint64_t seed);

}  // namespace treeleak

#endif  // TREELEAK_HE_H_
