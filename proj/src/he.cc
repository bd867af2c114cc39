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

#include "treeleak/he.h"

#include <cstdlib>
#include <string>

#include "treeleak/common.h"
#include "treeleak/comm.h"

namespace treeleak {

std::string to_string(HeBackendKind kind) {
  return kind == HeBackendKind::kMock ? "mock" : "paillier";
}

HeBackendKind he_backend_from_string(const std::string& s) {
  if (s == "mock") return HeBackendKind::kMock;
  if (s == "paillier") return HeBackendKind::kPaillier;
  throw InvalidArgumentError("unknown HE backend '" + s + "'");
}

double comm_rate(const CommStats& defended, const CommStats& baseline) {
  if (baseline.ciphertexts <= 0) {
    throw UndefinedValueError("comm_rate: baseline ciphertext count is zero");
  }
  return static_cast<double>(defended.ciphertexts) /
         static_cast<double>(baseline.ciphertexts);
}

std::string HeBackend::hex(const Ciphertext& c) const {
  std::string s = c.value.get_str(16);
  const std::size_t width = 2 * ciphertext_bytes();
  if (s.size() < width) s.insert(0, width - s.size(), '0');
  return s;
}

namespace {

std::uint64_t fingerprint(const mpz_class& n) {
  // Low 64 bits of n, folded with its size so distinct keys differ.
  mpz_class low = n & mpz_class("18446744073709551615");
  std::uint64_t v = std::strtoull(low.get_str(16).c_str(), nullptr, 16);
  return v ^ (static_cast<std::uint64_t>(mpz_sizeinbase(n.get_mpz_t(), 2)) << 56);
}

class MockBackend final : public HeBackend {
 public:
  MockBackend(int bits, std::uint64_t seed)
      : bits_(bits), key_id_(derive_seed(seed, "mock-key") | 1ULL) {}

  HeBackendKind kind() const override { return HeBackendKind::kMock; }
  int key_bits() const override { return bits_; }
  std::uint64_t key_id() const override { return key_id_; }
  std::size_t ciphertext_bytes() const override {
    return static_cast<std::size_t>(2 * bits_ / 8);
  }

  Ciphertext encrypt(const mpz_class& plaintext) override {
    return {plaintext, key_id_};
  }
  Ciphertext add(const Ciphertext& a, const Ciphertext& b) const override {
    check(a);
    check(b);
    return {a.value + b.value, key_id_};
  }
  Ciphertext scalar_mul(const Ciphertext& a, long k) const override {
    check(a);
    return {a.value * k, key_id_};
  }
  mpz_class decrypt(const Ciphertext& c) const override {
    check(c);
    return c.value;
  }
  Ciphertext zero() const override { return {mpz_class(0), key_id_}; }

 private:
  void check(const Ciphertext& c) const {
    if (c.key_id != key_id_) {
      throw IntegrityError("mock HE: ciphertext belongs to a different key");
    }
  }

  int bits_;
  std::uint64_t key_id_;
};

class PaillierBackend final : public HeBackend {
 public:
  PaillierBackend(int bits, std::uint64_t seed) : bits_(bits), rng_(gmp_randinit_mt) {
    if (bits != 512 && bits != 1024 && bits != 2048) {
      throw InvalidArgumentError("paillier: key size must be 512, 1024 or 2048");
    }
    rng_.seed(mpz_class(std::to_string(seed)));
    const unsigned long half = static_cast<unsigned long>(bits / 2);
    mpz_class p, q;
    do {
      p = random_prime(half);
      q = random_prime(half);
      n_ = p * q;
    } while (p == q ||
             mpz_sizeinbase(n_.get_mpz_t(), 2) != static_cast<std::size_t>(bits));
    n2_ = n_ * n_;
    half_n_ = n_ / 2;
    mpz_class pm1 = p - 1, qm1 = q - 1;
    mpz_lcm(lambda_.get_mpz_t(), pm1.get_mpz_t(), qm1.get_mpz_t());
    // With g = n + 1, L(g^lambda mod n^2) = lambda mod n.
    if (mpz_invert(mu_.get_mpz_t(), lambda_.get_mpz_t(), n_.get_mpz_t()) == 0) {
      throw IntegrityError("paillier: lambda not invertible mod n");
    }
    key_id_ = fingerprint(n_);
  }

  HeBackendKind kind() const override { return HeBackendKind::kPaillier; }
  int key_bits() const override { return bits_; }
  std::uint64_t key_id() const override { return key_id_; }
  std::size_t ciphertext_bytes() const override {
    return static_cast<std::size_t>(2 * bits_ / 8);
  }

  Ciphertext encrypt(const mpz_class& plaintext) override {
    mpz_class m = plaintext % n_;
    if (m < 0) m += n_;
    mpz_class r;
    do {
      r = rng_.get_z_range(n_);
    } while (r == 0 || gcd(r, n_) != 1);
    mpz_class rn;
    mpz_powm(rn.get_mpz_t(), r.get_mpz_t(), n_.get_mpz_t(), n2_.get_mpz_t());
    mpz_class gm = (1 + m * n_) % n2_;
    return {(gm * rn) % n2_, key_id_};
  }

  Ciphertext add(const Ciphertext& a, const Ciphertext& b) const override {
    check(a);
    check(b);
    return {(a.value * b.value) % n2_, key_id_};
  }

  Ciphertext scalar_mul(const Ciphertext& a, long k) const override {
    check(a);
    mpz_class base = a.value;
    if (k < 0) {
      if (mpz_invert(base.get_mpz_t(), a.value.get_mpz_t(), n2_.get_mpz_t()) == 0) {
        throw IntegrityError("paillier: ciphertext not invertible");
      }
    }
    mpz_class e(k < 0 ? -k : k);
    mpz_class out;
    mpz_powm(out.get_mpz_t(), base.get_mpz_t(), e.get_mpz_t(), n2_.get_mpz_t());
    return {out, key_id_};
  }

  mpz_class decrypt(const Ciphertext& c) const override {
    check(c);
    if (c.value <= 0 || c.value >= n2_ || gcd(c.value, n_) != 1) {
      throw IntegrityError("paillier: value is not a valid ciphertext");
    }
    mpz_class u;
    mpz_powm(u.get_mpz_t(), c.value.get_mpz_t(), lambda_.get_mpz_t(),
             n2_.get_mpz_t());
    mpz_class l = (u - 1) / n_;
    mpz_class m = (l * mu_) % n_;
    if (m > half_n_) m -= n_;
    return m;
  }

  Ciphertext zero() const override { return {mpz_class(1), key_id_}; }

 private:
  void check(const Ciphertext& c) const {
    if (c.key_id != key_id_) {
      throw IntegrityError("paillier: ciphertext belongs to a different key");
    }
  }

  mpz_class random_prime(unsigned long bits) {
    mpz_class x = rng_.get_z_bits(bits);
    mpz_setbit(x.get_mpz_t(), bits - 1);
    mpz_setbit(x.get_mpz_t(), bits - 2);  // keeps p*q at full width
    mpz_class p;
    mpz_nextprime(p.get_mpz_t(), x.get_mpz_t());
    return p;
  }

  int bits_;
  gmp_randclass rng_;
  mpz_class n_, n2_, half_n_, lambda_, mu_;
  std::uint64_t key_id_ = 0;
};

}  // namespace

std::unique_ptr<HeBackend> he_keygen(HeBackendKind kind, int bits,
                                     std::uint64_t seed) {
  if (kind == HeBackendKind::kMock) return std::make_unique<MockBackend>(bits, seed);
  return std::make_unique<PaillierBackend>(bits, seed);
}

}  // namespace treeleak
