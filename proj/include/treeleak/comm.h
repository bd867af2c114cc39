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

#ifndef TREELEAK_COMM_H_
#define TREELEAK_COMM_H_

#include <cstdint>

namespace treeleak {

// Ciphertext traffic of one protocol run, broken down by message family.
// `ciphertexts` is the total and is what rates are computed from.
struct CommStats {
  std::int64_t ciphertexts = 0;
  std::int64_t label_broadcast = 0;     // encrypted one-hot labels
  std::int64_t gradient_broadcast = 0;  // encrypted gradients/hessians
  std::int64_t candidate_sums = 0;      // per-candidate encrypted sums
  std::int64_t purity_sums = 0;         // secure node-purity exchange
  std::int64_t passive_candidates = 0;  // candidates scored for passives
  std::int64_t broadcasts = 0;          // instance-space broadcasts
  std::int64_t admissible_disclosures = 0;

  void charge_labels(std::int64_t n) { label_broadcast += n; ciphertexts += n; }
  void charge_gradients(std::int64_t n) { gradient_broadcast += n; ciphertexts += n; }
  void charge_candidates(std::int64_t n) { candidate_sums += n; ciphertexts += n; }
  void charge_purity(std::int64_t n) { purity_sums += n; ciphertexts += n; }

  bool operator==(const CommStats&) const = default;
};

// defended.ciphertexts / baseline.ciphertexts. Throws UndefinedValueError
// for a zero baseline.
double comm_rate(const CommStats& defended, const CommStats& baseline);

}  // namespace treeleak

#endif  // TREELEAK_COMM_H_
