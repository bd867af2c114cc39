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

// Mutual-information leakage control for instance spaces.
//
// For a node w with indicator S_w, I(Y; S_w) is the S_w-weighted mean of
// KL(P(Y|S_w=s) || P(Y)) over s in {0, 1}, so it never exceeds the larger of
// the in-node and out-of-node divergences. That maximum is computable from
// class counts alone and is what admissible() compares against xi.

#ifndef TREELEAK_IDLMID_H_
#define TREELEAK_IDLMID_H_

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "treeleak/comm.h"
#include "treeleak/he.h"

namespace treeleak {

struct NodeClassCounts {
  long total = 0;                  // N
  std::vector<long> class_totals;  // N_c
  long node_size = 0;              // n_w
  std::vector<long> node_class;    // n_w^c

  long complement_size() const { return total - node_size; }
  long complement_class(std::size_t c) const {
    return class_totals[c] - node_class[c];
  }
  // Throws InvalidArgumentError when counts are inconsistent.
  void validate() const;

  static NodeClassCounts of(std::span<const int> node_space,
                            std::span<const int> labels, int class_count);
};

// max(KL_in, KL_out) in nats; 0 * ln 0 := 0 and an empty complement
// contributes 0. Throws UndefinedValueError when n_w == 0.
double mi_upper_bound(const NodeClassCounts& c);
bool admissible(const NodeClassCounts& c, double xi);

// What the active party knows about one scored split candidate.
struct CandidateSummary {
  int owner_party = 1;
  int feature_index = 0;
  double threshold = 0.0;
  double score = 0.0;
  NodeClassCounts left;
  NodeClassCounts right;
};

struct IdLmidDecision {
  std::vector<bool> kept;         // per input candidate
  std::optional<std::size_t> chosen;
  bool children_visible = false;  // false: subtree stays with the active party
};

// Passive candidates (owner != 1) with an inadmissible child are dropped;
// the best survivor is chosen with ties broken by (party, feature,
// threshold); its children are passive-visible only if both are admissible.
// `require_positive` drops candidates with score <= 0.
IdLmidDecision idlmid_split(std::span<const CandidateSummary> psi, double xi,
                            bool require_positive = false);

// Orders candidates for selection: higher score first, then lower party,
// feature, threshold.
bool better_candidate(double score_a, int party_a, int feature_a,
                      double threshold_a, double score_b, int party_b,
                      int feature_b, double threshold_b);

// Encrypted one-hot labels, row-major N x C, broadcast once by the active
// party. `totals` caches the encrypted per-class sums over all rows.
struct EncryptedLabels {
  int rows = 0;
  int classes = 0;
  std::vector<Ciphertext> cells;
  std::vector<Ciphertext> totals;

  const Ciphertext& at(int row, int c) const {
    return cells[static_cast<std::size_t>(row) * static_cast<std::size_t>(classes) +
                 static_cast<std::size_t>(c)];
  }
};

EncryptedLabels encrypt_one_hot_labels(HeBackend& he, std::span<const int> labels,
                                       int class_count);

struct CandidateSpaces {
  std::vector<int> left;
  std::vector<int> right;
};

// One passive-party reply per candidate: encrypted per-class sums over
// ID_L, complement(ID_L), ID_R, complement(ID_R), in that order, plus the
// public sizes. Division by the sizes happens after decryption.
struct PurityMessage {
  std::array<std::vector<Ciphertext>, 4> sums;
  std::array<long, 4> sizes{};
};

// Ciphertexts charged per candidate by the exchange (4 * C).
std::int64_t purity_ciphertexts_per_candidate(int class_count);

// Passive side. Uses only public operations of `he`. Throws ProtocolError
// when a candidate references ids outside the label universe.
std::vector<PurityMessage> secure_node_purity(
    const HeBackend& he, const EncryptedLabels& labels,
    std::span<const CandidateSpaces> candidates, CommStats* stats = nullptr);

struct NodePurity {
  std::array<std::vector<long>, 4> sums;
  std::array<long, 4> sizes{};
  // Per-class means; empty sets give all-zero means.
  std::array<std::vector<double>, 4> means;

  NodeClassCounts left_counts() const;
  NodeClassCounts right_counts() const;
};

// Active side.
NodePurity decrypt_purity(const HeBackend& he, const PurityMessage& msg);

}  // namespace treeleak

#endif  // TREELEAK_IDLMID_H_
