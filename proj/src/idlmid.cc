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

#include "treeleak/idlmid.h"

#include <cmath>
#include <numeric>
#include <string>

#include "treeleak/common.h"

namespace treeleak {

void NodeClassCounts::validate() const {
  if (node_class.size() != class_totals.size()) {
    throw InvalidArgumentError("NodeClassCounts: class vector lengths differ");
  }
  long in_sum = 0, all_sum = 0;
  for (std::size_t c = 0; c < node_class.size(); ++c) {
    if (node_class[c] < 0 || node_class[c] > class_totals[c] ||
        node_class[c] > node_size) {
      throw InvalidArgumentError("NodeClassCounts: n_w^c out of range");
    }
    in_sum += node_class[c];
    all_sum += class_totals[c];
  }
  if (in_sum != node_size || all_sum != total) {
    throw InvalidArgumentError("NodeClassCounts: class counts do not sum to totals");
  }
}

NodeClassCounts NodeClassCounts::of(std::span<const int> node_space,
                                    std::span<const int> labels,
                                    int class_count) {
  NodeClassCounts c;
  c.total = static_cast<long>(labels.size());
  c.class_totals.assign(static_cast<std::size_t>(class_count), 0);
  c.node_class.assign(static_cast<std::size_t>(class_count), 0);
  for (int y : labels) ++c.class_totals[static_cast<std::size_t>(y)];
  for (int i : node_space) {
    ++c.node_class[static_cast<std::size_t>(labels[static_cast<std::size_t>(i)])];
  }
  c.node_size = static_cast<long>(node_space.size());
  return c;
}

namespace {

// sum_c (a_c / a) ln((a_c / a) / (N_c / N))
double kl_to_prior(const std::vector<long>& part, long part_size,
                   const std::vector<long>& class_totals, long total) {
  if (part_size <= 0) return 0.0;
  double kl = 0.0;
  for (std::size_t c = 0; c < part.size(); ++c) {
    if (part[c] == 0) continue;
    const double p = static_cast<double>(part[c]) / static_cast<double>(part_size);
    const double q =
        static_cast<double>(class_totals[c]) / static_cast<double>(total);
    kl += p * std::log(p / q);
  }
  return kl;
}

}  // namespace

double mi_upper_bound(const NodeClassCounts& c) {
  if (c.node_size <= 0) {
    throw UndefinedValueError("mi_upper_bound: node has no samples");
  }
  std::vector<long> outside(c.class_totals.size());
  for (std::size_t k = 0; k < outside.size(); ++k) {
    outside[k] = c.complement_class(k);
  }
  const double in = kl_to_prior(c.node_class, c.node_size, c.class_totals, c.total);
  const double out =
      kl_to_prior(outside, c.complement_size(), c.class_totals, c.total);
  return std::max(in, out);
}

bool admissible(const NodeClassCounts& c, double xi) {
  return mi_upper_bound(c) <= xi;
}

bool better_candidate(double score_a, int party_a, int feature_a,
                      double threshold_a, double score_b, int party_b,
                      int feature_b, double threshold_b) {
  if (score_a != score_b) return score_a > score_b;
  if (party_a != party_b) return party_a < party_b;
  if (feature_a != feature_b) return feature_a < feature_b;
  return threshold_a < threshold_b;
}

IdLmidDecision idlmid_split(std::span<const CandidateSummary> psi, double xi,
                            bool require_positive) {
  IdLmidDecision d;
  d.kept.assign(psi.size(), true);
  for (std::size_t i = 0; i < psi.size(); ++i) {
    const auto& s = psi[i];
    if (s.owner_party >= 2 && !(admissible(s.left, xi) && admissible(s.right, xi))) {
      d.kept[i] = false;
    }
  }
  for (std::size_t i = 0; i < psi.size(); ++i) {
    if (!d.kept[i]) continue;
    const auto& s = psi[i];
    if (require_positive && !(s.score > 0.0)) continue;
    if (!d.chosen) {
      d.chosen = i;
      continue;
    }
    const auto& b = psi[*d.chosen];
    if (better_candidate(s.score, s.owner_party, s.feature_index, s.threshold,
                         b.score, b.owner_party, b.feature_index, b.threshold)) {
      d.chosen = i;
    }
  }
  if (d.chosen) {
    const auto& s = psi[*d.chosen];
    d.children_visible = admissible(s.left, xi) && admissible(s.right, xi);
  }
  return d;
}

EncryptedLabels encrypt_one_hot_labels(HeBackend& he, std::span<const int> labels,
                                       int class_count) {
  EncryptedLabels out;
  out.rows = static_cast<int>(labels.size());
  out.classes = class_count;
  out.cells.reserve(labels.size() * static_cast<std::size_t>(class_count));
  out.totals.assign(static_cast<std::size_t>(class_count), he.zero());
  for (int y : labels) {
    for (int c = 0; c < class_count; ++c) {
      out.cells.push_back(he.encrypt(y == c ? 1L : 0L));
      auto& t = out.totals[static_cast<std::size_t>(c)];
      t = he.add(t, out.cells.back());
    }
  }
  return out;
}

std::int64_t purity_ciphertexts_per_candidate(int class_count) {
  return 4 * static_cast<std::int64_t>(class_count);
}

std::vector<PurityMessage> secure_node_purity(
    const HeBackend& he, const EncryptedLabels& labels,
    std::span<const CandidateSpaces> candidates, CommStats* stats) {
  const auto classes = static_cast<std::size_t>(labels.classes);
  auto sum_over = [&](const std::vector<int>& ids) {
    std::vector<Ciphertext> acc(classes, he.zero());
    for (int i : ids) {
      if (i < 0 || i >= labels.rows) {
        throw ProtocolError("secure_node_purity: id " + std::to_string(i) +
                            " outside the label universe");
      }
      for (std::size_t c = 0; c < classes; ++c) {
        acc[c] = he.add(acc[c], labels.at(i, static_cast<int>(c)));
      }
    }
    return acc;
  };
  auto complement = [&](const std::vector<Ciphertext>& part) {
    std::vector<Ciphertext> out(classes);
    for (std::size_t c = 0; c < classes; ++c) {
      out[c] = he.add(labels.totals[c], he.scalar_mul(part[c], -1));
    }
    return out;
  };

  std::vector<PurityMessage> out;
  out.reserve(candidates.size());
  for (const auto& cand : candidates) {
    PurityMessage msg;
    msg.sums[0] = sum_over(cand.left);
    msg.sums[1] = complement(msg.sums[0]);
    msg.sums[2] = sum_over(cand.right);
    msg.sums[3] = complement(msg.sums[2]);
    const long nl = static_cast<long>(cand.left.size());
    const long nr = static_cast<long>(cand.right.size());
    msg.sizes = {nl, labels.rows - nl, nr, labels.rows - nr};
    out.push_back(std::move(msg));
    if (stats) stats->charge_purity(purity_ciphertexts_per_candidate(labels.classes));
  }
  return out;
}

NodePurity decrypt_purity(const HeBackend& he, const PurityMessage& msg) {
  NodePurity p;
  p.sizes = msg.sizes;
  for (std::size_t part = 0; part < 4; ++part) {
    for (const auto& ct : msg.sums[part]) {
      mpz_class v = he.decrypt(ct);
      if (!v.fits_slong_p()) throw IntegrityError("decrypt_purity: sum overflow");
      p.sums[part].push_back(v.get_si());
      p.means[part].push_back(
          msg.sizes[part] > 0 ? static_cast<double>(p.sums[part].back()) /
                                    static_cast<double>(msg.sizes[part])
                              : 0.0);
    }
  }
  return p;
}

namespace {

NodeClassCounts counts_from(const std::vector<long>& in, long in_size,
                            const std::vector<long>& out, long out_size) {
  NodeClassCounts c;
  c.node_class = in;
  c.node_size = in_size;
  c.total = in_size + out_size;
  c.class_totals.resize(in.size());
  for (std::size_t k = 0; k < in.size(); ++k) c.class_totals[k] = in[k] + out[k];
  return c;
}

}  // namespace

NodeClassCounts NodePurity::left_counts() const {
  return counts_from(sums[0], sizes[0], sums[1], sizes[1]);
}

NodeClassCounts NodePurity::right_counts() const {
  return counts_from(sums[2], sizes[2], sums[3], sizes[3]);
}

}  // namespace treeleak
