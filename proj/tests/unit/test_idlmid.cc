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

#include <cmath>
#include <limits>
#include <random>

#include <gtest/gtest.h>

#include "treeleak/common.h"
#include "treeleak/he.h"
#include "treeleak/idlmid.h"

namespace treeleak {
namespace {

NodeClassCounts counts(std::vector<long> totals, std::vector<long> node) {
  NodeClassCounts c;
  c.class_totals = std::move(totals);
  c.node_class = std::move(node);
  for (long v : c.class_totals) c.total += v;
  for (long v : c.node_class) c.node_size += v;
  return c;
}

// I(Y; S_w) from the 2 x |C| table of (in node, outside node) by class.
double exact_mi(const NodeClassCounts& c) {
  const double n = static_cast<double>(c.total);
  double mi = 0.0;
  for (std::size_t k = 0; k < c.class_totals.size(); ++k) {
    const double py = static_cast<double>(c.class_totals[k]) / n;
    const double cells[2] = {static_cast<double>(c.node_class[k]),
                             static_cast<double>(c.class_totals[k] - c.node_class[k])};
    const double side[2] = {static_cast<double>(c.node_size),
                            static_cast<double>(c.total - c.node_size)};
    for (int s = 0; s < 2; ++s) {
      if (cells[s] == 0.0) continue;
      const double pj = cells[s] / n;
      mi += pj * std::log(pj / (py * side[s] / n));
    }
  }
  return mi;
}

TEST(MiBound, RootIsZero) {
  const auto c = counts({30, 70}, {30, 70});
  EXPECT_EQ(mi_upper_bound(c), 0.0);
  EXPECT_TRUE(admissible(c, 0.0));
}

TEST(MiBound, GoldenPureNode) {
  const auto c = counts({50, 50}, {10, 0});
  EXPECT_NEAR(mi_upper_bound(c), std::log(2.0), 1e-12);
  // The complement term alone.
  const double complement = 40.0 / 90 * std::log(40.0 / 90 / 0.5) + 50.0 / 90 * std::log(50.0 / 90 / 0.5);
  EXPECT_NEAR(complement, 0.0062, 5e-5);
  EXPECT_FALSE(admissible(c, 0.5));
  EXPECT_TRUE(admissible(c, 1.0));
}

TEST(MiBound, ZeroThresholdPassesOnlyPriorMatchingNodes) {
  EXPECT_TRUE(admissible(counts({20, 20}, {5, 5}), 0.0));
  EXPECT_FALSE(admissible(counts({20, 20}, {6, 4}), 0.0));
}

TEST(MiBound, EmptyNodeAndBadCounts) {
  EXPECT_THROW(mi_upper_bound(counts({5, 5}, {0, 0})), UndefinedValueError);
  EXPECT_THROW(counts({5, 5}, {6, 0}).validate(), InvalidArgumentError);
}

TEST(MiBound, PropertyDominatesExactMi) {
  std::mt19937_64 rng(21);
  for (int trial = 0; trial < 2000; ++trial) {
    const int k = 2 + static_cast<int>(rng() % 5);
    std::vector<long> totals(static_cast<std::size_t>(k)), node(static_cast<std::size_t>(k));
    long size = 0;
    for (int c = 0; c < k; ++c) {
      totals[static_cast<std::size_t>(c)] = 1 + static_cast<long>(rng() % 60);
      node[static_cast<std::size_t>(c)] =
          static_cast<long>(rng() % static_cast<unsigned long>(totals[static_cast<std::size_t>(c)] + 1));
      size += node[static_cast<std::size_t>(c)];
    }
    if (size == 0) node[0] = 1;
    const auto c = counts(totals, node);
    EXPECT_GE(mi_upper_bound(c) + 1e-12, exact_mi(c));
  }
}

CandidateSummary cand(int party, double score, NodeClassCounts l, NodeClassCounts r,
                      int feature = 0) {
  CandidateSummary s;
  s.owner_party = party;
  s.score = score;
  s.left = std::move(l);
  s.right = std::move(r);
  s.feature_index = feature;
  return s;
}

TEST(IdLmidSplit, InfiniteThresholdFiltersNothing) {
  const std::vector<CandidateSummary> psi{
      cand(1, 0.1, counts({50, 50}, {20, 10}), counts({50, 50}, {30, 40})),
      cand(2, 0.3, counts({50, 50}, {40, 0}), counts({50, 50}, {10, 50}))};
  const auto d = idlmid_split(psi, std::numeric_limits<double>::infinity());
  EXPECT_EQ(d.kept, (std::vector<bool>{true, true}));
  EXPECT_EQ(d.chosen, 1u);
  EXPECT_TRUE(d.children_visible);
}

TEST(IdLmidSplit, FiltersOnlyPassiveCandidatesAndHidesUnsafeChildren) {
  const std::vector<CandidateSummary> psi{
      cand(1, 0.1, counts({50, 50}, {40, 0}), counts({50, 50}, {10, 50})),
      cand(2, 0.3, counts({50, 50}, {40, 0}), counts({50, 50}, {10, 50}))};
  const auto d = idlmid_split(psi, 0.1);
  EXPECT_EQ(d.kept, (std::vector<bool>{true, false}));
  EXPECT_EQ(d.chosen, 0u);
  EXPECT_FALSE(d.children_visible);
}

TEST(IdLmidSplit, ZeroThresholdDropsEveryInformativePassiveSplit) {
  std::vector<CandidateSummary> psi;
  for (int f = 0; f < 5; ++f) {
    psi.push_back(cand(2, 0.1 * f, counts({50, 50}, {20 + f, 10}),
                       counts({50, 50}, {30 - f, 40}), f));
  }
  const auto d = idlmid_split(psi, 0.0);
  EXPECT_FALSE(d.chosen.has_value());
}

TEST(IdLmidSplit, RequirePositiveSkipsNonPositiveScores) {
  const std::vector<CandidateSummary> psi{
      cand(1, 0.0, counts({5, 5}, {2, 3}), counts({5, 5}, {3, 2}))};
  EXPECT_FALSE(idlmid_split(psi, 10.0, true).chosen.has_value());
  EXPECT_EQ(idlmid_split(psi, 10.0, false).chosen, 0u);
}

TEST(BetterCandidate, TieBreakOrder) {
  EXPECT_TRUE(better_candidate(0.5, 2, 9, 9.0, 0.4, 1, 0, 0.0));
  EXPECT_TRUE(better_candidate(0.5, 1, 9, 9.0, 0.5, 2, 0, 0.0));
  EXPECT_TRUE(better_candidate(0.5, 1, 3, 9.0, 0.5, 1, 4, 0.0));
  EXPECT_TRUE(better_candidate(0.5, 1, 3, 1.0, 0.5, 1, 3, 2.0));
  EXPECT_FALSE(better_candidate(0.5, 1, 3, 2.0, 0.5, 1, 3, 2.0));
}

class Purity : public ::testing::TestWithParam<HeBackendKind> {};

TEST_P(Purity, MatchesPlaintextShadow) {
  auto he = he_keygen(GetParam(), 512, 4);
  std::mt19937_64 rng(8);
  const int n = 50, k = 3;
  std::vector<int> labels(n);
  for (auto& y : labels) y = static_cast<int>(rng() % k);
  const EncryptedLabels enc = encrypt_one_hot_labels(*he, labels, k);

  std::vector<CandidateSpaces> cands;
  for (int t = 0; t < 6; ++t) {
    CandidateSpaces c;
    for (int i = 0; i < n; ++i) (rng() % 3 == 0 ? c.left : c.right).push_back(i);
    cands.push_back(c);
  }
  CommStats stats;
  const auto msgs = secure_node_purity(*he, enc, cands, &stats);
  EXPECT_EQ(stats.purity_sums, 6 * purity_ciphertexts_per_candidate(k));
  EXPECT_EQ(purity_ciphertexts_per_candidate(k), 4 * k);
  ASSERT_EQ(msgs.size(), cands.size());
  for (std::size_t t = 0; t < cands.size(); ++t) {
    const NodePurity p = decrypt_purity(*he, msgs[t]);
    const NodeClassCounts l = NodeClassCounts::of(cands[t].left, labels, k);
    const NodeClassCounts r = NodeClassCounts::of(cands[t].right, labels, k);
    EXPECT_EQ(p.left_counts().node_class, l.node_class);
    EXPECT_EQ(p.left_counts().class_totals, l.class_totals);
    EXPECT_EQ(p.right_counts().node_class, r.node_class);
    for (int c = 0; c < k; ++c) {
      EXPECT_DOUBLE_EQ(p.means[0][static_cast<std::size_t>(c)],
                       static_cast<double>(l.node_class[static_cast<std::size_t>(c)]) /
                           static_cast<double>(l.node_size));
    }
  }
}

TEST_P(Purity, LeftMeanOfSmallSpace) {
  auto he = he_keygen(GetParam(), 512, 5);
  const std::vector<int> labels{0, 0, 1, 1};
  const EncryptedLabels enc = encrypt_one_hot_labels(*he, labels, 2);
  const std::vector<CandidateSpaces> c{{{0, 1, 2}, {3}}};
  const NodePurity p = decrypt_purity(*he, secure_node_purity(*he, enc, c).at(0));
  EXPECT_NEAR(p.means[0][0], 2.0 / 3.0, 1e-15);
}

TEST_P(Purity, ForeignIdsAreAProtocolError) {
  auto he = he_keygen(GetParam(), 512, 6);
  const std::vector<int> labels{0, 1};
  const EncryptedLabels enc = encrypt_one_hot_labels(*he, labels, 2);
  const std::vector<CandidateSpaces> c{{{0}, {5}}};
  EXPECT_THROW(secure_node_purity(*he, enc, c), ProtocolError);
}

INSTANTIATE_TEST_SUITE_P(He, Purity,
                         ::testing::Values(HeBackendKind::kMock, HeBackendKind::kPaillier));

}  // namespace
}  // namespace treeleak
