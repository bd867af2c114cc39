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

#include <algorithm>
#include <cmath>
#include <random>
#include <map>
#include <numeric>
#include <set>

#include <gtest/gtest.h>

#include "treeleak/common.h"
#include "treeleak/idlmid.h"
#include "treeleak/ldp.h"
#include "treeleak/serialize.h"
#include "treeleak/vfl.h"

namespace treeleak {
namespace {

Dataset load_breastcancer() {
  return load_csv(std::string(TREELEAK_DATA_DIR) + "/breastcancer.csv", "label");
}

// Feature 0 equals the label (plus an offset), feature 1 is noise.
Dataset informative_pair(int n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  Dataset d;
  d.features = Matrix(static_cast<std::size_t>(n), 2);
  d.class_count = 2;
  for (int i = 0; i < n; ++i) {
    const int y = i % 2;
    d.labels.push_back(y);
    d.features(static_cast<std::size_t>(i), 0) = y + 0.1 * u(rng);
    d.features(static_cast<std::size_t>(i), 1) = u(rng);
  }
  d.row_ids.resize(static_cast<std::size_t>(n));
  std::iota(d.row_ids.begin(), d.row_ids.end(), 0);
  d.origin_rows = d.row_ids;
  return d;
}

std::vector<VerticalView> explicit_views(const Dataset& d, std::vector<int> active,
                                         std::vector<int> passive) {
  PartitionSpec s;
  s.mode = PartitionMode::kExplicit;
  s.explicit_sets = {std::move(active), std::move(passive)};
  return make_partition(d, s);
}

ProtocolConfig small_cfg() {
  ProtocolConfig c;
  c.feature_subsample = 1.0;
  return c;
}

TEST(Percentiles, MedianOfFourValues) {
  EXPECT_EQ(percentile_thresholds({4, 1, 3, 2}, 1), (std::vector<double>{2.5}));
  EXPECT_TRUE(percentile_thresholds({7, 7, 7}, 5).empty());
  // l is capped at distinct - 1.
  EXPECT_EQ(percentile_thresholds({0, 1, 2, 3}, 32), (std::vector<double>{0.75, 1.5, 2.25}));
  // Coinciding quantiles collapse.
  EXPECT_EQ(percentile_thresholds({0, 1, 1, 2}, 32), (std::vector<double>{1.0}));
}

TEST(ProposeSplits, LeftIsStrictlyBelowThreshold) {
  Dataset d;
  d.features = Matrix(4, 2);
  const double v[4] = {1, 2, 3, 4};
  for (std::size_t i = 0; i < 4; ++i) {
    d.features(i, 0) = v[i];
    d.features(i, 1) = 5.0;
  }
  d.labels = {0, 0, 1, 1};
  d.class_count = 2;
  const Party p = Party::from_view(d, VerticalView{2, {0, 1}, false});
  const std::vector<int> space{0, 1, 2, 3};
  const auto c = propose_splits(p, space, 1);
  ASSERT_EQ(c.size(), 1u);  // constant feature 1 offers nothing
  EXPECT_EQ(c[0].threshold, 2.5);
  EXPECT_EQ(c[0].left, (std::vector<int>{0, 1}));
  EXPECT_EQ(c[0].right, (std::vector<int>{2, 3}));

  const Party none = Party::from_view(d, VerticalView{3, {}, false});
  EXPECT_TRUE(propose_splits(none, space, 4).empty());
}

TEST(GrowTree, ActiveWinnerOnlyRootBroadcast) {
  const Dataset d = informative_pair(40, 1);
  ProtocolConfig cfg = small_cfg();
  cfg.max_depth = 1;
  cfg.tree_count = 1;
  const auto r = train_federated(cfg, d, explicit_views(d, {0}, {1}));
  ASSERT_EQ(r.model.trees.size(), 1u);
  EXPECT_EQ(r.model.trees[0].nodes.size(), 3u);
  ASSERT_EQ(r.transcripts.size(), 1u);
  const auto spaces = r.transcripts[0].visible_spaces();
  ASSERT_EQ(spaces.size(), 1u);
  EXPECT_EQ(spaces[0].ids->size(), 40u);
}

TEST(GrowTree, PassiveWinnerReceivesChildSpaces) {
  const Dataset d = informative_pair(40, 2);
  ProtocolConfig cfg = small_cfg();
  cfg.max_depth = 1;
  cfg.tree_count = 1;
  const auto r = train_federated(cfg, d, explicit_views(d, {1}, {0}));
  const auto& ev = r.transcripts[0].events;
  const auto it = std::find_if(ev.begin(), ev.end(), [](const TranscriptEvent& e) {
    return e.kind == EventKind::kChildSpaces;
  });
  ASSERT_NE(it, ev.end());
  EXPECT_TRUE(it->outgoing);
  EXPECT_EQ(it->left.size() + it->right.size(), 40u);
  EXPECT_EQ(r.model.trees[0].root().split->owner_party, 2);
}

TEST(GrowTree, SeparableDataIsFitExactly) {
  const Dataset d = gen_synthetic(200, 4, 3, 0.0, 5);
  ProtocolConfig cfg = small_cfg();
  const auto r = train_federated(cfg, d, make_partition(d, PartitionSpec{}));
  EXPECT_EQ(accuracy(r.model, d.features, d.labels), 1.0);
}

TEST(TrainFederated, TreeCountAndDeterminism) {
  const Dataset d = load_breastcancer();
  ProtocolConfig cfg;
  cfg.seed = 3;
  PartitionSpec ps;
  ps.seed = 3;
  const auto views = make_partition(d, ps);
  const auto a = train_federated(cfg, d, views);
  const auto b = train_federated(cfg, d, views);
  EXPECT_EQ(a.model.trees.size(), 5u);
  EXPECT_EQ(model_to_json(a.model), model_to_json(b.model));
  EXPECT_EQ(a.transcripts, b.transcripts);
  EXPECT_EQ(a.comm, b.comm);
  for (const Tree& t : a.model.trees) EXPECT_NO_THROW(t.validate());
}

TEST(TrainFederated, ReducedLeakageHidesTheFirstTree) {
  const Dataset d = load_breastcancer();
  ProtocolConfig cfg;
  cfg.model = ModelKind::kXGBoost;
  cfg.defense = DefenseKind::kReducedLeakage;
  const auto views = make_partition(d, PartitionSpec{});
  const auto r = train_federated(cfg, d, views);
  for (const TreeNode& n : r.model.trees[0].nodes) {
    if (n.split) EXPECT_EQ(n.split->owner_party, 1);
  }
  for (const auto& e : r.transcripts[0].events) EXPECT_NE(e.tree_id, 0);
  bool later_passive = false;
  for (const auto& e : r.transcripts[0].events) later_passive |= e.kind == EventKind::kBroadcast;
  EXPECT_TRUE(later_passive);
}

// Replays a transcript: sequence numbers increase, ciphertext totals never
// drop, and every space is a broadcast or a split of a broadcast node.
void check_sound(const PartyTranscript& t) {
  std::set<std::pair<int, int>> broadcast;
  std::map<std::pair<int, int>, std::vector<int>> spaces;
  std::int64_t cumulative = 0;
  for (std::size_t i = 0; i < t.events.size(); ++i) {
    const auto& e = t.events[i];
    if (i > 0) ASSERT_GT(e.seq, t.events[i - 1].seq);
    switch (e.kind) {
      case EventKind::kBroadcast:
        EXPECT_FALSE(e.outgoing);
        broadcast.insert({e.tree_id, e.node_id});
        spaces[{e.tree_id, e.node_id}] = e.space;
        break;
      case EventKind::kCiphertexts:
        EXPECT_GE(e.cumulative, cumulative);
        cumulative = e.cumulative;
        break;
      case EventKind::kSplitSelected:
        EXPECT_TRUE(broadcast.count({e.tree_id, e.node_id}));
        break;
      case EventKind::kChildSpaces: {
        ASSERT_TRUE(broadcast.count({e.tree_id, e.node_id}));
        std::vector<int> both;
        std::set_union(e.left.begin(), e.left.end(), e.right.begin(), e.right.end(),
                       std::back_inserter(both));
        EXPECT_EQ(both, (spaces[{e.tree_id, e.node_id}]));
        break;
      }
    }
  }
  EXPECT_EQ(cumulative, t.ciphertext_count);
}

TEST(TrainFederated, TranscriptSoundnessAndGainOptimality) {
  const Dataset d = load_breastcancer();
  for (auto kind : {ModelKind::kRandomForest, ModelKind::kXGBoost}) {
    ProtocolConfig cfg;
    cfg.model = kind;
    cfg.seed = 11;
    const auto r = train_federated(cfg, d, make_partition(d, PartitionSpec{}));
    check_sound(r.transcripts[0]);
    for (const auto& e : r.log) {
      if (e.winner_party == 0) continue;
      for (double s : e.psi_scores) EXPECT_GE(e.best_score, s);
    }
  }
}

TEST(CommStats, ForestChargesLabelsOnceAndSumsPerCandidate) {
  const Dataset d = load_breastcancer();
  ProtocolConfig cfg;
  const auto r = train_federated(cfg, d, make_partition(d, PartitionSpec{}));
  const auto n = static_cast<std::int64_t>(d.rows());
  EXPECT_EQ(r.comm.label_broadcast, 2 * n);
  EXPECT_EQ(r.comm.candidate_sums, 4 * r.comm.passive_candidates);
  EXPECT_EQ(r.comm.gradient_broadcast, 0);
  EXPECT_EQ(r.comm.ciphertexts, r.comm.label_broadcast + r.comm.candidate_sums);
  EXPECT_EQ(r.comm.ciphertexts, r.transcripts[0].ciphertext_count);
}

TEST(CommStats, BoosterChargesGradientsPerTree) {
  const Dataset d = load_breastcancer();
  ProtocolConfig cfg;
  cfg.model = ModelKind::kXGBoost;
  const auto r = train_federated(cfg, d, make_partition(d, PartitionSpec{}));
  const auto n = static_cast<std::int64_t>(d.rows());
  EXPECT_EQ(r.comm.label_broadcast, 0);
  EXPECT_EQ(r.comm.gradient_broadcast, 2 * n * 5);
  EXPECT_EQ(r.comm.candidate_sums, 2 * r.comm.passive_candidates);
}

TEST(CommRate, Arithmetic) {
  CommStats a, b;
  a.ciphertexts = 50;
  b.ciphertexts = 100;
  EXPECT_EQ(comm_rate(b, b), 1.0);
  EXPECT_EQ(comm_rate(a, b), 0.5);
  EXPECT_THROW(comm_rate(a, CommStats{}), UndefinedValueError);
}

TEST(IdLmid, EveryVisibleSpaceRespectsXiAndTighterRunsNest) {
  const Dataset d = load_breastcancer();
  const auto views = make_partition(d, PartitionSpec{});
  for (auto kind : {ModelKind::kRandomForest, ModelKind::kXGBoost}) {
    std::vector<PartyTranscript> runs;
    for (double xi : {0.1, 0.5, 1.0}) {
      ProtocolConfig cfg;
      cfg.model = kind;
      cfg.defense = DefenseKind::kIdLmid;
      cfg.xi = xi;
      const auto r = train_federated(cfg, d, views);
      for (const auto& s : r.transcripts[0].visible_spaces()) {
        const double b = mi_upper_bound(NodeClassCounts::of(*s.ids, d.labels, 2));
        EXPECT_LE(b, xi);
        EXPECT_LE(b, 1.0);
      }
      check_sound(r.transcripts[0]);
      EXPECT_GT(r.comm.admissible_disclosures, 0);
    }
  }
}

TEST(IdLmid, InfiniteThresholdMatchesUndefendedSplits) {
  const Dataset d = load_breastcancer();
  const auto views = make_partition(d, PartitionSpec{});
  ProtocolConfig plain;
  ProtocolConfig guarded = plain;
  guarded.defense = DefenseKind::kIdLmid;
  const auto a = train_federated(plain, d, views);
  const auto b = train_federated(guarded, d, views);
  EXPECT_EQ(model_to_json(a.model), model_to_json(b.model));
  EXPECT_EQ(a.transcripts[0].visible_spaces().size(), b.transcripts[0].visible_spaces().size());
}

TEST(IdLmid, MockAndPaillierAgree) {
  const Dataset d = gen_synthetic(60, 6, 2, 0.4, 3);
  const auto views = make_partition(d, PartitionSpec{});
  ProtocolConfig cfg;
  cfg.model = ModelKind::kXGBoost;
  cfg.tree_count = 2;
  cfg.max_depth = 3;
  cfg.defense = DefenseKind::kIdLmid;
  cfg.xi = 0.3;
  cfg.he_backend = HeBackendKind::kMock;
  const auto a = train_federated(cfg, d, views);
  cfg.he_backend = HeBackendKind::kPaillier;
  cfg.key_bits = 512;
  const auto b = train_federated(cfg, d, views);
  EXPECT_EQ(a.comm, b.comm);
  EXPECT_EQ(model_to_json(a.model), model_to_json(b.model));
  ASSERT_EQ(a.transcripts[0].events.size(), b.transcripts[0].events.size());
  for (std::size_t i = 0; i < a.transcripts[0].events.size(); ++i) {
    auto ea = a.transcripts[0].events[i], eb = b.transcripts[0].events[i];
    ea.blob_hex.clear();
    eb.blob_hex.clear();
    ea.byte_length = eb.byte_length = 0;
    EXPECT_EQ(ea, eb);
  }
}

TEST(Serialize, TranscriptAndModelRoundTrip) {
  const Dataset d = load_breastcancer();
  ProtocolConfig cfg;
  cfg.model = ModelKind::kXGBoost;
  const auto r = train_federated(cfg, d, make_partition(d, PartitionSpec{}));
  EXPECT_EQ(transcript_from_json(transcript_to_json(r.transcripts[0])), r.transcripts[0]);
  const std::string m = model_to_json(r.model);
  EXPECT_EQ(model_to_json(model_from_json(m)), m);
  EXPECT_THROW(transcript_from_json("{\"party_id\": 2}"), MalformedInputError);
}

TEST(SubsampleFeatures, CeilingOfRatio) {
  const auto mask = subsample_features(30, 0.8, 4);
  EXPECT_EQ(std::count(mask.begin(), mask.end(), 1), 24);
  EXPECT_EQ(subsample_features(30, 0.8, 4), mask);
}

TEST(ProtocolConfig, Validation) {
  ProtocolConfig c;
  c.max_depth = 0;
  EXPECT_THROW(c.validate(), InvalidArgumentError);
  c = ProtocolConfig{};
  c.tree_count = 0;
  EXPECT_THROW(c.validate(), InvalidArgumentError);
  EXPECT_EQ(defense_from_string("lp2st"), DefenseKind::kLpMst);
  EXPECT_EQ(defense_from_string("id-lmid"), DefenseKind::kIdLmid);
}

}  // namespace
}  // namespace treeleak
