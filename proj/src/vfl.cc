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

#include "treeleak/vfl.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <set>
#include <utility>

namespace treeleak {

std::string to_string(DefenseKind kind) {
  switch (kind) {
    case DefenseKind::kNone: return "none";
    case DefenseKind::kLpMst: return "lp_mst";
    case DefenseKind::kGraftingLdp: return "grafting_ldp";
    case DefenseKind::kIdLmid: return "id_lmid";
    case DefenseKind::kReducedLeakage: return "reduced_leakage";
  }
  return "none";
}

DefenseKind defense_from_string(const std::string& s) {
  if (s == "none") return DefenseKind::kNone;
  if (s == "lp_mst" || s == "lp2st" || s == "lp-mst" || s == "lp_2st") {
    return DefenseKind::kLpMst;
  }
  if (s == "grafting_ldp" || s == "grafting-ldp" || s == "grafting") {
    return DefenseKind::kGraftingLdp;
  }
  if (s == "id_lmid" || s == "id-lmid" || s == "idlmid") return DefenseKind::kIdLmid;
  if (s == "reduced_leakage" || s == "reduced-leakage") {
    return DefenseKind::kReducedLeakage;
  }
  throw InvalidArgumentError("unknown defense '" + s + "'");
}

std::string to_string(EventKind kind) {
  switch (kind) {
    case EventKind::kBroadcast: return "broadcast";
    case EventKind::kCiphertexts: return "ciphertexts";
    case EventKind::kSplitSelected: return "split_selected";
    case EventKind::kChildSpaces: return "child_spaces";
  }
  return "broadcast";
}

Party Party::from_view(const Dataset& d, const VerticalView& view) {
  Party p;
  p.party_id = view.party_id;
  p.view = view;
  p.local = d.features.select_cols(view.feature_indices);
  return p;
}

void ProtocolConfig::validate() const {
  if (max_depth < 1) throw InvalidArgumentError("protocol: max_depth must be >= 1");
  if (tree_count < 1) throw InvalidArgumentError("protocol: tree_count must be >= 1");
  if (!(feature_subsample > 0.0 && feature_subsample <= 1.0)) {
    throw InvalidArgumentError("protocol: feature_subsample must be in (0, 1]");
  }
  if (percentile_count < 1) {
    throw InvalidArgumentError("protocol: percentile_count must be >= 1");
  }
  if (min_samples_split < 2) {
    throw InvalidArgumentError("protocol: min_samples_split must be >= 2");
  }
  if (booster.lambda_reg < 0.0) {
    throw InvalidArgumentError("protocol: lambda must be >= 0");
  }
  if (defense == DefenseKind::kIdLmid && !(xi >= 0.0)) {
    throw InvalidArgumentError("protocol: xi must be >= 0");
  }
}

std::vector<int> PartyTranscript::tree_order() const {
  std::vector<int> order;
  std::set<int> seen;
  for (const auto& e : events) {
    if (e.tree_id < 0) continue;
    if (e.kind != EventKind::kBroadcast && e.kind != EventKind::kChildSpaces) continue;
    if (seen.insert(e.tree_id).second) order.push_back(e.tree_id);
  }
  return order;
}

std::vector<PartyTranscript::Space> PartyTranscript::visible_spaces() const {
  std::vector<Space> out;
  for (const auto& e : events) {
    if (e.kind == EventKind::kBroadcast) {
      out.push_back({e.tree_id, e.node_id, &e.space});
    } else if (e.kind == EventKind::kChildSpaces) {
      out.push_back({e.tree_id, e.left_node, &e.left});
      out.push_back({e.tree_id, e.right_node, &e.right});
    }
  }
  return out;
}

std::vector<double> percentile_thresholds(std::vector<double> values, int l) {
  std::sort(values.begin(), values.end());
  const std::size_t n = values.size();
  std::size_t distinct = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (i == 0 || values[i] != values[i - 1]) ++distinct;
  }
  if (distinct < 2) return {};
  const int l_eff = std::min(l, static_cast<int>(distinct) - 1);
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(l_eff));
  for (int j = 1; j <= l_eff; ++j) {
    const double q = static_cast<double>(j) / static_cast<double>(l_eff + 1);
    const double pos = q * static_cast<double>(n - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const double frac = pos - static_cast<double>(lo);
    double thr = values[lo];
    if (lo + 1 < n && frac > 0.0) thr += frac * (values[lo + 1] - values[lo]);
    out.push_back(thr);
  }
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

std::vector<SplitCandidate> propose_splits(const Party& p,
                                           std::span<const int> node_space,
                                           int l, std::span<const char> allowed) {
  std::vector<SplitCandidate> out;
  if (node_space.empty()) return out;
  std::vector<double> values(node_space.size());
  int next_id = 0;
  for (std::size_t j = 0; j < p.view.feature_indices.size(); ++j) {
    const int feature = p.view.feature_indices[j];
    if (!allowed.empty() && !allowed[static_cast<std::size_t>(feature)]) continue;
    for (std::size_t i = 0; i < node_space.size(); ++i) {
      values[i] = p.local(static_cast<std::size_t>(node_space[i]), j);
    }
    for (double thr : percentile_thresholds(values, l)) {
      SplitCandidate c;
      c.owner_party = p.party_id;
      c.feature_index = feature;
      c.threshold = thr;
      for (std::size_t i = 0; i < node_space.size(); ++i) {
        (values[i] < thr ? c.left : c.right).push_back(node_space[i]);
      }
      if (c.left.empty() || c.right.empty()) continue;
      c.candidate_id = next_id++;
      out.push_back(std::move(c));
    }
  }
  return out;
}

std::vector<char> subsample_features(std::size_t feature_count, double ratio,
                                     std::uint64_t seed) {
  const auto keep = static_cast<std::size_t>(
      std::ceil(ratio * static_cast<double>(feature_count) - 1e-9));
  std::vector<int> perm(feature_count);
  std::iota(perm.begin(), perm.end(), 0);
  std::mt19937_64 rng(seed);
  std::shuffle(perm.begin(), perm.end(), rng);
  std::vector<char> mask(feature_count, 0);
  for (std::size_t i = 0; i < std::min(keep, feature_count); ++i) {
    mask[static_cast<std::size_t>(perm[i])] = 1;
  }
  return mask;
}

struct FederatedSession::NodeStats {
  long n = 0;
  std::vector<long> class_counts;
  double g = 0.0;
  double h = 0.0;

  bool pure() const {
    return std::count_if(class_counts.begin(), class_counts.end(),
                         [](long c) { return c > 0; }) <= 1;
  }
};

FederatedSession::FederatedSession(const ProtocolConfig& cfg,
                                   std::vector<Party> parties,
                                   std::vector<int> training_labels,
                                   std::vector<int> clean_labels, int class_count)
    : cfg_(cfg),
      parties_(std::move(parties)),
      labels_(std::move(training_labels)),
      clean_labels_(std::move(clean_labels)),
      class_count_(class_count) {
  std::sort(parties_.begin(), parties_.end(),
            [](const Party& a, const Party& b) { return a.party_id < b.party_id; });
  if (parties_.empty() || parties_.front().party_id != 1) {
    throw InvalidArgumentError("session: party 1 (active) is required");
  }
  for (const Party& p : parties_) {
    if (p.is_active()) continue;
    PartyTranscript t;
    t.party_id = p.party_id;
    t.sample_count = static_cast<int>(labels_.size());
    transcripts_.push_back(std::move(t));
  }
  if (cfg_.defense == DefenseKind::kIdLmid) {
    he_ = he_keygen(cfg_.he_backend, cfg_.key_bits, derive_seed(cfg_.seed, "he"));
  }
}

FederatedSession::~FederatedSession() = default;

std::size_t FederatedSession::passive_slot(int party_id) const {
  for (std::size_t i = 0; i < transcripts_.size(); ++i) {
    if (transcripts_[i].party_id == party_id) return i;
  }
  throw ProtocolError("unknown passive party " + std::to_string(party_id));
}

void FederatedSession::record_ciphertexts(std::size_t passive,
                                          const std::string& payload,
                                          std::int64_t count, bool outgoing,
                                          const std::string& blob) {
  PartyTranscript& t = transcripts_[passive];
  TranscriptEvent e;
  e.seq = seq_++;
  e.kind = EventKind::kCiphertexts;
  e.outgoing = outgoing;
  e.payload = payload;
  e.count = count;
  e.byte_length = count * static_cast<std::int64_t>(
                              he_ ? he_->ciphertext_bytes()
                                  : static_cast<std::size_t>(2 * cfg_.key_bits / 8));
  e.blob_hex = blob;
  t.ciphertext_count += count;
  e.cumulative = t.ciphertext_count;
  t.events.push_back(std::move(e));
}

FederatedSession::NodeStats FederatedSession::stats_of(
    std::span<const int> space) const {
  NodeStats s;
  s.n = static_cast<long>(space.size());
  s.class_counts.assign(static_cast<std::size_t>(class_count_), 0);
  for (int i : space) {
    const auto r = static_cast<std::size_t>(i);
    ++s.class_counts[static_cast<std::size_t>(labels_[r])];
    if (!grad_.empty()) {
      s.g += grad_[r];
      s.h += hess_[r];
    }
  }
  return s;
}

void FederatedSession::broadcast(const Tree& tree, int node_index) {
  const auto n = static_cast<std::int64_t>(labels_.size());
  const bool boosting = cfg_.model == ModelKind::kXGBoost;
  for (std::size_t p = 0; p < transcripts_.size(); ++p) {
    if (!labels_sent_ && (!boosting || hooks_.idlmid)) {
      const std::int64_t count = n * class_count_;
      comm_.charge_labels(count);
      std::string blob;
      if (hooks_.idlmid && enc_labels_ && !enc_labels_->cells.empty()) {
        blob = he_->hex(enc_labels_->cells.front());
      }
      record_ciphertexts(p, "one_hot_labels", count, false, blob);
    }
    if (boosting && !tree_announced_) {
      comm_.charge_gradients(2 * n);
      record_ciphertexts(p, "gradients_hessians", 2 * n, false, "");
    }
  }
  if (!boosting || hooks_.idlmid) labels_sent_ = true;
  if (boosting) tree_announced_ = true;

  const TreeNode& node = tree.nodes[static_cast<std::size_t>(node_index)];
  ++comm_.broadcasts;
  if (hooks_.idlmid) ++comm_.admissible_disclosures;
  for (auto& t : transcripts_) {
    TranscriptEvent e;
    e.seq = seq_++;
    e.kind = EventKind::kBroadcast;
    e.tree_id = tree.tree_id;
    e.node_id = node.node_id;
    e.space = node.instance_space;
    t.events.push_back(std::move(e));
  }
}

Tree FederatedSession::grow_tree(int tree_id, int target_class,
                                 std::span<const double> grad,
                                 std::span<const double> hess,
                                 std::span<const char> allowed,
                                 const GrowthHooks& hooks) {
  grad_ = grad;
  hess_ = hess;
  allowed_ = allowed;
  hooks_ = hooks;
  tree_announced_ = false;
  if (hooks_.idlmid && !he_) {
    he_ = he_keygen(cfg_.he_backend, cfg_.key_bits, derive_seed(cfg_.seed, "he"));
  }
  if (hooks_.idlmid && !enc_labels_ && !transcripts_.empty()) {
    enc_labels_ = encrypt_one_hot_labels(*he_, clean_labels_, class_count_);
  }
  Tree tree;
  tree.tree_id = tree_id;
  tree.target_class = target_class;
  std::vector<int> root(labels_.size());
  std::iota(root.begin(), root.end(), 0);
  grow_node(tree, std::move(root), 0, !hooks_.active_only);
  return tree;
}

int FederatedSession::grow_node(Tree& tree, std::vector<int> space, int depth,
                                bool visible) {
  const int index = static_cast<int>(tree.nodes.size());
  TreeNode node;
  node.node_id = index;
  node.tree_id = tree.tree_id;
  node.instance_space = std::move(space);
  node.depth = depth;
  tree.nodes.push_back(std::move(node));
  split_node(tree, index, visible);
  return index;
}

void FederatedSession::split_node(Tree& tree, int index, bool visible) {
  const auto uindex = static_cast<std::size_t>(index);
  // Copy: recursion appends to tree.nodes and may reallocate.
  const std::vector<int> space = tree.nodes[uindex].instance_space;
  const int depth = tree.nodes[uindex].depth;
  const NodeStats stats = stats_of(space);
  const bool boosting = cfg_.model == ModelKind::kXGBoost;

  auto make_leaf = [&] {
    SplitStatistics s;
    s.n = stats.n;
    s.class_counts = stats.class_counts;
    s.g = stats.g;
    s.h = stats.h;
    tree.nodes[uindex].leaf_weight =
        leaf_weight(s, cfg_.booster, cfg_.model);
    tree.nodes[uindex].split.reset();
    tree.nodes[uindex].children.reset();
  };

  if (depth >= cfg_.max_depth || stats.n < cfg_.min_samples_split || stats.pure()) {
    make_leaf();
    return;
  }

  const bool passives_in = visible && !hooks_.active_only && !transcripts_.empty();
  if (passives_in) broadcast(tree, index);

  std::vector<SplitCandidate> psi;
  for (const Party& p : parties_) {
    if (!p.is_active() && !passives_in) continue;
    auto cands = propose_splits(p, space, cfg_.percentile_count, allowed_);
    if (!p.is_active() && !cands.empty()) {
      const auto count = static_cast<std::int64_t>(cands.size());
      comm_.passive_candidates += count;
      const std::int64_t per = boosting ? 2 : 2 * class_count_;
      comm_.charge_candidates(count * per);
      record_ciphertexts(passive_slot(p.party_id), "candidate_sums", count * per,
                         true, "");
    }
    for (auto& c : cands) psi.push_back(std::move(c));
  }

  // Score every candidate at the active party.
  std::vector<char> valid(psi.size(), 1);
  for (std::size_t k = 0; k < psi.size(); ++k) {
    auto& c = psi[k];
    std::vector<long> lc(static_cast<std::size_t>(class_count_), 0);
    double gl = 0.0, hl = 0.0;
    for (int i : c.left) {
      const auto r = static_cast<std::size_t>(i);
      ++lc[static_cast<std::size_t>(labels_[r])];
      if (!grad_.empty()) {
        gl += grad_[r];
        hl += hess_[r];
      }
    }
    std::vector<long> rc(lc.size());
    for (std::size_t j = 0; j < lc.size(); ++j) rc[j] = stats.class_counts[j] - lc[j];
    auto s = SplitStatistics::from_children(std::move(lc), std::move(rc), gl,
                                            stats.g - gl, hl, stats.h - hl);
    try {
      c.score = boosting ? xgb_gain(s, cfg_.booster) : gini_gain(s);
    } catch (const InvalidSplitError&) {
      valid[k] = 0;
    }
  }

  NodeLogEntry entry;
  entry.tree_id = tree.tree_id;
  entry.node_id = index;
  entry.depth = depth;
  entry.visible = passives_in;
  entry.candidates = static_cast<int>(psi.size());

  std::optional<std::size_t> chosen;
  bool children_visible = visible && !hooks_.active_only;
  if (hooks_.idlmid) {
    std::vector<CandidateSummary> summaries;
    std::vector<std::size_t> origin;
    // Passive purities travel through the encrypted exchange.
    std::vector<std::vector<std::size_t>> by_party(transcripts_.size());
    for (std::size_t k = 0; k < psi.size(); ++k) {
      if (!valid[k]) continue;
      if (psi[k].owner_party != 1) by_party[passive_slot(psi[k].owner_party)].push_back(k);
    }
    std::vector<std::optional<NodePurity>> purity(psi.size());
    for (std::size_t p = 0; p < by_party.size(); ++p) {
      if (by_party[p].empty()) continue;
      std::vector<CandidateSpaces> spaces;
      spaces.reserve(by_party[p].size());
      for (std::size_t k : by_party[p]) spaces.push_back({psi[k].left, psi[k].right});
      auto msgs = secure_node_purity(*he_, *enc_labels_, spaces,
                                     boosting ? &comm_ : nullptr);
      if (boosting) {
        std::string blob;
        if (!msgs.empty() && !msgs.front().sums[0].empty()) {
          blob = he_->hex(msgs.front().sums[0].front());
        }
        record_ciphertexts(p, "purity_sums",
                           static_cast<std::int64_t>(spaces.size()) *
                               purity_ciphertexts_per_candidate(class_count_),
                           true, blob);
      }
      for (std::size_t j = 0; j < by_party[p].size(); ++j) {
        purity[by_party[p][j]] = decrypt_purity(*he_, msgs[j]);
      }
    }
    for (std::size_t k = 0; k < psi.size(); ++k) {
      if (!valid[k]) continue;
      CandidateSummary s;
      s.owner_party = psi[k].owner_party;
      s.feature_index = psi[k].feature_index;
      s.threshold = psi[k].threshold;
      s.score = psi[k].score;
      if (purity[k]) {
        s.left = purity[k]->left_counts();
        s.right = purity[k]->right_counts();
      } else {
        s.left = NodeClassCounts::of(psi[k].left, clean_labels_, class_count_);
        s.right = NodeClassCounts::of(psi[k].right, clean_labels_, class_count_);
      }
      summaries.push_back(std::move(s));
      origin.push_back(k);
    }
    IdLmidDecision d = idlmid_split(summaries, hooks_.xi, boosting);
    for (std::size_t j = 0; j < summaries.size(); ++j) {
      if (!d.kept[j]) {
        ++entry.filtered;
      } else {
        entry.psi_scores.push_back(summaries[j].score);
      }
    }
    if (d.chosen) {
      chosen = origin[*d.chosen];
      children_visible = children_visible && d.children_visible;
    }
  } else {
    for (std::size_t k = 0; k < psi.size(); ++k) {
      if (!valid[k]) continue;
      const auto& c = psi[k];
      entry.psi_scores.push_back(c.score);
      if (boosting && !(c.score > 0.0)) continue;
      if (!chosen || better_candidate(c.score, c.owner_party, c.feature_index,
                                      c.threshold, psi[*chosen].score,
                                      psi[*chosen].owner_party,
                                      psi[*chosen].feature_index,
                                      psi[*chosen].threshold)) {
        chosen = k;
      }
    }
  }
  if (!entry.psi_scores.empty()) {
    entry.max_candidate_score =
        *std::max_element(entry.psi_scores.begin(), entry.psi_scores.end());
  }

  if (!chosen) {
    log_.push_back(std::move(entry));
    make_leaf();
    return;
  }

  SplitCandidate& win = psi[*chosen];
  entry.best_score = win.score;
  entry.winner_party = win.owner_party;
  log_.push_back(std::move(entry));
  tree.nodes[uindex].split =
      SplitRule{win.owner_party, win.feature_index, win.threshold};

  // Child node ids are assigned in preorder: the left child is the next
  // node, the right child follows the whole left subtree. The owner learns
  // the right id once the left subtree is done; the transcript records both
  // at the moment of the reply for simplicity of replay.
  std::optional<std::size_t> owner_slot;
  if (win.owner_party != 1) owner_slot = passive_slot(win.owner_party);
  if (owner_slot) {
    TranscriptEvent sel;
    sel.seq = seq_++;
    sel.kind = EventKind::kSplitSelected;
    sel.tree_id = tree.tree_id;
    sel.node_id = index;
    sel.candidate_id = win.candidate_id;
    transcripts_[*owner_slot].events.push_back(std::move(sel));
  }
  std::size_t reply_pos = 0;
  if (owner_slot) {
    TranscriptEvent reply;
    reply.seq = seq_++;
    reply.kind = EventKind::kChildSpaces;
    reply.outgoing = true;
    reply.tree_id = tree.tree_id;
    reply.node_id = index;
    reply.candidate_id = win.candidate_id;
    reply.feature_index = win.feature_index;
    reply.threshold = win.threshold;
    reply.left = win.left;
    reply.right = win.right;
    if (hooks_.idlmid) comm_.admissible_disclosures += 2;
    transcripts_[*owner_slot].events.push_back(std::move(reply));
    reply_pos = transcripts_[*owner_slot].events.size() - 1;
  }

  std::vector<int> left = std::move(win.left);
  std::vector<int> right = std::move(win.right);
  psi.clear();
  const int l = grow_node(tree, std::move(left), depth + 1, children_visible);
  const int r = grow_node(tree, std::move(right), depth + 1, children_visible);
  tree.nodes[uindex].children = std::make_pair(l, r);
  if (owner_slot) {
    auto& reply = transcripts_[*owner_slot].events[reply_pos];
    reply.left_node = l;
    reply.right_node = r;
  }
}

void FederatedSession::regrow_private(Tree& tree, int node_index) {
  hooks_ = GrowthHooks{};
  hooks_.active_only = true;
  grad_ = {};
  hess_ = {};
  allowed_ = {};
  split_node(tree, node_index, false);
}

TrainResult train_federated(const ProtocolConfig& cfg, const Dataset& train,
                            const std::vector<VerticalView>& views,
                            std::optional<std::vector<int>> training_labels) {
  cfg.validate();
  train.validate();
  validate_partition(views, train.cols());
  if (train.rows() == 0) throw InvalidArgumentError("train_federated: empty training set");

  std::vector<Party> parties;
  for (const auto& v : views) parties.push_back(Party::from_view(train, v));
  std::vector<int> labels = training_labels ? std::move(*training_labels) : train.labels;
  if (labels.size() != train.rows()) {
    throw InvalidArgumentError("train_federated: training label count mismatch");
  }

  FederatedSession session(cfg, std::move(parties), labels, train.labels,
                           train.class_count);
  TrainResult out;
  out.training_labels = labels;
  TreeModel& model = out.model;
  model.kind = cfg.model;
  model.class_count = train.class_count;
  model.feature_subsample_ratio = cfg.feature_subsample;
  model.max_depth = cfg.max_depth;
  model.tree_count = cfg.tree_count;
  model.booster = cfg.booster;

  const bool idlmid = cfg.defense == DefenseKind::kIdLmid;
  const bool reduced = cfg.defense == DefenseKind::kReducedLeakage;
  auto hooks_for = [&](int round) {
    GrowthHooks h;
    h.idlmid = idlmid;
    h.xi = cfg.xi;
    h.active_only = reduced && round == 0;
    return h;
  };

  if (cfg.model == ModelKind::kRandomForest) {
    for (int t = 0; t < cfg.tree_count; ++t) {
      auto mask = subsample_features(train.cols(), cfg.feature_subsample,
                                     derive_seed(cfg.seed, "features", static_cast<std::uint64_t>(t)));
      model.trees.push_back(session.grow_tree(t, -1, {}, {}, mask, hooks_for(t)));
    }
  } else {
    const int k = margin_columns(train.class_count);
    const auto n = train.rows();
    Matrix margins(n, static_cast<std::size_t>(k), 0.0);
    for (int round = 0; round < cfg.tree_count; ++round) {
      GradHess gh = grad_hess(labels, margins, train.class_count);
      std::vector<Tree> round_trees;
      for (int c = 0; c < k; ++c) {
        const int tree_id = round * k + c;
        std::vector<double> g(n), h(n);
        for (std::size_t i = 0; i < n; ++i) {
          g[i] = gh.grad(i, static_cast<std::size_t>(c));
          h[i] = gh.hess(i, static_cast<std::size_t>(c));
        }
        auto mask = subsample_features(
            train.cols(), cfg.feature_subsample,
            derive_seed(cfg.seed, "features", static_cast<std::uint64_t>(tree_id)));
        round_trees.push_back(session.grow_tree(
            tree_id, train.class_count == 2 ? 1 : c, g, h, mask, hooks_for(round)));
      }
      for (std::size_t c = 0; c < round_trees.size(); ++c) {
        for (const TreeNode& node : round_trees[c].nodes) {
          if (!node.is_leaf()) continue;
          for (int i : node.instance_space) {
            margins(static_cast<std::size_t>(i), c) +=
                cfg.booster.learning_rate * node.leaf_weight[0];
          }
        }
        model.trees.push_back(std::move(round_trees[c]));
      }
    }
  }
  out.transcripts = session.transcripts();
  out.comm = session.comm();
  out.log = session.log();
  return out;
}

}  // namespace treeleak
