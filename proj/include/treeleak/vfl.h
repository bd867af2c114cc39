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

// In-process simulation of tree-based vertical federated training.
//
// Party 1 (active) owns the labels and drives the protocol. For every node
// that is going to be divided it broadcasts the node's instance space to the
// passive parties, collects their scored split candidates, adopts the best
// one and, when a passive party wins, asks that party for the two child
// instance spaces. Everything a passive party sends or receives is appended
// to its PartyTranscript, which is the only input the attack code gets.
//
// Scoring happens at the active party on plaintext statistics; CommStats
// charges the ciphertexts the encrypted protocol would have exchanged:
//   random forest  N*C encrypted one-hot labels once per passive party, then
//                  2*C encrypted class sums per passive candidate.
//   xgboost        2*N encrypted gradients/hessians per tree per passive
//                  party, then 2 encrypted sums per passive candidate.
//   id-lmid        xgboost additionally pays N*C label ciphertexts once and
//                  4*C purity ciphertexts per passive candidate. Random
//                  forest candidates already carry the class sums, and the
//                  complements follow from the public class totals, so it
//                  pays nothing extra.

#ifndef TREELEAK_VFL_H_
#define TREELEAK_VFL_H_

#include <cstdint>
#include <limits>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "treeleak/comm.h"
#include "treeleak/dataset.h"
#include "treeleak/he.h"
#include "treeleak/idlmid.h"
#include "treeleak/tree.h"

namespace treeleak {

enum class DefenseKind { kNone, kLpMst, kGraftingLdp, kIdLmid, kReducedLeakage };

std::string to_string(DefenseKind kind);
DefenseKind defense_from_string(const std::string& s);

struct Party {
  int party_id = 1;
  VerticalView view;
  Matrix local;  // N x |view.feature_indices|, columns in view order

  bool is_active() const { return party_id == 1; }
  static Party from_view(const Dataset& d, const VerticalView& view);
};

struct SplitCandidate {
  int owner_party = 1;
  int candidate_id = 0;
  int feature_index = 0;  // global index, known only to the owner
  double threshold = 0.0;
  std::vector<int> left;   // x < threshold
  std::vector<int> right;  // x >= threshold
  double score = 0.0;
};

struct ProtocolConfig {
  ModelKind model = ModelKind::kRandomForest;
  int max_depth = 6;
  int tree_count = 5;
  double feature_subsample = 0.8;
  int percentile_count = 32;
  int min_samples_split = 2;
  BoosterParams booster;
  DefenseKind defense = DefenseKind::kNone;
  double xi = std::numeric_limits<double>::infinity();
  HeBackendKind he_backend = HeBackendKind::kMock;
  int key_bits = 512;
  std::uint64_t seed = 0;

  void validate() const;
};

enum class EventKind { kBroadcast, kCiphertexts, kSplitSelected, kChildSpaces };

std::string to_string(EventKind kind);

struct TranscriptEvent {
  std::uint64_t seq = 0;
  EventKind kind = EventKind::kBroadcast;
  bool outgoing = false;  // sent by the transcript owner
  int tree_id = -1;
  int node_id = -1;
  std::vector<int> space;  // kBroadcast
  // kSplitSelected / kChildSpaces (owner-private split details)
  int candidate_id = -1;
  int feature_index = -1;
  double threshold = 0.0;
  int left_node = -1;
  int right_node = -1;
  std::vector<int> left;
  std::vector<int> right;
  // kCiphertexts
  std::string payload;
  std::int64_t count = 0;
  std::int64_t byte_length = 0;
  std::string blob_hex;  // first ciphertext of the message, when real
  std::int64_t cumulative = 0;

  bool operator==(const TranscriptEvent&) const = default;
};

struct PartyTranscript {
  int party_id = 2;
  int sample_count = 0;
  std::vector<TranscriptEvent> events;
  std::int64_t ciphertext_count = 0;

  // Tree ids in the order the party first heard of them.
  std::vector<int> tree_order() const;
  // Every instance space visible to the party: broadcasts plus child spaces
  // of splits it owns, tagged with (tree, node).
  struct Space {
    int tree_id;
    int node_id;
    const std::vector<int>* ids;
  };
  std::vector<Space> visible_spaces() const;

  bool operator==(const PartyTranscript&) const = default;
};

// Active-party-private record of one divided (or attempted) node.
struct NodeLogEntry {
  int tree_id = 0;
  int node_id = 0;
  int depth = 0;
  bool visible = false;
  int candidates = 0;
  int filtered = 0;
  double best_score = 0.0;
  double max_candidate_score = 0.0;
  int winner_party = 0;  // 0: no split adopted
  std::vector<double> psi_scores;  // surviving candidate scores
};

struct TrainResult {
  TreeModel model;
  std::vector<PartyTranscript> transcripts;  // one per passive party
  CommStats comm;
  std::vector<NodeLogEntry> log;
  std::vector<int> training_labels;
};

// Candidates of one party for one node. Thresholds are l quantiles
// (linear interpolation between order statistics) per feature, with l
// capped at distinct - 1. `allowed` is an optional global feature mask.
std::vector<SplitCandidate> propose_splits(const Party& p,
                                           std::span<const int> node_space,
                                           int l,
                                           std::span<const char> allowed = {});

// Quantile thresholds of `values` (any order) for the candidate grid.
std::vector<double> percentile_thresholds(std::vector<double> values, int l);

// Hooks that change how a tree is grown.
struct GrowthHooks {
  bool active_only = false;  // passive parties never see this tree
  bool idlmid = false;
  double xi = std::numeric_limits<double>::infinity();
};

// One protocol run. Holds the parties, the message bus and the accounting.
class FederatedSession {
 public:
  FederatedSession(const ProtocolConfig& cfg, std::vector<Party> parties,
                   std::vector<int> training_labels, std::vector<int> clean_labels,
                   int class_count);
  ~FederatedSession();

  // Grows one tree. `grad`/`hess` are per-row values for boosting trees
  // (empty for random forest). `allowed` masks features for this tree.
  Tree grow_tree(int tree_id, int target_class, std::span<const double> grad,
                 std::span<const double> hess, std::span<const char> allowed,
                 const GrowthHooks& hooks);

  // Discards the subtree under `node_index` and regrows it privately with
  // the active party's features on the session's training labels. New nodes
  // are appended; the old descendants become unreachable.
  void regrow_private(Tree& tree, int node_index);

  const std::vector<PartyTranscript>& transcripts() const { return transcripts_; }
  const CommStats& comm() const { return comm_; }
  const std::vector<NodeLogEntry>& log() const { return log_; }

 private:
  struct NodeStats;
  int grow_node(Tree& tree, std::vector<int> space, int depth, bool visible);
  void split_node(Tree& tree, int index, bool visible);
  NodeStats stats_of(std::span<const int> space) const;
  void broadcast(const Tree& tree, int node_index);
  void record_ciphertexts(std::size_t passive, const std::string& payload,
                          std::int64_t count, bool outgoing,
                          const std::string& blob);
  std::size_t passive_slot(int party_id) const;

  ProtocolConfig cfg_;
  std::vector<Party> parties_;
  std::vector<int> labels_;
  std::vector<int> clean_labels_;
  int class_count_;
  std::vector<PartyTranscript> transcripts_;
  CommStats comm_;
  std::vector<NodeLogEntry> log_;
  std::uint64_t seq_ = 0;

  // Per-tree state.
  std::span<const double> grad_;
  std::span<const double> hess_;
  std::span<const char> allowed_;
  GrowthHooks hooks_;
  bool tree_announced_ = false;
  bool labels_sent_ = false;

  std::unique_ptr<HeBackend> he_;
  std::optional<EncryptedLabels> enc_labels_;
};

// Trains the configured ensemble. `training_labels` replaces the dataset's
// labels for split scoring (noisy labels); admissibility under ID-LMID is
// always evaluated on the dataset's own labels.
TrainResult train_federated(const ProtocolConfig& cfg, const Dataset& train,
                            const std::vector<VerticalView>& views,
                            std::optional<std::vector<int>> training_labels = std::nullopt);

// Feature mask for one tree: ceil(ratio * F) features drawn uniformly.
std::vector<char> subsample_features(std::size_t feature_count, double ratio,
                                     std::uint64_t seed);

}  // namespace treeleak

#endif  // TREELEAK_VFL_H_
