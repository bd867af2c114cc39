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

// Label inference from instance spaces.
//
// The passive party turns the spaces it has seen into a weighted
// co-occurrence graph, finds communities with Louvain, and clusters its
// own features together with the community indicators. Baselines: plain
// k-means on local features (CL), connected components of co-membership
// (UNI), and k-means with UNI components as extra features (UNI+CL).

#ifndef TREELEAK_ATTACK_H_
#define TREELEAK_ATTACK_H_

#include <cstdint>
#include <span>
#include <string>
#include <tuple>
#include <vector>

#include "treeleak/common.h"
#include "treeleak/tree.h"
#include "treeleak/vfl.h"

namespace treeleak {

// What one passive party knows, per tree in observation order.
struct AttackerView {
  struct TreeSpaces {
    int tree_id = 0;
    std::vector<std::vector<int>> spaces;  // distinct, sorted ids
    std::vector<int> parent;               // smallest known superset, -1 if none
    std::vector<int> leaves;               // indices into `spaces`
  };
  int sample_count = 0;
  std::vector<TreeSpaces> trees;

  // Besides the recorded spaces, each known child's sibling (its parent
  // minus the child) is added: splits are binary, so it is implied.
  static AttackerView from_transcript(const PartyTranscript& t);
  // Every node of every tree is known (white-box view of a model dump).
  static AttackerView from_model(const TreeModel& m, int sample_count);
  // Builds the view from raw spaces grouped by tree, in the given order.
  static AttackerView from_spaces(int sample_count,
                                  const std::vector<std::vector<std::vector<int>>>& trees);

  std::size_t leaf_count() const;
};

struct AdjacencyGraph {
  int n = 0;
  // Undirected edges (u < v, weight > 0), sorted by (u, v).
  std::vector<std::tuple<int, int, double>> edges;

  double weight(int u, int v) const;
  double total_weight() const;  // sum over ordered pairs: 2m
  bool operator==(const AdjacencyGraph&) const = default;
};

AdjacencyGraph build_adjacency(const AttackerView& view, double eta);

// Leaves with at least `chunk` ids are cut into consecutive chunks; pairs
// inside a chunk get eta^(t-1), and the last id of each chunk is tied to
// the first id of the next with `inter_weight`.
AdjacencyGraph build_adjacency_chunked(const AttackerView& view, double eta,
                                       int chunk, double inter_weight);

struct CommunityAssignment {
  std::vector<int> community;  // dense ids, 0-based
  double modularity = 0.0;
  std::vector<double> phase_modularity;  // after each local-moving phase
  int community_count() const;
};

// Modularity of `community` on `g` with the ordered-pair convention.
double modularity(const AdjacencyGraph& g, std::span<const int> community);

CommunityAssignment louvain(const AdjacencyGraph& g, int max_iter = 100,
                            double tol = 1e-6);

struct KMeansResult {
  std::vector<int> labels;
  Matrix centers;
  int iterations = 0;
  double inertia = 0.0;
  std::vector<double> inertia_history;  // after each assignment step
};

// Lloyd iterations from a greedy k-means++ start. Stops after `max_iter`
// or once the squared center shift is at most tol * mean column variance.
KMeansResult kmeans(const Matrix& x, int k, std::uint64_t seed, int max_iter = 300,
                    double tol = 1e-4);

enum class AttackMethod { kId2Graph, kCl, kUni, kUniCl };
std::string to_string(AttackMethod m);
AttackMethod attack_method_from_string(const std::string& s);

struct ClusterResult {
  std::vector<int> labels;
  int cluster_count = 0;
  AttackMethod method = AttackMethod::kCl;
  int iterations = 0;
  double modularity = 0.0;
  int communities = 0;
};

struct AttackParams {
  double eta = 1.0;
  double alpha = 3.0;
  bool chunked = false;
  int chunk = 1000;
  double inter_weight = 100.0;
  int louvain_max_iter = 100;
  double louvain_tol = 1e-6;
  int kmeans_max_iter = 300;
  double kmeans_tol = 1e-4;
  // UNI: link ids that share any known non-root space, not only leaves.
  bool uni_all_nodes = false;
};

// Min-max scaled local features next to alpha-scaled community dummies.
// Constant columns and dummies of single-member communities carry no
// information and are left out before clustering.
ClusterResult kmeans_block(const Matrix& local_features,
                           const CommunityAssignment& communities, double alpha,
                           int k, std::uint64_t seed, int max_iter = 300,
                           double tol = 1e-4);

ClusterResult attack_id2graph(const AttackerView& view, const Matrix& local_features,
                              int class_count, const AttackParams& params,
                              std::uint64_t seed);
ClusterResult attack_cl(const Matrix& local_features, int class_count,
                        std::uint64_t seed, const AttackParams& params = {});
ClusterResult attack_uni(const AttackerView& view, const AttackParams& params = {});
ClusterResult attack_uni_cl(const AttackerView& view, const Matrix& local_features,
                            int class_count, std::uint64_t seed,
                            const AttackParams& params = {});

}  // namespace treeleak

#endif  // TREELEAK_ATTACK_H_
