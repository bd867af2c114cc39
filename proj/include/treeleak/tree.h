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

// Party-agnostic tree structures and split scoring.

#ifndef TREELEAK_TREE_H_
#define TREELEAK_TREE_H_

#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "treeleak/common.h"

namespace treeleak {

enum class ModelKind { kRandomForest, kXGBoost };

std::string to_string(ModelKind kind);
ModelKind model_kind_from_string(const std::string& s);

struct SplitRule {
  int owner_party = 1;
  int feature_index = 0;
  double threshold = 0.0;  // left: x < threshold, right: x >= threshold

  bool operator==(const SplitRule&) const = default;
};

struct TreeNode {
  int node_id = 0;
  int tree_id = 0;
  std::vector<int> instance_space;  // sorted training row ids
  std::optional<SplitRule> split;
  std::optional<std::pair<int, int>> children;
  // Random forest: class distribution. XGBoost: one raw margin (before the
  // learning rate) for the tree's target class.
  std::vector<double> leaf_weight;
  int depth = 0;

  bool is_leaf() const { return !children.has_value(); }
};

struct Tree {
  int tree_id = 0;
  // XGBoost target class; -1 for random forest trees. Binary boosting trees
  // target class 1 and their margin m scores classes (0, m).
  int target_class = -1;
  std::vector<TreeNode> nodes;  // nodes[0] is the root

  const TreeNode& root() const { return nodes.front(); }
  std::size_t leaf_count() const;
  // Index of the leaf reached by `row`; throws RoutingError when a split
  // feature is missing from the row.
  int route(std::span<const double> row) const;
  // Throws InvalidArgumentError unless children partition their parents.
  void validate() const;
};

struct BoosterParams {
  double lambda_reg = 1.0;
  double gamma_reg = 0.0;
  double learning_rate = 0.3;
};

struct TreeModel {
  ModelKind kind = ModelKind::kRandomForest;
  int class_count = 2;
  double feature_subsample_ratio = 0.8;
  int max_depth = 6;
  int tree_count = 5;  // requested ensemble size (rounds for XGBoost)
  BoosterParams booster;
  std::vector<Tree> trees;
};

// Sufficient statistics for scoring one binary split of a node.
struct SplitStatistics {
  long n = 0, n_left = 0, n_right = 0;
  std::vector<long> class_counts, left_class_counts, right_class_counts;
  double g = 0.0, g_left = 0.0, g_right = 0.0;
  double h = 0.0, h_left = 0.0, h_right = 0.0;

  // Fills the parent fields from the two children.
  static SplitStatistics from_children(std::vector<long> left_counts,
                                       std::vector<long> right_counts,
                                       double g_left = 0.0,
                                       double g_right = 0.0,
                                       double h_left = 0.0,
                                       double h_right = 0.0);
};

double gini_gain(const SplitStatistics& s);
double xgb_gain(const SplitStatistics& s, const BoosterParams& p);

// Number of margin columns used by boosting: 1 for binary, |C| otherwise.
int margin_columns(int class_count);

// Cross-entropy gradients. `margins` is N x margin_columns(class_count).
struct GradHess {
  Matrix grad;
  Matrix hess;
};
GradHess grad_hess(std::span<const int> labels, const Matrix& margins,
                   int class_count);
// Cross-entropy loss of one sample; the finite-difference reference for
// grad_hess.
double cross_entropy(int label, std::span<const double> margins,
                     int class_count);

// Random forest: class frequencies of the node. XGBoost: {-g / (h + lambda)}.
std::vector<double> leaf_weight(const SplitStatistics& node,
                                const BoosterParams& p, ModelKind kind);

// Per-class scores. Random forest averages leaf distributions; XGBoost
// applies softmax to the learning-rate-scaled margin sums.
std::vector<double> predict(const TreeModel& model, std::span<const double> row);
Matrix predict_matrix(const TreeModel& model, const Matrix& rows);

// Majority class of `space` under `labels`; ties go to the lowest class id.
int majority_class(std::span<const int> space, std::span<const int> labels,
                   int class_count);

}  // namespace treeleak

#endif  // TREELEAK_TREE_H_
