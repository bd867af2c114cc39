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

#include "treeleak/tree.h"

#include <algorithm>
#include <cmath>
#include <iterator>

namespace treeleak {

std::string to_string(ModelKind kind) {
  return kind == ModelKind::kRandomForest ? "random_forest" : "xgboost";
}

ModelKind model_kind_from_string(const std::string& s) {
  if (s == "random_forest" || s == "rf") return ModelKind::kRandomForest;
  if (s == "xgboost" || s == "xgb") return ModelKind::kXGBoost;
  throw InvalidArgumentError("unknown model kind '" + s + "'");
}

std::size_t Tree::leaf_count() const {
  return static_cast<std::size_t>(std::count_if(
      nodes.begin(), nodes.end(), [](const TreeNode& n) { return n.is_leaf(); }));
}

int Tree::route(std::span<const double> row) const {
  int cur = 0;
  while (!nodes[static_cast<std::size_t>(cur)].is_leaf()) {
    const TreeNode& node = nodes[static_cast<std::size_t>(cur)];
    const auto f = static_cast<std::size_t>(node.split->feature_index);
    if (f >= row.size() || std::isnan(row[f])) {
      throw RoutingError("row lacks feature " + std::to_string(f) +
                         " needed by tree " + std::to_string(tree_id));
    }
    cur = row[f] < node.split->threshold ? node.children->first
                                         : node.children->second;
  }
  return cur;
}

void Tree::validate() const {
  for (const TreeNode& node : nodes) {
    if (node.split.has_value() != node.children.has_value()) {
      throw InvalidArgumentError("node " + std::to_string(node.node_id) +
                                 ": split and children must come together");
    }
    if (!node.children) continue;
    const auto& l = nodes[static_cast<std::size_t>(node.children->first)];
    const auto& r = nodes[static_cast<std::size_t>(node.children->second)];
    std::vector<int> merged;
    std::merge(l.instance_space.begin(), l.instance_space.end(),
               r.instance_space.begin(), r.instance_space.end(),
               std::back_inserter(merged));
    if (merged != node.instance_space) {
      throw InvalidArgumentError("node " + std::to_string(node.node_id) +
                                 ": children do not partition the parent");
    }
  }
}

SplitStatistics SplitStatistics::from_children(std::vector<long> left_counts,
                                               std::vector<long> right_counts,
                                               double g_left, double g_right,
                                               double h_left, double h_right) {
  SplitStatistics s;
  s.class_counts.resize(std::max(left_counts.size(), right_counts.size()), 0);
  left_counts.resize(s.class_counts.size(), 0);
  right_counts.resize(s.class_counts.size(), 0);
  for (std::size_t c = 0; c < s.class_counts.size(); ++c) {
    s.class_counts[c] = left_counts[c] + right_counts[c];
    s.n_left += left_counts[c];
    s.n_right += right_counts[c];
  }
  s.n = s.n_left + s.n_right;
  s.left_class_counts = std::move(left_counts);
  s.right_class_counts = std::move(right_counts);
  s.g_left = g_left;
  s.g_right = g_right;
  s.g = g_left + g_right;
  s.h_left = h_left;
  s.h_right = h_right;
  s.h = h_left + h_right;
  return s;
}

namespace {

double sum_sq_ratio(const std::vector<long>& counts, long total) {
  double acc = 0.0;
  const auto t = static_cast<double>(total);
  for (long c : counts) {
    const double p = static_cast<double>(c) / t;
    acc += p * p;
  }
  return acc;
}

}  // namespace

double gini_gain(const SplitStatistics& s) {
  if (s.n_left < 1 || s.n_right < 1) {
    throw InvalidSplitError("gini_gain: both children must be nonempty");
  }
  const auto n = static_cast<double>(s.n);
  return static_cast<double>(s.n_left) / n *
             sum_sq_ratio(s.left_class_counts, s.n_left) +
         static_cast<double>(s.n_right) / n *
             sum_sq_ratio(s.right_class_counts, s.n_right) -
         sum_sq_ratio(s.class_counts, s.n);
}

double xgb_gain(const SplitStatistics& s, const BoosterParams& p) {
  const double dl = s.h_left + p.lambda_reg;
  const double dr = s.h_right + p.lambda_reg;
  const double dp = s.h + p.lambda_reg;
  if (!(dl > 0.0) || !(dr > 0.0) || !(dp > 0.0)) {
    throw InvalidSplitError("xgb_gain: zero hessian denominator");
  }
  return 0.5 * (s.g_left * s.g_left / dl + s.g_right * s.g_right / dr -
                s.g * s.g / dp) -
         p.gamma_reg;
}

int margin_columns(int class_count) { return class_count == 2 ? 1 : class_count; }

namespace {

// Softmax over `margins`, or sigmoid for the single binary column. Returns
// per-class probabilities of length class_count.
std::vector<double> margin_probabilities(std::span<const double> margins,
                                         int class_count) {
  std::vector<double> p(static_cast<std::size_t>(class_count));
  if (class_count == 2) {
    const double m = margins[0];
    const double p1 = m >= 0 ? 1.0 / (1.0 + std::exp(-m))
                             : std::exp(m) / (1.0 + std::exp(m));
    p[0] = 1.0 - p1;
    p[1] = p1;
    return p;
  }
  const double mx = *std::max_element(margins.begin(), margins.end());
  double z = 0.0;
  for (std::size_t c = 0; c < p.size(); ++c) {
    p[c] = std::exp(margins[c] - mx);
    z += p[c];
  }
  for (auto& v : p) v /= z;
  return p;
}

}  // namespace

GradHess grad_hess(std::span<const int> labels, const Matrix& margins,
                   int class_count) {
  const auto k = static_cast<std::size_t>(margin_columns(class_count));
  if (margins.rows() != labels.size() || margins.cols() != k) {
    throw InvalidArgumentError("grad_hess: margins shape mismatch");
  }
  GradHess out{Matrix(labels.size(), k), Matrix(labels.size(), k)};
  for (std::size_t i = 0; i < labels.size(); ++i) {
    auto p = margin_probabilities(margins.row(i), class_count);
    if (class_count == 2) {
      const double y = labels[i] == 1 ? 1.0 : 0.0;
      out.grad(i, 0) = p[1] - y;
      out.hess(i, 0) = p[1] * (1.0 - p[1]);
    } else {
      for (std::size_t c = 0; c < k; ++c) {
        const double y = labels[i] == static_cast<int>(c) ? 1.0 : 0.0;
        out.grad(i, c) = p[c] - y;
        out.hess(i, c) = p[c] * (1.0 - p[c]);
      }
    }
  }
  return out;
}

double cross_entropy(int label, std::span<const double> margins,
                     int class_count) {
  auto p = margin_probabilities(margins, class_count);
  return -std::log(p[static_cast<std::size_t>(label)]);
}

std::vector<double> leaf_weight(const SplitStatistics& node,
                                const BoosterParams& p, ModelKind kind) {
  if (kind == ModelKind::kRandomForest) {
    if (node.n < 1) throw InvalidArgumentError("leaf_weight: empty node");
    std::vector<double> dist(node.class_counts.size());
    for (std::size_t c = 0; c < dist.size(); ++c) {
      dist[c] = static_cast<double>(node.class_counts[c]) /
                static_cast<double>(node.n);
    }
    return dist;
  }
  const double denom = node.h + p.lambda_reg;
  if (!(denom > 0.0)) {
    throw InvalidSplitError("leaf_weight: zero hessian denominator");
  }
  return {node.g == 0.0 ? 0.0 : -node.g / denom};
}

std::vector<double> predict(const TreeModel& model,
                            std::span<const double> row) {
  const auto k = static_cast<std::size_t>(model.class_count);
  if (model.kind == ModelKind::kRandomForest) {
    std::vector<double> acc(k, 0.0);
    if (model.trees.empty()) {
      std::fill(acc.begin(), acc.end(), 1.0 / static_cast<double>(k));
      return acc;
    }
    for (const Tree& t : model.trees) {
      const auto& leaf = t.nodes[static_cast<std::size_t>(t.route(row))];
      for (std::size_t c = 0; c < k; ++c) acc[c] += leaf.leaf_weight[c];
    }
    for (auto& v : acc) v /= static_cast<double>(model.trees.size());
    return acc;
  }
  std::vector<double> margins(
      static_cast<std::size_t>(margin_columns(model.class_count)), 0.0);
  for (const Tree& t : model.trees) {
    const auto& leaf = t.nodes[static_cast<std::size_t>(t.route(row))];
    const std::size_t col =
        model.class_count == 2 ? 0 : static_cast<std::size_t>(t.target_class);
    margins[col] += model.booster.learning_rate * leaf.leaf_weight[0];
  }
  return margin_probabilities(margins, model.class_count);
}

Matrix predict_matrix(const TreeModel& model, const Matrix& rows) {
  Matrix out(rows.rows(), static_cast<std::size_t>(model.class_count));
  for (std::size_t r = 0; r < rows.rows(); ++r) {
    auto p = predict(model, rows.row(r));
    std::copy(p.begin(), p.end(), out.row(r).begin());
  }
  return out;
}

int majority_class(std::span<const int> space, std::span<const int> labels,
                   int class_count) {
  std::vector<long> counts(static_cast<std::size_t>(class_count), 0);
  for (int i : space) ++counts[static_cast<std::size_t>(labels[static_cast<std::size_t>(i)])];
  return static_cast<int>(std::distance(
      counts.begin(), std::max_element(counts.begin(), counts.end())));
}

}  // namespace treeleak
