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
#include <numeric>
#include <random>

#include <gtest/gtest.h>

#include "treeleak/common.h"
#include "treeleak/tree.h"

namespace treeleak {
namespace {

// Gini gain straight from label lists, independent of SplitStatistics.
double gini_oracle(const std::vector<int>& left, const std::vector<int>& right, int k) {
  auto sq = [&](const std::vector<int>& ys) {
    double s = 0.0;
    for (int c = 0; c < k; ++c) {
      const double p = static_cast<double>(std::count(ys.begin(), ys.end(), c)) /
                       static_cast<double>(ys.size());
      s += p * p;
    }
    return s;
  };
  std::vector<int> all = left;
  all.insert(all.end(), right.begin(), right.end());
  const double n = static_cast<double>(all.size());
  return left.size() / n * sq(left) + right.size() / n * sq(right) - sq(all);
}

SplitStatistics counts_of(const std::vector<int>& left, const std::vector<int>& right, int k) {
  std::vector<long> l(static_cast<std::size_t>(k)), r(static_cast<std::size_t>(k));
  for (int y : left) ++l[static_cast<std::size_t>(y)];
  for (int y : right) ++r[static_cast<std::size_t>(y)];
  return SplitStatistics::from_children(l, r);
}

TEST(Gini, Examples) {
  EXPECT_DOUBLE_EQ(gini_gain(counts_of({0, 0}, {1, 1}, 2)), 0.5);
  EXPECT_DOUBLE_EQ(gini_gain(counts_of({0}, {0}, 2)), 0.0);
  EXPECT_THROW(gini_gain(counts_of({0, 1}, {}, 2)), InvalidSplitError);
}

// Random count tables: matches the direct formula, is nonnegative and
// symmetric under swapping the children.
TEST(Gini, PropertyOracleNonnegativeSymmetric) {
  std::mt19937_64 rng(1);
  for (int trial = 0; trial < 500; ++trial) {
    const int k = 2 + static_cast<int>(rng() % 4);
    std::vector<int> left(1 + rng() % 20), right(1 + rng() % 20);
    for (auto& y : left) y = static_cast<int>(rng() % static_cast<unsigned>(k));
    for (auto& y : right) y = static_cast<int>(rng() % static_cast<unsigned>(k));
    const double g = gini_gain(counts_of(left, right, k));
    EXPECT_NEAR(g, gini_oracle(left, right, k), 1e-12);
    EXPECT_GE(g, -1e-12);
    EXPECT_NEAR(g, gini_gain(counts_of(right, left, k)), 1e-12);
  }
}

SplitStatistics grads(double gl, double gr, double hl, double hr) {
  return SplitStatistics::from_children({}, {}, gl, gr, hl, hr);
}

TEST(XgbGain, Examples) {
  BoosterParams p;
  p.lambda_reg = 1.0;
  p.gamma_reg = 0.5;
  EXPECT_DOUBLE_EQ(xgb_gain(grads(0, 0, 0, 0), p), -0.5);
  p.gamma_reg = 0.0;
  EXPECT_DOUBLE_EQ(xgb_gain(grads(-2, 2, 1, 1), p), 2.0);
  p.lambda_reg = 0.0;
  EXPECT_THROW(xgb_gain(grads(1, 1, 0, 0), p), InvalidSplitError);
}

TEST(XgbGain, IdenticalHalvesGainOnlyMinusGamma) {
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> u(-3.0, 3.0);
  BoosterParams p;
  p.lambda_reg = 0.0;
  p.gamma_reg = 0.25;
  for (int i = 0; i < 100; ++i) {
    const double g = u(rng), h = 0.1 + std::abs(u(rng));
    EXPECT_NEAR(xgb_gain(grads(g / 2, g / 2, h / 2, h / 2), p), -0.25, 1e-9);
    const double gl = u(rng), gr = u(rng), hl = 0.1 + std::abs(u(rng)), hr = 0.2;
    p.lambda_reg = 1.0;
    EXPECT_NEAR(xgb_gain(grads(gl, gr, hl, hr), p), xgb_gain(grads(gr, gl, hr, hl), p), 1e-12);
    p.lambda_reg = 0.0;
  }
}

// Loss written out independently: sigmoid for one binary column, softmax
// otherwise.
double loss(int y, const std::vector<double>& m, int k) {
  if (k == 2) {
    const double p1 = 1.0 / (1.0 + std::exp(-m[0]));
    return -std::log(y == 1 ? p1 : 1.0 - p1);
  }
  double z = 0.0;
  for (double v : m) z += std::exp(v);
  return -(m[static_cast<std::size_t>(y)] - std::log(z));
}

TEST(GradHess, SymmetricStart) {
  const std::vector<int> y{1};
  const GradHess gh = grad_hess(y, Matrix(1, 1), 2);
  EXPECT_DOUBLE_EQ(gh.grad(0, 0), -0.5);
  EXPECT_DOUBLE_EQ(gh.hess(0, 0), 0.25);
}

TEST(GradHess, SaturationOnTrueClass) {
  const std::vector<int> y{1};
  Matrix m(1, 1, 50.0);
  const GradHess gh = grad_hess(y, m, 2);
  EXPECT_NEAR(gh.grad(0, 0), 0.0, 1e-12);
  EXPECT_NEAR(gh.hess(0, 0), 0.0, 1e-12);
}

TEST(GradHess, MatchesFiniteDifferences) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  const double h = 1e-4;
  for (int trial = 0; trial < 100; ++trial) {
    const int k = trial % 2 == 0 ? 2 : 3 + trial % 4;
    const int cols = margin_columns(k);
    const int y = static_cast<int>(rng() % static_cast<unsigned>(k));
    Matrix m(1, static_cast<std::size_t>(cols));
    for (auto& v : m.data()) v = u(rng);
    const std::vector<int> labels{y};
    const GradHess gh = grad_hess(labels, m, k);
    for (int c = 0; c < cols; ++c) {
      std::vector<double> base = m.data(), plus = base, minus = base;
      plus[static_cast<std::size_t>(c)] += h;
      minus[static_cast<std::size_t>(c)] -= h;
      const double f0 = loss(y, base, k), fp = loss(y, plus, k), fm = loss(y, minus, k);
      const double g = (fp - fm) / (2 * h);
      const double hh = (fp - 2 * f0 + fm) / (h * h);
      EXPECT_NEAR(gh.grad(0, static_cast<std::size_t>(c)), g, 1e-5 * std::max(1.0, std::abs(g)));
      EXPECT_NEAR(gh.hess(0, static_cast<std::size_t>(c)), hh, 1e-5 * std::max(1.0, std::abs(hh)) + 1e-5);
      EXPECT_NEAR(cross_entropy(y, base, k), f0, 1e-12);
    }
  }
}

TEST(LeafWeight, Examples) {
  BoosterParams p;
  p.lambda_reg = 1.0;
  const auto rf = leaf_weight(SplitStatistics::from_children({2, 1}, {0, 0}), p,
                              ModelKind::kRandomForest);
  EXPECT_NEAR(rf[0], 2.0 / 3.0, 1e-15);
  EXPECT_NEAR(rf[1], 1.0 / 3.0, 1e-15);
  EXPECT_DOUBLE_EQ(leaf_weight(grads(1, 0, 1, 0), p, ModelKind::kXGBoost)[0], -0.5);
  EXPECT_EQ(leaf_weight(grads(0, 0, 1, 0), p, ModelKind::kXGBoost)[0], 0.0);
}

Tree stump(int feature, double threshold, std::vector<double> left, std::vector<double> right) {
  Tree t;
  TreeNode root;
  root.instance_space = {0, 1};
  root.split = SplitRule{1, feature, threshold};
  root.children = std::make_pair(1, 2);
  TreeNode l;
  l.node_id = 1;
  l.depth = 1;
  l.instance_space = {0};
  l.leaf_weight = std::move(left);
  TreeNode r = l;
  r.node_id = 2;
  r.instance_space = {1};
  r.leaf_weight = std::move(right);
  t.nodes = {root, l, r};
  return t;
}

TEST(Predict, ForestAveragesAndSumsToOne) {
  TreeModel m;
  m.class_count = 2;
  m.trees.push_back(stump(0, 0.5, {0.9, 0.1}, {0.2, 0.8}));
  const std::vector<double> low{0.0}, high{1.0};
  EXPECT_EQ(predict(m, low), (std::vector<double>{0.9, 0.1}));
  m.trees.push_back(stump(0, 2.0, {0.4, 0.6}, {1.0, 0.0}));
  const auto p = predict(m, high);
  EXPECT_NEAR(p[0], 0.3, 1e-15);
  EXPECT_NEAR(p[0] + p[1], 1.0, 1e-12);
}

TEST(Predict, EmptyBoosterIsUniformAndRoutingChecksFeatures) {
  TreeModel m;
  m.kind = ModelKind::kXGBoost;
  m.class_count = 2;
  const std::vector<double> row{0.0};
  EXPECT_EQ(predict(m, row), (std::vector<double>{0.5, 0.5}));
  m.trees.push_back(stump(3, 0.5, {1.0}, {-1.0}));
  EXPECT_THROW(predict(m, row), RoutingError);
}

TEST(TreeValidate, ChildrenMustPartitionParent) {
  Tree t = stump(0, 0.5, {1, 0}, {0, 1});
  EXPECT_NO_THROW(t.validate());
  EXPECT_EQ(t.leaf_count(), 2u);
  t.nodes[2].instance_space = {0};
  EXPECT_THROW(t.validate(), Error);
}

TEST(MajorityClass, TiesGoToLowestId) {
  const std::vector<int> labels{1, 0, 2, 1, 0};
  const std::vector<int> space{0, 1, 2, 3, 4};
  EXPECT_EQ(majority_class(space, labels, 3), 0);
  const std::vector<int> some{0, 3};
  EXPECT_EQ(majority_class(some, labels, 3), 1);
}

}  // namespace
}  // namespace treeleak
