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

#include "treeleak/ldp.h"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>

#include "treeleak/vfl.h"

namespace treeleak {

double rr_keep_probability(double epsilon, int class_count) {
  if (!(epsilon > 0.0)) throw InvalidArgumentError("epsilon must be > 0");
  if (class_count < 1) throw InvalidArgumentError("class_count must be >= 1");
  if (std::isinf(epsilon)) return 1.0;
  const double e = std::exp(epsilon);
  return e / (e + static_cast<double>(class_count - 1));
}

NoisyLabels randomized_response(std::span<const int> labels, double epsilon,
                                int class_count, std::uint64_t seed) {
  const double keep = rr_keep_probability(epsilon, class_count);
  NoisyLabels out;
  out.original.assign(labels.begin(), labels.end());
  out.noised.resize(labels.size());
  out.stage.assign(labels.size(), 1);
  out.epsilon = epsilon;
  out.mechanism = "rr";
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (std::size_t i = 0; i < labels.size(); ++i) {
    const int y = labels[i];
    if (y < 0 || y >= class_count) throw LabelCodingError("label out of range");
    if (class_count == 1 || u(rng) < keep) {
      out.noised[i] = y;
      continue;
    }
    std::uniform_int_distribution<int> other(0, class_count - 2);
    int r = other(rng);
    if (r >= y) ++r;
    out.noised[i] = r;
  }
  return out;
}

namespace {

void check_prior(std::span<const double> prior) {
  if (prior.empty()) throw InvalidArgumentError("prior is empty");
  double s = 0.0;
  for (double p : prior) {
    if (!(p >= 0.0) || !std::isfinite(p)) {
      throw InvalidArgumentError("prior has a negative or non-finite entry");
    }
    s += p;
  }
  if (std::abs(s - 1.0) > 1e-6) throw InvalidArgumentError("prior must sum to 1");
}

std::vector<int> rank_by_prior(std::span<const double> prior) {
  std::vector<int> order(prior.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    return prior[static_cast<std::size_t>(a)] > prior[static_cast<std::size_t>(b)];
  });
  return order;
}

}  // namespace

int rr_with_prior_k(std::span<const double> prior, double epsilon) {
  check_prior(prior);
  if (!(epsilon > 0.0)) throw InvalidArgumentError("epsilon must be > 0");
  const auto order = rank_by_prior(prior);
  const double e = std::isinf(epsilon) ? 0.0 : std::exp(epsilon);
  double mass = 0.0, best = -1.0;
  int best_k = 1;
  for (std::size_t k = 1; k <= order.size(); ++k) {
    mass += prior[static_cast<std::size_t>(order[k - 1])];
    const double keep =
        std::isinf(epsilon) ? 1.0 : e / (e + static_cast<double>(k - 1));
    const double v = keep * mass;
    if (v > best) {
      best = v;
      best_k = static_cast<int>(k);
    }
  }
  return best_k;
}

std::vector<double> rr_with_prior_distribution(int label,
                                               std::span<const double> prior,
                                               double epsilon) {
  const int k = rr_with_prior_k(prior, epsilon);
  const auto order = rank_by_prior(prior);
  std::vector<double> dist(prior.size(), 0.0);
  const bool inside =
      std::find(order.begin(), order.begin() + k, label) != order.begin() + k;
  if (!inside) {
    for (int j = 0; j < k; ++j) dist[static_cast<std::size_t>(order[j])] = 1.0 / k;
    return dist;
  }
  if (std::isinf(epsilon)) {
    dist[static_cast<std::size_t>(label)] = 1.0;
    return dist;
  }
  const double e = std::exp(epsilon);
  const double denom = e + static_cast<double>(k - 1);
  for (int j = 0; j < k; ++j) dist[static_cast<std::size_t>(order[j])] = 1.0 / denom;
  dist[static_cast<std::size_t>(label)] = e / denom;
  return dist;
}

int rr_with_prior(int label, std::span<const double> prior, double epsilon,
                  std::mt19937_64& rng) {
  const auto dist = rr_with_prior_distribution(label, prior, epsilon);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  double r = u(rng), acc = 0.0;
  int last = 0;
  for (std::size_t c = 0; c < dist.size(); ++c) {
    if (dist[c] <= 0.0) continue;
    last = static_cast<int>(c);
    acc += dist[c];
    if (r < acc) return last;
  }
  return last;
}

InterimTrainer active_forest_trainer(std::vector<int> active_features,
                                     std::uint64_t seed) {
  return [features = std::move(active_features), seed](const Dataset& stage1,
                                                       const Dataset& stage2) {
    const auto c = static_cast<std::size_t>(stage1.class_count);
    Matrix prior(stage2.rows(), c, 1.0 / static_cast<double>(c));
    if (features.empty() || stage1.rows() == 0) return prior;
    ProtocolConfig cfg;
    cfg.model = ModelKind::kRandomForest;
    cfg.seed = derive_seed(seed, "interim");
    VerticalView view{1, features, true};
    TrainResult r = train_federated(cfg, stage1, {view});
    return predict_matrix(r.model, stage2.features);
  };
}

NoisyLabels lp_mst(const Dataset& d, double epsilon, int stages,
                   const InterimTrainer& trainer, std::uint64_t seed) {
  if (stages != 1 && stages != 2) throw InvalidArgumentError("stages must be 1 or 2");
  if (stages == 1 || !trainer) {
    NoisyLabels out =
        randomized_response(d.labels, epsilon, d.class_count, derive_seed(seed, "rr"));
    out.mechanism = "lp_1st";
    return out;
  }
  const std::size_t n = d.rows();
  std::vector<int> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  std::mt19937_64 shuffler(derive_seed(seed, "stages"));
  std::shuffle(perm.begin(), perm.end(), shuffler);
  std::vector<int> s1(perm.begin(), perm.begin() + static_cast<std::ptrdiff_t>(n / 2));
  std::vector<int> s2(perm.begin() + static_cast<std::ptrdiff_t>(n / 2), perm.end());
  std::sort(s1.begin(), s1.end());
  std::sort(s2.begin(), s2.end());

  NoisyLabels out;
  out.original = d.labels;
  out.noised.assign(n, 0);
  out.stage.assign(n, 0);
  out.epsilon = epsilon;
  out.mechanism = "lp_2st";

  Dataset stage1 = d.subset(s1);
  NoisyLabels rr = randomized_response(stage1.labels, epsilon, d.class_count,
                                       derive_seed(seed, "rr"));
  stage1.labels = rr.noised;
  std::vector<char> seen(static_cast<std::size_t>(d.class_count), 0);
  for (int y : stage1.labels) seen[static_cast<std::size_t>(y)] = 1;
  for (int c = 0; c < d.class_count; ++c) {
    if (!seen[static_cast<std::size_t>(c)]) {
      out.warnings.push_back("stage 1 has no rows of class " + std::to_string(c));
    }
  }
  for (std::size_t j = 0; j < s1.size(); ++j) {
    out.noised[static_cast<std::size_t>(s1[j])] = stage1.labels[j];
    out.stage[static_cast<std::size_t>(s1[j])] = 1;
  }

  const Dataset stage2 = d.subset(s2);
  const Matrix prior = trainer(stage1, stage2);
  if (prior.rows() != stage2.rows() ||
      prior.cols() != static_cast<std::size_t>(d.class_count)) {
    throw InvalidArgumentError("interim model returned a prior of the wrong shape");
  }
  std::mt19937_64 rng(derive_seed(seed, "rr_prior"));
  for (std::size_t j = 0; j < s2.size(); ++j) {
    std::vector<double> p(prior.row(j).begin(), prior.row(j).end());
    const double sum = std::accumulate(p.begin(), p.end(), 0.0);
    if (sum > 0.0) {
      for (double& v : p) v /= sum;
    }
    const auto row = static_cast<std::size_t>(s2[j]);
    out.noised[row] = rr_with_prior(d.labels[row], p, epsilon, rng);
    out.stage[row] = 2;
  }
  return out;
}

std::size_t GraftReport::resplit_count() const {
  std::size_t n = 0;
  for (const auto& t : trees) n += t.resplit.size();
  return n;
}

bool check_contaminated(std::span<const int> space, std::span<const int> clean,
                        std::span<const int> noisy, int class_count) {
  return majority_class(space, noisy, class_count) !=
         majority_class(space, clean, class_count);
}

namespace {

std::size_t subtree_size(const Tree& t, int idx) {
  const TreeNode& n = t.nodes[static_cast<std::size_t>(idx)];
  if (n.is_leaf()) return 1;
  return 1 + subtree_size(t, n.children->first) + subtree_size(t, n.children->second);
}

// Preorder copy of the reachable nodes with dense ids.
Tree compact(const Tree& t) {
  Tree out;
  out.tree_id = t.tree_id;
  out.target_class = t.target_class;
  std::function<int(int)> copy = [&](int idx) {
    const int id = static_cast<int>(out.nodes.size());
    TreeNode n = t.nodes[static_cast<std::size_t>(idx)];
    n.node_id = id;
    out.nodes.push_back(n);
    if (!n.is_leaf()) {
      const int l = copy(n.children->first);
      const int r = copy(n.children->second);
      out.nodes[static_cast<std::size_t>(id)].children = std::make_pair(l, r);
    }
    return id;
  };
  copy(0);
  return out;
}

}  // namespace

GraftResult grafting(const TreeModel& model, const Dataset& train,
                     std::span<const int> clean_labels,
                     std::span<const int> noisy_labels,
                     const VerticalView& active_view, const GraftOptions& options) {
  if (model.kind != ModelKind::kRandomForest) {
    throw UnsupportedModelError("grafting applies to random forests only");
  }
  if (clean_labels.size() != train.rows() || noisy_labels.size() != train.rows()) {
    throw InvalidArgumentError("grafting: label vectors must match the training rows");
  }
  GraftResult res;
  res.original = model;
  res.repaired = model;

  ProtocolConfig cfg;
  cfg.model = ModelKind::kRandomForest;
  cfg.max_depth = model.max_depth;
  cfg.percentile_count = options.percentile_count;
  cfg.min_samples_split = options.min_samples_split;
  std::vector<Party> parties{Party::from_view(train, active_view)};
  parties.front().party_id = 1;
  const std::vector<int> clean(clean_labels.begin(), clean_labels.end());
  FederatedSession session(cfg, std::move(parties), clean, clean, model.class_count);

  for (Tree& tree : res.repaired.trees) {
    GraftReport::TreeReport rep;
    rep.tree_id = tree.tree_id;
    // Postorder; returns IsContam of the visited node.
    std::function<bool(int)> visit = [&](int idx) -> bool {
      const auto u = static_cast<std::size_t>(idx);
      if (tree.nodes[u].is_leaf()) {
        const bool c = check_contaminated(tree.nodes[u].instance_space, clean_labels,
                                          noisy_labels, model.class_count);
        if (c) rep.contaminated.push_back(idx);
        return c;
      }
      const auto [l, r] = *tree.nodes[u].children;
      const bool cl = visit(l);
      const bool cr = visit(r);
      if (!cl && !cr) return false;
      if (check_contaminated(tree.nodes[u].instance_space, clean_labels, noisy_labels,
                             model.class_count)) {
        rep.contaminated.push_back(idx);
        return true;
      }
      rep.resplit.push_back(idx);
      rep.erased.push_back(static_cast<int>(subtree_size(tree, idx) - 1));
      tree.nodes[u].children.reset();
      tree.nodes[u].split.reset();
      session.regrow_private(tree, idx);
      return false;
    };
    visit(0);
    // Report ids refer to the pre-repair tree.
    tree = compact(tree);
    res.report.trees.push_back(std::move(rep));
  }
  return res;
}

double accuracy(const TreeModel& model, const Matrix& x, std::span<const int> labels) {
  if (x.rows() != labels.size()) throw InvalidArgumentError("accuracy: size mismatch");
  if (labels.empty()) return 0.0;
  const Matrix p = predict_matrix(model, x);
  std::size_t hit = 0;
  for (std::size_t i = 0; i < x.rows(); ++i) {
    auto row = p.row(i);
    const auto arg = std::distance(row.begin(), std::max_element(row.begin(), row.end()));
    if (arg == labels[i]) ++hit;
  }
  return static_cast<double>(hit) / static_cast<double>(labels.size());
}

}  // namespace treeleak
