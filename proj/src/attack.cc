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

#include "treeleak/attack.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <random>
#include <set>
#include <unordered_map>

#include "treeleak/dataset.h"

namespace treeleak {

// ---------------------------------------------------------------------------
// Attacker view

namespace {

bool proper_subset(const std::vector<int>& small, const std::vector<int>& big) {
  if (small.size() >= big.size()) return false;
  if (!std::binary_search(big.begin(), big.end(), small.front())) return false;
  return std::includes(big.begin(), big.end(), small.begin(), small.end());
}

AttackerView::TreeSpaces index_tree(int tree_id,
                                    const std::vector<std::vector<int>>& raw) {
  AttackerView::TreeSpaces t;
  t.tree_id = tree_id;
  std::set<std::vector<int>> seen;
  for (const auto& s : raw) {
    if (s.empty()) continue;
    std::vector<int> sorted = s;
    std::sort(sorted.begin(), sorted.end());
    if (seen.insert(sorted).second) t.spaces.push_back(std::move(sorted));
  }
  const std::size_t k = t.spaces.size();
  t.parent.assign(k, -1);
  std::vector<char> has_child(k, 0);
  for (std::size_t i = 0; i < k; ++i) {
    for (std::size_t j = 0; j < k; ++j) {
      if (i == j || !proper_subset(t.spaces[i], t.spaces[j])) continue;
      has_child[j] = 1;
      const int p = t.parent[i];
      if (p < 0 || t.spaces[j].size() < t.spaces[static_cast<std::size_t>(p)].size()) {
        t.parent[i] = static_cast<int>(j);
      }
    }
  }
  for (std::size_t i = 0; i < k; ++i) {
    if (!has_child[i]) t.leaves.push_back(static_cast<int>(i));
  }
  return t;
}

// Splits are binary, so a known child and its smallest known superset (its
// parent, since broadcasts are closed under ancestors) reveal the sibling.
std::vector<std::vector<int>> with_siblings(std::vector<std::vector<int>> spaces) {
  for (auto& s : spaces) std::sort(s.begin(), s.end());
  std::sort(spaces.begin(), spaces.end());
  spaces.erase(std::unique(spaces.begin(), spaces.end()), spaces.end());
  std::erase_if(spaces, [](const std::vector<int>& s) { return s.empty(); });
  std::set<std::vector<int>> known(spaces.begin(), spaces.end());
  const std::size_t k = spaces.size();
  std::vector<std::vector<int>> out = spaces;
  for (std::size_t i = 0; i < k; ++i) {
    int parent = -1;
    for (std::size_t j = 0; j < k; ++j) {
      if (i == j || !proper_subset(spaces[i], spaces[j])) continue;
      if (parent < 0 || spaces[j].size() < spaces[static_cast<std::size_t>(parent)].size()) {
        parent = static_cast<int>(j);
      }
    }
    if (parent < 0) continue;
    std::vector<int> sibling;
    const auto& p = spaces[static_cast<std::size_t>(parent)];
    std::set_difference(p.begin(), p.end(), spaces[i].begin(), spaces[i].end(),
                        std::back_inserter(sibling));
    if (known.insert(sibling).second) out.push_back(std::move(sibling));
  }
  return out;
}

}  // namespace

AttackerView AttackerView::from_spaces(
    int sample_count, const std::vector<std::vector<std::vector<int>>>& trees) {
  AttackerView v;
  v.sample_count = sample_count;
  for (std::size_t t = 0; t < trees.size(); ++t) {
    for (const auto& s : trees[t]) {
      for (int id : s) {
        if (id < 0 || id >= sample_count) {
          throw MalformedInputError("attacker view: id " + std::to_string(id) +
                                    " outside [0, " + std::to_string(sample_count) + ")");
        }
      }
    }
    v.trees.push_back(index_tree(static_cast<int>(t), trees[t]));
  }
  return v;
}

AttackerView AttackerView::from_transcript(const PartyTranscript& t) {
  const auto order = t.tree_order();
  std::map<int, std::size_t> slot;
  for (std::size_t i = 0; i < order.size(); ++i) slot[order[i]] = i;
  std::vector<std::vector<std::vector<int>>> grouped(order.size());
  for (const auto& s : t.visible_spaces()) {
    grouped[slot.at(s.tree_id)].push_back(*s.ids);
  }
  for (auto& g : grouped) g = with_siblings(std::move(g));
  AttackerView v = from_spaces(t.sample_count, grouped);
  for (std::size_t i = 0; i < order.size(); ++i) v.trees[i].tree_id = order[i];
  return v;
}

AttackerView AttackerView::from_model(const TreeModel& m, int sample_count) {
  std::vector<std::vector<std::vector<int>>> grouped;
  for (const Tree& tree : m.trees) {
    std::vector<std::vector<int>> spaces;
    for (const TreeNode& n : tree.nodes) spaces.push_back(n.instance_space);
    grouped.push_back(std::move(spaces));
  }
  AttackerView v = from_spaces(sample_count, grouped);
  for (std::size_t i = 0; i < m.trees.size(); ++i) v.trees[i].tree_id = m.trees[i].tree_id;
  return v;
}

std::size_t AttackerView::leaf_count() const {
  std::size_t n = 0;
  for (const auto& t : trees) n += t.leaves.size();
  return n;
}

// ---------------------------------------------------------------------------
// Adjacency

double AdjacencyGraph::weight(int u, int v) const {
  if (u == v) return 0.0;
  if (u > v) std::swap(u, v);
  auto it = std::lower_bound(edges.begin(), edges.end(), std::make_tuple(u, v, -1.0));
  if (it != edges.end() && std::get<0>(*it) == u && std::get<1>(*it) == v) {
    return std::get<2>(*it);
  }
  return 0.0;
}

double AdjacencyGraph::total_weight() const {
  double s = 0.0;
  for (const auto& e : edges) s += 2.0 * std::get<2>(e);
  return s;
}

namespace {

class EdgeAccumulator {
 public:
  explicit EdgeAccumulator(int n) : n_(static_cast<std::uint64_t>(n)) {}

  void add(int u, int v, double w) {
    if (u == v) return;
    if (u > v) std::swap(u, v);
    acc_[static_cast<std::uint64_t>(u) * n_ + static_cast<std::uint64_t>(v)] += w;
  }

  void add_clique(const std::vector<int>& ids, std::size_t begin, std::size_t end,
                  double w) {
    for (std::size_t a = begin; a < end; ++a) {
      for (std::size_t b = a + 1; b < end; ++b) add(ids[a], ids[b], w);
    }
  }

  AdjacencyGraph finish() const {
    AdjacencyGraph g;
    g.n = static_cast<int>(n_);
    g.edges.reserve(acc_.size());
    for (const auto& [key, w] : acc_) {
      if (w <= 0.0) continue;
      g.edges.emplace_back(static_cast<int>(key / n_), static_cast<int>(key % n_), w);
    }
    std::sort(g.edges.begin(), g.edges.end());
    return g;
  }

 private:
  std::uint64_t n_;
  std::unordered_map<std::uint64_t, double> acc_;
};

void check_eta(double eta) {
  if (!(eta > 0.0 && eta <= 1.0)) throw InvalidArgumentError("eta must be in (0, 1]");
}

}  // namespace

AdjacencyGraph build_adjacency(const AttackerView& view, double eta) {
  check_eta(eta);
  EdgeAccumulator acc(view.sample_count);
  double w = 1.0;
  for (const auto& tree : view.trees) {
    for (int leaf : tree.leaves) {
      const auto& ids = tree.spaces[static_cast<std::size_t>(leaf)];
      acc.add_clique(ids, 0, ids.size(), w);
    }
    w *= eta;
  }
  return acc.finish();
}

AdjacencyGraph build_adjacency_chunked(const AttackerView& view, double eta,
                                       int chunk, double inter_weight) {
  check_eta(eta);
  if (chunk < 2) throw InvalidArgumentError("chunk size must be >= 2");
  if (!(inter_weight > 0.0)) throw InvalidArgumentError("inter-chunk weight must be > 0");
  EdgeAccumulator acc(view.sample_count);
  const auto b = static_cast<std::size_t>(chunk);
  double w = 1.0;
  for (const auto& tree : view.trees) {
    for (int leaf : tree.leaves) {
      const auto& ids = tree.spaces[static_cast<std::size_t>(leaf)];
      if (ids.size() < b) {
        acc.add_clique(ids, 0, ids.size(), w);
        continue;
      }
      for (std::size_t s = 0; s < ids.size(); s += b) {
        if (s != 0) acc.add(ids[s - 1], ids[s], inter_weight);
        acc.add_clique(ids, s, std::min(s + b, ids.size()), w);
      }
    }
    w *= eta;
  }
  return acc.finish();
}

// ---------------------------------------------------------------------------
// Louvain

int CommunityAssignment::community_count() const {
  int m = -1;
  for (int c : community) m = std::max(m, c);
  return m + 1;
}

double modularity(const AdjacencyGraph& g, std::span<const int> community) {
  if (community.size() != static_cast<std::size_t>(g.n)) {
    throw InvalidArgumentError("modularity: assignment size mismatch");
  }
  const double m2 = g.total_weight();
  if (m2 == 0.0) return 0.0;
  std::vector<double> k(static_cast<std::size_t>(g.n), 0.0);
  std::map<int, double> in, tot;
  for (const auto& [u, v, w] : g.edges) {
    k[static_cast<std::size_t>(u)] += w;
    k[static_cast<std::size_t>(v)] += w;
    if (community[static_cast<std::size_t>(u)] == community[static_cast<std::size_t>(v)]) {
      in[community[static_cast<std::size_t>(u)]] += 2.0 * w;
    }
  }
  for (int i = 0; i < g.n; ++i) {
    tot[community[static_cast<std::size_t>(i)]] += k[static_cast<std::size_t>(i)];
  }
  double q = 0.0;
  for (const auto& [c, t] : tot) {
    q += in[c] / m2 - (t / m2) * (t / m2);
  }
  return q;
}

namespace {

// Weighted graph with ordered-pair semantics: adj[i] lists (j, A_ij) for
// j != i, and self_loop[i] = A_ii.
struct LevelGraph {
  std::vector<std::vector<std::pair<int, double>>> adj;
  std::vector<double> self_loop;
  std::vector<double> degree;
  std::size_t size() const { return adj.size(); }
};

LevelGraph level_from(const AdjacencyGraph& g) {
  LevelGraph l;
  const auto n = static_cast<std::size_t>(g.n);
  l.adj.resize(n);
  l.self_loop.assign(n, 0.0);
  l.degree.assign(n, 0.0);
  for (const auto& [u, v, w] : g.edges) {
    l.adj[static_cast<std::size_t>(u)].emplace_back(v, w);
    l.adj[static_cast<std::size_t>(v)].emplace_back(u, w);
    l.degree[static_cast<std::size_t>(u)] += w;
    l.degree[static_cast<std::size_t>(v)] += w;
  }
  for (auto& a : l.adj) std::sort(a.begin(), a.end());
  return l;
}

double level_modularity(const LevelGraph& g, const std::vector<int>& comm, double m2) {
  std::vector<double> in(g.size(), 0.0), tot(g.size(), 0.0);
  for (std::size_t i = 0; i < g.size(); ++i) {
    const auto c = static_cast<std::size_t>(comm[i]);
    tot[c] += g.degree[i];
    in[c] += g.self_loop[i];
    for (const auto& [j, w] : g.adj[i]) {
      if (comm[static_cast<std::size_t>(j)] == comm[i]) in[c] += w;
    }
  }
  double q = 0.0;
  for (std::size_t c = 0; c < g.size(); ++c) {
    if (tot[c] == 0.0 && in[c] == 0.0) continue;
    q += in[c] / m2 - (tot[c] / m2) * (tot[c] / m2);
  }
  return q;
}

// Repeated ascending-order sweeps; returns true if any vertex moved. Besides
// the neighbouring communities, a vertex may also leave for an empty one
// (gain 0), so a converged sweep is a single-vertex local optimum.
bool local_move(const LevelGraph& g, std::vector<int>& comm, double m2, double tol) {
  const std::size_t n = g.size();
  std::vector<double> tot(n, 0.0);
  std::vector<int> size(n, 0);
  for (std::size_t i = 0; i < n; ++i) {
    tot[static_cast<std::size_t>(comm[i])] += g.degree[i];
    ++size[static_cast<std::size_t>(comm[i])];
  }
  std::set<int> empty;
  for (std::size_t c = 0; c < n; ++c) {
    if (size[c] == 0) empty.insert(static_cast<int>(c));
  }
  std::vector<double> link(n, 0.0);
  std::vector<int> touched;
  bool any = false;
  double q = level_modularity(g, comm, m2);
  for (;;) {
    int moves = 0;
    for (std::size_t i = 0; i < n; ++i) {
      const int own = comm[i];
      const auto o = static_cast<std::size_t>(own);
      const double ki = g.degree[i];
      for (const auto& [j, w] : g.adj[i]) {
        if (static_cast<std::size_t>(j) == i) continue;
        const int c = comm[static_cast<std::size_t>(j)];
        if (link[static_cast<std::size_t>(c)] == 0.0) touched.push_back(c);
        link[static_cast<std::size_t>(c)] += w;
      }
      tot[o] -= ki;
      --size[o];
      if (size[o] == 0) empty.insert(own);
      int best = own;
      double best_gain = link[o] - tot[o] * ki / m2;
      auto consider = [&](int c, double gain) {
        if (gain > best_gain + 1e-15 * std::max(1.0, std::abs(best_gain))) {
          best_gain = gain;
          best = c;
        }
      };
      std::sort(touched.begin(), touched.end());
      for (int c : touched) {
        consider(c, link[static_cast<std::size_t>(c)] - tot[static_cast<std::size_t>(c)] * ki / m2);
      }
      if (!empty.empty()) consider(*empty.begin(), 0.0);
      const auto b = static_cast<std::size_t>(best);
      tot[b] += ki;
      if (size[b]++ == 0) empty.erase(best);
      if (best != own) {
        comm[i] = best;
        ++moves;
      }
      for (int c : touched) link[static_cast<std::size_t>(c)] = 0.0;
      touched.clear();
    }
    if (moves == 0) break;
    any = true;
    const double nq = level_modularity(g, comm, m2);
    const bool small = nq - q <= tol;
    q = nq;
    if (small) break;
  }
  return any;
}

// Dense renumbering in order of first appearance.
int renumber(std::vector<int>& comm) {
  std::unordered_map<int, int> map;
  for (int& c : comm) {
    auto [it, fresh] = map.try_emplace(c, static_cast<int>(map.size()));
    c = it->second;
  }
  return static_cast<int>(map.size());
}

LevelGraph aggregate(const LevelGraph& g, const std::vector<int>& comm, int count) {
  const auto k = static_cast<std::size_t>(count);
  std::vector<std::map<int, double>> acc(k);
  LevelGraph out;
  out.self_loop.assign(k, 0.0);
  out.degree.assign(k, 0.0);
  for (std::size_t i = 0; i < g.size(); ++i) {
    const auto c = static_cast<std::size_t>(comm[i]);
    out.self_loop[c] += g.self_loop[i];
    out.degree[c] += g.degree[i];
    for (const auto& [j, w] : g.adj[i]) {
      const int d = comm[static_cast<std::size_t>(j)];
      if (static_cast<std::size_t>(d) == c) {
        out.self_loop[c] += w;
      } else {
        acc[c][d] += w;
      }
    }
  }
  out.adj.resize(k);
  for (std::size_t c = 0; c < k; ++c) {
    out.adj[c].assign(acc[c].begin(), acc[c].end());
  }
  return out;
}

}  // namespace

CommunityAssignment louvain(const AdjacencyGraph& g, int max_iter, double tol) {
  CommunityAssignment out;
  const auto n = static_cast<std::size_t>(g.n);
  out.community.resize(n);
  std::iota(out.community.begin(), out.community.end(), 0);
  const double m2 = g.total_weight();
  if (m2 == 0.0) {
    out.modularity = 0.0;
    return out;
  }
  const LevelGraph base = level_from(g);
  LevelGraph level = base;
  double q = level_modularity(base, out.community, m2);
  for (int it = 0; it < max_iter; ++it) {
    std::vector<int> comm(level.size());
    std::iota(comm.begin(), comm.end(), 0);
    const bool moved = local_move(level, comm, m2, tol);
    const int count = renumber(comm);
    for (auto& c : out.community) c = comm[static_cast<std::size_t>(c)];
    const double nq = level_modularity(base, out.community, m2);
    out.phase_modularity.push_back(nq);
    const bool done = !moved || nq - q <= tol;
    q = nq;
    if (done) break;
    level = aggregate(level, comm, count);
  }
  // Final single-vertex pass on the original graph so that no one vertex
  // can still raise Q by switching community.
  if (local_move(base, out.community, m2, 0.0)) {
    renumber(out.community);
    out.phase_modularity.push_back(level_modularity(base, out.community, m2));
  }
  renumber(out.community);
  out.modularity = modularity(g, out.community);
  return out;
}

// ---------------------------------------------------------------------------
// K-means

namespace {

double sq_dist(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t j = 0; j < a.size(); ++j) {
    const double d = a[j] - b[j];
    s += d * d;
  }
  return s;
}

Matrix kmeanspp(const Matrix& x, int k, std::mt19937_64& rng) {
  const std::size_t n = x.rows();
  Matrix centers(static_cast<std::size_t>(k), x.cols());
  std::uniform_int_distribution<std::size_t> pick(0, n - 1);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  auto set_center = [&](std::size_t c, std::size_t row) {
    auto src = x.row(row);
    std::copy(src.begin(), src.end(), centers.row(c).begin());
  };
  set_center(0, pick(rng));
  std::vector<double> closest(n);
  for (std::size_t i = 0; i < n; ++i) closest[i] = sq_dist(x.row(i), centers.row(0));
  const int trials = 2 + static_cast<int>(std::log(static_cast<double>(k)));
  std::vector<double> cum(n);
  for (int c = 1; c < k; ++c) {
    std::partial_sum(closest.begin(), closest.end(), cum.begin());
    const double pot = cum.back();
    std::size_t best_row = 0;
    double best_pot = std::numeric_limits<double>::infinity();
    std::vector<double> best_closest;
    for (int t = 0; t < trials; ++t) {
      const double r = u(rng) * pot;
      auto it = std::upper_bound(cum.begin(), cum.end(), r);
      std::size_t row = static_cast<std::size_t>(std::distance(cum.begin(), it));
      if (row >= n) row = n - 1;
      std::vector<double> cand(n);
      double cand_pot = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        cand[i] = std::min(closest[i], sq_dist(x.row(i), x.row(row)));
        cand_pot += cand[i];
      }
      if (cand_pot < best_pot) {
        best_pot = cand_pot;
        best_row = row;
        best_closest = std::move(cand);
      }
    }
    set_center(static_cast<std::size_t>(c), best_row);
    closest = std::move(best_closest);
  }
  return centers;
}

double assign(const Matrix& x, const Matrix& centers, std::vector<int>& labels,
              std::vector<double>& dist) {
  double inertia = 0.0;
  for (std::size_t i = 0; i < x.rows(); ++i) {
    double best = std::numeric_limits<double>::infinity();
    int arg = 0;
    for (std::size_t c = 0; c < centers.rows(); ++c) {
      const double d = sq_dist(x.row(i), centers.row(c));
      if (d < best) {
        best = d;
        arg = static_cast<int>(c);
      }
    }
    labels[i] = arg;
    dist[i] = best;
    inertia += best;
  }
  return inertia;
}

}  // namespace

KMeansResult kmeans(const Matrix& x, int k, std::uint64_t seed, int max_iter,
                    double tol) {
  const std::size_t n = x.rows(), d = x.cols();
  if (k < 1) throw InvalidArgumentError("kmeans: k must be >= 1");
  if (static_cast<std::size_t>(k) > n) {
    throw InvalidArgumentError("kmeans: k = " + std::to_string(k) +
                               " exceeds the number of samples " + std::to_string(n));
  }
  KMeansResult r;
  r.labels.assign(n, 0);
  if (d == 0) {
    r.centers = Matrix(static_cast<std::size_t>(k), 0);
    return r;
  }
  double mean_var = 0.0;
  for (std::size_t j = 0; j < d; ++j) {
    double m = 0.0, s = 0.0;
    for (std::size_t i = 0; i < n; ++i) m += x(i, j);
    m /= static_cast<double>(n);
    for (std::size_t i = 0; i < n; ++i) s += (x(i, j) - m) * (x(i, j) - m);
    mean_var += s / static_cast<double>(n);
  }
  const double tol_abs = tol * mean_var / static_cast<double>(d);

  std::mt19937_64 rng(seed);
  Matrix centers = kmeanspp(x, k, rng);
  std::vector<double> dist(n);
  std::vector<int> prev;
  bool strict = false;
  for (int it = 1; it <= max_iter; ++it) {
    r.inertia_history.push_back(assign(x, centers, r.labels, dist));
    r.iterations = it;
    if (!prev.empty() && prev == r.labels) {
      strict = true;
      break;
    }
    prev = r.labels;
    Matrix next(static_cast<std::size_t>(k), d, 0.0);
    std::vector<long> count(static_cast<std::size_t>(k), 0);
    for (std::size_t i = 0; i < n; ++i) {
      const auto c = static_cast<std::size_t>(r.labels[i]);
      ++count[c];
      for (std::size_t j = 0; j < d; ++j) next(c, j) += x(i, j);
    }
    std::vector<char> taken(n, 0);
    for (std::size_t c = 0; c < static_cast<std::size_t>(k); ++c) {
      if (count[c] > 0) {
        for (std::size_t j = 0; j < d; ++j) next(c, j) /= static_cast<double>(count[c]);
        continue;
      }
      // Empty cluster: take the point farthest from its current center.
      std::size_t far = 0;
      double far_d = -1.0;
      for (std::size_t i = 0; i < n; ++i) {
        if (!taken[i] && dist[i] > far_d) {
          far_d = dist[i];
          far = i;
        }
      }
      taken[far] = 1;
      for (std::size_t j = 0; j < d; ++j) next(c, j) = x(far, j);
    }
    double shift = 0.0;
    for (std::size_t c = 0; c < static_cast<std::size_t>(k); ++c) {
      shift += sq_dist(next.row(c), centers.row(c));
    }
    centers = std::move(next);
    if (shift <= tol_abs) break;
  }
  if (!strict) r.inertia = assign(x, centers, r.labels, dist);
  else r.inertia = r.inertia_history.back();
  r.centers = std::move(centers);
  return r;
}

// ---------------------------------------------------------------------------
// Attacks

std::string to_string(AttackMethod m) {
  switch (m) {
    case AttackMethod::kId2Graph: return "id2graph";
    case AttackMethod::kCl: return "cl";
    case AttackMethod::kUni: return "uni";
    case AttackMethod::kUniCl: return "uni_cl";
  }
  return "cl";
}

AttackMethod attack_method_from_string(const std::string& s) {
  if (s == "id2graph") return AttackMethod::kId2Graph;
  if (s == "cl") return AttackMethod::kCl;
  if (s == "uni") return AttackMethod::kUni;
  if (s == "uni_cl" || s == "uni+cl") return AttackMethod::kUniCl;
  throw InvalidArgumentError("unknown attack '" + s + "'");
}

namespace {

// Drops constant columns, then runs k-means.
KMeansResult cluster_informative(const Matrix& x, int k, std::uint64_t seed,
                                 int max_iter, double tol) {
  if (x.rows() == 0) throw InvalidArgumentError("clustering: no samples");
  std::vector<int> keep;
  for (std::size_t j = 0; j < x.cols(); ++j) {
    double lo = x(0, j), hi = x(0, j);
    for (std::size_t i = 1; i < x.rows(); ++i) {
      lo = std::min(lo, x(i, j));
      hi = std::max(hi, x(i, j));
    }
    if (hi > lo) keep.push_back(static_cast<int>(j));
  }
  return kmeans(x.select_cols(keep), k, seed, max_iter, tol);
}

// One column per group with at least two members, scaled by `scale`.
Matrix dummies(const std::vector<int>& group, double scale) {
  int count = 0;
  for (int g : group) count = std::max(count, g + 1);
  std::vector<int> size(static_cast<std::size_t>(count), 0);
  for (int g : group) ++size[static_cast<std::size_t>(g)];
  std::vector<int> column(static_cast<std::size_t>(count), -1);
  int cols = 0;
  for (int g = 0; g < count; ++g) {
    if (size[static_cast<std::size_t>(g)] >= 2) column[static_cast<std::size_t>(g)] = cols++;
  }
  Matrix m(group.size(), static_cast<std::size_t>(cols), 0.0);
  for (std::size_t i = 0; i < group.size(); ++i) {
    const int c = column[static_cast<std::size_t>(group[i])];
    if (c >= 0) m(i, static_cast<std::size_t>(c)) = scale;
  }
  return m;
}

ClusterResult from_kmeans(KMeansResult k, int clusters, AttackMethod method) {
  ClusterResult r;
  r.labels = std::move(k.labels);
  r.cluster_count = clusters;
  r.method = method;
  r.iterations = k.iterations;
  return r;
}

class DisjointSets {
 public:
  explicit DisjointSets(int n) : parent_(static_cast<std::size_t>(n)) {
    std::iota(parent_.begin(), parent_.end(), 0);
  }
  int find(int x) {
    while (parent_[static_cast<std::size_t>(x)] != x) {
      auto& p = parent_[static_cast<std::size_t>(x)];
      p = parent_[static_cast<std::size_t>(p)];
      x = p;
    }
    return x;
  }
  void unite(int a, int b) {
    a = find(a);
    b = find(b);
    if (a == b) return;
    if (a > b) std::swap(a, b);
    parent_[static_cast<std::size_t>(b)] = a;
  }

 private:
  std::vector<int> parent_;
};

}  // namespace

ClusterResult kmeans_block(const Matrix& local_features,
                           const CommunityAssignment& communities, double alpha,
                           int k, std::uint64_t seed, int max_iter, double tol) {
  if (k < 2) throw InvalidArgumentError("kmeans_block: K must be >= 2");
  if (!(alpha >= 0.0)) throw InvalidArgumentError("kmeans_block: alpha must be >= 0");
  if (communities.community.size() != local_features.rows()) {
    throw InvalidArgumentError("kmeans_block: community vector size mismatch");
  }
  const Matrix block =
      minmax_normalize(local_features).hconcat(dummies(communities.community, alpha));
  ClusterResult r = from_kmeans(cluster_informative(block, k, seed, max_iter, tol), k,
                                AttackMethod::kId2Graph);
  r.modularity = communities.modularity;
  r.communities = communities.community_count();
  return r;
}

ClusterResult attack_id2graph(const AttackerView& view, const Matrix& local_features,
                              int class_count, const AttackParams& params,
                              std::uint64_t seed) {
  if (static_cast<std::size_t>(view.sample_count) != local_features.rows()) {
    throw InvalidArgumentError("id2graph: view and feature rows differ");
  }
  const AdjacencyGraph g =
      params.chunked
          ? build_adjacency_chunked(view, params.eta, params.chunk, params.inter_weight)
          : build_adjacency(view, params.eta);
  const CommunityAssignment comm = louvain(g, params.louvain_max_iter, params.louvain_tol);
  return kmeans_block(local_features, comm, params.alpha, class_count, seed,
                      params.kmeans_max_iter, params.kmeans_tol);
}

ClusterResult attack_cl(const Matrix& local_features, int class_count,
                        std::uint64_t seed, const AttackParams& params) {
  return from_kmeans(cluster_informative(minmax_normalize(local_features), class_count,
                                         seed, params.kmeans_max_iter,
                                         params.kmeans_tol),
                     class_count, AttackMethod::kCl);
}

ClusterResult attack_uni(const AttackerView& view, const AttackParams& params) {
  DisjointSets dsu(view.sample_count);
  auto link = [&](const std::vector<int>& ids) {
    for (std::size_t i = 1; i < ids.size(); ++i) dsu.unite(ids[0], ids[i]);
  };
  for (const auto& tree : view.trees) {
    if (params.uni_all_nodes) {
      for (std::size_t s = 0; s < tree.spaces.size(); ++s) {
        if (tree.parent[s] >= 0) link(tree.spaces[s]);
      }
    } else {
      for (int leaf : tree.leaves) link(tree.spaces[static_cast<std::size_t>(leaf)]);
    }
  }
  ClusterResult r;
  r.method = AttackMethod::kUni;
  r.labels.resize(static_cast<std::size_t>(view.sample_count));
  std::unordered_map<int, int> ids;
  for (int i = 0; i < view.sample_count; ++i) {
    auto [it, fresh] = ids.try_emplace(dsu.find(i), static_cast<int>(ids.size()));
    r.labels[static_cast<std::size_t>(i)] = it->second;
  }
  r.cluster_count = static_cast<int>(ids.size());
  return r;
}

ClusterResult attack_uni_cl(const AttackerView& view, const Matrix& local_features,
                            int class_count, std::uint64_t seed,
                            const AttackParams& params) {
  const ClusterResult uni = attack_uni(view, params);
  const Matrix block = minmax_normalize(local_features).hconcat(dummies(uni.labels, 1.0));
  return from_kmeans(cluster_informative(block, class_count, seed, params.kmeans_max_iter,
                                         params.kmeans_tol),
                     class_count, AttackMethod::kUniCl);
}

}  // namespace treeleak
