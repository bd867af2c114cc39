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

#include "treeleak/metrics.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <cstdio>
#include <unordered_map>

namespace treeleak {

ContingencyTable ContingencyTable::of(std::span<const int> truth,
                                      std::span<const int> pred) {
  if (truth.size() != pred.size()) {
    throw InvalidArgumentError("contingency: label vectors differ in length");
  }
  std::unordered_map<int, std::size_t> ci, ki;
  for (int c : truth) ci.try_emplace(c, ci.size());
  for (int k : pred) ki.try_emplace(k, ki.size());
  ContingencyTable t;
  t.n = static_cast<long>(truth.size());
  t.counts.assign(ci.size(), std::vector<long>(ki.size(), 0));
  t.class_totals.assign(ci.size(), 0);
  t.cluster_totals.assign(ki.size(), 0);
  for (std::size_t i = 0; i < truth.size(); ++i) {
    const std::size_t a = ci[truth[i]], b = ki[pred[i]];
    ++t.counts[a][b];
    ++t.class_totals[a];
    ++t.cluster_totals[b];
  }
  return t;
}

namespace {

double entropy(const std::vector<long>& totals, double n) {
  double h = 0.0;
  for (long v : totals) {
    if (v > 0) h -= (static_cast<double>(v) / n) * std::log(static_cast<double>(v) / n);
  }
  return h;
}

}  // namespace

VMeasure v_measure_scores(std::span<const int> truth, std::span<const int> pred) {
  if (truth.empty()) throw InvalidArgumentError("v_measure: empty input");
  const ContingencyTable t = ContingencyTable::of(truth, pred);
  const double n = static_cast<double>(t.n);
  const double hc = entropy(t.class_totals, n);
  const double hk = entropy(t.cluster_totals, n);
  double hc_k = 0.0, hk_c = 0.0;
  for (std::size_t a = 0; a < t.counts.size(); ++a) {
    for (std::size_t b = 0; b < t.counts[a].size(); ++b) {
      const double v = static_cast<double>(t.counts[a][b]);
      if (v == 0.0) continue;
      hc_k -= (v / n) * std::log(v / static_cast<double>(t.cluster_totals[b]));
      hk_c -= (v / n) * std::log(v / static_cast<double>(t.class_totals[a]));
    }
  }
  VMeasure m;
  m.homogeneity = hc == 0.0 ? 1.0 : 1.0 - hc_k / hc;
  m.completeness = hk == 0.0 ? 1.0 : 1.0 - hk_c / hk;
  const double s = m.homogeneity + m.completeness;
  m.v = s == 0.0 ? 0.0 : 2.0 * m.homogeneity * m.completeness / s;
  return m;
}

double v_measure(std::span<const int> truth, std::span<const int> pred) {
  return v_measure_scores(truth, pred).v;
}

double auc_binary(std::span<const int> truth, std::span<const double> scores) {
  if (truth.size() != scores.size()) throw InvalidArgumentError("auc: size mismatch");
  const std::size_t n = truth.size();
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), 0);
  std::sort(idx.begin(), idx.end(),
            [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });
  std::vector<double> rank(n);
  for (std::size_t i = 0; i < n;) {
    std::size_t j = i;
    while (j + 1 < n && scores[idx[j + 1]] == scores[idx[i]]) ++j;
    const double mid = (static_cast<double>(i) + static_cast<double>(j)) / 2.0 + 1.0;
    for (std::size_t k = i; k <= j; ++k) rank[idx[k]] = mid;
    i = j + 1;
  }
  double pos = 0.0, neg = 0.0, rank_sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    if (truth[i] == 1) {
      pos += 1.0;
      rank_sum += rank[i];
    } else {
      neg += 1.0;
    }
  }
  if (pos == 0.0 || neg == 0.0) {
    throw UndefinedValueError("auc: needs at least one positive and one negative");
  }
  return (rank_sum - pos * (pos + 1.0) / 2.0) / (pos * neg);
}

double auc(std::span<const int> truth, const Matrix& proba) {
  if (truth.size() != proba.rows()) throw InvalidArgumentError("auc: size mismatch");
  const std::size_t c = proba.cols();
  if (c < 2) throw UndefinedValueError("auc: needs at least two classes");
  if (c == 2) return auc_binary(truth, proba.column(1));
  double sum = 0.0;
  for (std::size_t k = 0; k < c; ++k) {
    std::vector<int> bin(truth.size());
    for (std::size_t i = 0; i < truth.size(); ++i) {
      bin[i] = truth[i] == static_cast<int>(k) ? 1 : 0;
    }
    sum += auc_binary(bin, proba.column(k));
  }
  return sum / static_cast<double>(c);
}

std::string Summary::format(int digits) const {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f (\xC2\xB1%.*f)", digits, mean, digits, std);
  return buf;
}

Summary summarize(std::span<const double> values) {
  Summary s;
  s.count = values.size();
  if (values.empty()) return s;
  s.mean = std::accumulate(values.begin(), values.end(), 0.0) /
           static_cast<double>(values.size());
  if (values.size() > 1) {
    double ss = 0.0;
    for (double v : values) ss += (v - s.mean) * (v - s.mean);
    s.std = std::sqrt(ss / static_cast<double>(values.size() - 1));
  }
  return s;
}

std::map<std::string, Summary> aggregate(
    const std::vector<std::pair<std::string, double>>& values) {
  std::map<std::string, std::vector<double>> groups;
  for (const auto& [k, v] : values) groups[k].push_back(v);
  std::map<std::string, Summary> out;
  for (const auto& [k, vs] : groups) out[k] = summarize(vs);
  return out;
}

}  // namespace treeleak
