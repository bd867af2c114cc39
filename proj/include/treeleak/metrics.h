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

// Clustering and classification scores, plus seed aggregation.

#ifndef TREELEAK_METRICS_H_
#define TREELEAK_METRICS_H_

#include <map>
#include <span>
#include <string>
#include <vector>

#include "treeleak/common.h"

namespace treeleak {

struct ContingencyTable {
  // counts[class][cluster], both re-indexed densely in order of appearance.
  std::vector<std::vector<long>> counts;
  std::vector<long> class_totals;
  std::vector<long> cluster_totals;
  long n = 0;

  static ContingencyTable of(std::span<const int> truth, std::span<const int> pred);
};

struct VMeasure {
  double homogeneity = 1.0;
  double completeness = 1.0;
  double v = 1.0;
};

// Natural-log entropies. H(C) = 0 gives homogeneity 1, H(K) = 0 gives
// completeness 1, and h + c = 0 gives V = 0.
VMeasure v_measure_scores(std::span<const int> truth, std::span<const int> pred);
double v_measure(std::span<const int> truth, std::span<const int> pred);

// Binary: Mann-Whitney with midranks, `scores` are positive-class scores.
double auc_binary(std::span<const int> truth, std::span<const double> scores);
// Rows of `proba` are class distributions. Two classes use column 1;
// more classes average the one-vs-rest AUCs (unweighted).
double auc(std::span<const int> truth, const Matrix& proba);

struct Summary {
  double mean = 0.0;
  double std = 0.0;  // sample standard deviation; 0 for one value
  std::size_t count = 0;

  std::string format(int digits = 3) const;  // "m (±s)"
};

Summary summarize(std::span<const double> values);

// Groups `values` by key and summarizes each group.
std::map<std::string, Summary> aggregate(
    const std::vector<std::pair<std::string, double>>& values);

}  // namespace treeleak

#endif  // TREELEAK_METRICS_H_
