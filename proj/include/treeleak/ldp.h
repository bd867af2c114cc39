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

// Label differential privacy: randomized response, its prior-aware variant,
// the two-stage label noising pipeline and the grafting repair pass for
// random forests trained on noisy labels.

#ifndef TREELEAK_LDP_H_
#define TREELEAK_LDP_H_

#include <cstdint>
#include <functional>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "treeleak/dataset.h"
#include "treeleak/tree.h"

namespace treeleak {

struct NoisyLabels {
  std::vector<int> original;
  std::vector<int> noised;
  double epsilon = 0.0;
  std::string mechanism;   // "rr", "lp_1st" or "lp_2st"
  std::vector<int> stage;  // per row: 1 or 2
  std::vector<std::string> warnings;
};

// e^eps / (e^eps + C - 1); 1 when eps is +inf.
double rr_keep_probability(double epsilon, int class_count);

NoisyLabels randomized_response(std::span<const int> labels, double epsilon,
                                int class_count, std::uint64_t seed);

// Output distribution of the prior-aware mechanism for one input label.
// Classes are ranked by prior mass (ties: lower id first).
std::vector<double> rr_with_prior_distribution(int label,
                                               std::span<const double> prior,
                                               double epsilon);

// Size of the candidate set the mechanism restricts itself to.
int rr_with_prior_k(std::span<const double> prior, double epsilon);

int rr_with_prior(int label, std::span<const double> prior, double epsilon,
                  std::mt19937_64& rng);

// Trains an interim model on `stage1` (labels already noised) and returns a
// rows(stage2) x C matrix of class distributions for `stage2`.
using InterimTrainer =
    std::function<Matrix(const Dataset& stage1, const Dataset& stage2)>;

// Interim model restricted to `active_features`: a depth-6 random forest.
InterimTrainer active_forest_trainer(std::vector<int> active_features,
                                     std::uint64_t seed);

// stages == 1 (or an empty trainer) is plain randomized response.
NoisyLabels lp_mst(const Dataset& d, double epsilon, int stages,
                   const InterimTrainer& trainer, std::uint64_t seed);

struct GraftReport {
  struct TreeReport {
    int tree_id = 0;
    std::vector<int> contaminated;  // node ids of the pre-repair tree
    std::vector<int> resplit;       // node ids of the pre-repair tree
    std::vector<int> erased;        // descendants dropped, per resplit node
  };
  std::vector<TreeReport> trees;

  std::size_t resplit_count() const;
};

struct GraftResult {
  TreeModel repaired;
  TreeModel original;
  GraftReport report;
};

struct GraftOptions {
  int percentile_count = 32;
  int min_samples_split = 2;
};

// Repairs every tree of a random forest on the active party's side. `train`
// holds all features; only `active_view` columns are used for re-splitting.
// Throws UnsupportedModelError for boosting models.
GraftResult grafting(const TreeModel& model, const Dataset& train,
                     std::span<const int> clean_labels,
                     std::span<const int> noisy_labels,
                     const VerticalView& active_view,
                     const GraftOptions& options = {});

// Contaminated: majority under noisy labels differs from the clean one.
bool check_contaminated(std::span<const int> space, std::span<const int> clean,
                        std::span<const int> noisy, int class_count);

// Fraction of rows whose argmax prediction equals `labels`.
double accuracy(const TreeModel& model, const Matrix& x, std::span<const int> labels);

}  // namespace treeleak

#endif  // TREELEAK_LDP_H_
