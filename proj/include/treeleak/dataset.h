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

// Tabular datasets and their vertical partitioning across parties.

#ifndef TREELEAK_DATASET_H_
#define TREELEAK_DATASET_H_

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "treeleak/common.h"

namespace treeleak {

struct Dataset {
  Matrix features;  // N x F
  std::vector<int> labels;
  int class_count = 0;
  std::vector<std::string> feature_names;
  // Original label spelling for each dense class id, when loaded from text.
  std::vector<std::string> class_names;
  // 0..N-1. `origin_rows` remembers where each row came from in the parent
  // table after a split or subsample.
  std::vector<int> row_ids;
  std::vector<int> origin_rows;
  std::vector<std::string> warnings;

  std::size_t rows() const { return features.rows(); }
  std::size_t cols() const { return features.cols(); }

  std::vector<long> class_counts() const;
  // Throws InvalidArgumentError if any invariant is broken.
  void validate() const;
  // Subset of rows, re-indexed densely. Class count is preserved.
  Dataset subset(std::span<const int> rows) const;
};

struct VerticalView {
  int party_id = 1;  // 1 is the active party.
  std::vector<int> feature_indices;
  bool has_labels = false;
};

enum class PartitionMode { kRandomHalf, kTopKPercentileToAttacker, kExplicit };

struct PartitionSpec {
  PartitionMode mode = PartitionMode::kRandomHalf;
  int k_percent = 50;
  std::uint64_t seed = 0;
  // Explicit mode: one feature set per party, party 1 first.
  std::vector<std::vector<int>> explicit_sets;
  // Percentile mode: optional precomputed importance per feature. When empty
  // the histogram MI estimate with 10 bins is used.
  std::vector<double> importance;
};

Dataset load_csv(const std::string& path, const std::string& label_column,
                 std::optional<int> class_count = std::nullopt);
// Same parser over in-memory text. `source` is only used in diagnostics.
Dataset parse_csv(const std::string& text, const std::string& label_column,
                  std::optional<int> class_count = std::nullopt,
                  const std::string& source = "<memory>");
std::string to_csv(const Dataset& d, const std::string& label_column = "label");
// Written atomically: the file is either complete or absent.
void write_csv(const Dataset& d, const std::string& path,
               const std::string& label_column = "label");

// Shuffled, unstratified split. The test side receives ceil(N * f) rows.
std::pair<Dataset, Dataset> train_test_split(const Dataset& d,
                                             double test_fraction,
                                             std::uint64_t seed);

// Uniform random subsample of `n` rows (all rows if n >= N).
Dataset subsample_rows(const Dataset& d, std::size_t n, std::uint64_t seed);

// Views are returned active party first; in the two-party modes the attacker
// (passive party 2) is second.
std::vector<VerticalView> make_partition(const Dataset& d,
                                         const PartitionSpec& spec);
void validate_partition(const std::vector<VerticalView>& views,
                        std::size_t feature_count);

// Histogram mutual information (nats) between each feature and the label,
// `bins` equal-width bins spanning the feature's range.
std::vector<double> feature_label_mi(const Dataset& d, int bins = 10);

// Column-wise map onto [0, 1]; constant columns become zeros.
Matrix minmax_normalize(const Matrix& m);

// Gaussian blobs around uniformly drawn class centers. spread is the
// per-coordinate standard deviation. Only `informative` randomly chosen
// columns separate the classes (all of them when negative); in the others
// every class shares one center.
Dataset gen_synthetic(int n, int f, int c, double cluster_spread,
                      std::uint64_t seed, int informative = -1);

}  // namespace treeleak

#endif  // TREELEAK_DATASET_H_
