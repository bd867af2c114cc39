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

#include "treeleak/dataset.h"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <numeric>
#include <random>
#include <set>
#include <sstream>

#include "treeleak/serialize.h"

namespace treeleak {

std::vector<long> Dataset::class_counts() const {
  std::vector<long> counts(static_cast<std::size_t>(class_count), 0);
  for (int y : labels) ++counts[static_cast<std::size_t>(y)];
  return counts;
}

void Dataset::validate() const {
  if (labels.size() != rows()) {
    throw InvalidArgumentError("dataset: label count " +
                               std::to_string(labels.size()) +
                               " != row count " + std::to_string(rows()));
  }
  if (class_count < 2) {
    throw InvalidArgumentError("dataset: class_count must be >= 2");
  }
  for (int y : labels) {
    if (y < 0 || y >= class_count) {
      throw InvalidArgumentError("dataset: label " + std::to_string(y) +
                                 " outside [0, class_count)");
    }
  }
  for (double v : features.data()) {
    if (std::isnan(v)) {
      throw InvalidArgumentError("dataset: missing cells are not permitted");
    }
  }
}

Dataset Dataset::subset(std::span<const int> rows) const {
  Dataset out;
  out.features = features.select_rows(rows);
  out.labels.reserve(rows.size());
  out.origin_rows.reserve(rows.size());
  for (int r : rows) {
    out.labels.push_back(labels[static_cast<std::size_t>(r)]);
    out.origin_rows.push_back(origin_rows.empty()
                                  ? r
                                  : origin_rows[static_cast<std::size_t>(r)]);
  }
  out.class_count = class_count;
  out.feature_names = feature_names;
  out.class_names = class_names;
  out.row_ids.resize(rows.size());
  std::iota(out.row_ids.begin(), out.row_ids.end(), 0);
  return out;
}

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string cur;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    char ch = line[i];
    if (quoted) {
      if (ch == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          cur.push_back('"');
          ++i;
        } else {
          quoted = false;
        }
      } else {
        cur.push_back(ch);
      }
    } else if (ch == '"') {
      quoted = true;
    } else if (ch == ',') {
      fields.push_back(std::move(cur));
      cur.clear();
    } else {
      cur.push_back(ch);
    }
  }
  fields.push_back(std::move(cur));
  return fields;
}

std::string trim(const std::string& s) {
  auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::optional<double> parse_double(const std::string& s) {
  if (s.empty()) return std::nullopt;
  double v = 0.0;
  const char* first = s.data();
  const char* last = s.data() + s.size();
  if (*first == '+') ++first;
  auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc() || ptr != last || !std::isfinite(v)) {
    return std::nullopt;
  }
  return v;
}

}  // namespace

Dataset parse_csv(const std::string& text, const std::string& label_column,
                  std::optional<int> class_count, const std::string& source) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line)) {
    throw MalformedInputError(source + ": missing header row");
  }
  if (line.size() >= 3 && static_cast<unsigned char>(line[0]) == 0xEF) {
    line = line.substr(3);  // UTF-8 byte order mark
  }
  std::vector<std::string> header = split_csv_line(line);
  for (auto& h : header) h = trim(h);
  auto it = std::find(header.begin(), header.end(), label_column);
  if (it == header.end()) {
    throw MalformedInputError(source + ": label column '" + label_column +
                              "' not found in header");
  }
  const std::size_t label_idx =
      static_cast<std::size_t>(std::distance(header.begin(), it));

  Dataset d;
  for (std::size_t c = 0; c < header.size(); ++c) {
    if (c != label_idx) d.feature_names.push_back(header[c]);
  }
  const std::size_t f = d.feature_names.size();

  std::vector<double> values;
  std::vector<std::string> raw_labels;
  std::size_t row = 0;
  while (std::getline(in, line)) {
    if (trim(line).empty()) continue;
    ++row;
    std::vector<std::string> fields = split_csv_line(line);
    if (fields.size() != header.size()) {
      throw MalformedInputError(source + ": row " + std::to_string(row) +
                                " has " + std::to_string(fields.size()) +
                                " fields, expected " +
                                std::to_string(header.size()));
    }
    for (std::size_t c = 0; c < fields.size(); ++c) {
      std::string cell = trim(fields[c]);
      if (c == label_idx) {
        if (cell.empty()) {
          throw MalformedInputError(source + ": row " + std::to_string(row) +
                                    " column '" + header[c] +
                                    "': missing label");
        }
        raw_labels.push_back(cell);
        continue;
      }
      auto v = parse_double(cell);
      if (!v) {
        throw MalformedInputError(source + ": row " + std::to_string(row) +
                                  " column '" + header[c] +
                                  "': cannot parse '" + cell +
                                  "' as a number");
      }
      values.push_back(*v);
    }
  }

  const std::size_t n = raw_labels.size();
  d.features = Matrix(n, f);
  d.features.data() = std::move(values);

  // Dense recoding by first appearance. A numeric label must be integral.
  std::map<std::string, int> code;
  for (std::size_t i = 0; i < n; ++i) {
    const std::string& s = raw_labels[i];
    if (auto v = parse_double(s); v && std::floor(*v) != *v) {
      throw LabelCodingError(source + ": row " + std::to_string(i + 1) +
                             ": label '" + s + "' is not an integer");
    }
    auto [pos, inserted] = code.emplace(s, static_cast<int>(code.size()));
    if (inserted) d.class_names.push_back(s);
    d.labels.push_back(pos->second);
  }
  const int distinct = static_cast<int>(code.size());
  if (class_count) {
    if (distinct > *class_count) {
      throw LabelCodingError(source + ": " + std::to_string(distinct) +
                             " distinct labels exceed class_count " +
                             std::to_string(*class_count));
    }
    d.class_count = *class_count;
  } else {
    d.class_count = distinct;
  }
  d.row_ids.resize(n);
  std::iota(d.row_ids.begin(), d.row_ids.end(), 0);
  d.origin_rows = d.row_ids;
  if (d.class_count < 2) {
    throw LabelCodingError(source + ": need at least two classes");
  }
  return d;
}

Dataset load_csv(const std::string& path, const std::string& label_column,
                 std::optional<int> class_count) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw MalformedInputError(path + ": cannot open file");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_csv(buf.str(), label_column, class_count, path);
}

std::string to_csv(const Dataset& d, const std::string& label_column) {
  std::ostringstream out;
  for (std::size_t c = 0; c < d.cols(); ++c) {
    out << (c < d.feature_names.size() ? d.feature_names[c]
                                       : "f" + std::to_string(c))
        << ',';
  }
  out << label_column << '\n';
  out.precision(std::numeric_limits<double>::max_digits10);
  for (std::size_t r = 0; r < d.rows(); ++r) {
    for (std::size_t c = 0; c < d.cols(); ++c) out << d.features(r, c) << ',';
    out << d.labels[r] << '\n';
  }
  return out.str();
}

void write_csv(const Dataset& d, const std::string& path,
               const std::string& label_column) {
  write_file_atomic(path, to_csv(d, label_column));
}

std::pair<Dataset, Dataset> train_test_split(const Dataset& d,
                                             double test_fraction,
                                             std::uint64_t seed) {
  if (!(test_fraction > 0.0 && test_fraction < 1.0)) {
    throw InvalidArgumentError("train_test_split: test_fraction must be in (0, 1)");
  }
  const std::size_t n = d.rows();
  auto n_test = static_cast<std::size_t>(
      std::ceil(static_cast<double>(n) * test_fraction - 1e-9));
  n_test = std::min(n_test, n);
  std::vector<int> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  std::mt19937_64 rng(seed);
  std::shuffle(perm.begin(), perm.end(), rng);
  std::vector<int> train(perm.begin(), perm.end() - static_cast<long>(n_test));
  std::vector<int> test(perm.end() - static_cast<long>(n_test), perm.end());
  std::sort(train.begin(), train.end());
  std::sort(test.begin(), test.end());
  Dataset tr = d.subset(train);
  Dataset te = d.subset(test);
  auto counts = tr.class_counts();
  for (std::size_t c = 0; c < counts.size(); ++c) {
    if (counts[c] == 0) {
      tr.warnings.push_back("class " + std::to_string(c) +
                            " absent from training split");
    }
  }
  return {std::move(tr), std::move(te)};
}

Dataset subsample_rows(const Dataset& d, std::size_t n, std::uint64_t seed) {
  if (n >= d.rows()) return d;
  std::vector<int> perm(d.rows());
  std::iota(perm.begin(), perm.end(), 0);
  std::mt19937_64 rng(seed);
  std::shuffle(perm.begin(), perm.end(), rng);
  perm.resize(n);
  std::sort(perm.begin(), perm.end());
  return d.subset(perm);
}

void validate_partition(const std::vector<VerticalView>& views,
                        std::size_t feature_count) {
  if (views.empty()) throw InvalidArgumentError("partition: no parties");
  std::vector<int> owner(feature_count, 0);
  int labelled = 0;
  for (const auto& v : views) {
    if (v.has_labels) ++labelled;
    if (v.has_labels != (v.party_id == 1)) {
      throw InvalidArgumentError("partition: only party 1 holds labels");
    }
    for (int f : v.feature_indices) {
      if (f < 0 || static_cast<std::size_t>(f) >= feature_count) {
        throw InvalidArgumentError("partition: feature index " +
                                   std::to_string(f) + " out of range");
      }
      if (owner[static_cast<std::size_t>(f)] != 0) {
        throw InvalidArgumentError("partition: feature " + std::to_string(f) +
                                   " assigned to more than one party");
      }
      owner[static_cast<std::size_t>(f)] = v.party_id;
    }
  }
  if (labelled != 1) {
    throw InvalidArgumentError("partition: exactly one party must hold labels");
  }
}

std::vector<VerticalView> make_partition(const Dataset& d,
                                         const PartitionSpec& spec) {
  const int f = static_cast<int>(d.cols());
  std::vector<VerticalView> views;
  switch (spec.mode) {
    case PartitionMode::kExplicit: {
      if (spec.explicit_sets.empty()) {
        throw InvalidArgumentError("partition: explicit mode needs feature sets");
      }
      for (std::size_t i = 0; i < spec.explicit_sets.size(); ++i) {
        VerticalView v;
        v.party_id = static_cast<int>(i) + 1;
        v.feature_indices = spec.explicit_sets[i];
        std::sort(v.feature_indices.begin(), v.feature_indices.end());
        v.has_labels = (i == 0);
        views.push_back(std::move(v));
      }
      break;
    }
    case PartitionMode::kRandomHalf: {
      std::vector<int> perm(static_cast<std::size_t>(f));
      std::iota(perm.begin(), perm.end(), 0);
      std::mt19937_64 rng(spec.seed);
      std::shuffle(perm.begin(), perm.end(), rng);
      const int attacker = f / 2;
      VerticalView active{1, {perm.begin() + attacker, perm.end()}, true};
      VerticalView passive{2, {perm.begin(), perm.begin() + attacker}, false};
      std::sort(active.feature_indices.begin(), active.feature_indices.end());
      std::sort(passive.feature_indices.begin(), passive.feature_indices.end());
      views = {std::move(active), std::move(passive)};
      break;
    }
    case PartitionMode::kTopKPercentileToAttacker: {
      if (spec.k_percent < 0 || spec.k_percent > 100) {
        throw InvalidArgumentError("partition: k_percent must be in [0, 100]");
      }
      std::vector<double> importance =
          spec.importance.empty() ? feature_label_mi(d, 10) : spec.importance;
      if (importance.size() != static_cast<std::size_t>(f)) {
        throw InvalidArgumentError("partition: importance length != feature count");
      }
      std::vector<int> order(static_cast<std::size_t>(f));
      std::iota(order.begin(), order.end(), 0);
      std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
        return importance[static_cast<std::size_t>(a)] >
               importance[static_cast<std::size_t>(b)];
      });
      const auto attacker = static_cast<long>(
          std::ceil(static_cast<double>(f) * spec.k_percent / 100.0 - 1e-9));
      VerticalView active{1, {order.begin() + attacker, order.end()}, true};
      VerticalView passive{2, {order.begin(), order.begin() + attacker}, false};
      std::sort(active.feature_indices.begin(), active.feature_indices.end());
      std::sort(passive.feature_indices.begin(), passive.feature_indices.end());
      views = {std::move(active), std::move(passive)};
      break;
    }
  }
  validate_partition(views, d.cols());
  return views;
}

std::vector<double> feature_label_mi(const Dataset& d, int bins) {
  if (bins < 2) throw InvalidArgumentError("feature_label_mi: bins must be >= 2");
  const std::size_t n = d.rows();
  const auto k = static_cast<std::size_t>(d.class_count);
  std::vector<double> out(d.cols(), 0.0);
  if (n == 0) return out;
  const auto b = static_cast<std::size_t>(bins);
  std::vector<double> class_p(k, 0.0);
  for (int y : d.labels) class_p[static_cast<std::size_t>(y)] += 1.0;
  for (auto& p : class_p) p /= static_cast<double>(n);

  for (std::size_t c = 0; c < d.cols(); ++c) {
    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    for (std::size_t r = 0; r < n; ++r) {
      lo = std::min(lo, d.features(r, c));
      hi = std::max(hi, d.features(r, c));
    }
    if (!(hi > lo)) continue;
    std::vector<double> joint(b * k, 0.0);
    std::vector<double> bin_p(b, 0.0);
    const double width = (hi - lo) / static_cast<double>(b);
    for (std::size_t r = 0; r < n; ++r) {
      auto bin = static_cast<std::size_t>((d.features(r, c) - lo) / width);
      bin = std::min(bin, b - 1);
      joint[bin * k + static_cast<std::size_t>(d.labels[r])] += 1.0;
      bin_p[bin] += 1.0;
    }
    double mi = 0.0;
    for (std::size_t i = 0; i < b; ++i) {
      if (bin_p[i] == 0.0) continue;
      const double pb = bin_p[i] / static_cast<double>(n);
      for (std::size_t y = 0; y < k; ++y) {
        const double pj = joint[i * k + y] / static_cast<double>(n);
        if (pj > 0.0) mi += pj * std::log(pj / (pb * class_p[y]));
      }
    }
    out[c] = std::max(0.0, mi);
  }
  return out;
}

Matrix minmax_normalize(const Matrix& m) {
  Matrix out(m.rows(), m.cols());
  for (std::size_t c = 0; c < m.cols(); ++c) {
    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    for (std::size_t r = 0; r < m.rows(); ++r) {
      lo = std::min(lo, m(r, c));
      hi = std::max(hi, m(r, c));
    }
    const double range = hi - lo;
    for (std::size_t r = 0; r < m.rows(); ++r) {
      out(r, c) = range > 0.0 ? (m(r, c) - lo) / range : 0.0;
    }
  }
  return out;
}

Dataset gen_synthetic(int n, int f, int c, double cluster_spread,
                      std::uint64_t seed, int informative) {
  if (c < 2 || n < c || f < 2) {
    throw InvalidArgumentError("gen_synthetic: need n >= c >= 2 and f >= 2");
  }
  if (informative < 0) informative = f;
  if (informative < 1 || informative > f) {
    throw InvalidArgumentError("gen_synthetic: informative must be in [1, f]");
  }
  if (cluster_spread < 0.0) {
    throw InvalidArgumentError("gen_synthetic: cluster_spread must be >= 0");
  }
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::normal_distribution<double> noise(0.0, 1.0);

  Matrix centers(static_cast<std::size_t>(c), static_cast<std::size_t>(f));
  for (auto& v : centers.data()) v = unit(rng);
  if (informative < f) {
    // A random subset keeps its class centers; the rest share one center.
    std::vector<int> cols(static_cast<std::size_t>(f));
    std::iota(cols.begin(), cols.end(), 0);
    std::shuffle(cols.begin(), cols.end(), rng);
    for (std::size_t k = static_cast<std::size_t>(informative); k < cols.size(); ++k) {
      const auto j = static_cast<std::size_t>(cols[k]);
      for (std::size_t y = 1; y < static_cast<std::size_t>(c); ++y) centers(y, j) = centers(0, j);
    }
  }

  std::vector<int> labels(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) labels[static_cast<std::size_t>(i)] = i % c;
  std::shuffle(labels.begin(), labels.end(), rng);

  Dataset d;
  d.features = Matrix(static_cast<std::size_t>(n), static_cast<std::size_t>(f));
  for (std::size_t i = 0; i < static_cast<std::size_t>(n); ++i) {
    const auto y = static_cast<std::size_t>(labels[i]);
    for (std::size_t j = 0; j < static_cast<std::size_t>(f); ++j) {
      d.features(i, j) = centers(y, j) + cluster_spread * noise(rng);
    }
  }
  d.labels = std::move(labels);
  d.class_count = c;
  for (int j = 0; j < f; ++j) d.feature_names.push_back("x" + std::to_string(j));
  for (int y = 0; y < c; ++y) d.class_names.push_back(std::to_string(y));
  d.row_ids.resize(static_cast<std::size_t>(n));
  std::iota(d.row_ids.begin(), d.row_ids.end(), 0);
  d.origin_rows = d.row_ids;
  return d;
}

}  // namespace treeleak
