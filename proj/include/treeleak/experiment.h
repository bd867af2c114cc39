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

// Config-driven experiment grid: every (defense parameter, sweep value,
// seed) cell splits the data, partitions features, trains the federated
// model, runs the attacks and scores them.

#ifndef TREELEAK_EXPERIMENT_H_
#define TREELEAK_EXPERIMENT_H_

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "treeleak/attack.h"
#include "treeleak/dataset.h"
#include "treeleak/ldp.h"
#include "treeleak/metrics.h"
#include "treeleak/vfl.h"

namespace treeleak {

// Invalid configuration. The message starts with the offending field path.
class ConfigError : public InvalidArgumentError {
 public:
  ConfigError(const std::string& path, const std::string& what)
      : InvalidArgumentError(path + ": " + what), path_(path) {}
  const std::string& path() const { return path_; }

 private:
  std::string path_;
};

struct SyntheticSpec {
  int rows = 1000;
  int features = 20;
  int classes = 2;
  double spread = 0.1;
  int informative = -1;  // all columns
  std::uint64_t seed = 0;
};

struct DatasetSpec {
  std::string name;
  std::string csv;  // resolved path when loading from a file
  std::string label_column = "label";
  std::optional<int> class_count;
  std::optional<SyntheticSpec> synthetic;
  std::size_t subsample = 0;  // 0 keeps all rows
  double test_fraction = 0.2;
};

struct DefenseSpec {
  DefenseKind kind = DefenseKind::kNone;
  std::vector<double> grid;  // epsilon or xi; empty for parameterless kinds
  int stages = 2;
  bool graft = false;  // lp_mst: also report the grafted model
};

enum class SweepAxis { kNone, kMaxDepth, kTreeCount, kKPercent };
std::string to_string(SweepAxis a);

struct ExperimentConfig {
  std::string name = "experiment";
  DatasetSpec dataset;
  PartitionSpec partition;
  ProtocolConfig protocol;
  std::vector<AttackMethod> attacks{AttackMethod::kId2Graph, AttackMethod::kCl,
                                    AttackMethod::kUni, AttackMethod::kUniCl};
  AttackParams attack;
  std::optional<double> eta;  // default: 1 for forests, 0.6 for boosting
  std::vector<DefenseSpec> defenses{DefenseSpec{}};
  SweepAxis sweep_axis = SweepAxis::kNone;
  std::vector<int> sweep_values;
  std::vector<std::uint64_t> seeds{0, 1, 2, 3, 4};
  int threads = 0;
  bool dump_transcripts = false;
  bool emit_plotdata = false;

  // Parses and validates. `base_dir` resolves a relative csv path.
  static ExperimentConfig from_json(const std::string& text,
                                    const std::string& base_dir = ".");
  void validate() const;
  double effective_eta() const;
};

struct CellSpec {
  std::size_t defense_index = 0;
  DefenseKind defense = DefenseKind::kNone;
  double param = 0.0;  // NaN when the defense has no parameter
  int sweep_value = 0;
  std::uint64_t seed = 0;
  std::size_t index = 0;  // position in the grid
};

std::vector<CellSpec> expand_grid(const ExperimentConfig& cfg);

struct AttackOutcome {
  AttackMethod method = AttackMethod::kCl;
  VMeasure score;
  int clusters = 0;
  int iterations = 0;
  double modularity = 0.0;
  int communities = 0;
  std::vector<int> labels;
};

struct CellResult {
  CellSpec spec;
  std::string defense_label;  // "none", "lp_mst", "grafting_ldp", ...
  double auc = 0.0;
  double clean_train_accuracy = 0.0;
  CommStats comm;
  CommStats baseline;
  double comm_rate = 1.0;
  std::vector<AttackOutcome> attacks;
  double train_seconds = 0.0;
  double attack_seconds = 0.0;
  std::vector<std::string> warnings;

  // Artifacts kept for dumps and checks.
  TrainResult train;
  std::vector<int> clean_labels;
  std::vector<int> passive_features;
  Matrix passive_local;  // attacker's training features, view order
  std::optional<GraftReport> graft;

  const AttackOutcome* attack(AttackMethod m) const;
};

// Loads (or generates) the dataset described by `spec`.
Dataset load_dataset(const DatasetSpec& spec);

// One grid cell. Returns more than one result when a noising defense also
// reports its grafted model. Failures propagate as exceptions.
std::vector<CellResult> run_cell(const ExperimentConfig& cfg, const Dataset& data,
                                 const CellSpec& cell);

// Error from one cell, naming it.
class CellError : public Error {
 public:
  using Error::Error;
};

struct ExperimentReport {
  ExperimentConfig config;
  std::vector<CellResult> results;  // grid order
  double seconds = 0.0;
};

// Runs every cell on a worker pool of `threads` (0: TREELEAK_THREADS or the
// hardware concurrency).
ExperimentReport run_experiment(const ExperimentConfig& cfg);

// runs.csv, summary.csv, report.json and the optional dumps and plot data
// under `out_dir`. runs.csv and summary.csv carry no timings.
void write_reports(const ExperimentReport& report, const std::string& out_dir);

std::string runs_csv(const std::vector<CellResult>& results, const ExperimentConfig& cfg);

// summary.csv text for `results`: one row per (dataset, model, defense,
// param, sweep, method) group with mean and sample std over seeds.
std::string summary_csv(const std::vector<CellResult>& results,
                        const ExperimentConfig& cfg);

// Re-aggregates runs.csv files of earlier runs.
std::string summary_from_runs(const std::vector<std::string>& runs_csv_texts);

struct AuditReport {
  std::size_t spaces_checked = 0;
  std::vector<std::string> violations;     // spaces above xi
  std::vector<std::string> inconsistencies;  // malformed transcript structure
  double max_bound = 0.0;
  bool ok() const { return violations.empty() && inconsistencies.empty(); }
};

// Checks that every space the passive party saw has an MI bound <= xi,
// and that the transcript is internally consistent.
AuditReport audit_transcript(const PartyTranscript& t, std::span<const int> labels,
                             int class_count, double xi);

}  // namespace treeleak

#endif  // TREELEAK_EXPERIMENT_H_
