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

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <string>

#include <gtest/gtest.h>

#include "treeleak/common.h"
#include "treeleak/experiment.h"
#include "treeleak/serialize.h"

namespace treeleak {
namespace {

const char* kSmall = R"({
  "name": "small",
  "dataset": {"synthetic": {"rows": 240, "features": 6, "classes": 3, "spread": 0.15, "seed": 4}},
  "model": {"kind": "random_forest", "max_depth": 3, "tree_count": 2},
  "defenses": [{"kind": "none"}, {"kind": "id_lmid", "xi": [0.3]}, {"kind": "lp_mst", "epsilon": [1.0], "graft": true}],
  "seeds": [0, 1],
  "threads": 1
})";

std::string config_error_path(const std::string& text) {
  try {
    ExperimentConfig::from_json(text);
  } catch (const ConfigError& e) {
    return e.path();
  }
  return "<accepted>";
}

TEST(Config, ParsesDefaultsAndGrid) {
  const auto cfg = ExperimentConfig::from_json(kSmall);
  EXPECT_EQ(cfg.name, "small");
  EXPECT_EQ(cfg.dataset.name, "synthetic");
  EXPECT_EQ(cfg.protocol.max_depth, 3);
  EXPECT_EQ(cfg.attacks.size(), 4u);
  EXPECT_EQ(cfg.effective_eta(), 1.0);
  const auto grid = expand_grid(cfg);
  ASSERT_EQ(grid.size(), 6u);
  EXPECT_TRUE(std::isnan(grid[0].param));
  for (std::size_t i = 0; i < grid.size(); ++i) EXPECT_EQ(grid[i].index, i);
  const auto lp = ExperimentConfig::from_json(
      R"({"dataset": {"synthetic": {}}, "defenses": [{"kind": "lp_mst"}], "model": {"kind": "xgboost"}})");
  EXPECT_EQ(lp.defenses[0].grid, (std::vector<double>{0.1, 0.5, 1.0, 2.0}));
  EXPECT_EQ(lp.effective_eta(), 0.6);
}

TEST(Config, ErrorsNameTheOffendingPath) {
  EXPECT_EQ(config_error_path("{"), "$");
  EXPECT_EQ(config_error_path(R"({"dataset": {"synthetic": {}}, "bogus": 1})"), "$.bogus");
  EXPECT_EQ(config_error_path(R"({})"), "$.dataset");
  EXPECT_EQ(config_error_path(R"({"dataset": {"synthetic": {"rows": "x"}}})"),
            "$.dataset.synthetic.rows");
  EXPECT_EQ(config_error_path(R"({"dataset": {"synthetic": {}}, "seeds": [1, 1]})"), "$.seeds");
  EXPECT_EQ(config_error_path(R"({"dataset": {"synthetic": {}}, "defenses": [{"kind": "id_lmid", "epsilon": [1]}]})"),
            "$.defenses[0].epsilon");
  EXPECT_EQ(config_error_path(R"({"dataset": {"synthetic": {}}, "defenses": [{"kind": "none", "graft": true}]})"),
            "$.defenses[0].graft");
  EXPECT_EQ(config_error_path(R"({"dataset": {"synthetic": {}}, "attack": {"methods": ["cl", "nope"]}})"),
            "$.attack.methods[1]");
  EXPECT_EQ(config_error_path(R"({"dataset": {"synthetic": {}}, "attack": {"eta": 0}})"), "$.attack.eta");
  EXPECT_EQ(config_error_path(R"({"dataset": {"synthetic": {}}, "he": {"backend": "paillier", "key_bits": 300}})"),
            "$.he.key_bits");
  EXPECT_EQ(config_error_path(R"({"dataset": {"synthetic": {}}, "sweep": {"axis": "width", "values": [1]}})"),
            "$.sweep.axis");
  EXPECT_EQ(config_error_path(R"({"dataset": {"csv": "a.csv", "synthetic": {}}})"), "$.dataset");
}

TEST(Experiment, RunsAreDeterministicAcrossThreadCounts) {
  auto cfg = ExperimentConfig::from_json(kSmall);
  const auto one = run_experiment(cfg);
  cfg.threads = 3;
  const auto three = run_experiment(cfg);
  // none + id_lmid + lp_mst + grafting, two seeds each.
  ASSERT_EQ(one.results.size(), 8u);
  EXPECT_EQ(runs_csv(one.results, cfg), runs_csv(three.results, cfg));
  EXPECT_EQ(summary_csv(one.results, cfg), summary_csv(three.results, cfg));
  for (const auto& r : one.results) {
    EXPECT_EQ(r.attacks.size(), 4u);
    EXPECT_GE(r.auc, 0.0);
    EXPECT_LE(r.auc, 1.0);
    ASSERT_NE(r.attack(AttackMethod::kId2Graph), nullptr);
    if (r.defense_label == "grafting_ldp") {
      EXPECT_TRUE(r.graft.has_value());
    }
    if (r.defense_label == "none") EXPECT_EQ(r.comm_rate, 1.0);
  }
}

TEST(Experiment, SummaryIsRecomputableFromRuns) {
  const auto cfg = ExperimentConfig::from_json(kSmall);
  const auto rep = run_experiment(cfg);
  const std::string runs = runs_csv(rep.results, cfg);
  EXPECT_EQ(summary_from_runs({runs}), summary_csv(rep.results, cfg));
  EXPECT_THROW(summary_from_runs({"dataset,model\nx,y\n"}), MalformedInputError);
}

TEST(Experiment, AuditAcceptsDefendedTranscriptsAndFlagsPlainOnes) {
  const auto cfg = ExperimentConfig::from_json(kSmall);
  const Dataset data = load_dataset(cfg.dataset);
  const auto grid = expand_grid(cfg);
  const auto plain = run_cell(cfg, data, grid[0]);
  const auto defended = run_cell(cfg, data, grid[2]);
  ASSERT_EQ(defended.front().defense_label, "id_lmid");
  const auto& dt = defended.front().train.transcripts.front();
  const auto ok = audit_transcript(dt, defended.front().clean_labels, 3, 0.3);
  EXPECT_TRUE(ok.ok()) << (ok.violations.empty() ? "" : ok.violations.front());
  EXPECT_LE(ok.max_bound, 0.3 + 1e-9);
  const auto& pt = plain.front().train.transcripts.front();
  const auto strict = audit_transcript(pt, plain.front().clean_labels, 3, 0.0);
  EXPECT_TRUE(strict.inconsistencies.empty());
  EXPECT_FALSE(strict.violations.empty());
  // Structural damage is reported separately from privacy violations.
  PartyTranscript broken = pt;
  auto bc = std::find_if(broken.events.begin(), broken.events.end(),
                         [](const TranscriptEvent& e) { return e.kind == EventKind::kBroadcast; });
  ASSERT_NE(bc, broken.events.end());
  bc->space = {5, 1};
  EXPECT_FALSE(audit_transcript(broken, plain.front().clean_labels, 3, 10.0).inconsistencies.empty());
  EXPECT_FALSE(audit_transcript(pt, std::vector<int>{0, 1}, 3, 10.0).ok());
}

TEST(Experiment, WritesReports) {
  auto cfg = ExperimentConfig::from_json(kSmall);
  cfg.seeds = {3};
  cfg.dump_transcripts = true;
  cfg.emit_plotdata = true;
  const auto rep = run_experiment(cfg);
  const auto dir = std::filesystem::temp_directory_path() / "treeleak_test_reports";
  std::filesystem::remove_all(dir);
  write_reports(rep, dir.string());
  EXPECT_TRUE(std::filesystem::exists(dir / "runs.csv"));
  EXPECT_TRUE(std::filesystem::exists(dir / "summary.csv"));
  EXPECT_TRUE(std::filesystem::exists(dir / "report.json"));
  EXPECT_TRUE(std::filesystem::exists(dir / "plotdata" / "tradeoff_auc.csv"));
  int dumps = 0;
  for (const auto& e : std::filesystem::directory_iterator(dir / "transcripts")) {
    ++dumps;
    EXPECT_TRUE(std::filesystem::exists(e.path() / "party2.json"));
    EXPECT_TRUE(std::filesystem::exists(e.path() / "meta.json"));
    const auto t = transcript_from_json(read_file((e.path() / "party2.json").string()));
    EXPECT_GT(t.sample_count, 0);
  }
  EXPECT_EQ(dumps, 4);
  EXPECT_EQ(read_file((dir / "runs.csv").string()), runs_csv(rep.results, cfg));
  std::filesystem::remove_all(dir);
}

}  // namespace
}  // namespace treeleak
