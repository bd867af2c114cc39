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

// treeleak: run experiment grids, generate data, attack and audit dumps,
// and aggregate earlier runs.
//
// Exit codes: 0 success, 1 runtime failure, 2 usage or configuration error,
// 3 audit found a space above its threshold, 4 audit found a malformed
// transcript.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "treeleak/attack.h"
#include "treeleak/dataset.h"
#include "treeleak/experiment.h"
#include "treeleak/metrics.h"
#include "treeleak/serialize.h"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace treeleak;

namespace {

constexpr int kExitRuntime = 1;
constexpr int kExitUsage = 2;
constexpr int kExitViolation = 3;
constexpr int kExitMalformed = 4;

struct RunOptions {
  std::string config;
  std::string out_dir = "out";
  std::string defense;
  std::vector<double> epsilon;
  std::vector<double> xi;
  bool graft = false;
  std::string he_backend;
  std::optional<int> key_bits;
  bool dump_transcripts = false;
  bool emit_plotdata = false;
  std::vector<std::uint64_t> seeds;
  std::optional<int> threads;
};

int cmd_run(const RunOptions& o) {
  ExperimentConfig cfg;
  try {
    const fs::path path(o.config);
    cfg = ExperimentConfig::from_json(read_file(o.config), path.parent_path().string());
    if (!o.defense.empty()) {
      DefenseSpec d;
      try {
        d.kind = defense_from_string(o.defense);
      } catch (const Error& e) {
        throw ConfigError("--defense", e.what());
      }
      if (d.kind == DefenseKind::kGraftingLdp) {
        d.kind = DefenseKind::kLpMst;
        d.graft = true;
      }
      d.graft = d.graft || o.graft;
      if (d.kind == DefenseKind::kLpMst) {
        d.grid = o.epsilon.empty() ? std::vector<double>{0.1, 0.5, 1.0, 2.0} : o.epsilon;
      } else if (d.kind == DefenseKind::kIdLmid) {
        d.grid = o.xi.empty() ? std::vector<double>{0.1, 0.5, 1.0, 2.0} : o.xi;
      }
      cfg.defenses = {d};
    } else if (o.graft || !o.epsilon.empty() || !o.xi.empty()) {
      throw ConfigError("--defense", "--graft, --epsilon and --xi need --defense");
    }
    if (!o.he_backend.empty()) {
      try {
        cfg.protocol.he_backend = he_backend_from_string(o.he_backend);
      } catch (const Error& e) {
        throw ConfigError("--he-backend", e.what());
      }
      cfg.protocol.key_bits = o.key_bits.value_or(2048);
    } else if (o.key_bits) {
      cfg.protocol.key_bits = *o.key_bits;
    }
    if (o.dump_transcripts) cfg.dump_transcripts = true;
    if (o.emit_plotdata) cfg.emit_plotdata = true;
    if (!o.seeds.empty()) cfg.seeds = o.seeds;
    if (o.threads) cfg.threads = *o.threads;
    cfg.validate();
  } catch (const ConfigError& e) {
    std::cerr << "treeleak run: invalid config: " << e.what() << '\n';
    return kExitUsage;
  } catch (const Error& e) {
    std::cerr << "treeleak run: " << e.what() << '\n';
    return kExitUsage;
  }

  try {
    const ExperimentReport rep = run_experiment(cfg);
    write_reports(rep, o.out_dir);
    std::cout << summary_csv(rep.results, cfg);
    std::cerr << "treeleak run: " << rep.results.size() << " results in " << rep.seconds
              << " s, written to " << o.out_dir << '\n';
  } catch (const std::exception& e) {
    std::cerr << "treeleak run: " << e.what() << '\n';
    return kExitRuntime;
  }
  return 0;
}

struct GenOptions {
  int rows = 1000;
  int features = 20;
  int classes = 2;
  double spread = 0.1;
  int informative = -1;
  std::uint64_t seed = 0;
  std::string out;
  std::string label_column = "label";
};

int cmd_gen_data(const GenOptions& o) {
  try {
    const Dataset d = gen_synthetic(o.rows, o.features, o.classes, o.spread, o.seed, o.informative);
    write_csv(d, o.out, o.label_column);
  } catch (const InvalidArgumentError& e) {
    std::cerr << "treeleak gen-data: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "treeleak gen-data: " << e.what() << '\n';
    return kExitRuntime;
  }
  return 0;
}

struct AttackOptions {
  std::string dir;
  std::string transcript;
  std::string model;
  std::string data;
  std::string label_column = "label";
  std::vector<std::string> methods{"id2graph", "cl", "uni", "uni_cl"};
  std::optional<double> eta;
  double alpha = 3.0;
  bool chunked = false;
  int chunk = 1000;
  std::uint64_t seed = 0;
  std::string out;
};

int cmd_attack(const AttackOptions& o) {
  try {
    std::string transcript = o.transcript;
    std::string data = o.data;
    std::string model_path = o.model;
    std::optional<double> meta_eta;
    if (!o.dir.empty()) {
      const fs::path dir(o.dir);
      if (transcript.empty() && model_path.empty()) transcript = (dir / "party2.json").string();
      if (data.empty()) data = (dir / "attacker_data.csv").string();
      if (fs::exists(dir / "meta.json")) {
        const json meta = json::parse(read_file((dir / "meta.json").string()));
        if (meta.contains("eta")) meta_eta = meta["eta"].get<double>();
      }
    }
    if (data.empty() || (transcript.empty() == model_path.empty())) {
      std::cerr << "treeleak attack: give --dir, or --data with one of --transcript/--model\n";
      return kExitUsage;
    }
    const Dataset local = load_csv(data, o.label_column);
    AttackerView view;
    if (!model_path.empty()) {
      view = AttackerView::from_model(model_from_json(read_file(model_path)),
                                      static_cast<int>(local.rows()));
    } else {
      view = AttackerView::from_transcript(transcript_from_json(read_file(transcript)));
    }
    if (static_cast<std::size_t>(view.sample_count) != local.rows()) {
      throw MalformedInputError("attack: transcript covers " +
                                std::to_string(view.sample_count) + " samples, data has " +
                                std::to_string(local.rows()));
    }
    AttackParams params;
    params.eta = o.eta.value_or(meta_eta.value_or(1.0));
    params.alpha = o.alpha;
    params.chunked = o.chunked;
    params.chunk = o.chunk;
    json out = json::object();
    std::printf("method,v_measure,homogeneity,completeness,clusters\n");
    for (const auto& name : o.methods) {
      const AttackMethod m = attack_method_from_string(name);
      ClusterResult c;
      const int k = local.class_count;
      switch (m) {
        case AttackMethod::kId2Graph:
          c = attack_id2graph(view, local.features, k, params, o.seed);
          break;
        case AttackMethod::kCl: c = attack_cl(local.features, k, o.seed, params); break;
        case AttackMethod::kUni: c = attack_uni(view, params); break;
        case AttackMethod::kUniCl:
          c = attack_uni_cl(view, local.features, k, o.seed, params);
          break;
      }
      const VMeasure v = v_measure_scores(local.labels, c.labels);
      std::printf("%s,%.6f,%.6f,%.6f,%d\n", name.c_str(), v.v, v.homogeneity,
                  v.completeness, c.cluster_count);
      out[name] = {{"v_measure", v.v},
                   {"homogeneity", v.homogeneity},
                   {"completeness", v.completeness},
                   {"clusters", c.cluster_count},
                   {"labels", c.labels}};
    }
    if (!o.out.empty()) write_file_atomic(o.out, out.dump(1));
  } catch (const InvalidArgumentError& e) {
    std::cerr << "treeleak attack: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "treeleak attack: " << e.what() << '\n';
    return kExitRuntime;
  }
  return 0;
}

// Every directory under `root` (itself included) that holds a meta.json.
std::vector<fs::path> dump_dirs(const fs::path& root) {
  std::vector<fs::path> out;
  if (fs::exists(root / "meta.json")) out.push_back(root);
  if (fs::is_directory(root)) {
    for (const auto& e : fs::recursive_directory_iterator(root)) {
      if (e.is_regular_file() && e.path().filename() == "meta.json" &&
          e.path().parent_path() != root) {
        out.push_back(e.path().parent_path());
      }
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

int cmd_audit(const std::string& root, std::optional<double> xi_override, bool quiet) {
  try {
    const auto dirs = dump_dirs(root);
    if (dirs.empty()) {
      std::cerr << "treeleak audit: no transcript dumps under " << root << '\n';
      return kExitUsage;
    }
    std::size_t spaces = 0, violations = 0, malformed = 0;
    for (const auto& dir : dirs) {
      const json meta = json::parse(read_file((dir / "meta.json").string()));
      double xi = std::numeric_limits<double>::infinity();
      if (xi_override) {
        xi = *xi_override;
      } else if (meta.contains("xi") && !meta["xi"].is_null()) {
        xi = meta["xi"].get<double>();
      }
      const int class_count = meta.at("class_count").get<int>();
      const Dataset truth = load_csv((dir / "attacker_data.csv").string(), "label");
      // Dense ids were written as integers; recover them from the spelling.
      std::vector<int> labels(truth.labels.size());
      for (std::size_t i = 0; i < labels.size(); ++i) {
        labels[i] = std::stoi(truth.class_names.at(truth.labels[i]));
      }
      for (const auto& e : fs::directory_iterator(dir)) {
        const std::string name = e.path().filename().string();
        if (name.rfind("party", 0) != 0 || e.path().extension() != ".json") continue;
        PartyTranscript t;
        try {
          t = transcript_from_json(read_file(e.path().string()));
        } catch (const MalformedInputError& err) {
          ++malformed;
          std::printf("%s: malformed: %s\n", e.path().string().c_str(), err.what());
          continue;
        } catch (const json::exception& err) {
          ++malformed;
          std::printf("%s: malformed: %s\n", e.path().string().c_str(), err.what());
          continue;
        }
        const AuditReport r = audit_transcript(t, labels, class_count, xi);
        spaces += r.spaces_checked;
        violations += r.violations.size();
        malformed += r.inconsistencies.size();
        if (!quiet || !r.ok()) {
          std::printf("%s: %zu spaces, max bound %.6f, xi %s, %s\n", e.path().string().c_str(),
                      r.spaces_checked, r.max_bound,
                      std::isinf(xi) ? "inf" : std::to_string(xi).c_str(),
                      r.ok() ? "ok" : "FAILED");
        }
        for (const auto& v : r.violations) std::printf("  violation: %s\n", v.c_str());
        for (const auto& v : r.inconsistencies) std::printf("  malformed: %s\n", v.c_str());
      }
    }
    std::printf("audit: %zu dumps, %zu spaces, %zu violations, %zu malformed\n", dirs.size(),
                spaces, violations, malformed);
    if (violations > 0) return kExitViolation;
    if (malformed > 0) return kExitMalformed;
  } catch (const std::exception& e) {
    std::cerr << "treeleak audit: " << e.what() << '\n';
    return kExitRuntime;
  }
  return 0;
}

int cmd_report(const std::vector<std::string>& dirs, const std::string& out) {
  try {
    std::vector<std::string> texts;
    for (const auto& d : dirs) {
      fs::path p(d);
      if (fs::is_directory(p)) p /= "runs.csv";
      texts.push_back(read_file(p.string()));
    }
    const std::string summary = summary_from_runs(texts);
    if (out.empty()) {
      std::cout << summary;
    } else {
      write_file_atomic(out, summary);
    }
  } catch (const std::exception& e) {
    std::cerr << "treeleak report: " << e.what() << '\n';
    return kExitRuntime;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Label leakage simulator for tree-based vertical federated learning"};
  app.require_subcommand(1);

  RunOptions run;
  auto* run_cmd = app.add_subcommand("run", "Run an experiment grid from a JSON config");
  run_cmd->add_option("config", run.config, "Experiment config (JSON)")->required();
  run_cmd->add_option("--out-dir", run.out_dir, "Output directory")->capture_default_str();
  run_cmd->add_option("--defense", run.defense,
                      "Override the defenses: none, lp2st, grafting, id-lmid, reduced_leakage");
  run_cmd->add_option("--epsilon", run.epsilon, "Label DP budgets for lp2st");
  run_cmd->add_option("--xi", run.xi, "MI thresholds for id-lmid");
  run_cmd->add_flag("--graft", run.graft, "Also report the grafted lp2st model");
  run_cmd->add_option("--he-backend", run.he_backend, "mock or paillier");
  run_cmd->add_option("--key-bits", run.key_bits, "Paillier modulus size (default 2048)");
  run_cmd->add_flag("--dump-transcripts", run.dump_transcripts,
                    "Write transcripts under <out-dir>/transcripts");
  run_cmd->add_flag("--emit-plotdata", run.emit_plotdata,
                    "Write plot series under <out-dir>/plotdata");
  run_cmd->add_option("--seeds", run.seeds, "Override the seed list");
  run_cmd->add_option("--threads", run.threads, "Worker pool width");

  GenOptions gen;
  auto* gen_cmd = app.add_subcommand("gen-data", "Write a synthetic Gaussian-blob dataset");
  gen_cmd->add_option("--rows", gen.rows)->capture_default_str();
  gen_cmd->add_option("--features", gen.features)->capture_default_str();
  gen_cmd->add_option("--classes", gen.classes)->capture_default_str();
  gen_cmd->add_option("--spread", gen.spread)->capture_default_str();
  gen_cmd->add_option("--informative", gen.informative,
                      "Columns that separate the classes (default: all)");
  gen_cmd->add_option("--seed", gen.seed)->capture_default_str();
  gen_cmd->add_option("--label-column", gen.label_column)->capture_default_str();
  gen_cmd->add_option("-o,--out", gen.out, "Output CSV")->required();

  AttackOptions atk;
  auto* atk_cmd = app.add_subcommand("attack", "Run attacks against a transcript or model dump");
  atk_cmd->add_option("--dir", atk.dir, "Transcript dump directory written by run");
  atk_cmd->add_option("--transcript", atk.transcript, "Passive transcript JSON");
  atk_cmd->add_option("--model", atk.model, "Model JSON (every node visible)");
  atk_cmd->add_option("--data", atk.data, "Attacker features CSV with a ground-truth column");
  atk_cmd->add_option("--label-column", atk.label_column)->capture_default_str();
  atk_cmd->add_option("--methods", atk.methods)->delimiter(',')->capture_default_str();
  atk_cmd->add_option("--eta", atk.eta, "Tree weight decay (default from the dump, else 1)");
  atk_cmd->add_option("--alpha", atk.alpha)->capture_default_str();
  atk_cmd->add_flag("--chunked", atk.chunked, "Chunked adjacency for large leaves");
  atk_cmd->add_option("--chunk", atk.chunk)->capture_default_str();
  atk_cmd->add_option("--seed", atk.seed)->capture_default_str();
  atk_cmd->add_option("-o,--out", atk.out, "Write results as JSON");

  std::string audit_root;
  std::optional<double> audit_xi;
  bool audit_quiet = false;
  auto* audit_cmd = app.add_subcommand("audit", "Check dumped transcripts against their threshold");
  audit_cmd->add_option("path", audit_root, "Run directory or a single dump")->required();
  audit_cmd->add_option("--xi", audit_xi, "Threshold to check instead of the recorded one");
  audit_cmd->add_flag("-q,--quiet", audit_quiet, "Only print failing transcripts");

  std::vector<std::string> report_dirs;
  std::string report_out;
  auto* report_cmd = app.add_subcommand("report", "Aggregate runs.csv of earlier runs");
  report_cmd->add_option("runs", report_dirs, "Run directories or runs.csv files")->required();
  report_cmd->add_option("-o,--out", report_out, "Write the summary here instead of stdout");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitUsage;
  }

  if (*run_cmd) return cmd_run(run);
  if (*gen_cmd) return cmd_gen_data(gen);
  if (*atk_cmd) return cmd_attack(atk);
  if (*audit_cmd) return cmd_audit(audit_root, audit_xi, audit_quiet);
  if (*report_cmd) return cmd_report(report_dirs, report_out);
  return kExitUsage;
}
