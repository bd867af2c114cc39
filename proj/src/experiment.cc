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

#include "treeleak/experiment.h"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <map>
#include <mutex>
#include <set>
#include <sstream>
#include <thread>

#include "json.hpp"
#include "treeleak/idlmid.h"
#include "treeleak/serialize.h"

namespace treeleak {

using nlohmann::json;

std::string to_string(SweepAxis a) {
  switch (a) {
    case SweepAxis::kNone: return "none";
    case SweepAxis::kMaxDepth: return "max_depth";
    case SweepAxis::kTreeCount: return "tree_count";
    case SweepAxis::kKPercent: return "k_percent";
  }
  return "none";
}

// ---------------------------------------------------------------------------
// Config parsing

namespace {

class Reader {
 public:
  Reader(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) throw ConfigError(path_, "expected an object");
  }

  void allow(std::initializer_list<const char*> keys) const {
    std::set<std::string> ok(keys.begin(), keys.end());
    for (auto it = j_.begin(); it != j_.end(); ++it) {
      if (!ok.count(it.key())) throw ConfigError(sub(it.key()), "unknown key");
    }
  }

  bool has(const char* key) const { return j_.contains(key) && !j_.at(key).is_null(); }
  std::string sub(const std::string& key) const { return path_ + "." + key; }
  const json& at(const char* key) const { return j_.at(key); }

  template <typename T>
  T get(const char* key, T fallback) const {
    if (!has(key)) return fallback;
    return as<T>(j_.at(key), sub(key));
  }

  template <typename T>
  static T as(const json& v, const std::string& path) {
    if constexpr (std::is_same_v<T, bool>) {
      if (!v.is_boolean()) throw ConfigError(path, "expected a boolean");
    } else if constexpr (std::is_same_v<T, std::string>) {
      if (!v.is_string()) throw ConfigError(path, "expected a string");
    } else if constexpr (std::is_integral_v<T>) {
      if (!v.is_number_integer()) throw ConfigError(path, "expected an integer");
      if constexpr (std::is_unsigned_v<T>) {
        if (v.is_number_integer() && !v.is_number_unsigned() && v.get<long long>() < 0) {
          throw ConfigError(path, "expected a non-negative integer");
        }
      }
    } else if constexpr (std::is_floating_point_v<T>) {
      if (!v.is_number()) throw ConfigError(path, "expected a number");
    }
    return v.get<T>();
  }

  template <typename T>
  std::vector<T> list(const char* key, std::vector<T> fallback) const {
    if (!has(key)) return fallback;
    const json& v = j_.at(key);
    const std::string p = sub(key);
    if (v.is_number()) return {as<T>(v, p)};
    if (!v.is_array()) throw ConfigError(p, "expected an array");
    std::vector<T> out;
    for (std::size_t i = 0; i < v.size(); ++i) {
      out.push_back(as<T>(v[i], p + "[" + std::to_string(i) + "]"));
    }
    return out;
  }

 private:
  const json& j_;
  std::string path_;
};

template <typename F>
auto converting(const std::string& path, F&& f) {
  try {
    return f();
  } catch (const ConfigError&) {
    throw;
  } catch (const Error& e) {
    throw ConfigError(path, e.what());
  }
}

DefenseSpec parse_defense(const json& j, const std::string& path) {
  Reader r(j, path);
  r.allow({"kind", "epsilon", "xi", "stages", "graft"});
  DefenseSpec d;
  if (!r.has("kind")) throw ConfigError(r.sub("kind"), "required");
  d.kind = converting(r.sub("kind"),
                      [&] { return defense_from_string(r.get<std::string>("kind", "")); });
  d.stages = r.get<int>("stages", 2);
  d.graft = r.get<bool>("graft", false);
  const bool noising = d.kind == DefenseKind::kLpMst || d.kind == DefenseKind::kGraftingLdp;
  if (noising) {
    if (r.has("xi")) throw ConfigError(r.sub("xi"), "not used by this defense");
    d.grid = r.list<double>("epsilon", {0.1, 0.5, 1.0, 2.0});
  } else if (d.kind == DefenseKind::kIdLmid) {
    if (r.has("epsilon")) throw ConfigError(r.sub("epsilon"), "not used by this defense");
    d.grid = r.list<double>("xi", {0.1, 0.5, 1.0, 2.0});
  } else {
    if (r.has("epsilon")) throw ConfigError(r.sub("epsilon"), "not used by this defense");
    if (r.has("xi")) throw ConfigError(r.sub("xi"), "not used by this defense");
  }
  if (d.graft && d.kind != DefenseKind::kLpMst) {
    throw ConfigError(r.sub("graft"), "only valid with lp_mst");
  }
  return d;
}

}  // namespace

ExperimentConfig ExperimentConfig::from_json(const std::string& text,
                                             const std::string& base_dir) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError("$", std::string("invalid JSON: ") + e.what());
  }
  ExperimentConfig cfg;
  Reader r(root, "$");
  r.allow({"name", "dataset", "partition", "model", "attack", "defenses", "sweep", "seeds",
           "threads", "dump_transcripts", "emit_plotdata", "he"});
  cfg.name = r.get<std::string>("name", cfg.name);

  if (!r.has("dataset")) throw ConfigError("$.dataset", "required");
  {
    Reader d(r.at("dataset"), "$.dataset");
    d.allow({"name", "csv", "label_column", "classes", "synthetic", "subsample",
             "test_fraction"});
    cfg.dataset.name = d.get<std::string>("name", "");
    cfg.dataset.label_column = d.get<std::string>("label_column", "label");
    if (d.has("classes")) cfg.dataset.class_count = d.get<int>("classes", 0);
    cfg.dataset.subsample = d.get<std::size_t>("subsample", 0);
    cfg.dataset.test_fraction = d.get<double>("test_fraction", 0.2);
    if (d.has("csv") == d.has("synthetic")) {
      throw ConfigError("$.dataset", "exactly one of 'csv' or 'synthetic' is required");
    }
    if (d.has("csv")) {
      std::filesystem::path p = d.get<std::string>("csv", "");
      if (p.is_relative() && !std::filesystem::exists(p)) p = std::filesystem::path(base_dir) / p;
      cfg.dataset.csv = p.string();
      if (cfg.dataset.name.empty()) cfg.dataset.name = p.stem().string();
    } else {
      Reader s(d.at("synthetic"), "$.dataset.synthetic");
      s.allow({"rows", "features", "classes", "spread", "informative", "seed"});
      SyntheticSpec sp;
      sp.rows = s.get<int>("rows", sp.rows);
      sp.features = s.get<int>("features", sp.features);
      sp.classes = s.get<int>("classes", sp.classes);
      sp.spread = s.get<double>("spread", sp.spread);
      sp.informative = s.get<int>("informative", sp.informative);
      sp.seed = s.get<std::uint64_t>("seed", sp.seed);
      cfg.dataset.synthetic = sp;
      if (cfg.dataset.name.empty()) cfg.dataset.name = "synthetic";
    }
  }

  if (r.has("partition")) {
    Reader p(r.at("partition"), "$.partition");
    p.allow({"mode", "k_percent", "sets"});
    const std::string mode = p.get<std::string>("mode", "random_half");
    if (mode == "random_half") {
      cfg.partition.mode = PartitionMode::kRandomHalf;
    } else if (mode == "top_k_percentile") {
      cfg.partition.mode = PartitionMode::kTopKPercentileToAttacker;
    } else if (mode == "explicit") {
      cfg.partition.mode = PartitionMode::kExplicit;
      if (!p.has("sets") || !p.at("sets").is_array()) {
        throw ConfigError(p.sub("sets"), "explicit mode needs an array of feature lists");
      }
      const json& sets = p.at("sets");
      for (std::size_t i = 0; i < sets.size(); ++i) {
        const std::string path = p.sub("sets") + "[" + std::to_string(i) + "]";
        if (!sets[i].is_array()) throw ConfigError(path, "expected an array");
        std::vector<int> fs;
        for (std::size_t k = 0; k < sets[i].size(); ++k) {
          fs.push_back(Reader::as<int>(sets[i][k], path + "[" + std::to_string(k) + "]"));
        }
        cfg.partition.explicit_sets.push_back(std::move(fs));
      }
    } else {
      throw ConfigError(p.sub("mode"), "unknown partition mode '" + mode + "'");
    }
    cfg.partition.k_percent = p.get<int>("k_percent", 50);
  }

  if (r.has("model")) {
    Reader m(r.at("model"), "$.model");
    m.allow({"kind", "max_depth", "tree_count", "feature_subsample", "percentile_count",
             "min_samples_split", "lambda", "gamma", "learning_rate"});
    auto& p = cfg.protocol;
    p.model = converting(m.sub("kind"), [&] {
      return model_kind_from_string(m.get<std::string>("kind", "random_forest"));
    });
    p.max_depth = m.get<int>("max_depth", p.max_depth);
    p.tree_count = m.get<int>("tree_count", p.tree_count);
    p.feature_subsample = m.get<double>("feature_subsample", p.feature_subsample);
    p.percentile_count = m.get<int>("percentile_count", p.percentile_count);
    p.min_samples_split = m.get<int>("min_samples_split", p.min_samples_split);
    p.booster.lambda_reg = m.get<double>("lambda", p.booster.lambda_reg);
    p.booster.gamma_reg = m.get<double>("gamma", p.booster.gamma_reg);
    p.booster.learning_rate = m.get<double>("learning_rate", p.booster.learning_rate);
  }

  if (r.has("he")) {
    Reader h(r.at("he"), "$.he");
    h.allow({"backend", "key_bits"});
    cfg.protocol.he_backend = converting(h.sub("backend"), [&] {
      return he_backend_from_string(h.get<std::string>("backend", "mock"));
    });
    cfg.protocol.key_bits = h.get<int>("key_bits", cfg.protocol.key_bits);
  }

  if (r.has("attack")) {
    Reader a(r.at("attack"), "$.attack");
    a.allow({"methods", "eta", "alpha", "chunked", "chunk", "inter_weight",
             "louvain_max_iter", "louvain_tol", "kmeans_max_iter", "kmeans_tol",
             "uni_all_nodes"});
    if (a.has("methods")) {
      cfg.attacks.clear();
      const auto names = a.list<std::string>("methods", {});
      for (std::size_t i = 0; i < names.size(); ++i) {
        cfg.attacks.push_back(converting(a.sub("methods") + "[" + std::to_string(i) + "]",
                                         [&] { return attack_method_from_string(names[i]); }));
      }
    }
    if (a.has("eta")) cfg.eta = a.get<double>("eta", 1.0);
    auto& p = cfg.attack;
    p.alpha = a.get<double>("alpha", p.alpha);
    p.chunked = a.get<bool>("chunked", p.chunked);
    p.chunk = a.get<int>("chunk", p.chunk);
    p.inter_weight = a.get<double>("inter_weight", p.inter_weight);
    p.louvain_max_iter = a.get<int>("louvain_max_iter", p.louvain_max_iter);
    p.louvain_tol = a.get<double>("louvain_tol", p.louvain_tol);
    p.kmeans_max_iter = a.get<int>("kmeans_max_iter", p.kmeans_max_iter);
    p.kmeans_tol = a.get<double>("kmeans_tol", p.kmeans_tol);
    p.uni_all_nodes = a.get<bool>("uni_all_nodes", p.uni_all_nodes);
  }

  if (r.has("defenses")) {
    const json& ds = r.at("defenses");
    if (!ds.is_array()) throw ConfigError("$.defenses", "expected an array");
    cfg.defenses.clear();
    for (std::size_t i = 0; i < ds.size(); ++i) {
      cfg.defenses.push_back(parse_defense(ds[i], "$.defenses[" + std::to_string(i) + "]"));
    }
  }

  if (r.has("sweep")) {
    Reader s(r.at("sweep"), "$.sweep");
    s.allow({"axis", "values"});
    const std::string axis = s.get<std::string>("axis", "");
    if (axis == "max_depth") cfg.sweep_axis = SweepAxis::kMaxDepth;
    else if (axis == "tree_count") cfg.sweep_axis = SweepAxis::kTreeCount;
    else if (axis == "k_percent") cfg.sweep_axis = SweepAxis::kKPercent;
    else throw ConfigError(s.sub("axis"), "expected max_depth, tree_count or k_percent");
    cfg.sweep_values = s.list<int>("values", {});
  }

  cfg.seeds = r.list<std::uint64_t>("seeds", cfg.seeds);
  cfg.threads = r.get<int>("threads", 0);
  cfg.dump_transcripts = r.get<bool>("dump_transcripts", false);
  cfg.emit_plotdata = r.get<bool>("emit_plotdata", false);
  cfg.validate();
  return cfg;
}

void ExperimentConfig::validate() const {
  if (seeds.empty()) throw ConfigError("$.seeds", "must not be empty");
  std::set<std::uint64_t> distinct(seeds.begin(), seeds.end());
  if (distinct.size() != seeds.size()) throw ConfigError("$.seeds", "seeds must be distinct");
  if (defenses.empty()) throw ConfigError("$.defenses", "must not be empty");
  for (std::size_t i = 0; i < defenses.size(); ++i) {
    const auto& d = defenses[i];
    const std::string p = "$.defenses[" + std::to_string(i) + "]";
    const bool noising = d.kind == DefenseKind::kLpMst || d.kind == DefenseKind::kGraftingLdp;
    if ((noising || d.kind == DefenseKind::kIdLmid) && d.grid.empty()) {
      throw ConfigError(p, "parameter grid must not be empty");
    }
    for (double v : d.grid) {
      if (noising && !(v > 0.0)) throw ConfigError(p + ".epsilon", "values must be > 0");
      if (d.kind == DefenseKind::kIdLmid && !(v >= 0.0)) {
        throw ConfigError(p + ".xi", "values must be >= 0");
      }
    }
    if (d.stages != 1 && d.stages != 2) throw ConfigError(p + ".stages", "must be 1 or 2");
  }
  if (attacks.empty()) throw ConfigError("$.attack.methods", "must not be empty");
  if (sweep_axis != SweepAxis::kNone && sweep_values.empty()) {
    throw ConfigError("$.sweep.values", "must not be empty");
  }
  if (!(dataset.test_fraction > 0.0 && dataset.test_fraction < 1.0)) {
    throw ConfigError("$.dataset.test_fraction", "must be in (0, 1)");
  }
  if (dataset.synthetic) {
    const auto& s = *dataset.synthetic;
    if (s.rows < 2) throw ConfigError("$.dataset.synthetic.rows", "must be >= 2");
    if (s.features < 2) throw ConfigError("$.dataset.synthetic.features", "must be >= 2");
    if (s.classes < 2) throw ConfigError("$.dataset.synthetic.classes", "must be >= 2");
    if (!(s.spread >= 0.0)) throw ConfigError("$.dataset.synthetic.spread", "must be >= 0");
    if (s.informative == 0 || s.informative > s.features) {
      throw ConfigError("$.dataset.synthetic.informative", "must be in [1, features]");
    }
  }
  if (partition.k_percent < 0 || partition.k_percent > 100) {
    throw ConfigError("$.partition.k_percent", "must be in [0, 100]");
  }
  converting("$.model", [&] {
    protocol.validate();
    return 0;
  });
  if (protocol.he_backend == HeBackendKind::kPaillier && protocol.key_bits != 512 &&
      protocol.key_bits != 1024 && protocol.key_bits != 2048) {
    throw ConfigError("$.he.key_bits", "must be 512, 1024 or 2048");
  }
  if (eta && !(*eta > 0.0 && *eta <= 1.0)) throw ConfigError("$.attack.eta", "must be in (0, 1]");
  if (!(attack.alpha >= 0.0)) throw ConfigError("$.attack.alpha", "must be >= 0");
  if (attack.chunk < 2) throw ConfigError("$.attack.chunk", "must be >= 2");
  if (!(attack.inter_weight > 0.0)) throw ConfigError("$.attack.inter_weight", "must be > 0");
  if (threads < 0) throw ConfigError("$.threads", "must be >= 0");
}

double ExperimentConfig::effective_eta() const {
  if (eta) return *eta;
  return protocol.model == ModelKind::kXGBoost ? 0.6 : 1.0;
}

std::vector<CellSpec> expand_grid(const ExperimentConfig& cfg) {
  std::vector<CellSpec> cells;
  const std::vector<int> sweep =
      cfg.sweep_axis == SweepAxis::kNone ? std::vector<int>{0} : cfg.sweep_values;
  for (std::size_t d = 0; d < cfg.defenses.size(); ++d) {
    const auto& def = cfg.defenses[d];
    const std::vector<double> grid =
        def.grid.empty() ? std::vector<double>{std::nan("")} : def.grid;
    for (double p : grid) {
      for (int s : sweep) {
        for (std::uint64_t seed : cfg.seeds) {
          CellSpec c;
          c.defense_index = d;
          c.defense = def.kind;
          c.param = p;
          c.sweep_value = s;
          c.seed = seed;
          c.index = cells.size();
          cells.push_back(c);
        }
      }
    }
  }
  return cells;
}

const AttackOutcome* CellResult::attack(AttackMethod m) const {
  for (const auto& a : attacks) {
    if (a.method == m) return &a;
  }
  return nullptr;
}

Dataset load_dataset(const DatasetSpec& spec) {
  Dataset d;
  if (spec.synthetic) {
    const auto& s = *spec.synthetic;
    d = gen_synthetic(s.rows, s.features, s.classes, s.spread, s.seed, s.informative);
  } else {
    d = load_csv(spec.csv, spec.label_column, spec.class_count);
  }
  if (spec.subsample > 0 && spec.subsample < d.rows()) {
    d = subsample_rows(d, spec.subsample, derive_seed(0, "dataset-subsample"));
  }
  return d;
}

// ---------------------------------------------------------------------------
// Cells

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

struct BaselineCache {
  std::mutex mu;
  std::map<std::pair<std::uint64_t, int>, CommStats> stats;
};

ExperimentConfig apply_sweep(const ExperimentConfig& cfg, int value) {
  ExperimentConfig c = cfg;
  switch (cfg.sweep_axis) {
    case SweepAxis::kNone: break;
    case SweepAxis::kMaxDepth: c.protocol.max_depth = value; break;
    case SweepAxis::kTreeCount: c.protocol.tree_count = value; break;
    case SweepAxis::kKPercent:
      c.partition.mode = PartitionMode::kTopKPercentileToAttacker;
      c.partition.k_percent = value;
      break;
  }
  return c;
}

std::vector<AttackOutcome> run_attacks(const ExperimentConfig& cfg,
                                       const PartyTranscript& transcript,
                                       const Matrix& local, int class_count,
                                       std::span<const int> truth, std::uint64_t seed) {
  AttackParams params = cfg.attack;
  params.eta = cfg.effective_eta();
  const AttackerView view = AttackerView::from_transcript(transcript);
  const std::uint64_t s = derive_seed(seed, "attack");
  std::vector<AttackOutcome> out;
  for (AttackMethod m : cfg.attacks) {
    ClusterResult c;
    switch (m) {
      case AttackMethod::kId2Graph: c = attack_id2graph(view, local, class_count, params, s); break;
      case AttackMethod::kCl: c = attack_cl(local, class_count, s, params); break;
      case AttackMethod::kUni: c = attack_uni(view, params); break;
      case AttackMethod::kUniCl: c = attack_uni_cl(view, local, class_count, s, params); break;
    }
    AttackOutcome o;
    o.method = m;
    o.score = v_measure_scores(truth, c.labels);
    o.clusters = c.cluster_count;
    o.iterations = c.iterations;
    o.modularity = c.modularity;
    o.communities = c.communities;
    o.labels = std::move(c.labels);
    out.push_back(std::move(o));
  }
  return out;
}

std::vector<CellResult> run_cell_impl(const ExperimentConfig& base, const Dataset& data,
                                      const CellSpec& cell, BaselineCache* cache) {
  const ExperimentConfig cfg = apply_sweep(base, cell.sweep_value);
  const DefenseSpec& def = cfg.defenses.at(cell.defense_index);
  auto [train, test] = train_test_split(data, cfg.dataset.test_fraction,
                                        derive_seed(cell.seed, "split"));
  PartitionSpec pspec = cfg.partition;
  pspec.seed = derive_seed(cell.seed, "partition");
  const std::vector<VerticalView> views = make_partition(train, pspec);
  const VerticalView* active = nullptr;
  const VerticalView* passive = nullptr;
  for (const auto& v : views) {
    if (v.party_id == 1) active = &v;
    else if (!passive) passive = &v;
  }
  if (!active || !passive) throw InvalidArgumentError("partition needs an active and a passive party");

  ProtocolConfig proto = cfg.protocol;
  proto.seed = derive_seed(cell.seed, "tree");
  proto.defense = cell.defense == DefenseKind::kGraftingLdp ? DefenseKind::kNone : cell.defense;
  if (cell.defense == DefenseKind::kLpMst) proto.defense = DefenseKind::kNone;
  if (cell.defense == DefenseKind::kIdLmid) proto.xi = cell.param;

  std::vector<std::string> warnings = train.warnings;
  const auto t0 = Clock::now();
  std::optional<NoisyLabels> noisy;
  if (cell.defense == DefenseKind::kLpMst || cell.defense == DefenseKind::kGraftingLdp) {
    const int stages = active->feature_indices.empty() ? 1 : def.stages;
    noisy = lp_mst(train, cell.param, stages,
                   active_forest_trainer(active->feature_indices,
                                         derive_seed(cell.seed, "interim")),
                   derive_seed(cell.seed, "noise"));
    for (const auto& w : noisy->warnings) warnings.push_back(w);
  }
  TrainResult trained = train_federated(
      proto, train, views,
      noisy ? std::optional<std::vector<int>>(noisy->noised) : std::nullopt);
  const double train_seconds = seconds_since(t0);

  CommStats baseline = trained.comm;
  if (cell.defense != DefenseKind::kNone) {
    const auto key = std::make_pair(cell.seed, cell.sweep_value);
    bool found = false;
    if (cache) {
      std::lock_guard<std::mutex> lock(cache->mu);
      if (auto it = cache->stats.find(key); it != cache->stats.end()) {
        baseline = it->second;
        found = true;
      }
    }
    if (!found) {
      ProtocolConfig plain = proto;
      plain.defense = DefenseKind::kNone;
      plain.xi = std::numeric_limits<double>::infinity();
      baseline = train_federated(plain, train, views).comm;
      if (cache) {
        std::lock_guard<std::mutex> lock(cache->mu);
        cache->stats.emplace(key, baseline);
      }
    }
  }

  const Matrix local = train.features.select_cols(passive->feature_indices);
  const auto t1 = Clock::now();
  const PartyTranscript empty{passive->party_id, static_cast<int>(train.rows()), {}, 0};
  const PartyTranscript& transcript =
      trained.transcripts.empty() ? empty : trained.transcripts.front();
  std::vector<AttackOutcome> attacks =
      run_attacks(cfg, transcript, local, train.class_count, train.labels, cell.seed);
  const double attack_seconds = seconds_since(t1);

  auto make = [&](const std::string& label, const TreeModel& model) {
    CellResult r;
    r.spec = cell;
    r.defense_label = label;
    r.auc = auc(test.labels, predict_matrix(model, test.features));
    r.clean_train_accuracy = accuracy(model, train.features, train.labels);
    r.comm = trained.comm;
    r.baseline = baseline;
    r.comm_rate = comm_rate(trained.comm, baseline);
    r.attacks = attacks;
    r.train_seconds = train_seconds;
    r.attack_seconds = attack_seconds;
    r.warnings = warnings;
    r.clean_labels = train.labels;
    r.passive_features = passive->feature_indices;
    r.passive_local = local;
    return r;
  };

  std::vector<CellResult> out;
  const bool graft = cell.defense == DefenseKind::kGraftingLdp ||
                     (cell.defense == DefenseKind::kLpMst && def.graft);
  if (cell.defense != DefenseKind::kGraftingLdp) {
    out.push_back(make(to_string(cell.defense), trained.model));
  }
  if (graft) {
    const auto t2 = Clock::now();
    GraftResult g = grafting(trained.model, train, train.labels, noisy->noised, *active,
                             GraftOptions{proto.percentile_count, proto.min_samples_split});
    CellResult r = make("grafting_ldp", g.repaired);
    r.train_seconds += seconds_since(t2);
    r.graft = std::move(g.report);
    r.train = trained;
    out.push_back(std::move(r));
  }
  out.front().train = std::move(trained);
  return out;
}

}  // namespace

std::vector<CellResult> run_cell(const ExperimentConfig& cfg, const Dataset& data,
                                 const CellSpec& cell) {
  return run_cell_impl(cfg, data, cell, nullptr);
}

namespace {

std::string fmt(double v) {
  if (std::isnan(v)) return "-";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

std::string param_str(const CellSpec& c) { return fmt(c.param); }

std::string sweep_str(const ExperimentConfig& cfg, const CellSpec& c) {
  if (cfg.sweep_axis == SweepAxis::kNone) return "-";
  return to_string(cfg.sweep_axis) + "=" + std::to_string(c.sweep_value);
}

std::string cell_key(const ExperimentConfig& cfg, const CellResult& r) {
  std::string k = r.defense_label + "_" + param_str(r.spec);
  if (cfg.sweep_axis != SweepAxis::kNone) k += "_" + std::to_string(r.spec.sweep_value);
  k += "_seed" + std::to_string(r.spec.seed);
  return k;
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      out.push_back(cur);
      cur.clear();
    } else if (c != '\r') {
      cur += c;
    }
  }
  out.push_back(cur);
  return out;
}

const char* kRunsHeader =
    "dataset,model,defense,param,sweep,seed,method,v_measure,homogeneity,completeness,"
    "clusters,communities,modularity,auc,clean_train_accuracy,ciphertexts,"
    "baseline_ciphertexts,comm_rate,broadcasts,admissible_disclosures\n";

}  // namespace

std::string runs_csv(const std::vector<CellResult>& results, const ExperimentConfig& cfg) {
  std::ostringstream os;
  os << kRunsHeader;
  for (const auto& r : results) {
    for (const auto& a : r.attacks) {
      os << cfg.dataset.name << ',' << to_string(cfg.protocol.model) << ','
         << r.defense_label << ',' << param_str(r.spec) << ',' << sweep_str(cfg, r.spec)
         << ',' << r.spec.seed << ',' << to_string(a.method) << ',' << fmt(a.score.v) << ','
         << fmt(a.score.homogeneity) << ',' << fmt(a.score.completeness) << ','
         << a.clusters << ',' << a.communities << ',' << fmt(a.modularity) << ','
         << fmt(r.auc) << ',' << fmt(r.clean_train_accuracy) << ',' << r.comm.ciphertexts
         << ',' << r.baseline.ciphertexts << ',' << fmt(r.comm_rate) << ','
         << r.comm.broadcasts << ',' << r.comm.admissible_disclosures << '\n';
    }
  }
  return os.str();
}

std::string summary_from_runs(const std::vector<std::string>& texts) {
  struct Group {
    std::vector<double> v, auc, rate;
  };
  std::map<std::vector<std::string>, Group> groups;
  std::vector<std::vector<std::string>> order;
  for (const auto& text : texts) {
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line)) continue;
    const auto header = split_csv_line(line);
    auto col = [&](const std::string& name) {
      auto it = std::find(header.begin(), header.end(), name);
      if (it == header.end()) throw MalformedInputError("runs.csv: missing column " + name);
      return static_cast<std::size_t>(it - header.begin());
    };
    const std::size_t cd = col("dataset"), cm = col("model"), cdef = col("defense"),
                      cp = col("param"), cs = col("sweep"), cmeth = col("method"),
                      cv = col("v_measure"), ca = col("auc"), cr = col("comm_rate");
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
      ++line_no;
      if (line.empty()) continue;
      const auto f = split_csv_line(line);
      if (f.size() != header.size()) {
        throw MalformedInputError("runs.csv line " + std::to_string(line_no) +
                                  ": wrong field count");
      }
      std::vector<std::string> key{f[cd], f[cm], f[cdef], f[cp], f[cs], f[cmeth]};
      auto [it, fresh] = groups.try_emplace(key);
      if (fresh) order.push_back(key);
      try {
        it->second.v.push_back(std::stod(f[cv]));
        it->second.auc.push_back(std::stod(f[ca]));
        it->second.rate.push_back(std::stod(f[cr]));
      } catch (const std::exception&) {
        throw MalformedInputError("runs.csv line " + std::to_string(line_no) +
                                  ": non-numeric metric");
      }
    }
  }
  std::ostringstream os;
  os << "dataset,model,defense,param,sweep,method,runs,v_mean,v_std,v_measure,auc_mean,"
        "auc_std,comm_rate_mean\n";
  for (const auto& key : order) {
    const Group& g = groups[key];
    const Summary v = summarize(g.v), a = summarize(g.auc), c = summarize(g.rate);
    for (const auto& k : key) os << k << ',';
    os << v.count << ',' << fmt(v.mean) << ',' << fmt(v.std) << ',' << v.format() << ','
       << fmt(a.mean) << ',' << fmt(a.std) << ',' << fmt(c.mean) << '\n';
  }
  return os.str();
}

std::string summary_csv(const std::vector<CellResult>& results,
                        const ExperimentConfig& cfg) {
  return summary_from_runs({runs_csv(results, cfg)});
}

ExperimentReport run_experiment(const ExperimentConfig& cfg) {
  cfg.validate();
  const auto t0 = Clock::now();
  const Dataset data = load_dataset(cfg.dataset);
  const std::vector<CellSpec> cells = expand_grid(cfg);

  int threads = cfg.threads;
  if (threads == 0) {
    if (const char* env = std::getenv("TREELEAK_THREADS")) threads = std::atoi(env);
  }
  if (threads <= 0) threads = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  if (const char* env = std::getenv("TREELEAK_THREADS")) {
    const int cap = std::atoi(env);
    if (cap > 0) threads = std::min(threads, cap);
  }
  threads = std::min<int>(threads, static_cast<int>(cells.size()));

  std::vector<std::vector<CellResult>> slots(cells.size());
  std::vector<std::string> errors(cells.size());
  std::atomic<std::size_t> next{0};
  std::atomic<bool> failed{false};
  BaselineCache cache;
  auto worker = [&] {
    for (;;) {
      const std::size_t i = next++;
      if (i >= cells.size() || failed) return;
      try {
        slots[i] = run_cell_impl(cfg, data, cells[i], &cache);
      } catch (const std::exception& e) {
        errors[i] = e.what();
        failed = true;
      }
    }
  };
  std::vector<std::thread> pool;
  for (int t = 1; t < threads; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (!errors[i].empty()) {
      const auto& c = cells[i];
      throw CellError("cell " + std::to_string(i) + " (defense=" + to_string(c.defense) +
                      " param=" + fmt(c.param) + " seed=" + std::to_string(c.seed) +
                      "): " + errors[i]);
    }
  }
  ExperimentReport rep;
  rep.config = cfg;
  for (auto& s : slots) {
    for (auto& r : s) rep.results.push_back(std::move(r));
  }
  rep.seconds = seconds_since(t0);
  return rep;
}

void write_reports(const ExperimentReport& report, const std::string& out_dir) {
  namespace fs = std::filesystem;
  const ExperimentConfig& cfg = report.config;
  const fs::path dir(out_dir);
  write_file_atomic((dir / "runs.csv").string(), runs_csv(report.results, cfg));
  write_file_atomic((dir / "summary.csv").string(), summary_csv(report.results, cfg));

  json rj;
  rj["name"] = cfg.name;
  rj["dataset"] = cfg.dataset.name;
  rj["model"] = to_string(cfg.protocol.model);
  rj["auc_reduction"] = "macro_ovr";
  rj["log_base"] = "e";
  rj["eta"] = cfg.effective_eta();
  rj["alpha"] = cfg.attack.alpha;
  rj["seconds"] = report.seconds;
  json cells = json::array();
  for (const auto& r : report.results) {
    json c;
    c["defense"] = r.defense_label;
    c["param"] = std::isnan(r.spec.param) ? json(nullptr) : json(r.spec.param);
    if (cfg.sweep_axis != SweepAxis::kNone) c["sweep"] = r.spec.sweep_value;
    c["seed"] = r.spec.seed;
    c["auc"] = r.auc;
    c["clean_train_accuracy"] = r.clean_train_accuracy;
    c["comm"] = json::parse(comm_to_json(r.comm));
    c["baseline_ciphertexts"] = r.baseline.ciphertexts;
    c["comm_rate"] = r.comm_rate;
    c["train_seconds"] = r.train_seconds;
    c["attack_seconds"] = r.attack_seconds;
    c["warnings"] = r.warnings;
    json atk = json::object();
    for (const auto& a : r.attacks) {
      atk[to_string(a.method)] = {{"v_measure", a.score.v},
                                  {"homogeneity", a.score.homogeneity},
                                  {"completeness", a.score.completeness},
                                  {"clusters", a.clusters},
                                  {"communities", a.communities},
                                  {"modularity", a.modularity},
                                  {"iterations", a.iterations}};
    }
    c["attacks"] = std::move(atk);
    if (r.graft) c["graft_resplits"] = r.graft->resplit_count();
    cells.push_back(std::move(c));
  }
  rj["cells"] = std::move(cells);
  write_file_atomic((dir / "report.json").string(), rj.dump(1));

  if (cfg.dump_transcripts) {
    for (const auto& r : report.results) {
      const fs::path cd = dir / "transcripts" / cell_key(cfg, r);
      for (const auto& t : r.train.transcripts) {
        write_file_atomic((cd / ("party" + std::to_string(t.party_id) + ".json")).string(),
                          transcript_to_json(t));
      }
      // Attacker features with the ground truth used for scoring.
      Dataset local;
      local.features = r.passive_local;
      local.labels = r.clean_labels;
      local.class_count = r.train.model.class_count;
      for (int f : r.passive_features) local.feature_names.push_back("f" + std::to_string(f));
      write_csv(local, (cd / "attacker_data.csv").string());
      json meta{{"defense", r.defense_label},
                {"class_count", r.train.model.class_count},
                {"samples", r.clean_labels.size()},
                {"model", to_string(cfg.protocol.model)},
                {"passive_features", r.passive_features},
                {"eta", cfg.effective_eta()}};
      meta["xi"] = r.spec.defense == DefenseKind::kIdLmid ? json(r.spec.param) : json(nullptr);
      write_file_atomic((cd / "meta.json").string(), meta.dump(1));
      write_file_atomic((cd / "model.json").string(), model_to_json(r.train.model));
      if (r.graft) {
        write_file_atomic((cd / "graft.json").string(), graft_report_to_json(*r.graft));
      }
    }
  }

  if (cfg.emit_plotdata) {
    std::map<std::vector<std::string>, std::pair<std::vector<double>, std::vector<double>>> g;
    std::vector<std::vector<std::string>> order;
    for (const auto& r : report.results) {
      for (const auto& a : r.attacks) {
        std::vector<std::string> key{r.defense_label, param_str(r.spec), sweep_str(cfg, r.spec),
                                     to_string(a.method)};
        auto [it, fresh] = g.try_emplace(key);
        if (fresh) order.push_back(key);
        it->second.first.push_back(r.auc);
        it->second.second.push_back(a.score.v);
      }
    }
    std::ostringstream trade;
    trade << "series,defense,param,x_auc,y_v_measure,y_std\n";
    std::ostringstream sweep;
    sweep << "series,defense,param,x_" << to_string(cfg.sweep_axis) << ",y_v_measure,y_std\n";
    for (const auto& key : order) {
      const auto& [aucs, vs] = g[key];
      const Summary a = summarize(aucs), v = summarize(vs);
      trade << key[3] << ',' << key[0] << ',' << key[1] << ',' << fmt(a.mean) << ','
            << fmt(v.mean) << ',' << fmt(v.std) << '\n';
      const std::string x = key[2] == "-" ? "-" : key[2].substr(key[2].find('=') + 1);
      sweep << key[3] << ',' << key[0] << ',' << key[1] << ',' << x << ',' << fmt(v.mean)
            << ',' << fmt(v.std) << '\n';
    }
    write_file_atomic((dir / "plotdata" / "tradeoff_auc.csv").string(), trade.str());
    if (cfg.sweep_axis != SweepAxis::kNone) {
      write_file_atomic(
          (dir / "plotdata" / ("sweep_" + to_string(cfg.sweep_axis) + ".csv")).string(),
          sweep.str());
    }
  }
}

// ---------------------------------------------------------------------------
// Audit

AuditReport audit_transcript(const PartyTranscript& t, std::span<const int> labels,
                             int class_count, double xi) {
  AuditReport rep;
  auto bad = [&](const std::string& what) { rep.inconsistencies.push_back(what); };
  if (static_cast<std::size_t>(t.sample_count) != labels.size()) {
    bad("sample count " + std::to_string(t.sample_count) + " differs from " +
        std::to_string(labels.size()) + " labels");
    return rep;
  }
  for (int y : labels) {
    if (y < 0 || y >= class_count) {
      bad("label outside [0, class_count)");
      return rep;
    }
  }
  auto where = [](const TranscriptEvent& e) {
    return "event " + std::to_string(e.seq) + " (tree " + std::to_string(e.tree_id) +
           ", node " + std::to_string(e.node_id) + ")";
  };
  auto well_formed = [&](const TranscriptEvent& e, const std::vector<int>& ids,
                         const char* name) {
    if (ids.empty()) {
      bad(where(e) + ": empty " + name);
      return false;
    }
    for (std::size_t i = 0; i < ids.size(); ++i) {
      if (ids[i] < 0 || ids[i] >= t.sample_count) {
        bad(where(e) + ": " + name + " id out of range");
        return false;
      }
      if (i > 0 && ids[i] <= ids[i - 1]) {
        bad(where(e) + ": " + name + " ids not strictly increasing");
        return false;
      }
    }
    return true;
  };
  auto check_space = [&](const TranscriptEvent& e, const std::vector<int>& ids,
                         const char* name) {
    if (!well_formed(e, ids, name)) return;
    ++rep.spaces_checked;
    const double b = mi_upper_bound(NodeClassCounts::of(ids, labels, class_count));
    rep.max_bound = std::max(rep.max_bound, b);
    if (b > xi) {
      char buf[64];
      std::snprintf(buf, sizeof buf, "%.6g > xi %.6g", b, xi);
      rep.violations.push_back(where(e) + ": " + name + " bound " + buf);
    }
  };

  std::map<std::pair<int, int>, const std::vector<int>*> broadcasts;
  std::set<std::pair<int, int>> selected;
  std::int64_t cumulative = 0;
  bool first = true;
  std::uint64_t last_seq = 0;
  for (const auto& e : t.events) {
    if (!first && e.seq <= last_seq) bad(where(e) + ": sequence numbers not increasing");
    first = false;
    last_seq = e.seq;
    switch (e.kind) {
      case EventKind::kBroadcast:
        if (e.outgoing) bad(where(e) + ": broadcast sent by a passive party");
        check_space(e, e.space, "broadcast space");
        broadcasts[{e.tree_id, e.node_id}] = &e.space;
        break;
      case EventKind::kCiphertexts:
        if (e.count < 0) bad(where(e) + ": negative ciphertext count");
        cumulative += e.count;
        if (e.cumulative != cumulative) bad(where(e) + ": cumulative ciphertext count mismatch");
        break;
      case EventKind::kSplitSelected:
        selected.insert({e.tree_id, e.node_id});
        break;
      case EventKind::kChildSpaces: {
        if (!e.outgoing) bad(where(e) + ": child spaces must be sent by their owner");
        if (!selected.count({e.tree_id, e.node_id})) {
          bad(where(e) + ": child spaces without a selected split");
        }
        check_space(e, e.left, "left child");
        check_space(e, e.right, "right child");
        std::vector<int> both;
        std::set_union(e.left.begin(), e.left.end(), e.right.begin(), e.right.end(),
                       std::back_inserter(both));
        if (both.size() != e.left.size() + e.right.size()) {
          bad(where(e) + ": child spaces overlap");
        }
        auto it = broadcasts.find({e.tree_id, e.node_id});
        if (it == broadcasts.end()) {
          bad(where(e) + ": split of a node that was never broadcast");
        } else if (*it->second != both) {
          bad(where(e) + ": child spaces do not partition the parent");
        }
        break;
      }
    }
  }
  if (cumulative != t.ciphertext_count) bad("total ciphertext count mismatch");
  return rep;
}

}  // namespace treeleak
