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

#include "treeleak/serialize.h"

#include <unistd.h>

#include <atomic>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "json.hpp"

namespace treeleak {

using nlohmann::json;

namespace {

json event_json(const TranscriptEvent& e) {
  json j;
  j["seq"] = e.seq;
  j["kind"] = to_string(e.kind);
  j["outgoing"] = e.outgoing;
  j["tree"] = e.tree_id;
  j["node"] = e.node_id;
  switch (e.kind) {
    case EventKind::kBroadcast:
      j["space"] = e.space;
      break;
    case EventKind::kCiphertexts:
      j["payload"] = e.payload;
      j["count"] = e.count;
      j["bytes"] = e.byte_length;
      j["cumulative"] = e.cumulative;
      if (!e.blob_hex.empty()) j["blob"] = e.blob_hex;
      break;
    case EventKind::kSplitSelected:
      j["candidate"] = e.candidate_id;
      break;
    case EventKind::kChildSpaces:
      j["candidate"] = e.candidate_id;
      j["feature"] = e.feature_index;
      j["threshold"] = e.threshold;
      j["left_node"] = e.left_node;
      j["right_node"] = e.right_node;
      j["left"] = e.left;
      j["right"] = e.right;
      break;
  }
  return j;
}

EventKind event_kind(const std::string& s) {
  if (s == "broadcast") return EventKind::kBroadcast;
  if (s == "ciphertexts") return EventKind::kCiphertexts;
  if (s == "split_selected") return EventKind::kSplitSelected;
  if (s == "child_spaces") return EventKind::kChildSpaces;
  throw MalformedInputError("transcript: unknown event kind '" + s + "'");
}

template <typename T>
T field(const json& j, const char* key, const T& fallback) {
  auto it = j.find(key);
  if (it == j.end()) return fallback;
  return it->get<T>();
}

template <typename T>
T required(const json& j, const char* key) {
  auto it = j.find(key);
  if (it == j.end()) throw MalformedInputError(std::string("missing field '") + key + "'");
  return it->get<T>();
}

json node_json(const TreeNode& n) {
  json j;
  j["id"] = n.node_id;
  j["depth"] = n.depth;
  j["space"] = n.instance_space;
  if (n.split) {
    j["split"] = {{"party", n.split->owner_party},
                  {"feature", n.split->feature_index},
                  {"threshold", n.split->threshold}};
  }
  if (n.children) j["children"] = {n.children->first, n.children->second};
  if (!n.leaf_weight.empty()) j["weight"] = n.leaf_weight;
  return j;
}

}  // namespace

std::string transcript_to_json(const PartyTranscript& t) {
  json j;
  j["party"] = t.party_id;
  j["samples"] = t.sample_count;
  j["ciphertexts"] = t.ciphertext_count;
  json events = json::array();
  for (const auto& e : t.events) events.push_back(event_json(e));
  j["events"] = std::move(events);
  return j.dump(1);
}

PartyTranscript transcript_from_json(const std::string& text) {
  try {
    const json j = json::parse(text);
    PartyTranscript t;
    t.party_id = required<int>(j, "party");
    t.sample_count = required<int>(j, "samples");
    t.ciphertext_count = field<std::int64_t>(j, "ciphertexts", 0);
    for (const auto& ej : required<json>(j, "events")) {
      TranscriptEvent e;
      e.seq = required<std::uint64_t>(ej, "seq");
      e.kind = event_kind(required<std::string>(ej, "kind"));
      e.outgoing = field<bool>(ej, "outgoing", false);
      e.tree_id = field<int>(ej, "tree", -1);
      e.node_id = field<int>(ej, "node", -1);
      e.space = field<std::vector<int>>(ej, "space", {});
      e.payload = field<std::string>(ej, "payload", "");
      e.count = field<std::int64_t>(ej, "count", 0);
      e.byte_length = field<std::int64_t>(ej, "bytes", 0);
      e.cumulative = field<std::int64_t>(ej, "cumulative", 0);
      e.blob_hex = field<std::string>(ej, "blob", "");
      e.candidate_id = field<int>(ej, "candidate", -1);
      e.feature_index = field<int>(ej, "feature", -1);
      e.threshold = field<double>(ej, "threshold", 0.0);
      e.left_node = field<int>(ej, "left_node", -1);
      e.right_node = field<int>(ej, "right_node", -1);
      e.left = field<std::vector<int>>(ej, "left", {});
      e.right = field<std::vector<int>>(ej, "right", {});
      t.events.push_back(std::move(e));
    }
    return t;
  } catch (const json::exception& ex) {
    throw MalformedInputError(std::string("transcript: ") + ex.what());
  }
}

std::string model_to_json(const TreeModel& m) {
  json j;
  j["kind"] = to_string(m.kind);
  j["classes"] = m.class_count;
  j["feature_subsample"] = m.feature_subsample_ratio;
  j["max_depth"] = m.max_depth;
  j["tree_count"] = m.tree_count;
  j["booster"] = {{"lambda", m.booster.lambda_reg},
                  {"gamma", m.booster.gamma_reg},
                  {"learning_rate", m.booster.learning_rate}};
  json trees = json::array();
  for (const Tree& t : m.trees) {
    json tj;
    tj["id"] = t.tree_id;
    tj["target_class"] = t.target_class;
    json nodes = json::array();
    for (const TreeNode& n : t.nodes) nodes.push_back(node_json(n));
    tj["nodes"] = std::move(nodes);
    trees.push_back(std::move(tj));
  }
  j["trees"] = std::move(trees);
  return j.dump(1);
}

TreeModel model_from_json(const std::string& text) {
  try {
    const json j = json::parse(text);
    TreeModel m;
    m.kind = model_kind_from_string(required<std::string>(j, "kind"));
    m.class_count = required<int>(j, "classes");
    m.feature_subsample_ratio = field<double>(j, "feature_subsample", 0.8);
    m.max_depth = field<int>(j, "max_depth", 6);
    m.tree_count = field<int>(j, "tree_count", 5);
    if (auto it = j.find("booster"); it != j.end()) {
      m.booster.lambda_reg = field<double>(*it, "lambda", 1.0);
      m.booster.gamma_reg = field<double>(*it, "gamma", 0.0);
      m.booster.learning_rate = field<double>(*it, "learning_rate", 0.3);
    }
    for (const auto& tj : required<json>(j, "trees")) {
      Tree t;
      t.tree_id = required<int>(tj, "id");
      t.target_class = field<int>(tj, "target_class", -1);
      for (const auto& nj : required<json>(tj, "nodes")) {
        TreeNode n;
        n.node_id = required<int>(nj, "id");
        n.tree_id = t.tree_id;
        n.depth = field<int>(nj, "depth", 0);
        n.instance_space = field<std::vector<int>>(nj, "space", {});
        if (auto s = nj.find("split"); s != nj.end()) {
          n.split = SplitRule{required<int>(*s, "party"), required<int>(*s, "feature"),
                              required<double>(*s, "threshold")};
        }
        if (auto c = nj.find("children"); c != nj.end()) {
          n.children = std::make_pair(c->at(0).get<int>(), c->at(1).get<int>());
        }
        n.leaf_weight = field<std::vector<double>>(nj, "weight", {});
        t.nodes.push_back(std::move(n));
      }
      t.validate();
      m.trees.push_back(std::move(t));
    }
    return m;
  } catch (const json::exception& ex) {
    throw MalformedInputError(std::string("model: ") + ex.what());
  }
}

std::string comm_to_json(const CommStats& c) {
  json j{{"ciphertexts", c.ciphertexts},
         {"label_broadcast", c.label_broadcast},
         {"gradient_broadcast", c.gradient_broadcast},
         {"candidate_sums", c.candidate_sums},
         {"purity_sums", c.purity_sums},
         {"passive_candidates", c.passive_candidates},
         {"broadcasts", c.broadcasts},
         {"admissible_disclosures", c.admissible_disclosures}};
  return j.dump();
}

std::string graft_report_to_json(const GraftReport& r) {
  json trees = json::array();
  for (const auto& t : r.trees) {
    trees.push_back({{"tree", t.tree_id},
                     {"contaminated", t.contaminated},
                     {"resplit", t.resplit},
                     {"erased", t.erased}});
  }
  return json{{"trees", trees}}.dump(1);
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InvalidArgumentError("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file_atomic(const std::string& path, const std::string& content) {
  namespace fs = std::filesystem;
  static std::atomic<unsigned> counter{0};
  const fs::path target(path);
  if (target.has_parent_path()) fs::create_directories(target.parent_path());
  const fs::path tmp = target.string() + ".tmp." + std::to_string(::getpid()) + "." +
                       std::to_string(counter++);
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw InvalidArgumentError("cannot write '" + tmp.string() + "'");
    out << content;
    out.flush();
    if (!out) {
      out.close();
      fs::remove(tmp);
      throw InvalidArgumentError("short write to '" + tmp.string() + "'");
    }
  }
  fs::rename(tmp, target);
}

}  // namespace treeleak
