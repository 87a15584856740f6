// Copyright 2026 The memmine Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "memmine/memgraph.hpp"

#include <deque>

#include "json.hpp"
#include "memmine/error.hpp"
#include "memmine/json_fields.hpp"

namespace memmine {

using ordered_json = nlohmann::ordered_json;

void MiningConfig::validate() const {
  if (N < 1) throw Error(Errc::kInvalidArgument, "mining.N must be >= 1");
  if (!(tau > 0.0 && tau <= 1.0)) {
    throw Error(Errc::kInvalidArgument, "mining.tau must be in (0,1]");
  }
  if (K < 1) throw Error(Errc::kInvalidArgument, "mining.K must be >= 1");
  if (max_iterations < 1) {
    throw Error(Errc::kInvalidArgument, "mining.max_iterations must be >= 1");
  }
  if (adaptive_stop_threshold &&
      !(*adaptive_stop_threshold >= 0.0 && *adaptive_stop_threshold <= 1.0)) {
    throw Error(Errc::kInvalidArgument,
                "mining.adaptive_stop_threshold must be in [0,1]");
  }
}

MemoryGraph::MemoryGraph(EntityId target, std::string target_surface,
                         std::optional<std::string> description,
                         MiningConfig config)
    : target_(target),
      description_(std::move(description)),
      config_(config) {
  MemoryNode root{target, {}, 1.0, 0, std::nullopt};
  if (!target_surface.empty()) root.surface_forms.insert(std::move(target_surface));
  nodes_.emplace(target, std::move(root));
  budget_.queries_per_iteration = config.N;
}

const MemoryNode& MemoryGraph::node(const EntityId& id) const {
  auto it = nodes_.find(id);
  if (it == nodes_.end()) {
    throw Error(Errc::kInvalidArgument, "no node '" + id.key() + "'");
  }
  return it->second;
}

void MemoryGraph::upsert_node(MemoryNode node) {
  if (!(node.strength >= 0.0 && node.strength <= 1.0)) {
    throw Error(Errc::kInvalidArgument,
                "strength of '" + node.id.key() + "' outside [0,1]");
  }
  if (auto it = nodes_.find(node.id); it != nodes_.end()) {
    it->second.surface_forms.merge(node.surface_forms);
    it->second.strength = node.strength;
    return;
  }
  if (node.hop < 0) {
    throw Error(Errc::kInvalidArgument, "negative hop for '" + node.id.key() + "'");
  }
  if (node.hop == 0) {
    throw Error(Errc::kInvalidArgument,
                "hop 0 is reserved for the target; got '" + node.id.key() + "'");
  }
  if (node.discovered_from) {
    auto parent = nodes_.find(*node.discovered_from);
    if (parent == nodes_.end() || parent->second.hop != node.hop - 1) {
      throw Error(Errc::kOrphanNode,
                  "'" + node.id.key() + "' claims parent '" +
                      node.discovered_from->key() + "' at hop " +
                      std::to_string(node.hop - 1) + " which does not exist");
    }
  } else {
    bool found = false;
    for (const auto& [id, n] : nodes_) {
      if (n.hop == node.hop - 1) {
        found = true;
        break;
      }
    }
    if (!found) {
      throw Error(Errc::kOrphanNode, "no hop-" + std::to_string(node.hop - 1) +
                                         " parent for '" + node.id.key() + "'");
    }
  }
  nodes_.emplace(node.id, std::move(node));
}

void MemoryGraph::put_edge(MemoryEdge edge) {
  if (edge.src == edge.dst) {
    throw Error(Errc::kInvalidArgument, "self loop on '" + edge.src.key() + "'");
  }
  if (!contains(edge.src) || !contains(edge.dst)) {
    throw Error(Errc::kInvalidArgument, "edge '" + edge.src.key() + "' -> '" +
                                            edge.dst.key() +
                                            "' has a missing endpoint");
  }
  if (edge.count < 1 || !(edge.weight > 0.0 && edge.weight <= 1.0)) {
    throw Error(Errc::kInvalidArgument, "edge '" + edge.src.key() + "' -> '" +
                                            edge.dst.key() +
                                            "' has invalid count/weight");
  }
  EdgeKey key{edge.src, edge.dst};
  edges_.insert_or_assign(std::move(key), std::move(edge));
}

std::vector<const MemoryEdge*> MemoryGraph::out_edges(const EntityId& src) const {
  std::vector<const MemoryEdge*> out;
  auto [first, last] = edges_.equal_range(src);
  for (auto it = first; it != last; ++it) out.push_back(&it->second);
  return out;
}

std::optional<double> MemoryGraph::weight(const EntityId& src,
                                          const EntityId& dst) const {
  auto it = edges_.find(EdgeKey{src, dst});
  if (it == edges_.end()) return std::nullopt;
  return it->second.weight;
}

std::map<EntityId, int> MemoryGraph::bfs_distances() const {
  std::map<EntityId, int> dist;
  std::deque<EntityId> queue;
  dist.emplace(target_, 0);
  queue.push_back(target_);
  while (!queue.empty()) {
    EntityId u = queue.front();
    queue.pop_front();
    const int du = dist.at(u);
    for (const MemoryEdge* e : out_edges(u)) {
      if (dist.emplace(e->dst, du + 1).second) queue.push_back(e->dst);
    }
  }
  return dist;
}

void MemoryGraph::validate() const {
  auto fail = [](const std::string& what) {
    throw Error(Errc::kInvariantViolation, what);
  };
  int roots = 0;
  for (const auto& [id, n] : nodes_) {
    if (!(id == n.id)) fail("node key/id mismatch for '" + id.key() + "'");
    if (!(n.strength >= 0.0 && n.strength <= 1.0)) {
      fail("strength of '" + id.key() + "' outside [0,1]");
    }
    if (n.hop == 0) {
      ++roots;
      if (!(id == target_)) fail("non-target node '" + id.key() + "' at hop 0");
    } else if (n.hop < 0 || n.hop > config_.K) {
      fail("hop of '" + id.key() + "' outside [1,K]");
    } else if (n.strength < config_.tau) {
      fail("retained node '" + id.key() + "' has strength below tau");
    }
    if (n.discovered_from && !contains(*n.discovered_from)) {
      fail("'" + id.key() + "' discovered from missing node");
    }
  }
  if (roots != 1 || !contains(target_) || node(target_).hop != 0) {
    fail("exactly one hop-0 node (the target) is required");
  }

  std::map<EntityId, double> out_mass;
  for (const auto& [key, e] : edges_) {
    if (!(key.first == e.src) || !(key.second == e.dst)) fail("edge key mismatch");
    if (e.src == e.dst) fail("self loop on '" + e.src.key() + "'");
    if (!contains(e.src) || !contains(e.dst)) fail("edge endpoint missing");
    if (e.count < 1) fail("edge count < 1");
    if (!(e.weight > 0.0 && e.weight <= 1.0)) fail("edge weight outside (0,1]");
    out_mass[e.src] += e.weight;
  }
  for (const auto& [src, mass] : out_mass) {
    if (mass > 1.0 + 1e-9) fail("out-weights of '" + src.key() + "' exceed 1");
  }

  const auto dist = bfs_distances();
  for (const auto& [id, n] : nodes_) {
    auto it = dist.find(id);
    if (it == dist.end()) fail("'" + id.key() + "' unreachable from target");
    if (it->second > config_.K) fail("'" + id.key() + "' farther than K hops");
  }

  if (budget_.queries_issued >
      static_cast<long long>(budget_.queries_per_iteration) * budget_.iterations) {
    fail("queries_issued exceeds queries_per_iteration * iterations");
  }
}

MemoryGraph upsert_node(MemoryGraph graph, MemoryNode node) {
  graph.upsert_node(std::move(node));
  return graph;
}

std::map<EntityId, double> edge_weights(
    const std::map<EntityId, int>& extraction_counts) {
  if (extraction_counts.empty()) {
    throw Error(Errc::kEmptyNeighborhood, "no extracted neighbors");
  }
  long long total = 0;
  for (const auto& [id, c] : extraction_counts) {
    if (c < 1) {
      throw Error(Errc::kInvalidArgument,
                  "extraction count for '" + id.key() + "' is < 1");
    }
    total += c;
  }
  std::map<EntityId, double> out;
  for (const auto& [id, c] : extraction_counts) {
    out.emplace(id, static_cast<double>(c) / static_cast<double>(total));
  }
  return out;
}

namespace {

ordered_json config_to_json(const MiningConfig& c) {
  ordered_json j;
  j["N"] = c.N;
  j["tau"] = c.tau;
  j["K"] = c.K;
  j["adaptive_stop_threshold"] =
      c.adaptive_stop_threshold ? ordered_json(*c.adaptive_stop_threshold)
                                : ordered_json(nullptr);
  j["max_iterations"] = c.max_iterations;
  j["seed"] = c.seed;
  j["heuristic_extraction"] = c.heuristic_extraction;
  return j;
}

MiningConfig config_from_json(const FieldReader& r) {
  MiningConfig c;
  c.N = r.get<int>("N");
  c.tau = r.get<double>("tau");
  c.K = r.get<int>("K");
  c.adaptive_stop_threshold = r.get_optional<double>("adaptive_stop_threshold");
  c.max_iterations = r.get<int>("max_iterations");
  c.seed = r.get<std::uint64_t>("seed");
  c.heuristic_extraction = r.get_or<bool>("heuristic_extraction", false);
  return c;
}

EntityId id_field(const FieldReader& r, const std::string& key) {
  const std::string raw = r.get<std::string>(key);
  try {
    return EntityId::from_key(raw);
  } catch (const Error&) {
    throw Error(Errc::kSchemaError, r.path(key));
  }
}

}  // namespace

std::string serialize_graph(const MemoryGraph& graph) {
  ordered_json j;
  j["target"] = graph.target().key();
  j["description"] = graph.description() ? ordered_json(*graph.description())
                                         : ordered_json(nullptr);
  ordered_json nodes = ordered_json::array();
  for (const auto& [id, n] : graph.nodes()) {
    ordered_json jn;
    jn["id"] = id.key();
    jn["surface_forms"] = n.surface_forms;
    jn["strength"] = n.strength;
    jn["hop"] = n.hop;
    jn["discovered_from"] = n.discovered_from
                                ? ordered_json(n.discovered_from->key())
                                : ordered_json(nullptr);
    nodes.push_back(std::move(jn));
  }
  j["nodes"] = std::move(nodes);
  ordered_json edges = ordered_json::array();
  for (const auto& [key, e] : graph.edges()) {
    ordered_json je;
    je["src"] = e.src.key();
    je["dst"] = e.dst.key();
    je["count"] = e.count;
    je["weight"] = e.weight;
    edges.push_back(std::move(je));
  }
  j["edges"] = std::move(edges);
  j["config"] = config_to_json(graph.config());
  const BudgetReport& b = graph.budget();
  ordered_json jb;
  jb["iterations"] = b.iterations;
  jb["queries_issued"] = b.queries_issued;
  jb["queries_per_iteration"] = b.queries_per_iteration;
  jb["extraction_queries"] = b.extraction_queries;
  jb["truncated"] = b.truncated;
  j["budget"] = std::move(jb);
  return j.dump(2) + "\n";
}

MemoryGraph deserialize_graph(std::string_view bytes) {
  const nlohmann::json doc = parse_json_document(bytes);
  const FieldReader root(doc, "");
  const EntityId target = id_field(root, "target");
  const auto description = root.get_optional<std::string>("description");
  const MiningConfig config = config_from_json(root.object("config"));

  std::vector<MemoryNode> decoded;
  std::string target_surface;
  std::set<std::string> target_forms;
  const auto nodes = root.array("nodes");
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    const FieldReader& rn = nodes[i];
    MemoryNode n{id_field(rn, "id"), {}, 0.0, 0, std::nullopt};
    n.surface_forms = rn.get<std::set<std::string>>("surface_forms");
    n.strength = rn.get<double>("strength");
    n.hop = rn.get<int>("hop");
    if (rn.has_non_null("discovered_from")) {
      n.discovered_from = id_field(rn, "discovered_from");
    }
    if (n.id == target) {
      if (n.hop != 0) throw Error(Errc::kSchemaError, rn.path("hop"));
      target_forms = n.surface_forms;
      continue;
    }
    decoded.push_back(std::move(n));
  }

  MemoryGraph graph(target, "", description, config);
  graph.upsert_node(MemoryNode{target, target_forms, 1.0, 0, std::nullopt});
  // Parents must precede children for the orphan check.
  std::stable_sort(decoded.begin(), decoded.end(),
                   [](const MemoryNode& a, const MemoryNode& b) {
                     return a.hop < b.hop;
                   });
  for (auto& n : decoded) {
    try {
      graph.upsert_node(std::move(n));
    } catch (const Error& e) {
      throw Error(Errc::kInvariantViolation, e.what());
    }
  }
  const auto edges = root.array("edges");
  for (const FieldReader& re : edges) {
    MemoryEdge e{id_field(re, "src"), id_field(re, "dst"), re.get<int>("count"),
                 re.get<double>("weight")};
    try {
      graph.put_edge(std::move(e));
    } catch (const Error& err) {
      throw Error(Errc::kInvariantViolation, err.what());
    }
  }
  const FieldReader rb = root.object("budget");
  BudgetReport& b = graph.mutable_budget();
  b.iterations = rb.get<int>("iterations");
  b.queries_issued = rb.get<int>("queries_issued");
  b.queries_per_iteration = rb.get<int>("queries_per_iteration");
  b.extraction_queries = rb.get_or<int>("extraction_queries", 0);
  b.truncated = rb.get_or<bool>("truncated", false);
  graph.validate();
  return graph;
}

}  // namespace memmine
