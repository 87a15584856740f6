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

#include "memmine/sampler.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "json.hpp"
#include "memmine/error.hpp"
#include "memmine/json_fields.hpp"
#include "memmine/rng.hpp"

namespace memmine {
namespace {

constexpr std::uint64_t kForgetStream = 0x666f72676574ULL;    // "forget"
constexpr std::uint64_t kNeighborStream = 0x6e65696768ULL;    // "neigh"

const EntityId& draw(const std::map<EntityId, double>& dist, Rng& rng) {
  const double x = rng.uniform();
  double cumulative = 0.0;
  for (const auto& [id, p] : dist) {
    cumulative += p;
    if (x < cumulative) return id;
  }
  return dist.rbegin()->first;
}

struct WalkPlan {
  PathKind kind;
  std::optional<EntityId> exclude;
  std::vector<EntityId> starts;  // walk r starts at starts[r % size]
  std::uint64_t stream;
};

void run_walks(const MemoryGraph& graph, const SamplingConfig& config,
               const WalkPlan& plan, int walks, Rng& rng, SamplingResult& result,
               const StepObserver& observer) {
  for (int w = 0; w < walks; ++w, ++result.walks_run) {
    const EntityId& start =
        plan.starts[static_cast<std::size_t>(result.walks_run) % plan.starts.size()];
    std::vector<EntityId> nodes{start};
    std::vector<EntityId> pending;
    while (static_cast<int>(nodes.size()) < config.L) {
      std::map<EntityId, double> dist;
      try {
        dist = transition_distribution(graph, nodes.back(), result.ledger,
                                       config.alpha, plan.exclude);
      } catch (const Error& e) {
        if (e.code() != Errc::kDeadEnd) throw;
        break;
      }
      const EntityId next = draw(dist, rng);
      if (observer) {
        StepAudit audit{nodes.back(), next, dist, {}, config.alpha};
        for (const auto& [id, p] : dist) {
          audit.visits.emplace(id, result.ledger.visits(id));
        }
        observer(audit);
      }
      nodes.push_back(next);
      if (config.visit_update == VisitUpdate::kPerStep) {
        result.ledger.bump(next);
      } else {
        pending.push_back(next);
      }
    }
    for (const auto& id : pending) result.ledger.bump(id);
    if (nodes.size() < 2) {
      ++result.discarded_short;
      continue;
    }
    const double q = path_quality(graph, nodes);
    if (q >= config.eta) {
      result.paths.push_back(MemoryPath{std::move(nodes), q, plan.kind});
    } else {
      ++result.discarded_quality;
    }
  }
}

}  // namespace

std::string_view path_kind_name(PathKind kind) {
  return kind == PathKind::kForget ? "forget" : "neighbor";
}

PathKind parse_path_kind(std::string_view name) {
  if (name == "forget") return PathKind::kForget;
  if (name == "neighbor") return PathKind::kNeighbor;
  throw Error(Errc::kSchemaError, "kind");
}

void SamplingConfig::validate() const {
  if (R < 1) throw Error(Errc::kInvalidArgument, "sampling.R must be >= 1");
  if (L < 2) throw Error(Errc::kInvalidArgument, "sampling.L must be >= 2");
  if (!(alpha >= 0.0)) {
    throw Error(Errc::kInvalidArgument, "sampling.alpha must be >= 0");
  }
  if (!(eta >= 0.0 && eta <= 1.0)) {
    throw Error(Errc::kInvalidArgument, "sampling.eta must be in [0,1]");
  }
  if (coverage_target && !(*coverage_target > 0.0 && *coverage_target <= 1.0)) {
    throw Error(Errc::kInvalidArgument,
                "sampling.coverage_target must be in (0,1]");
  }
  if (neighbor_top_k < 0) {
    throw Error(Errc::kInvalidArgument, "sampling.neighbor_top_k must be >= 0");
  }
}

std::map<EntityId, double> transition_distribution(
    const MemoryGraph& graph, const EntityId& u, const VisitLedger& ledger,
    double alpha, const std::optional<EntityId>& exclude) {
  std::map<EntityId, double> scores;
  double total = 0.0;
  for (const MemoryEdge* e : graph.out_edges(u)) {
    if (exclude && e->dst == *exclude) continue;
    const double penalty =
        alpha == 0.0 ? 1.0 : std::pow(1.0 / (1.0 + ledger.visits(e->dst)), alpha);
    const double s = e->weight * penalty;
    scores.emplace(e->dst, s);
    total += s;
  }
  if (scores.empty() || !(total > 0.0)) {
    throw Error(Errc::kDeadEnd, "'" + u.key() + "' has no usable out-edge");
  }
  for (auto& [id, s] : scores) s /= total;
  return scores;
}

double path_quality(const MemoryGraph& graph, const std::vector<EntityId>& nodes) {
  if (nodes.size() < 2) {
    throw Error(Errc::kTooShort, "a path needs at least 2 nodes");
  }
  double sum = 0.0;
  for (std::size_t i = 0; i + 1 < nodes.size(); ++i) {
    auto w = graph.weight(nodes[i], nodes[i + 1]);
    if (!w) {
      throw Error(Errc::kNotAPath, "no edge '" + nodes[i].key() + "' -> '" +
                                       nodes[i + 1].key() + "'");
    }
    sum += *w;
  }
  return sum / static_cast<double>(nodes.size() - 1);
}

double coverage(const MemoryGraph& graph, const std::vector<MemoryPath>& paths) {
  const std::size_t others = graph.nodes().size() - 1;
  if (others == 0) return 1.0;
  std::set<EntityId> covered;
  for (const auto& p : paths) {
    if (p.kind != PathKind::kForget) continue;
    for (const auto& id : p.nodes) {
      if (!(id == graph.target()) && graph.contains(id)) covered.insert(id);
    }
  }
  return static_cast<double>(covered.size()) / static_cast<double>(others);
}

SamplingResult sample_paths(const MemoryGraph& graph, const SamplingConfig& config,
                            const StepObserver& observer) {
  config.validate();
  if (graph.out_edges(graph.target()).empty()) {
    throw Error(Errc::kIsolatedTarget,
                "target '" + graph.target().key() + "' has no out-edges");
  }
  const WalkPlan plan{PathKind::kForget, std::nullopt, {graph.target()},
                      kForgetStream};
  Rng rng(derive_seed(config.seed, plan.stream));
  SamplingResult result;
  const int cap = 10 * config.R;
  while (true) {
    run_walks(graph, config, plan, config.R, rng, result, observer);
    result.coverage_by_batch.push_back(coverage(graph, result.paths));
    if (!config.coverage_target) break;
    if (result.coverage_by_batch.back() >= *config.coverage_target) break;
    if (result.walks_run >= cap) {
      result.coverage_capped = true;
      break;
    }
  }
  return result;
}

SamplingResult sample_neighbor_paths(const MemoryGraph& graph,
                                     const SamplingConfig& config,
                                     const StepObserver& observer) {
  config.validate();
  std::vector<const MemoryNode*> ranked;
  for (const MemoryEdge* e : graph.out_edges(graph.target())) {
    ranked.push_back(&graph.node(e->dst));
  }
  if (ranked.empty()) {
    throw Error(Errc::kNoNeighbors,
                "target '" + graph.target().key() + "' has no out-neighbors");
  }
  std::stable_sort(ranked.begin(), ranked.end(),
                   [](const MemoryNode* a, const MemoryNode* b) {
                     if (a->strength != b->strength) return a->strength > b->strength;
                     return a->id < b->id;
                   });
  if (config.neighbor_top_k > 0 &&
      ranked.size() > static_cast<std::size_t>(config.neighbor_top_k)) {
    ranked.resize(static_cast<std::size_t>(config.neighbor_top_k));
  }
  WalkPlan plan{PathKind::kNeighbor, graph.target(), {}, kNeighborStream};
  for (const MemoryNode* n : ranked) plan.starts.push_back(n->id);
  Rng rng(derive_seed(config.seed, plan.stream));
  SamplingResult result;
  run_walks(graph, config, plan, config.R, rng, result, observer);
  result.coverage_by_batch.push_back(coverage(graph, result.paths));
  return result;
}

void validate_path(const MemoryGraph& graph, const MemoryPath& path, double eta) {
  auto fail = [](const std::string& what) {
    throw Error(Errc::kInvariantViolation, what);
  };
  if (path.nodes.size() < 2) fail("path shorter than 2 nodes");
  if (path.kind == PathKind::kForget && !(path.nodes.front() == graph.target())) {
    fail("forget path does not start at the target");
  }
  if (path.kind == PathKind::kNeighbor) {
    for (const auto& id : path.nodes) {
      if (id == graph.target()) fail("neighbor path contains the target");
    }
  }
  double q = 0.0;
  try {
    q = path_quality(graph, path.nodes);
  } catch (const Error& e) {
    fail(e.what());
  }
  if (q != path.quality) fail("stored quality differs from recomputed quality");
  if (q < eta) fail("path quality below eta");
}

std::string paths_to_jsonl(const std::vector<MemoryPath>& paths) {
  std::string out;
  for (const auto& p : paths) {
    nlohmann::ordered_json j;
    j["kind"] = path_kind_name(p.kind);
    nlohmann::ordered_json nodes = nlohmann::ordered_json::array();
    for (const auto& id : p.nodes) nodes.push_back(id.key());
    j["nodes"] = std::move(nodes);
    j["quality"] = p.quality;
    out += j.dump();
    out += '\n';
  }
  return out;
}

std::vector<MemoryPath> paths_from_jsonl(std::string_view text) {
  std::vector<MemoryPath> out;
  std::size_t start = 0;
  std::size_t line_no = 0;
  while (start < text.size()) {
    std::size_t nl = text.find('\n', start);
    if (nl == std::string_view::npos) nl = text.size();
    const std::string_view line = text.substr(start, nl - start);
    start = nl + 1;
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string_view::npos) continue;
    const std::string where = "line " + std::to_string(line_no);
    nlohmann::json j;
    try {
      j = parse_json_document(line);
    } catch (const Error&) {
      throw Error(Errc::kSchemaError, where);
    }
    const FieldReader r(j, where);
    MemoryPath p;
    try {
      p.kind = parse_path_kind(r.get<std::string>("kind"));
    } catch (const Error&) {
      throw Error(Errc::kSchemaError, r.path("kind"));
    }
    for (const auto& key : r.get<std::vector<std::string>>("nodes")) {
      try {
        p.nodes.push_back(EntityId::from_key(key));
      } catch (const Error&) {
        throw Error(Errc::kSchemaError, r.path("nodes"));
      }
    }
    p.quality = r.get<double>("quality");
    out.push_back(std::move(p));
  }
  return out;
}

}  // namespace memmine
