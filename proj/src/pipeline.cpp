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

#include "memmine/pipeline.hpp"

#include <spdlog/spdlog.h>

#include <algorithm>
#include <cstdlib>
#include <functional>
#include <limits>
#include <set>
#include <sstream>

#include "json.hpp"
#include "memmine/error.hpp"
#include "memmine/io.hpp"
#include "memmine/json_fields.hpp"
#include "memmine/metrics.hpp"
#include "memmine/oracle.hpp"
#include "toml.hpp"

namespace memmine {
namespace {

namespace fs = std::filesystem;

[[noreturn]] void config_error(const std::string& what) {
  throw Error(Errc::kConfigError, what);
}

// Typed access to one TOML table that remembers which keys were read so
// leftovers can be reported as unknown.
class Section {
 public:
  Section(const toml::table* table, std::string name)
      : table_(table), name_(std::move(name)) {}

  std::string key_path(std::string_view key) const {
    return name_.empty() ? std::string(key) : name_ + "." + std::string(key);
  }

  const toml::node* find(std::string_view key) {
    seen_.emplace(key);
    return table_ ? table_->get(key) : nullptr;
  }

  std::optional<std::string> str(std::string_view key) {
    const toml::node* n = find(key);
    if (!n) return std::nullopt;
    if (!n->is_string()) config_error(key_path(key) + ": expected a string");
    return n->as_string()->get();
  }

  std::optional<std::int64_t> integer(std::string_view key) {
    const toml::node* n = find(key);
    if (!n) return std::nullopt;
    if (!n->is_integer()) config_error(key_path(key) + ": expected an integer");
    return n->as_integer()->get();
  }

  std::optional<int> small_int(std::string_view key) {
    auto v = integer(key);
    if (!v) return std::nullopt;
    if (*v < std::numeric_limits<int>::min() || *v > std::numeric_limits<int>::max()) {
      config_error(key_path(key) + ": out of range");
    }
    return static_cast<int>(*v);
  }

  std::optional<std::uint64_t> unsigned_int(std::string_view key) {
    auto v = integer(key);
    if (!v) return std::nullopt;
    if (*v < 0) config_error(key_path(key) + ": must be >= 0");
    return static_cast<std::uint64_t>(*v);
  }

  std::optional<double> real(std::string_view key) {
    const toml::node* n = find(key);
    if (!n) return std::nullopt;
    if (n->is_floating_point()) return n->as_floating_point()->get();
    if (n->is_integer()) return static_cast<double>(n->as_integer()->get());
    config_error(key_path(key) + ": expected a number");
  }

  std::optional<bool> boolean(std::string_view key) {
    const toml::node* n = find(key);
    if (!n) return std::nullopt;
    if (!n->is_boolean()) config_error(key_path(key) + ": expected a boolean");
    return n->as_boolean()->get();
  }

  Section table(std::string_view key) {
    const toml::node* n = find(key);
    if (n && !n->is_table()) config_error(key_path(key) + ": expected a table");
    return Section(n ? n->as_table() : nullptr, key_path(key));
  }

  void reject_unknown() const {
    if (!table_) return;
    for (auto&& [k, v] : *table_) {
      if (!seen_.count(std::string(k.str()))) {
        config_error(key_path(k.str()) + ": unknown key");
      }
    }
  }

 private:
  const toml::table* table_;
  std::string name_;
  std::set<std::string, std::less<>> seen_;
};

template <typename T>
void assign(T& field, std::optional<T> value) {
  if (value) field = std::move(*value);
}

fs::path resolve(const fs::path& base, const std::string& raw) {
  const fs::path p(raw);
  return p.is_absolute() ? p : base / p;
}

fs::path require_file(const fs::path& base, const std::optional<std::string>& raw,
                      const std::string& key) {
  if (!raw || raw->empty()) config_error(key + " is required");
  fs::path p = resolve(base, *raw);
  std::error_code ec;
  if (!fs::is_regular_file(p, ec)) config_error(key + ": file not found: " + p.string());
  return p;
}

void validate_as_config(const std::function<void()>& check) {
  try {
    check();
  } catch (const Error& e) {
    if (e.code() == Errc::kInvalidArgument) config_error(e.detail());
    throw;
  }
}

std::string with_newline(std::string s) {
  if (s.empty() || s.back() != '\n') s += '\n';
  return s;
}

void write_json(const fs::path& path, const nlohmann::ordered_json& j) {
  write_file(path, with_newline(j.dump(2)));
}

MemoryGraph load_graph(const fs::path& file) {
  std::error_code ec;
  if (!fs::is_regular_file(file, ec)) config_error("graph file not found: " + file.string());
  return deserialize_graph(read_file(file));
}

std::vector<MemoryPath> load_paths(const fs::path& file, PathKind expected) {
  std::error_code ec;
  if (!fs::is_regular_file(file, ec)) config_error("paths file not found: " + file.string());
  auto paths = paths_from_jsonl(read_file(file));
  for (const auto& p : paths) {
    if (p.kind != expected) {
      throw Error(Errc::kSchemaError, file.string() + ": expected only " +
                                          std::string(path_kind_name(expected)) +
                                          " paths");
    }
  }
  return paths;
}

}  // namespace

void PipelineConfig::set_seed(std::uint64_t seed) {
  mining.seed = seed;
  sampling.seed = seed;
  responder.http.seed = seed;
}

PipelineConfig parse_config(std::string_view text, const fs::path& base_dir) {
  toml::table doc;
  try {
    doc = toml::parse(text);
  } catch (const toml::parse_error& e) {
    std::ostringstream os;
    os << "TOML line " << e.source().begin.line << ": " << e.description();
    config_error(os.str());
  }
  PipelineConfig c;
  Section root(&doc, "");

  if (auto dir = root.str("output_dir")) c.output_dir = resolve(base_dir, *dir);
  assign(c.parallelism, root.small_int("parallelism"));
  if (c.parallelism < 1) config_error("parallelism must be >= 1");
  if (auto t = root.str("target")) c.target = *t;
  if (auto d = root.str("description")) c.description = *d;
  const auto seed = root.unsigned_int("seed");

  Section r = root.table("responder");
  const std::string kind = r.str("kind").value_or("oracle");
  if (kind == "oracle") {
    c.responder.kind = ResponderKind::kOracle;
    c.responder.world = require_file(base_dir, r.str("world"), "responder.world");
  } else if (kind == "replay") {
    c.responder.kind = ResponderKind::kReplay;
    c.responder.transcript =
        require_file(base_dir, r.str("transcript"), "responder.transcript");
  } else if (kind == "http") {
    c.responder.kind = ResponderKind::kHttp;
    auto& h = c.responder.http;
    assign(h.endpoint, r.str("endpoint"));
    assign(h.model, r.str("model"));
    assign(h.temperature, r.real("temperature"));
    assign(h.timeout_seconds, r.real("timeout_seconds"));
    assign(h.retries, r.small_int("retries"));
    assign(h.backoff_seconds, r.real("backoff_seconds"));
    assign(h.api_key_env, r.str("api_key_env"));
    if (const char* env = std::getenv("MEMMINE_ENDPOINT"); env && *env) h.endpoint = env;
    if (h.endpoint.empty()) config_error("responder.endpoint is required");
    if (h.model.empty()) config_error("responder.model is required");
    if (!(h.timeout_seconds > 0.0)) config_error("responder.timeout_seconds must be > 0");
    if (h.retries < 0) config_error("responder.retries must be >= 0");
    if (!(h.backoff_seconds >= 0.0)) config_error("responder.backoff_seconds must be >= 0");
  } else {
    config_error("responder.kind: expected oracle, http or replay, got '" + kind + "'");
  }
  // Keys of the other kinds are tolerated so one file can switch backends.
  for (const char* k : {"world", "transcript", "endpoint", "model", "temperature",
                        "timeout_seconds", "retries", "backoff_seconds", "api_key_env"}) {
    r.find(k);
  }
  r.reject_unknown();

  Section m = root.table("mining");
  if (auto profile = m.str("profile")) {
    if (*profile == "rich") {
      c.mining = MiningConfig::rich_profile();
    } else if (*profile == "sparse") {
      c.mining = MiningConfig::sparse_profile();
    } else {
      config_error("mining.profile: expected rich or sparse");
    }
  }
  assign(c.mining.N, m.small_int("N"));
  assign(c.mining.tau, m.real("tau"));
  assign(c.mining.K, m.small_int("K"));
  if (auto a = m.real("adaptive_stop_threshold")) c.mining.adaptive_stop_threshold = *a;
  assign(c.mining.max_iterations, m.small_int("max_iterations"));
  assign(c.mining.seed, m.unsigned_int("seed"));
  assign(c.mining.heuristic_extraction, m.boolean("heuristic_extraction"));
  m.reject_unknown();

  Section s = root.table("sampling");
  if (auto profile = s.str("profile")) {
    if (*profile == "rich") {
      c.sampling = SamplingConfig::rich_profile();
    } else if (*profile == "sparse") {
      c.sampling = SamplingConfig::sparse_profile();
    } else {
      config_error("sampling.profile: expected rich or sparse");
    }
  }
  assign(c.sampling.R, s.small_int("R"));
  assign(c.sampling.L, s.small_int("L"));
  assign(c.sampling.alpha, s.real("alpha"));
  assign(c.sampling.eta, s.real("eta"));
  if (auto t = s.real("coverage_target")) c.sampling.coverage_target = *t;
  assign(c.sampling.seed, s.unsigned_int("seed"));
  if (auto vu = s.str("visit_update")) {
    if (*vu == "per_step") {
      c.sampling.visit_update = VisitUpdate::kPerStep;
    } else if (*vu == "between_walks") {
      c.sampling.visit_update = VisitUpdate::kBetweenWalks;
    } else {
      config_error("sampling.visit_update: expected per_step or between_walks");
    }
  }
  assign(c.sampling.neighbor_top_k, s.small_int("neighbor_top_k"));
  s.reject_unknown();
  root.reject_unknown();

  if (seed) c.set_seed(*seed);
  c.responder.http.seed = c.mining.seed;
  validate_as_config([&] { c.mining.validate(); });
  validate_as_config([&] { c.sampling.validate(); });
  return c;
}

PipelineConfig load_config(const fs::path& path) {
  std::error_code ec;
  if (!fs::is_regular_file(path, ec)) config_error("config file not found: " + path.string());
  std::string text;
  try {
    text = read_file(path);
  } catch (const Error& e) {
    config_error(e.detail());
  }
  fs::path base = path.parent_path();
  if (base.empty()) base = ".";
  return parse_config(text, base);
}

ResponderStack::ResponderStack(const PipelineConfig& config) {
  switch (config.responder.kind) {
    case ResponderKind::kOracle: {
      OracleWorld world;
      try {
        world = OracleWorld::load(config.responder.world);
      } catch (const Error& e) {
        if (e.code() == Errc::kResponderFailure) throw;
        config_error(config.responder.world.string() + ": " + e.what());
      }
      backend_ = std::make_unique<OracleResponder>(std::move(world));
      break;
    }
    case ResponderKind::kReplay: {
      std::vector<TranscriptEntry> entries;
      try {
        entries = TranscriptLog::load(config.responder.transcript);
      } catch (const Error& e) {
        config_error(config.responder.transcript.string() + ": " + e.what());
      }
      // Replay re-records what it serves; a second recorder is redundant but
      // harmless because the first entry per key wins.
      backend_ = std::make_unique<ReplayResponder>(entries, &log_);
      break;
    }
    case ResponderKind::kHttp:
      backend_ = std::make_unique<HttpResponder>(config.responder.http, &log_);
      break;
  }
  top_ = std::make_unique<RecordingResponder>(*backend_, log_);
}

ResponderStack::~ResponderStack() = default;

std::string budget_json(const MemoryGraph& graph) {
  const BudgetReport& b = graph.budget();
  const MiningConfig& c = graph.config();
  nlohmann::ordered_json j;
  j["target"] = graph.target().key();
  j["iterations"] = b.iterations;
  j["queries_issued"] = b.queries_issued;
  j["queries_per_iteration"] = b.queries_per_iteration;
  j["extraction_queries"] = b.extraction_queries;
  j["truncated"] = b.truncated;
  j["query_bound"] = static_cast<long long>(c.N) * b.iterations;
  j["within_bound"] = static_cast<long long>(b.queries_issued) <=
                      static_cast<long long>(c.N) * b.iterations;
  j["nodes"] = graph.nodes().size();
  j["edges"] = graph.edges().size();
  j["reference_iterations_per_entity"] = {{"rich_knowledge", kReferenceIterationsRich},
                                          {"sparse_knowledge", kReferenceIterationsSparse}};
  return with_newline(j.dump(2));
}

MineResult cmd_mine(const PipelineConfig& config, std::string_view target,
                    std::optional<std::string> description, const fs::path& out_dir) {
  ResponderStack stack(config);
  MineResult out{mine_graph(config.mining, target, std::move(description),
                            stack.responder(), config.parallelism),
                 {}};
  const fs::path graph = out_dir / "graph.json";
  const fs::path transcript = out_dir / "transcript.jsonl";
  const fs::path budget = out_dir / "budget.json";
  write_file(graph, serialize_graph(out.run.graph));
  stack.log().write(transcript);
  write_file(budget, budget_json(out.run.graph));
  out.artifacts = {graph, transcript, budget};
  spdlog::info("mined {} nodes, {} edges in {} iterations ({} queries)",
               out.run.graph.nodes().size(), out.run.graph.edges().size(),
               out.run.graph.budget().iterations, out.run.graph.budget().queries_issued);
  return out;
}

SampleResult sample_graph(const PipelineConfig& config, const MemoryGraph& graph,
                          const fs::path& out_dir) {
  SampleResult out;
  out.forget = sample_paths(graph, config.sampling);
  try {
    out.neighbor = sample_neighbor_paths(graph, config.sampling);
  } catch (const Error& e) {
    if (e.code() != Errc::kNoNeighbors) throw;
    spdlog::warn("{}", e.what());
  }
  for (const auto& p : out.forget.paths) validate_path(graph, p, config.sampling.eta);
  for (const auto& p : out.neighbor.paths) validate_path(graph, p, config.sampling.eta);

  const fs::path paths = out_dir / "paths.jsonl";
  const fs::path neighbor = out_dir / "neighbor_paths.jsonl";
  const fs::path report = out_dir / "sampling.json";
  write_file(paths, paths_to_jsonl(out.forget.paths));
  write_file(neighbor, paths_to_jsonl(out.neighbor.paths));
  nlohmann::ordered_json j;
  j["walks"] = out.forget.walks_run;
  j["retained"] = out.forget.paths.size();
  j["discarded_short"] = out.forget.discarded_short;
  j["discarded_quality"] = out.forget.discarded_quality;
  j["coverage_by_batch"] = out.forget.coverage_by_batch;
  j["coverage"] = out.forget.final_coverage();
  j["coverage_target"] = config.sampling.coverage_target
                             ? nlohmann::ordered_json(*config.sampling.coverage_target)
                             : nlohmann::ordered_json();
  j["coverage_capped"] = out.forget.coverage_capped;
  j["neighbor_walks"] = out.neighbor.walks_run;
  j["neighbor_retained"] = out.neighbor.paths.size();
  write_json(report, j);
  out.artifacts = {paths, neighbor, report};
  if (out.forget.coverage_capped) {
    spdlog::warn("coverage {:.3f} below target after {} walks (hard cap)",
                 out.forget.final_coverage(), out.forget.walks_run);
  }
  return out;
}

SampleResult cmd_sample(const PipelineConfig& config, const fs::path& graph_file,
                        const fs::path& out_dir) {
  return sample_graph(config, load_graph(graph_file), out_dir);
}

SynthResult synth_datasets(const PipelineConfig& config, const MemoryGraph& graph,
                           const std::vector<MemoryPath>& forget_paths,
                           const std::vector<MemoryPath>& neighbor_paths,
                           Responder& responder, const fs::path& out_dir) {
  SynthResult out{build_datasets(graph, forget_paths, neighbor_paths, responder,
                                 config.parallelism),
                  {}};
  for (const auto& s : out.datasets.forget) validate_sample(graph, s);
  for (const auto& s : out.datasets.neighbor) validate_sample(graph, s);
  const fs::path forget = out_dir / "forget.jsonl";
  const fs::path neighbor = out_dir / "neighbor.jsonl";
  const fs::path report = out_dir / "synth.json";
  emit_dataset(out.datasets.forget, forget);
  emit_dataset(out.datasets.neighbor, neighbor);
  const DatasetStats& st = out.datasets.stats;
  nlohmann::ordered_json j;
  j["forget_windows"] = st.forget_windows;
  j["unknown_events"] = st.unknown_events;
  j["dropped_items"] = st.dropped_items;
  j["forget_generated"] = st.forget_generated;
  j["forget_unique"] = out.datasets.forget.size();
  j["neighbor_generated"] = st.neighbor_generated;
  j["neighbor_unique"] = out.datasets.neighbor.size();
  write_json(report, j);
  out.artifacts = {forget, neighbor, report};
  return out;
}

SynthResult cmd_synth(const PipelineConfig& config, const fs::path& graph_file,
                      const fs::path& paths_file, const fs::path& neighbor_paths_file,
                      const fs::path& out_dir) {
  const MemoryGraph graph = load_graph(graph_file);
  const auto forget = load_paths(paths_file, PathKind::kForget);
  const auto neighbor = load_paths(neighbor_paths_file, PathKind::kNeighbor);
  for (const auto& p : forget) validate_path(graph, p, 0.0);
  for (const auto& p : neighbor) validate_path(graph, p, 0.0);
  ResponderStack stack(config);
  SynthResult out =
      synth_datasets(config, graph, forget, neighbor, stack.responder(), out_dir);
  const fs::path transcript = out_dir / "synth_transcript.jsonl";
  stack.log().write(transcript);
  out.artifacts.push_back(transcript);
  return out;
}

std::vector<ManifestEntry> hash_artifacts(const fs::path& dir,
                                          const std::vector<fs::path>& files) {
  std::vector<ManifestEntry> out;
  for (const auto& f : files) {
    const std::string bytes = read_file(f);
    out.push_back(ManifestEntry{fs::relative(f, dir).generic_string(), sha256_hex(bytes),
                                bytes.size()});
  }
  std::sort(out.begin(), out.end(),
            [](const ManifestEntry& a, const ManifestEntry& b) { return a.path < b.path; });
  return out;
}

std::string manifest_json(const std::vector<ManifestEntry>& entries) {
  nlohmann::ordered_json arr = nlohmann::ordered_json::array();
  for (const auto& e : entries) {
    arr.push_back({{"path", e.path}, {"sha256", e.sha256}, {"bytes", e.bytes}});
  }
  return with_newline(nlohmann::ordered_json{{"artifacts", arr}}.dump(2));
}

std::vector<ManifestEntry> parse_manifest(std::string_view json) {
  const nlohmann::json j = parse_json_document(json);
  const FieldReader root(j, "");
  std::vector<ManifestEntry> out;
  for (const auto& r : root.array("artifacts")) {
    out.push_back(ManifestEntry{r.get<std::string>("path"), r.get<std::string>("sha256"),
                                r.get<std::size_t>("bytes")});
  }
  return out;
}

std::vector<std::string> verify_manifest(const fs::path& dir) {
  std::vector<std::string> problems;
  const auto entries = parse_manifest(read_file(dir / "manifest.json"));
  for (const auto& e : entries) {
    std::error_code ec;
    const fs::path p = dir / e.path;
    if (!fs::is_regular_file(p, ec)) {
      problems.push_back(e.path + ": missing");
      continue;
    }
    const std::string bytes = read_file(p);
    if (bytes.size() != e.bytes || sha256_hex(bytes) != e.sha256) {
      problems.push_back(e.path + ": content hash differs");
    }
  }
  return problems;
}

PipelineResult cmd_pipeline(const PipelineConfig& config, std::string_view target,
                            std::optional<std::string> description,
                            const fs::path& out_dir) {
  std::optional<std::vector<ManifestEntry>> previous;
  const fs::path manifest = out_dir / "manifest.json";
  std::error_code ec;
  if (fs::is_regular_file(manifest, ec)) previous = parse_manifest(read_file(manifest));

  ResponderStack stack(config);
  MineResult mine{mine_graph(config.mining, target, std::move(description),
                             stack.responder(), config.parallelism),
                  {}};
  const MemoryGraph& graph = mine.run.graph;
  const fs::path graph_file = out_dir / "graph.json";
  const fs::path budget_file = out_dir / "budget.json";
  write_file(graph_file, serialize_graph(graph));
  write_file(budget_file, budget_json(graph));
  mine.artifacts = {graph_file, budget_file};

  SampleResult sample = sample_graph(config, graph, out_dir);
  SynthResult synth = synth_datasets(config, graph, sample.forget.paths,
                                     sample.neighbor.paths, stack.responder(), out_dir);

  const fs::path transcript = out_dir / "transcript.jsonl";
  stack.log().write(transcript);
  mine.artifacts.push_back(transcript);

  std::vector<fs::path> files = mine.artifacts;
  files.insert(files.end(), sample.artifacts.begin(), sample.artifacts.end());
  files.insert(files.end(), synth.artifacts.begin(), synth.artifacts.end());
  PipelineResult out{std::move(mine), std::move(sample), std::move(synth),
                     hash_artifacts(out_dir, files)};
  write_file(manifest, manifest_json(out.manifest));

  if (previous && *previous != out.manifest) {
    std::string diff;
    for (const auto& e : out.manifest) {
      auto it = std::find_if(previous->begin(), previous->end(),
                             [&](const ManifestEntry& p) { return p.path == e.path; });
      if (it == previous->end() || !(*it == e)) diff += " " + e.path;
    }
    throw Error(Errc::kInvariantViolation,
                "re-run differs from the previous manifest:" +
                    (diff.empty() ? std::string(" artifact set changed") : diff));
  }
  return out;
}

std::string cmd_compare(const fs::path& graph_a, const fs::path& graph_b) {
  const auto a = graph_distribution(load_graph(graph_a));
  const auto b = graph_distribution(load_graph(graph_b));
  nlohmann::ordered_json j;
  j["jaccard_top50"] = jaccard_topk(a, b, 50);
  j["freq_cosine"] = frequency_cosine(a, b);
  return with_newline(j.dump());
}

int exit_code_for(Errc code) {
  switch (code) {
    case Errc::kConfigError:
      return 2;
    case Errc::kResponderFailure:
    case Errc::kUnrecognizedPrompt:
      return 3;
    case Errc::kInvariantViolation:
      return 4;
    default:
      return 1;
  }
}

}  // namespace memmine
