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

#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "memmine/elicit.hpp"
#include "memmine/error.hpp"
#include "memmine/http_responder.hpp"
#include "memmine/memgraph.hpp"
#include "memmine/responder.hpp"
#include "memmine/sampler.hpp"
#include "memmine/synth.hpp"

namespace memmine {

enum class ResponderKind { kOracle, kHttp, kReplay };

struct ResponderSettings {
  ResponderKind kind = ResponderKind::kOracle;
  std::filesystem::path world;       // oracle
  std::filesystem::path transcript;  // replay
  HttpResponderConfig http;          // http
};

struct PipelineConfig {
  ResponderSettings responder;
  MiningConfig mining;
  SamplingConfig sampling;
  std::filesystem::path output_dir = "out";
  int parallelism = 4;
  std::optional<std::string> target;
  std::optional<std::string> description;

  // Sets both the mining and the sampling seed.
  void set_seed(std::uint64_t seed);
};

// Parses TOML. Relative paths resolve against `base_dir`. Unknown keys,
// wrong types, out-of-range values and missing referenced files all throw
// kConfigError naming the offending key or path.
PipelineConfig parse_config(std::string_view toml, const std::filesystem::path& base_dir);
PipelineConfig load_config(const std::filesystem::path& path);

// The configured backend wrapped so that every served call lands in log().
class ResponderStack {
 public:
  explicit ResponderStack(const PipelineConfig& config);
  ~ResponderStack();
  Responder& responder() { return *top_; }
  TranscriptLog& log() { return log_; }

 private:
  TranscriptLog log_;
  std::unique_ptr<Responder> backend_;
  std::unique_ptr<Responder> top_;
};

// Reference means for iterations per target entity, reported next to the
// measured budget.
inline constexpr double kReferenceIterationsRich = 88.36;
inline constexpr double kReferenceIterationsSparse = 13.75;

std::string budget_json(const MemoryGraph& graph);

struct MineResult {
  MiningRun run;
  std::vector<std::filesystem::path> artifacts;
};

// graph.json, transcript.jsonl, budget.json under out_dir.
MineResult cmd_mine(const PipelineConfig& config, std::string_view target,
                    std::optional<std::string> description,
                    const std::filesystem::path& out_dir);

struct SampleResult {
  SamplingResult forget;
  SamplingResult neighbor;
  std::vector<std::filesystem::path> artifacts;
};

// paths.jsonl, neighbor_paths.jsonl, sampling.json under out_dir.
SampleResult sample_graph(const PipelineConfig& config, const MemoryGraph& graph,
                          const std::filesystem::path& out_dir);
SampleResult cmd_sample(const PipelineConfig& config,
                        const std::filesystem::path& graph_file,
                        const std::filesystem::path& out_dir);

struct SynthResult {
  Datasets datasets;
  std::vector<std::filesystem::path> artifacts;
};

// forget.jsonl, neighbor.jsonl, synth.json under out_dir. Every sample is
// checked with validate_sample before anything is written.
SynthResult synth_datasets(const PipelineConfig& config, const MemoryGraph& graph,
                           const std::vector<MemoryPath>& forget_paths,
                           const std::vector<MemoryPath>& neighbor_paths,
                           Responder& responder, const std::filesystem::path& out_dir);
// Standalone variant; records its calls in synth_transcript.jsonl.
SynthResult cmd_synth(const PipelineConfig& config,
                      const std::filesystem::path& graph_file,
                      const std::filesystem::path& paths_file,
                      const std::filesystem::path& neighbor_paths_file,
                      const std::filesystem::path& out_dir);

struct ManifestEntry {
  std::string path;  // relative to the manifest directory
  std::string sha256;
  std::size_t bytes = 0;
  friend bool operator==(const ManifestEntry&, const ManifestEntry&) = default;
};

std::vector<ManifestEntry> hash_artifacts(const std::filesystem::path& dir,
                                          const std::vector<std::filesystem::path>& files);
std::string manifest_json(const std::vector<ManifestEntry>& entries);
std::vector<ManifestEntry> parse_manifest(std::string_view json);

// Re-hashes the files a manifest lists; returns one message per mismatch.
std::vector<std::string> verify_manifest(const std::filesystem::path& dir);

struct PipelineResult {
  MineResult mine;
  SampleResult sample;
  SynthResult synth;
  std::vector<ManifestEntry> manifest;
};

// mine -> sample -> synth with a single transcript, then manifest.json. A
// manifest left by an earlier run is compared against the new one and any
// difference throws kInvariantViolation.
PipelineResult cmd_pipeline(const PipelineConfig& config, std::string_view target,
                            std::optional<std::string> description,
                            const std::filesystem::path& out_dir);

// {"jaccard_top50": ..., "freq_cosine": ...} over node-strength
// distributions of two graph files.
std::string cmd_compare(const std::filesystem::path& graph_a,
                        const std::filesystem::path& graph_b);

// 0 success, 2 config, 3 responder, 4 invariant violation, 1 anything else.
int exit_code_for(Errc code);

}  // namespace memmine
