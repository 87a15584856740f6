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

// memmine: mine a target's memory graph from a responder, sample paths over
// it and synthesize forget / neighbor QA datasets.

#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include <cstdint>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "memmine/error.hpp"
#include "memmine/io.hpp"
#include "memmine/pipeline.hpp"

namespace fs = std::filesystem;
using namespace memmine;

namespace {

struct Options {
  std::string config;
  std::string target;
  std::string description;
  std::optional<std::uint64_t> seed;
  std::string out;
  std::string graph;
  std::string paths;
  std::string neighbor_paths;
  std::string graph_b;
  bool verify = false;
  bool quiet = false;
};

PipelineConfig load(const Options& o) {
  PipelineConfig c = load_config(o.config);
  if (o.seed) c.set_seed(*o.seed);
  return c;
}

fs::path out_dir(const Options& o, const PipelineConfig& c) {
  return o.out.empty() ? c.output_dir : fs::path(o.out);
}

std::string target_of(const Options& o, const PipelineConfig& c) {
  if (!o.target.empty()) return o.target;
  if (c.target) return *c.target;
  throw Error(Errc::kConfigError, "no target: pass --target or set target in the config");
}

std::optional<std::string> description_of(const Options& o, const PipelineConfig& c) {
  if (!o.description.empty()) return o.description;
  return c.description;
}

fs::path or_default(const std::string& given, const fs::path& dir, const char* name) {
  return given.empty() ? dir / name : fs::path(given);
}

}  // namespace

int main(int argc, char** argv) {
  spdlog::set_default_logger(spdlog::stderr_color_mt("memmine"));
  spdlog::set_pattern("[%l] %v");

  CLI::App app{"Corpus-free unlearning supervision from a model's own memory"};
  app.require_subcommand(1);
  app.fallthrough();
  Options o;
  app.add_flag("-q,--quiet", o.quiet, "Only log warnings and errors");

  auto add_config = [&](CLI::App* sub) {
    sub->add_option("--config", o.config, "TOML configuration file")->required();
    sub->add_option("--seed", o.seed, "Seed for mining, sampling and request seeds");
    sub->add_option("--out", o.out, "Output directory (default: output_dir from config)");
  };

  CLI::App* mine = app.add_subcommand("mine", "Build the memory graph of a target");
  add_config(mine);
  mine->add_option("--target", o.target, "Target entity");
  mine->add_option("--description", o.description, "Disambiguating description");

  CLI::App* sample = app.add_subcommand("sample", "Sample forget and neighbor paths");
  add_config(sample);
  sample->add_option("--graph", o.graph, "Graph JSON (default: <out>/graph.json)");

  CLI::App* synth = app.add_subcommand("synth", "Synthesize QA datasets from paths");
  add_config(synth);
  synth->add_option("--graph", o.graph, "Graph JSON (default: <out>/graph.json)");
  synth->add_option("--paths", o.paths, "Forget paths (default: <out>/paths.jsonl)");
  synth->add_option("--neighbor-paths", o.neighbor_paths,
                    "Neighbor paths (default: <out>/neighbor_paths.jsonl)");

  CLI::App* pipeline = app.add_subcommand("pipeline", "mine, sample and synth in one run");
  add_config(pipeline);
  pipeline->add_option("--target", o.target, "Target entity");
  pipeline->add_option("--description", o.description, "Disambiguating description");
  pipeline->add_flag("--verify", o.verify,
                     "Only check existing artifacts against manifest.json");

  CLI::App* compare = app.add_subcommand("compare", "Compare two graphs");
  compare->add_option("graph_a", o.graph, "First graph JSON")->required();
  compare->add_option("graph_b", o.graph_b, "Second graph JSON")->required();
  compare->add_option("--out", o.out, "Also write the metrics JSON to this file");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }
  if (o.quiet) spdlog::set_level(spdlog::level::warn);

  try {
    if (*mine) {
      const PipelineConfig c = load(o);
      cmd_mine(c, target_of(o, c), description_of(o, c), out_dir(o, c));
    } else if (*sample) {
      const PipelineConfig c = load(o);
      const fs::path dir = out_dir(o, c);
      const auto r = cmd_sample(c, or_default(o.graph, dir, "graph.json"), dir);
      spdlog::info("{} forget paths (coverage {:.3f}), {} neighbor paths",
                   r.forget.paths.size(), r.forget.final_coverage(),
                   r.neighbor.paths.size());
    } else if (*synth) {
      const PipelineConfig c = load(o);
      const fs::path dir = out_dir(o, c);
      const auto r = cmd_synth(c, or_default(o.graph, dir, "graph.json"),
                               or_default(o.paths, dir, "paths.jsonl"),
                               or_default(o.neighbor_paths, dir, "neighbor_paths.jsonl"),
                               dir);
      spdlog::info("{} forget samples, {} neighbor samples", r.datasets.forget.size(),
                   r.datasets.neighbor.size());
    } else if (*pipeline) {
      const PipelineConfig c = load(o);
      const fs::path dir = out_dir(o, c);
      if (o.verify) {
        const auto problems = verify_manifest(dir);
        for (const auto& p : problems) spdlog::error("{}", p);
        if (!problems.empty()) return 4;
        spdlog::info("all artifacts match {}", (dir / "manifest.json").string());
      } else {
        const auto r = cmd_pipeline(c, target_of(o, c), description_of(o, c), dir);
        spdlog::info("wrote {} artifacts to {}", r.manifest.size(), dir.string());
      }
    } else if (*compare) {
      const std::string json = cmd_compare(o.graph, o.graph_b);
      std::cout << json;
      if (!o.out.empty()) write_file(o.out, json);
    }
  } catch (const Error& e) {
    spdlog::error("{}", e.what());
    return exit_code_for(e.code());
  } catch (const std::exception& e) {
    spdlog::error("{}", e.what());
    return 1;
  }
  return 0;
}
