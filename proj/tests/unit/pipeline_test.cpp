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

#define CPPHTTPLIB_OPENSSL_SUPPORT
#include "httplib.h"

#include <gtest/gtest.h>

#include <atomic>
#include <thread>

#include "json.hpp"
#include "memmine/io.hpp"
#include "memmine/oracle.hpp"
#include "memmine/pipeline.hpp"
#include "memmine/prompts.hpp"
#include "test_util.hpp"

namespace memmine {
namespace {

namespace fs = std::filesystem;
using testing::fact;
using testing::id;

OracleWorld three_fact_world() {
  OracleWorld w;
  w.facts = {fact("Taylor Swift", "Blank Space", 1.0, "{subject} released {object}."),
             fact("Taylor Swift", "Ed Sheeran", 1.0, "{subject} toured with {object}."),
             fact("Ed Sheeran", "Shape of You", 1.0, "{subject} wrote {object}.")};
  return w;
}

fs::path write_world(const fs::path& dir, const OracleWorld& w) {
  write_file(dir / "world.json", w.to_json());
  return dir / "world.json";
}

PipelineConfig oracle_config(const fs::path& dir) {
  write_world(dir, three_fact_world());
  return parse_config("[responder]\nkind = \"oracle\"\nworld = \"world.json\"\n"
                      "[sampling]\nR = 20\neta = 0.0\n",
                      dir);
}

TEST(ParseConfig, DefaultsAndOverrides) {
  const auto dir = testing::scratch_dir("cfg_ok");
  write_world(dir, three_fact_world());
  const auto c = parse_config(R"(
output_dir = "run"
parallelism = 2
seed = 9
[responder]
kind = "oracle"
world = "world.json"
[mining]
profile = "sparse"
N = 12
[sampling]
L = 4
alpha = 0.5
visit_update = "between_walks"
)",
                              dir);
  EXPECT_EQ(c.output_dir, dir / "run");
  EXPECT_EQ(c.parallelism, 2);
  EXPECT_EQ(c.mining.N, 12);
  EXPECT_DOUBLE_EQ(c.mining.tau, 0.3);
  EXPECT_EQ(c.mining.K, 3);
  EXPECT_EQ(c.mining.seed, 9u);
  EXPECT_EQ(c.sampling.seed, 9u);
  EXPECT_EQ(c.sampling.L, 4);
  EXPECT_DOUBLE_EQ(c.sampling.alpha, 0.5);
  EXPECT_EQ(c.responder.world, dir / "world.json");
}

TEST(ParseConfig, RejectsBadInput) {
  const auto dir = testing::scratch_dir("cfg_bad");
  write_world(dir, three_fact_world());
  const std::string head = "[responder]\nkind = \"oracle\"\nworld = \"world.json\"\n";
  EXPECT_ERRC(parse_config(head + "bogus = 1\n", dir), Errc::kConfigError);
  EXPECT_ERRC(parse_config(head + "[mining]\nN = \"ten\"\n", dir), Errc::kConfigError);
  EXPECT_ERRC(parse_config(head + "[mining]\ntau = 1.5\n", dir), Errc::kConfigError);
  EXPECT_ERRC(parse_config(head + "[sampling]\nvisit_update = \"never\"\n", dir),
              Errc::kConfigError);
  EXPECT_ERRC(parse_config("[responder]\nkind = \"psychic\"\n", dir), Errc::kConfigError);
  EXPECT_ERRC(parse_config("this is = = not toml", dir), Errc::kConfigError);
}

TEST(ParseConfig, MissingWorldNamesPathAndMapsToExitTwo) {
  const auto dir = testing::scratch_dir("cfg_missing");
  try {
    parse_config("[responder]\nkind = \"oracle\"\nworld = \"absent.json\"\n", dir);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::kConfigError);
    EXPECT_NE(e.detail().find((dir / "absent.json").string()), std::string::npos);
    EXPECT_EQ(exit_code_for(e.code()), 2);
  }
}

TEST(ExitCodes, Mapping) {
  EXPECT_EQ(exit_code_for(Errc::kConfigError), 2);
  EXPECT_EQ(exit_code_for(Errc::kResponderFailure), 3);
  EXPECT_EQ(exit_code_for(Errc::kInvariantViolation), 4);
  EXPECT_EQ(exit_code_for(Errc::kSchemaError), 1);
}

TEST(CmdMine, ThreeFactWorld) {
  const auto dir = testing::scratch_dir("mine3");
  const auto c = oracle_config(dir);
  const auto r = cmd_mine(c, "Taylor Swift", std::nullopt, dir / "out");
  EXPECT_EQ(r.run.graph.nodes().size(), 4u);
  for (const char* f : {"graph.json", "transcript.jsonl", "budget.json"}) {
    EXPECT_TRUE(fs::exists(dir / "out" / f)) << f;
  }
  const auto back = deserialize_graph(read_file(dir / "out" / "graph.json"));
  EXPECT_EQ(back, r.run.graph);
  const auto budget = nlohmann::json::parse(read_file(dir / "out" / "budget.json"));
  EXPECT_TRUE(budget.at("within_bound").get<bool>());
  EXPECT_EQ(testing::structure_diff(back, expected_graph(three_fact_world(), c.mining,
                                                          "Taylor Swift")),
            "");
}

TEST(CmdPipeline, ReplayIsByteIdenticalAndManifestVerifies) {
  const auto dir = testing::scratch_dir("pipe_replay");
  auto c = oracle_config(dir);
  const auto live = cmd_pipeline(c, "Taylor Swift", std::nullopt, dir / "live");
  EXPECT_TRUE(verify_manifest(dir / "live").empty());
  EXPECT_FALSE(live.synth.datasets.forget.empty());

  PipelineConfig replay = c;
  replay.responder.kind = ResponderKind::kReplay;
  replay.responder.transcript = dir / "live" / "transcript.jsonl";
  const auto again = cmd_pipeline(replay, "Taylor Swift", std::nullopt, dir / "replay");
  EXPECT_EQ(again.manifest, live.manifest);
  for (const auto& e : live.manifest) {
    EXPECT_EQ(read_file(dir / "live" / e.path), read_file(dir / "replay" / e.path)) << e.path;
  }

  // Rerunning into the same directory reproduces the manifest.
  EXPECT_NO_THROW(cmd_pipeline(c, "Taylor Swift", std::nullopt, dir / "live"));

  write_file(dir / "live" / "forget.jsonl", "tampered\n");
  EXPECT_FALSE(verify_manifest(dir / "live").empty());
  // A different seed against the old manifest is flagged.
  c.set_seed(12345);
  c.responder.world = write_world(dir, [] {
    OracleWorld w = three_fact_world();
    w.facts.push_back(fact("Taylor Swift", "Travis Kelce"));
    return w;
  }());
  EXPECT_ERRC(cmd_pipeline(c, "Taylor Swift", std::nullopt, dir / "live"),
              Errc::kInvariantViolation);
}

TEST(CmdPipeline, ReplayMissIsReported) {
  const auto dir = testing::scratch_dir("pipe_miss");
  auto c = oracle_config(dir);
  write_file(dir / "empty.jsonl", "");
  c.responder.kind = ResponderKind::kReplay;
  c.responder.transcript = dir / "empty.jsonl";
  try {
    cmd_pipeline(c, "Taylor Swift", std::nullopt, dir / "out");
    FAIL();
  } catch (const Error& e) {
    EXPECT_NE(exit_code_for(e.code()), 0);
  }
}

TEST(StagedCommands, MatchPipelineArtifacts) {
  const auto dir = testing::scratch_dir("staged");
  const auto c = oracle_config(dir);
  const auto full = cmd_pipeline(c, "Taylor Swift", std::nullopt, dir / "full");
  cmd_mine(c, "Taylor Swift", std::nullopt, dir / "staged");
  cmd_sample(c, dir / "staged" / "graph.json", dir / "staged");
  cmd_synth(c, dir / "staged" / "graph.json", dir / "staged" / "paths.jsonl",
            dir / "staged" / "neighbor_paths.jsonl", dir / "staged");
  for (const char* f : {"graph.json", "paths.jsonl", "neighbor_paths.jsonl", "forget.jsonl",
                        "neighbor.jsonl"}) {
    EXPECT_EQ(read_file(dir / "full" / f), read_file(dir / "staged" / f)) << f;
  }
  EXPECT_ERRC(cmd_sample(c, dir / "nope.json", dir / "x"), Errc::kConfigError);
}

TEST(CmdCompare, IdenticalGraphsScoreOne) {
  const auto dir = testing::scratch_dir("compare");
  const auto c = oracle_config(dir);
  cmd_mine(c, "Taylor Swift", std::nullopt, dir / "a");
  const auto j = nlohmann::json::parse(cmd_compare(dir / "a" / "graph.json", dir / "a" / "graph.json"));
  EXPECT_DOUBLE_EQ(j.at("jaccard_top50").get<double>(), 1.0);
  EXPECT_NEAR(j.at("freq_cosine").get<double>(), 1.0, 1e-12);
}

TEST(Manifest, JsonRoundTrip) {
  const std::vector<ManifestEntry> m = {{"a.json", std::string(64, 'a'), 3},
                                        {"b.jsonl", std::string(64, 'b'), 0}};
  EXPECT_EQ(parse_manifest(manifest_json(m)), m);
  const auto dir = testing::scratch_dir("manifest");
  write_file(dir / "abc.txt", "abc");
  const auto h = hash_artifacts(dir, {dir / "abc.txt"});
  ASSERT_EQ(h.size(), 1u);
  EXPECT_EQ(h[0].sha256, "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
  EXPECT_EQ(h[0].bytes, 3u);
}

class FakeChatServer {
 public:
  explicit FakeChatServer(int failures_before_success) : failures_(failures_before_success) {
    server_.Post("/v1/chat/completions", [this](const httplib::Request& req,
                                                httplib::Response& res) {
      ++hits_;
      last_auth_ = req.get_header_value("Authorization");
      if (failures_-- > 0) {
        res.status = 500;
        return;
      }
      const auto body = nlohmann::json::parse(req.body);
      nlohmann::json out;
      out["choices"] = nlohmann::json::array(
          {{{"message",
             {{"role", "assistant"},
              {"content", "echo " + std::to_string(body.at("seed").get<int>()) + " " +
                              body.at("messages")[0].at("content").get<std::string>()}}}}});
      res.set_content(out.dump(), "application/json");
    });
    port_ = server_.bind_to_any_port("127.0.0.1");
    thread_ = std::thread([this] { server_.listen_after_bind(); });
    server_.wait_until_ready();
  }
  ~FakeChatServer() {
    server_.stop();
    thread_.join();
  }
  std::string endpoint() const {
    return "http://127.0.0.1:" + std::to_string(port_) + "/v1/chat/completions";
  }
  int hits() const { return hits_; }
  std::string last_auth() const { return last_auth_; }

 private:
  httplib::Server server_;
  std::thread thread_;
  int port_ = 0;
  std::atomic<int> failures_;
  std::atomic<int> hits_{0};
  std::string last_auth_;
};

TEST(HttpResponder, RetriesServerErrorsAndRecords) {
  FakeChatServer server(1);
  ::setenv("MEMMINE_TEST_KEY", "sk-test", 1);
  HttpResponderConfig cfg;
  cfg.endpoint = server.endpoint();
  cfg.model = "m";
  cfg.backoff_seconds = 0.01;
  cfg.seed = 40;
  cfg.api_key_env = "MEMMINE_TEST_KEY";
  TranscriptLog log;
  HttpResponder r(cfg, &log);
  EXPECT_EQ(r.complete("hello", 2), "echo 42 hello");
  EXPECT_EQ(server.hits(), 2);
  EXPECT_EQ(server.last_auth(), "Bearer sk-test");
  ASSERT_EQ(log.size(), 1u);
  EXPECT_EQ(log.entries()[0].completion, "echo 42 hello");
}

TEST(HttpResponder, GivesUpAfterRetries) {
  FakeChatServer server(100);
  HttpResponderConfig cfg;
  cfg.endpoint = server.endpoint();
  cfg.model = "m";
  cfg.retries = 2;
  cfg.backoff_seconds = 0.01;
  HttpResponder r(cfg);
  EXPECT_ERRC(r.complete("hello", 0), Errc::kResponderFailure);
  EXPECT_EQ(server.hits(), 3);
}

TEST(HttpResponder, UnreachableEndpointFails) {
  HttpResponderConfig cfg;
  cfg.endpoint = "http://127.0.0.1:1/v1/chat/completions";
  cfg.model = "m";
  cfg.retries = 0;
  cfg.timeout_seconds = 2;
  HttpResponder r(cfg);
  EXPECT_ERRC(r.complete("hello", 0), Errc::kResponderFailure);
}

}  // namespace
}  // namespace memmine
