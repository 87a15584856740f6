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

#include "memmine/oracle.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <set>

#include "json.hpp"
#include "memmine/elicit.hpp"
#include "memmine/error.hpp"
#include "memmine/io.hpp"
#include "memmine/json_fields.hpp"
#include "memmine/prompts.hpp"
#include "memmine/rng.hpp"

namespace memmine {
namespace {

std::string replace_all(std::string s, std::string_view from, std::string_view to) {
  std::size_t pos = 0;
  while ((pos = s.find(from, pos)) != std::string::npos) {
    s.replace(pos, from.size(), to);
    pos += to.size();
  }
  return s;
}

std::string ascii_lower(std::string_view s) {
  std::string out(s);
  for (char& c : out) {
    if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
  }
  return out;
}

bool word_char(char c) {
  return static_cast<unsigned char>(c) >= 0x80 ||
         std::isalnum(static_cast<unsigned char>(c));
}

// Case-insensitive, word-bounded replacement.
std::string replace_mentions(std::string_view text, std::string_view form,
                             std::string_view replacement) {
  const std::string lower_text = ascii_lower(text);
  const std::string lower_form = ascii_lower(form);
  if (lower_form.empty()) return std::string(text);
  std::string out;
  std::size_t cursor = 0;
  std::size_t pos = lower_text.find(lower_form);
  while (pos != std::string::npos) {
    const std::size_t end = pos + lower_form.size();
    const bool bounded = (pos == 0 || !word_char(text[pos - 1])) &&
                         (end == text.size() || !word_char(text[end]));
    if (bounded) {
      out.append(text.substr(cursor, pos - cursor));
      out.append(replacement);
      cursor = end;
      pos = lower_text.find(lower_form, end);
    } else {
      pos = lower_text.find(lower_form, pos + 1);
    }
  }
  out.append(text.substr(cursor));
  return out;
}

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(b, e - b + 1));
}

std::string strip_terminal_punct(std::string s) {
  while (!s.empty() && (s.back() == '.' || s.back() == '!' || s.back() == '?' ||
                        s.back() == ' ')) {
    s.pop_back();
  }
  return s;
}

std::string hallucination_line(std::string_view anchor, std::string_view entity) {
  return std::string(anchor) + " is often mentioned alongside " +
         std::string(entity) + ".";
}

}  // namespace

std::string OracleFact::render() const {
  return replace_all(replace_all(statement_template, "{subject}", subject),
                     "{object}", object);
}

void OracleWorld::validate() const {
  std::set<EntityId> fact_entities;
  for (std::size_t i = 0; i < facts.size(); ++i) {
    const OracleFact& f = facts[i];
    const std::string where = "facts[" + std::to_string(i) + "]";
    if (f.subject_id() == f.object_id()) {
      throw Error(Errc::kInvalidArgument, where + ": subject equals object");
    }
    if (!(f.recall_prob >= 0.0 && f.recall_prob <= 1.0)) {
      throw Error(Errc::kInvalidArgument, where + ": recall_prob outside [0,1]");
    }
    if (f.statement_template.find("{subject}") == std::string::npos ||
        f.statement_template.find("{object}") == std::string::npos) {
      throw Error(Errc::kInvalidArgument,
                  where + ": template needs {subject} and {object}");
    }
    fact_entities.insert(f.subject_id());
    fact_entities.insert(f.object_id());
  }
  if (!(hallucination_prob >= 0.0 && hallucination_prob < 1.0)) {
    throw Error(Errc::kInvalidArgument, "hallucination_prob outside [0,1)");
  }
  for (const auto& h : hallucination_pool) {
    if (fact_entities.contains(EntityId::from_mention(h))) {
      throw Error(Errc::kInvalidArgument,
                  "hallucination pool entry '" + h + "' is also a fact entity");
    }
  }
}

std::map<EntityId, std::string> OracleWorld::entities() const {
  std::map<EntityId, std::string> out;
  for (const auto& f : facts) {
    out.try_emplace(f.subject_id(), f.subject);
    out.try_emplace(f.object_id(), f.object);
  }
  for (const auto& h : hallucination_pool) {
    out.try_emplace(EntityId::from_mention(h), h);
  }
  return out;
}

std::vector<EntityId> OracleWorld::mentioned_in(std::string_view line) const {
  std::vector<EntityId> out;
  for (const auto& [id, display] : entities()) {
    if (mentions(line, display)) out.push_back(id);
  }
  return out;
}

OracleWorld OracleWorld::from_json(std::string_view bytes) {
  const nlohmann::json doc = parse_json_document(bytes);
  const FieldReader root(doc, "");
  OracleWorld w;
  w.seed = root.get<std::uint64_t>("seed");
  w.hallucination_prob = root.get_or<double>("hallucination_prob", 0.0);
  w.hallucination_pool =
      root.get_or<std::vector<std::string>>("hallucination_pool", {});
  for (const FieldReader& rf : root.array("facts")) {
    OracleFact f;
    f.subject = rf.get<std::string>("subject");
    f.object = rf.get<std::string>("object");
    f.statement_template = rf.get_or<std::string>("template", f.statement_template);
    f.recall_prob = rf.get_or<double>("recall_prob", 1.0);
    try {
      (void)f.subject_id();
      (void)f.object_id();
    } catch (const Error&) {
      throw Error(Errc::kSchemaError, rf.path("subject/object"));
    }
    w.facts.push_back(std::move(f));
  }
  w.validate();
  return w;
}

OracleWorld OracleWorld::load(const std::filesystem::path& path) {
  return from_json(read_file(path));
}

std::string OracleWorld::to_json() const {
  nlohmann::ordered_json j;
  j["seed"] = seed;
  j["hallucination_prob"] = hallucination_prob;
  j["hallucination_pool"] = hallucination_pool;
  nlohmann::ordered_json facts_json = nlohmann::ordered_json::array();
  for (const auto& f : facts) {
    nlohmann::ordered_json jf;
    jf["subject"] = f.subject;
    jf["object"] = f.object;
    jf["template"] = f.statement_template;
    jf["recall_prob"] = f.recall_prob;
    facts_json.push_back(std::move(jf));
  }
  j["facts"] = std::move(facts_json);
  return j.dump(2) + "\n";
}

OracleResponder::OracleResponder(OracleWorld world) : world_(std::move(world)) {
  world_.validate();
  entities_ = world_.entities();
}

std::string OracleResponder::complete(const std::string& prompt, int sample_index) {
  const auto parsed = parse_prompt(prompt);
  if (!parsed) {
    throw Error(Errc::kUnrecognizedPrompt,
                "oracle cannot answer: " + prompt.substr(0, prompt.find('\n')));
  }
  switch (parsed->kind) {
    case ParsedPrompt::Kind::kHop0:
    case ParsedPrompt::Kind::kNeighborHop: {
      const std::string& anchor = parsed->kind == ParsedPrompt::Kind::kHop0
                                      ? parsed->target
                                      : parsed->neighbor;
      const EntityId anchor_id = EntityId::from_mention(anchor);
      Rng rng(derive_seed(world_.seed, fnv1a64(prompt),
                          static_cast<std::uint64_t>(sample_index)));
      std::vector<std::string> lines;
      for (const auto& f : world_.facts) {
        if (!(f.subject_id() == anchor_id)) continue;
        if (rng.bernoulli(f.recall_prob)) lines.push_back(f.render());
      }
      if (!world_.hallucination_pool.empty() &&
          rng.bernoulli(world_.hallucination_prob)) {
        const auto pick = rng.below(world_.hallucination_pool.size());
        lines.push_back(hallucination_line(anchor, world_.hallucination_pool[pick]));
      }
      if (lines.empty()) return "I do not recall any specific facts.";
      std::string out;
      for (std::size_t i = 0; i < lines.size(); ++i) {
        if (i) out += '\n';
        out += std::to_string(i + 1) + ". " + lines[i];
      }
      return out;
    }
    case ParsedPrompt::Kind::kExtraction: {
      std::string out;
      std::size_t start = 0;
      const std::string& text = parsed->text;
      while (start <= text.size()) {
        std::size_t nl = text.find('\n', start);
        if (nl == std::string::npos) nl = text.size();
        for (const EntityId& id : world_.mentioned_in(text.substr(start, nl - start))) {
          out += entities_.at(id);
          out += '\n';
        }
        start = nl + 1;
      }
      return out.empty() ? "NONE" : out;
    }
    case ParsedPrompt::Kind::kEvent: {
      const EntityId a = EntityId::from_mention(parsed->event_1);
      const EntityId b = EntityId::from_mention(parsed->event_2);
      for (const auto& f : world_.facts) {
        const EntityId s = f.subject_id();
        const EntityId o = f.object_id();
        if ((s == a && o == b) || (s == b && o == a)) return f.render();
      }
      return "UNKNOWN";
    }
    case ParsedPrompt::Kind::kQa: {
      const std::string statement = strip_terminal_punct(trim(parsed->statement));
      std::string question;
      if (mentions(statement, parsed->target)) {
        question = replace_mentions(statement, parsed->target, "which entity");
        if (!question.empty() && question[0] >= 'a' && question[0] <= 'z') {
          question[0] = static_cast<char>(question[0] - 'a' + 'A');
        }
      } else {
        question = "Which entity is connected to the following: " + statement;
      }
      return "Question: " + question + "? Answer: " + parsed->target;
    }
  }
  throw Error(Errc::kUnrecognizedPrompt, "unhandled prompt kind");
}

double binomial_tail(int n, double p, int k) {
  if (k <= 0) return 1.0;
  if (k > n) return 0.0;
  double total = 0.0;
  for (int i = k; i <= n; ++i) {
    const double log_choose =
        std::lgamma(n + 1.0) - std::lgamma(i + 1.0) - std::lgamma(n - i + 1.0);
    double term;
    if (p <= 0.0) {
      term = 0.0;
    } else if (p >= 1.0) {
      term = i == n ? 1.0 : 0.0;
    } else {
      term = std::exp(log_choose + i * std::log(p) + (n - i) * std::log1p(-p));
    }
    total += term;
  }
  return std::min(1.0, total);
}

int min_hits(int N, double tau) {
  for (int k = 0; k <= N; ++k) {
    if (static_cast<double>(k) / static_cast<double>(N) >= tau) return k;
  }
  return N + 1;
}

MemoryGraph expected_graph(const OracleWorld& world, const MiningConfig& config,
                           std::string_view target) {
  config.validate();
  world.validate();
  const EntityId target_id = EntityId::from_mention(target);
  const auto displays = world.entities();
  const int need = min_hits(config.N, config.tau);
  const double pool_share =
      world.hallucination_pool.empty()
          ? 0.0
          : world.hallucination_prob /
                static_cast<double>(world.hallucination_pool.size());

  MemoryGraph graph(target_id, std::string(target), std::nullopt, config);
  BudgetReport& budget = graph.mutable_budget();
  budget.queries_per_iteration = config.N;

  std::vector<EntityId> frontier{target_id};
  for (int hop = 0; hop < config.K && !frontier.empty(); ++hop) {
    std::sort(frontier.begin(), frontier.end());
    std::vector<EntityId> next;
    const auto path_strength = config.adaptive_stop_threshold
                                   ? best_path_strength(graph)
                                   : std::map<EntityId, double>{};
    for (const EntityId& u : frontier) {
      if (config.adaptive_stop_threshold) {
        auto it = path_strength.find(u);
        if ((it == path_strength.end() ? 0.0 : it->second) <
            *config.adaptive_stop_threshold) {
          continue;
        }
      }
      if (budget.iterations >= config.max_iterations) {
        budget.truncated = true;
        continue;
      }
      ++budget.iterations;
      budget.queries_issued += config.N;

      // Per-response inclusion probability and expected mentions per response.
      std::map<EntityId, double> miss_prob;
      std::map<EntityId, double> per_response;
      for (const auto& f : world.facts) {
        if (!(f.subject_id() == u) || f.recall_prob <= 0.0) continue;
        for (const EntityId& v : world.mentioned_in(f.render())) {
          if (v == u || v == target_id) continue;
          auto [it, fresh] = miss_prob.try_emplace(v, 1.0);
          it->second *= 1.0 - f.recall_prob;
          per_response[v] += f.recall_prob;
        }
      }
      if (pool_share > 0.0) {
        for (const auto& h : world.hallucination_pool) {
          const EntityId v = EntityId::from_mention(h);
          if (v == u || v == target_id) continue;
          auto [it, fresh] = miss_prob.try_emplace(v, 1.0);
          it->second *= 1.0 - pool_share;
          per_response[v] += pool_share;
        }
      }
      double total = 0.0;
      for (const auto& [v, c] : per_response) total += c;
      for (const auto& [v, c] : per_response) {
        const double include = 1.0 - miss_prob.at(v);
        if (binomial_tail(config.N, include, need) <= kExpectedRetentionBar) {
          continue;
        }
        if (!graph.contains(v)) {
          graph.upsert_node(MemoryNode{v, {displays.at(v)}, include, hop + 1, u});
          next.push_back(v);
        }
        const long long count = std::max<long long>(1, std::llround(c * config.N));
        graph.put_edge(MemoryEdge{u, v, static_cast<int>(count), c / total});
      }
    }
    frontier = std::move(next);
  }
  graph.validate();
  return graph;
}

}  // namespace memmine
