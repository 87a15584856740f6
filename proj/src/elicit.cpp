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

#include "memmine/elicit.hpp"

#include <spdlog/spdlog.h>

#include <algorithm>
#include <array>
#include <cctype>
#include <queue>
#include <utility>

#include "memmine/error.hpp"
#include "memmine/parallel.hpp"

namespace memmine {
namespace {

constexpr std::array<std::string_view, 44> kFunctionWords = {
    "A",     "After", "Also",  "An",    "And",   "As",    "At",    "Before",
    "But",   "By",    "During", "For",  "From",  "He",    "Her",   "Here",
    "His",   "I",     "In",    "It",    "Its",   "Many",  "Most",  "My",
    "Of",    "On",    "One",   "Or",    "Our",   "She",   "Some",  "That",
    "The",   "Their", "There", "These", "They",  "This",  "Those", "To",
    "We",    "When",  "While", "With"};

bool is_function_word(std::string_view w) {
  return std::find(kFunctionWords.begin(), kFunctionWords.end(), w) !=
         kFunctionWords.end();
}

bool is_upper(char c) { return c >= 'A' && c <= 'Z'; }
bool is_digit(char c) { return c >= '0' && c <= '9'; }

bool is_year(std::string_view w) {
  return w.size() == 4 && std::all_of(w.begin(), w.end(), is_digit);
}

void add_mention(Extraction& out, std::string_view raw) {
  std::string form(raw);
  const auto first = form.find_first_not_of(" \t\r");
  if (first == std::string::npos) return;
  form = form.substr(first, form.find_last_not_of(" \t\r") - first + 1);
  try {
    EntityId id = EntityId::from_mention(form);
    ++out.counts[id];
    out.surface_forms[id].insert(std::move(form));
  } catch (const Error&) {
    // Pure punctuation; not an entity.
  }
}

struct Token {
  std::string core;
  bool break_before = false;
  bool break_after = false;
};

std::vector<Token> tokenize(std::string_view text) {
  std::vector<Token> tokens;
  std::size_t i = 0;
  while (i < text.size()) {
    while (i < text.size() && std::isspace(static_cast<unsigned char>(text[i]))) ++i;
    const std::size_t start = i;
    while (i < text.size() && !std::isspace(static_cast<unsigned char>(text[i]))) ++i;
    if (start == i) break;
    std::string_view word = text.substr(start, i - start);
    Token t;
    std::size_t b = 0;
    std::size_t e = word.size();
    while (b < e && std::ispunct(static_cast<unsigned char>(word[b]))) {
      t.break_before = true;
      ++b;
    }
    while (e > b && std::ispunct(static_cast<unsigned char>(word[e - 1]))) {
      t.break_after = true;
      --e;
    }
    std::string_view core = word.substr(b, e - b);
    if (core.ends_with("'s") || core.ends_with("’s")) {
      core = core.substr(0, core.rfind(core.ends_with("'s") ? "'s" : "’s"));
      t.break_after = true;
    }
    t.core = std::string(core);
    tokens.push_back(std::move(t));
  }
  return tokens;
}

std::string strip_list_marker(std::string_view line) {
  std::size_t i = 0;
  auto skip_space = [&] {
    while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i]))) ++i;
  };
  skip_space();
  if (i < line.size() && (line[i] == '-' || line[i] == '*')) {
    ++i;
  } else if (line.substr(i).starts_with("•")) {
    i += std::string_view("•").size();
  } else {
    std::size_t j = i;
    while (j < line.size() && is_digit(line[j])) ++j;
    if (j > i && j < line.size() && (line[j] == '.' || line[j] == ')')) i = j + 1;
  }
  skip_space();
  return std::string(line.substr(i));
}

}  // namespace

std::set<EntityId> Extraction::entities() const {
  std::set<EntityId> out;
  for (const auto& [id, c] : counts) out.insert(id);
  return out;
}

Extraction heuristic_entities(std::string_view response) {
  Extraction out;
  const auto tokens = tokenize(response);
  std::vector<std::string> run;
  auto flush = [&] {
    std::size_t skip = 0;
    while (skip < run.size() && is_function_word(run[skip])) ++skip;
    if (skip < run.size()) {
      std::string form;
      for (std::size_t k = skip; k < run.size(); ++k) {
        if (!form.empty()) form.push_back(' ');
        form += run[k];
      }
      add_mention(out, form);
    }
    run.clear();
  };
  for (const Token& t : tokens) {
    if (t.break_before) flush();
    if (is_year(t.core)) {
      flush();
      add_mention(out, t.core);
    } else if (!t.core.empty() && is_upper(t.core.front())) {
      run.push_back(t.core);
    } else {
      flush();
    }
    if (t.break_after) flush();
  }
  flush();
  return out;
}

Extraction parse_entity_list(std::string_view listing, std::string_view response) {
  Extraction out;
  std::size_t start = 0;
  while (start <= listing.size()) {
    std::size_t nl = listing.find('\n', start);
    if (nl == std::string_view::npos) nl = listing.size();
    const std::string line = strip_list_marker(listing.substr(start, nl - start));
    start = nl + 1;
    if (line.empty() || normalize_text(line) == "none") continue;
    if (!mentions(response, line)) continue;
    add_mention(out, line);
  }
  out.used_responder = true;
  return out;
}

Extraction extract_entities(std::string_view response, Responder* responder,
                            bool fallback, const EntityId& exclude,
                            int sample_index) {
  Extraction out;
  if (response.empty()) return out;
  bool done = false;
  if (!fallback && responder != nullptr) {
    try {
      const std::string listing =
          responder->complete(render_extraction_prompt(response), sample_index);
      out = parse_entity_list(listing, response);
      done = true;
    } catch (const std::exception& e) {
      spdlog::debug("assisted extraction failed, using heuristic: {}", e.what());
    }
  }
  if (!done) out = heuristic_entities(response);
  out.counts.erase(exclude);
  out.surface_forms.erase(exclude);
  return out;
}

double strength(const ElicitationRecord& record, const EntityId& candidate) {
  if (record.extractions.empty()) return 0.0;
  std::size_t hits = 0;
  for (const auto& set : record.extractions) hits += set.contains(candidate);
  return static_cast<double>(hits) / static_cast<double>(record.extractions.size());
}

std::string display_name(const MemoryNode& node) {
  return node.surface_forms.empty() ? node.id.key() : *node.surface_forms.begin();
}

std::map<EntityId, double> best_path_strength(const MemoryGraph& graph) {
  // Weights are <= 1, so products only shrink along a path and a
  // Dijkstra-style best-first search settles each node once.
  std::map<EntityId, double> best;
  using Item = std::pair<double, EntityId>;
  auto worse = [](const Item& a, const Item& b) {
    if (a.first != b.first) return a.first < b.first;
    return b.second < a.second;
  };
  std::priority_queue<Item, std::vector<Item>, decltype(worse)> frontier(worse);
  frontier.emplace(1.0, graph.target());
  while (!frontier.empty()) {
    auto [value, u] = frontier.top();
    frontier.pop();
    if (best.contains(u)) continue;
    best.emplace(u, value);
    for (const MemoryEdge* e : graph.out_edges(u)) {
      if (!best.contains(e->dst)) frontier.emplace(value * e->weight, e->dst);
    }
  }
  return best;
}

MiningRun mine_graph(const MiningConfig& config, std::string_view target,
                     std::optional<std::string> description,
                     Responder& responder, int parallelism) {
  config.validate();
  const EntityId target_id = EntityId::from_mention(target);
  const std::string target_raw(target);
  MiningRun run{MemoryGraph(target_id, target_raw, description, config), {}};
  MemoryGraph& graph = run.graph;
  BudgetReport& budget = graph.mutable_budget();
  budget.queries_per_iteration = config.N;

  std::optional<std::string_view> desc_view;
  if (description) desc_view = *description;

  std::map<std::pair<std::string, int>, Extraction> extraction_cache;
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
        const double s = it == path_strength.end() ? 0.0 : it->second;
        if (s < *config.adaptive_stop_threshold) {
          spdlog::debug("adaptive stop: skipping '{}' (path strength {})",
                        u.key(), s);
          continue;
        }
      }
      if (budget.iterations >= config.max_iterations) {
        budget.truncated = true;
        continue;
      }
      ++budget.iterations;

      ElicitationRecord record{target_id, std::nullopt, PromptKind::kHop0, {}, {}, {}, {}, {}};
      if (hop == 0) {
        record.prompt = render_prompt(PromptKind::kHop0, target_raw, std::nullopt,
                                      desc_view);
      } else {
        record.secondary_anchor = u;
        record.prompt_kind = PromptKind::kNeighborHop;
        record.prompt = render_prompt(PromptKind::kNeighborHop, target_raw,
                                      display_name(graph.node(u)), desc_view);
      }

      record.responses.resize(static_cast<std::size_t>(config.N));
      try {
        parallel_for(record.responses.size(), parallelism, [&](std::size_t i) {
          record.responses[i] = responder.complete(record.prompt, static_cast<int>(i));
        });
      } catch (const Error& e) {
        throw Error(Errc::kResponderFailure,
                    "while eliciting anchor '" + u.key() + "': " + e.detail());
      } catch (const std::exception& e) {
        throw Error(Errc::kResponderFailure,
                    "while eliciting anchor '" + u.key() + "': " + e.what());
      }
      budget.queries_issued += config.N;

      std::vector<Extraction> extracted(record.responses.size());
      std::vector<bool> cached(record.responses.size(), false);
      for (std::size_t i = 0; i < extracted.size(); ++i) {
        auto it = extraction_cache.find({record.responses[i], static_cast<int>(i)});
        if (it != extraction_cache.end()) {
          extracted[i] = it->second;
          cached[i] = true;
        }
      }
      parallel_for(extracted.size(), parallelism, [&](std::size_t i) {
        if (cached[i]) return;
        extracted[i] = extract_entities(record.responses[i], &responder,
                                        config.heuristic_extraction, target_id,
                                        static_cast<int>(i));
      });
      for (std::size_t i = 0; i < extracted.size(); ++i) {
        if (cached[i]) continue;
        if (extracted[i].used_responder) ++budget.extraction_queries;
        extraction_cache.emplace(
            std::make_pair(record.responses[i], static_cast<int>(i)), extracted[i]);
      }

      for (auto& ex : extracted) {
        ex.counts.erase(u);  // no self loops
        ex.surface_forms.erase(u);
        record.extractions.push_back(ex.entities());
        for (const auto& [id, c] : ex.counts) record.extraction_counts[id] += c;
        for (const auto& [id, forms] : ex.surface_forms) {
          record.surface_forms[id].insert(forms.begin(), forms.end());
        }
      }

      if (!record.extraction_counts.empty()) {
        const auto weights = edge_weights(record.extraction_counts);
        for (const auto& [v, count] : record.extraction_counts) {
          const double s = strength(record, v);
          if (s < config.tau) continue;
          if (!graph.contains(v)) {
            graph.upsert_node(MemoryNode{v, record.surface_forms.at(v), s, hop + 1, u});
            next.push_back(v);
          }
          graph.put_edge(MemoryEdge{u, v, count, weights.at(v)});
        }
      }
      run.records.push_back(std::move(record));
    }
    frontier = std::move(next);
  }
  graph.validate();
  return run;
}

}  // namespace memmine
