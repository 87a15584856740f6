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

#include "memmine/synth.hpp"

#include <spdlog/spdlog.h>

#include <algorithm>
#include <cctype>
#include <cmath>
#include <map>
#include <numeric>

#include "json.hpp"
#include "memmine/elicit.hpp"
#include "memmine/error.hpp"
#include "memmine/io.hpp"
#include "memmine/json_fields.hpp"
#include "memmine/parallel.hpp"
#include "memmine/prompts.hpp"
#include "memmine/rng.hpp"

namespace memmine {
namespace {

constexpr std::uint64_t kMixStream = 0x6d6978ULL;  // "mix"

std::string trim(std::string_view s) {
  const auto is_space = [](unsigned char c) { return std::isspace(c) != 0; };
  std::size_t b = 0;
  std::size_t e = s.size();
  while (b < e && is_space(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && is_space(static_cast<unsigned char>(s[e - 1]))) --e;
  return std::string(s.substr(b, e - b));
}

std::string lower(std::string_view s) {
  std::string out(s);
  for (char& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

std::string strip_markup(std::string s) {
  std::string out;
  out.reserve(s.size());
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i] == '*' && i + 1 < s.size() && s[i + 1] == '*') {
      ++i;
      continue;
    }
    out += s[i];
  }
  return out;
}

// Byte offset of the code point with index `cp` in `s` (s.size() past end).
std::size_t byte_offset(std::string_view s, std::size_t cp) {
  std::size_t seen = 0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if ((static_cast<unsigned char>(s[i]) & 0xC0) != 0x80) {
      if (seen == cp) return i;
      ++seen;
    }
  }
  return s.size();
}

const MemoryNode& require_node(const MemoryGraph& graph, const EntityId& id) {
  if (!graph.contains(id)) {
    throw Error(Errc::kInvalidArgument, "'" + id.key() + "' is not a graph node");
  }
  return graph.node(id);
}

void check_qa(const std::string& question, const std::string& answer,
              const std::vector<std::string>& answer_names,
              const std::vector<std::string>& forbidden, std::string& reason) {
  if (!mentions_any(answer, answer_names)) {
    reason = "answer does not name the expected entity";
  } else if (mentions_any(question, answer_names)) {
    reason = "question names the answer entity";
  } else if (!forbidden.empty() &&
             (mentions_any(question, forbidden) || mentions_any(answer, forbidden))) {
    reason = "sample names the target";
  }
}

// One QA prompt with a single retry on rejection.
std::pair<std::string, std::string> ask_qa(
    Responder& responder, const std::string& prompt,
    const std::vector<std::string>& answer_names,
    const std::vector<std::string>& forbidden) {
  std::string reason;
  for (int attempt = 0; attempt < 2; ++attempt) {
    const std::string response = responder.complete(prompt, attempt);
    auto qa = parse_qa(response);
    if (!qa) {
      reason = "no Question/Answer pair";
      continue;
    }
    reason.clear();
    check_qa(qa->first, qa->second, answer_names, forbidden, reason);
    if (reason.empty()) return *qa;
  }
  throw Error(Errc::kUnparseableQA, reason + " after retry");
}

using Pair = std::pair<EntityId, EntityId>;

void append_dedup(std::vector<SupervisionSample>& out,
                  std::map<std::pair<std::string, std::string>, std::size_t>& index,
                  SupervisionSample sample) {
  auto key = std::make_pair(sample.question, sample.answer);
  auto it = index.find(key);
  if (it != index.end()) {
    ++out[it->second].multiplicity;
    return;
  }
  index.emplace(std::move(key), out.size());
  out.push_back(std::move(sample));
}

}  // namespace

std::string SupervisionSample::canonical() const {
  return "Question: " + question + " Answer: " + answer;
}

std::pair<std::size_t, std::size_t> answer_span_for(std::string_view question,
                                                    std::string_view answer) {
  const std::size_t start =
      utf8_length("Question: ") + utf8_length(question) + utf8_length(" Answer: ");
  return {start, start + utf8_length(answer)};
}

std::string span_text(const SupervisionSample& sample) {
  const std::string c = sample.canonical();
  const std::size_t b = byte_offset(c, sample.answer_span.first);
  const std::size_t e = byte_offset(c, sample.answer_span.second);
  if (b > e) return {};
  return c.substr(b, e - b);
}

std::vector<std::string> names_of(const MemoryGraph& graph, const EntityId& id) {
  std::vector<std::string> names{id.key()};
  if (graph.contains(id)) {
    for (const auto& f : graph.node(id).surface_forms) names.push_back(f);
  }
  return names;
}

bool mentions_any(std::string_view text, const std::vector<std::string>& names) {
  return std::any_of(names.begin(), names.end(), [&](const std::string& n) {
    return !n.empty() && mentions(text, n);
  });
}

std::optional<std::pair<std::string, std::string>> parse_qa(std::string_view text) {
  const std::string cleaned = strip_markup(std::string(text));
  const std::string low = lower(cleaned);
  const std::size_t q = low.find("question:");
  if (q == std::string::npos) return std::nullopt;
  const std::size_t a = low.find("answer:", q);
  if (a == std::string::npos) return std::nullopt;
  std::string question = trim(std::string_view(cleaned).substr(q + 9, a - q - 9));
  std::string_view rest = std::string_view(cleaned).substr(a + 7);
  const std::size_t nl = rest.find('\n');
  if (nl != std::string_view::npos) rest = rest.substr(0, nl);
  std::string answer = trim(rest);
  while (!answer.empty() && answer.back() == '.') answer.pop_back();
  answer = trim(answer);
  for (char& c : question) {
    if (c == '\n' || c == '\r' || c == '\t') c = ' ';
  }
  if (question.empty() || answer.empty()) return std::nullopt;
  return std::make_pair(std::move(question), std::move(answer));
}

std::string first_sentence(std::string_view text) {
  std::string flat;
  flat.reserve(text.size());
  for (char c : text) flat += (c == '\n' || c == '\r' || c == '\t') ? ' ' : c;
  for (std::size_t i = 0; i < flat.size(); ++i) {
    const char c = flat[i];
    if ((c == '.' || c == '!' || c == '?') &&
        (i + 1 == flat.size() ||
         std::isspace(static_cast<unsigned char>(flat[i + 1])) != 0)) {
      return trim(std::string_view(flat).substr(0, i + 1));
    }
  }
  return trim(flat);
}

EventStatement synthesize_event(const MemoryGraph& graph, const Pair& pair,
                                const EntityId& anchor, Responder& responder) {
  const MemoryNode& a = require_node(graph, pair.first);
  const MemoryNode& b = require_node(graph, pair.second);
  const MemoryNode& t = require_node(graph, anchor);
  EventStatement ev{pair, anchor, {}, EventStatus::kUnknown};
  const std::string response = responder.complete(
      render_event_prompt(display_name(t), display_name(a), display_name(b)), 0);
  const std::string body = trim(response);
  const std::string first_line = trim(body.substr(0, body.find('\n')));
  if (lower(first_line).rfind("unknown", 0) == 0 || body.empty()) return ev;
  std::string sentence = first_sentence(strip_markup(body));
  if (!mentions_any(sentence, names_of(graph, pair.first)) ||
      !mentions_any(sentence, names_of(graph, pair.second))) {
    return ev;
  }
  ev.text = std::move(sentence);
  ev.status = EventStatus::kOk;
  return ev;
}

SupervisionSample synthesize_forget_qa(const MemoryGraph& graph,
                                       const EventStatement& event,
                                       const EntityId& obj, Responder& responder,
                                       const std::vector<EntityId>& source_path) {
  if (event.status != EventStatus::kOk) {
    throw Error(Errc::kInvalidArgument, "event statement is UNKNOWN");
  }
  if (!(obj == event.pair.first) && !(obj == event.pair.second)) {
    throw Error(Errc::kInvalidArgument, "obj is not a member of the event pair");
  }
  const EntityId& target = graph.target();
  const std::string prompt =
      render_qa_prompt(display_name(graph.target_node()),
                       display_name(require_node(graph, obj)), event.text);
  auto [q, a] = ask_qa(responder, prompt, names_of(graph, target), {});
  const auto span = answer_span_for(q, a);
  return SupervisionSample{.kind = PathKind::kForget,
                           .question = std::move(q),
                           .answer = std::move(a),
                           .target = target,
                           .obj = obj,
                           .event_text = event.text,
                           .source_path = source_path,
                           .answer_span = span};
}

std::optional<SupervisionSample> synthesize_neighbor_qa(const MemoryGraph& graph,
                                                        const MemoryPath& path,
                                                        Responder& responder) {
  if (path.nodes.size() < 2) {
    throw Error(Errc::kInvalidArgument, "neighbor path shorter than 2 nodes");
  }
  for (const auto& id : path.nodes) {
    if (id == graph.target()) {
      throw Error(Errc::kInvalidArgument, "neighbor path contains the target");
    }
  }
  const EntityId& a = path.nodes[0];
  const EntityId& b = path.nodes[1];
  const EventStatement ev = synthesize_event(graph, {a, b}, a, responder);
  if (ev.status != EventStatus::kOk) return std::nullopt;
  const std::string prompt = render_qa_prompt(
      display_name(graph.node(a)), display_name(graph.node(b)), ev.text);
  auto [q, ans] =
      ask_qa(responder, prompt, names_of(graph, a), names_of(graph, graph.target()));
  const auto span = answer_span_for(q, ans);
  return SupervisionSample{.kind = PathKind::kNeighbor,
                           .question = std::move(q),
                           .answer = std::move(ans),
                           .target = graph.target(),
                           .obj = b,
                           .event_text = ev.text,
                           .source_path = path.nodes,
                           .answer_span = span};
}

Datasets build_datasets(const MemoryGraph& graph,
                        const std::vector<MemoryPath>& forget_paths,
                        const std::vector<MemoryPath>& neighbor_paths,
                        Responder& responder, int parallelism) {
  Datasets out;

  // Unique forget windows in first-seen order.
  std::vector<Pair> windows;
  std::map<Pair, std::size_t> window_index;
  for (const auto& p : forget_paths) {
    for (std::size_t i = 0; i + 1 < p.nodes.size(); ++i) {
      ++out.stats.forget_windows;
      Pair w{p.nodes[i], p.nodes[i + 1]};
      if (window_index.emplace(w, windows.size()).second) windows.push_back(w);
    }
  }

  struct Item {
    std::optional<SupervisionSample> sample;
    bool unknown = false;
    bool dropped = false;
  };
  auto record_failure = [](Item& item, const char* what, const std::string& where,
                           const Error& e) {
    item.dropped = true;
    spdlog::warn("{} {} skipped: {}", what, where, e.what());
  };

  std::vector<Item> forget_items(windows.size());
  parallel_for(windows.size(), parallelism, [&](std::size_t i) {
    const Pair& w = windows[i];
    Item& item = forget_items[i];
    try {
      const EventStatement ev = synthesize_event(graph, w, graph.target(), responder);
      if (ev.status != EventStatus::kOk) {
        item.unknown = true;
        return;
      }
      item.sample = synthesize_forget_qa(graph, ev, w.first, responder);
    } catch (const Error& e) {
      record_failure(item, "forget window", w.first.key() + " -> " + w.second.key(), e);
    }
  });
  for (const auto& item : forget_items) {
    out.stats.unknown_events += item.unknown ? 1 : 0;
    out.stats.dropped_items += item.dropped ? 1 : 0;
  }

  std::map<std::pair<std::string, std::string>, std::size_t> forget_seen;
  for (const auto& p : forget_paths) {
    for (std::size_t i = 0; i + 1 < p.nodes.size(); ++i) {
      const Item& item = forget_items[window_index.at({p.nodes[i], p.nodes[i + 1]})];
      if (!item.sample) continue;
      SupervisionSample s = *item.sample;
      s.source_path = p.nodes;
      ++out.stats.forget_generated;
      append_dedup(out.forget, forget_seen, std::move(s));
    }
  }

  // Neighbor QA depends only on the first window, so memoize on it.
  std::vector<std::size_t> first_of(neighbor_paths.size());
  std::vector<std::size_t> reps;
  std::map<Pair, std::size_t> first_index;
  for (std::size_t i = 0; i < neighbor_paths.size(); ++i) {
    const auto& nodes = neighbor_paths[i].nodes;
    Pair key = nodes.size() >= 2 ? Pair{nodes[0], nodes[1]}
                                 : Pair{graph.target(), graph.target()};
    auto [it, inserted] = first_index.emplace(key, reps.size());
    if (inserted) reps.push_back(i);
    first_of[i] = it->second;
  }
  std::vector<Item> neighbor_items(reps.size());
  parallel_for(reps.size(), parallelism, [&](std::size_t r) {
    const MemoryPath& p = neighbor_paths[reps[r]];
    Item& item = neighbor_items[r];
    try {
      item.sample = synthesize_neighbor_qa(graph, p, responder);
      item.unknown = !item.sample;
    } catch (const Error& e) {
      record_failure(item, "neighbor path", std::to_string(reps[r]), e);
    }
  });
  for (const auto& item : neighbor_items) {
    out.stats.unknown_events += item.unknown ? 1 : 0;
    out.stats.dropped_items += item.dropped ? 1 : 0;
  }
  std::map<std::pair<std::string, std::string>, std::size_t> neighbor_seen;
  for (std::size_t i = 0; i < neighbor_paths.size(); ++i) {
    const Item& item = neighbor_items[first_of[i]];
    if (!item.sample) continue;
    SupervisionSample s = *item.sample;
    s.source_path = neighbor_paths[i].nodes;
    ++out.stats.neighbor_generated;
    append_dedup(out.neighbor, neighbor_seen, std::move(s));
  }
  return out;
}

std::vector<SupervisionSample> mix_forget_set(
    const std::vector<SupervisionSample>& samples,
    const std::vector<bool>& correctness_labels, double ratio, std::uint64_t seed) {
  if (samples.size() != correctness_labels.size()) {
    throw Error(Errc::kInvalidArgument, "labels do not align with samples");
  }
  if (!(ratio >= 0.0 && ratio <= 1.0)) {
    throw Error(Errc::kInvalidArgument, "ratio must be in [0,1]");
  }
  std::vector<std::size_t> correct;
  std::vector<std::size_t> incorrect;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    (correctness_labels[i] ? correct : incorrect).push_back(i);
  }
  if (ratio > 0.0 && ratio < 1.0 && (correct.empty() || incorrect.empty())) {
    throw Error(Errc::kInfeasibleRatio,
                "a ratio strictly between 0 and 1 needs both label classes");
  }
  const auto C = static_cast<long long>(correct.size());
  const auto I = static_cast<long long>(incorrect.size());
  long long best_n = 0;
  long long best_c = 0;
  for (long long n = C + I; n >= 1; --n) {
    const long long c = std::llround(ratio * static_cast<double>(n));
    if (c <= C && n - c <= I) {
      best_n = n;
      best_c = c;
      break;
    }
  }
  if (best_n == 0) {
    throw Error(Errc::kInfeasibleRatio,
                "ratio " + std::to_string(ratio) + " with " + std::to_string(C) +
                    " correct and " + std::to_string(I) + " incorrect samples");
  }
  Rng rng(derive_seed(seed, kMixStream));
  auto pick = [&](std::vector<std::size_t> pool, long long k) {
    // Partial Fisher-Yates.
    for (long long i = 0; i < k; ++i) {
      const auto j = static_cast<std::size_t>(i) +
                     static_cast<std::size_t>(rng.below(pool.size() - static_cast<std::size_t>(i)));
      std::swap(pool[static_cast<std::size_t>(i)], pool[j]);
    }
    pool.resize(static_cast<std::size_t>(k));
    return pool;
  };
  std::vector<std::size_t> chosen = pick(correct, best_c);
  const std::vector<std::size_t> wrong = pick(incorrect, best_n - best_c);
  chosen.insert(chosen.end(), wrong.begin(), wrong.end());
  std::sort(chosen.begin(), chosen.end());
  std::vector<SupervisionSample> out;
  out.reserve(chosen.size());
  for (std::size_t i : chosen) out.push_back(samples[i]);
  return out;
}

std::string dataset_to_jsonl(const std::vector<SupervisionSample>& samples) {
  std::string out;
  for (const auto& s : samples) {
    nlohmann::ordered_json j;
    j["kind"] = path_kind_name(s.kind);
    j["question"] = s.question;
    j["answer"] = s.answer;
    j["target"] = s.target.key();
    j["obj"] = s.obj.key();
    j["event"] = s.event_text;
    nlohmann::ordered_json path = nlohmann::ordered_json::array();
    for (const auto& id : s.source_path) path.push_back(id.key());
    j["source_path"] = std::move(path);
    j["answer_span"] = {s.answer_span.first, s.answer_span.second};
    j["multiplicity"] = s.multiplicity;
    out += j.dump();
    out += '\n';
  }
  return out;
}

std::vector<SupervisionSample> dataset_from_jsonl(std::string_view text) {
  std::vector<SupervisionSample> out;
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
    PathKind kind;
    try {
      kind = parse_path_kind(r.get<std::string>("kind"));
    } catch (const Error&) {
      throw Error(Errc::kSchemaError, r.path("kind"));
    }
    auto id = [&](const char* key, const std::string& value) {
      try {
        return EntityId::from_key(value);
      } catch (const Error&) {
        throw Error(Errc::kSchemaError, r.path(key));
      }
    };
    std::vector<EntityId> source_path;
    for (const auto& key : r.get<std::vector<std::string>>("source_path")) {
      source_path.push_back(id("source_path", key));
    }
    const nlohmann::json& span = j.contains("answer_span") ? j["answer_span"]
                                                            : nlohmann::json();
    if (!span.is_array() || span.size() != 2 || !span[0].is_number_unsigned() ||
        !span[1].is_number_unsigned()) {
      throw Error(Errc::kSchemaError, r.path("answer_span"));
    }
    SupervisionSample s{.kind = kind,
                        .question = r.get<std::string>("question"),
                        .answer = r.get<std::string>("answer"),
                        .target = id("target", r.get<std::string>("target")),
                        .obj = id("obj", r.get<std::string>("obj")),
                        .event_text = r.get<std::string>("event"),
                        .source_path = std::move(source_path),
                        .answer_span = {span[0].get<std::size_t>(),
                                        span[1].get<std::size_t>()},
                        .multiplicity = r.get<int>("multiplicity")};
    if (s.multiplicity < 1) throw Error(Errc::kSchemaError, r.path("multiplicity"));
    out.push_back(std::move(s));
  }
  return out;
}

std::size_t emit_dataset(const std::vector<SupervisionSample>& samples,
                         const std::filesystem::path& destination) {
  const std::string bytes = dataset_to_jsonl(samples);
  write_file(destination, bytes);
  return bytes.size();
}

void validate_sample(const MemoryGraph& graph, const SupervisionSample& sample) {
  auto fail = [](const std::string& what) {
    throw Error(Errc::kInvariantViolation, what);
  };
  const auto target_names = names_of(graph, graph.target());
  if (sample.answer.empty() || sample.question.empty()) fail("empty question or answer");
  if (span_text(sample) != sample.answer) fail("answer_span does not select the answer");
  if (sample.multiplicity < 1) fail("multiplicity below 1");
  if (sample.kind == PathKind::kForget) {
    if (!mentions_any(sample.answer, target_names)) {
      fail("forget answer does not name the target");
    }
    if (mentions_any(sample.question, target_names)) {
      fail("forget question names the target");
    }
  } else {
    if (mentions_any(sample.question, target_names) ||
        mentions_any(sample.answer, target_names)) {
      fail("neighbor sample names the target");
    }
    for (const auto& id : sample.source_path) {
      if (id == graph.target()) fail("neighbor source path contains the target");
    }
  }
}

}  // namespace memmine
