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

#include "memmine/prompts.hpp"

#include <utility>
#include <vector>

#include "memmine/error.hpp"

namespace memmine {
namespace {

std::string substitute(
    std::string_view tmpl,
    std::initializer_list<std::pair<std::string_view, std::string_view>> vars) {
  std::string out;
  out.reserve(tmpl.size() + 64);
  std::size_t i = 0;
  while (i < tmpl.size()) {
    if (tmpl[i] == '{') {
      const std::size_t close = tmpl.find('}', i);
      if (close != std::string_view::npos) {
        const std::string_view name = tmpl.substr(i + 1, close - i - 1);
        bool replaced = false;
        for (const auto& [key, value] : vars) {
          if (key == name) {
            out.append(value);
            replaced = true;
            break;
          }
        }
        if (replaced) {
          i = close + 1;
          continue;
        }
      }
    }
    out.push_back(tmpl[i++]);
  }
  return out;
}

std::vector<std::string_view> split_lines(std::string_view s) {
  std::vector<std::string_view> lines;
  std::size_t start = 0;
  while (start <= s.size()) {
    const std::size_t nl = s.find('\n', start);
    if (nl == std::string_view::npos) {
      lines.push_back(s.substr(start));
      break;
    }
    lines.push_back(s.substr(start, nl - start));
    start = nl + 1;
  }
  return lines;
}

std::string_view first_line(std::string_view s) {
  return s.substr(0, s.find('\n'));
}

// Value of the first line starting with `label`, if any.
std::optional<std::string> field(const std::vector<std::string_view>& lines,
                                 std::string_view label) {
  for (std::string_view line : lines) {
    if (line.starts_with(label)) return std::string(line.substr(label.size()));
  }
  return std::nullopt;
}

}  // namespace

std::string_view prompt_kind_name(PromptKind kind) {
  return kind == PromptKind::kHop0 ? "Hop0" : "NeighborHop";
}

std::string render_prompt(PromptKind kind, std::string_view target,
                          std::optional<std::string_view> neighbor,
                          std::optional<std::string_view> description) {
  std::string out;
  if (kind == PromptKind::kHop0) {
    out = substitute(templates::kHop0, {{"target", target}});
  } else {
    if (!neighbor) {
      throw Error(Errc::kMissingNeighbor,
                  "NeighborHop prompt for '" + std::string(target) +
                      "' needs a neighbor");
    }
    out = substitute(templates::kNeighborHop,
                     {{"target", target}, {"neighbor", *neighbor}});
  }
  if (description && !description->empty()) {
    const std::string target_line = "Target: " + std::string(target) + "\n";
    const std::size_t at = out.find(target_line);
    out.insert(at + target_line.size(),
               "Description: " + std::string(*description) + "\n");
  }
  return out;
}

std::string render_event_prompt(std::string_view target, std::string_view event_1,
                                std::string_view event_2) {
  return substitute(templates::kEvent, {{"target", target},
                                        {"event_1", event_1},
                                        {"event_2", event_2}});
}

std::string render_qa_prompt(std::string_view target, std::string_view obj,
                             std::string_view event) {
  return substitute(templates::kQa,
                    {{"target", target}, {"obj", obj}, {"event", event}});
}

std::string render_extraction_prompt(std::string_view text) {
  return substitute(templates::kExtraction, {{"text", text}});
}

std::optional<ParsedPrompt> parse_prompt(std::string_view prompt) {
  const std::string_view head = first_line(prompt);

  if (head == first_line(templates::kExtraction)) {
    constexpr std::string_view marker = "\nText:\n";
    const std::size_t at = prompt.find(marker);
    if (at == std::string_view::npos) return std::nullopt;
    ParsedPrompt p{ParsedPrompt::Kind::kExtraction, {}, {}, {}, {}, {}, {}, {}};
    p.text = std::string(prompt.substr(at + marker.size()));
    return p;
  }

  const auto lines = split_lines(prompt);
  if (head == first_line(templates::kHop0)) {
    auto target = field(lines, "Target: ");
    if (!target) return std::nullopt;
    ParsedPrompt p{ParsedPrompt::Kind::kHop0, *target, {}, {}, {}, {}, {}, {}};
    if (auto neighbor = field(lines, "Neighbor: ")) {
      p.kind = ParsedPrompt::Kind::kNeighborHop;
      p.neighbor = *neighbor;
    }
    return p;
  }
  if (head == first_line(templates::kEvent)) {
    auto target = field(lines, "Anchor Target: ");
    auto e1 = field(lines, "Event 1: ");
    auto e2 = field(lines, "Event 2: ");
    if (!target || !e1 || !e2) return std::nullopt;
    return ParsedPrompt{ParsedPrompt::Kind::kEvent, *target, {}, *e1, *e2,
                        {},  {},      {}};
  }
  if (head == first_line(templates::kQa)) {
    auto target = field(lines, "Target Entity: ");
    auto obj = field(lines, "Central Context (Obj): ");
    auto statement = field(lines, "Statement: ");
    if (!target || !obj || !statement) return std::nullopt;
    return ParsedPrompt{ParsedPrompt::Kind::kQa, *target, {}, {}, {},
                        *obj, *statement, {}};
  }
  return std::nullopt;
}

}  // namespace memmine
