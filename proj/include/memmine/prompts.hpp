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

// Prompt registry. The elicitation, event and QA templates are kept
// character-for-character as published (including their typos); only the
// extraction prompt is our own.

#pragma once

#include <optional>
#include <string>
#include <string_view>

namespace memmine {

enum class PromptKind { kHop0, kNeighborHop };

std::string_view prompt_kind_name(PromptKind kind);

namespace templates {

inline constexpr std::string_view kHop0 =
    "Recall information from your own internal knowledge.\n"
    "Target: {target}\n"
    "Write 5-10 atomic statements about {target}.";

inline constexpr std::string_view kNeighborHop =
    "Recall information from your own internal knowledge.\n"
    "Target: {target}\n"
    "Neighbor: {neighbor}\n"
    "Write 5-10 SHORT atomic statements specifically about how {neighbor} "
    "relates to {target}.";

inline constexpr std::string_view kEvent =
    "Please act as an information assistant to help users learn about "
    "pertinent details regarding the target.\n"
    "Given an anchor target, according to known knowledge about the target, "
    "and two key event about the target, please provide ONE concise factual "
    "statement about the target's main information.\n"
    "The statement should highlight details about the {target} that users may "
    "find important.\n"
    "Do NOT invent fictional or hypothetical scenarios. If you are not "
    "confident the connection is real, output UNKNOWN.\n"
    "The statement should explicitly include BOTH eventss' names (do not use "
    "pronouns), and keep it to ONE sentence.\n"
    "Anchor Target: {target}\n"
    "Event 1: {event_1}\n"
    "Event 2: {event_2}";

inline constexpr std::string_view kQa =
    "Please act as an information assistant to help users learn about "
    "pertinent details.\n"
    "Given a factual statement about the target, rewrite it into ONE QA pair.\n"
    "The question should highlight an important detail from the statement "
    "about Contral Context.\n"
    "The question MUST include the target entity's name (do not use "
    "pronouns).\n"
    "Target Entity: {target}\n"
    "Central Context (Obj): {obj}\n"
    "Statement: {event}";

inline constexpr std::string_view kExtraction =
    "List every specific entity mentioned in the text below: people, works, "
    "organizations, places, dates, awards and events.\n"
    "Output exactly one entity per line, with no numbering and no extra "
    "words. If there are none, output NONE.\n"
    "Text:\n"
    "{text}";

}  // namespace templates

// Elicitation prompt. `neighbor` is required iff kind == kNeighborHop
// (kMissingNeighbor otherwise). A description, when given, is added as an
// extra "Description:" line directly after the "Target:" line.
std::string render_prompt(PromptKind kind, std::string_view target,
                          std::optional<std::string_view> neighbor = std::nullopt,
                          std::optional<std::string_view> description =
                              std::nullopt);

std::string render_event_prompt(std::string_view target, std::string_view event_1,
                                std::string_view event_2);

std::string render_qa_prompt(std::string_view target, std::string_view obj,
                             std::string_view event);

std::string render_extraction_prompt(std::string_view text);

// Reverse of the renderers, used by simulated responders.
struct ParsedPrompt {
  enum class Kind { kHop0, kNeighborHop, kEvent, kQa, kExtraction };
  Kind kind;
  std::string target;    // target / anchor target / target entity
  std::string neighbor;  // kNeighborHop
  std::string event_1;   // kEvent
  std::string event_2;   // kEvent
  std::string obj;       // kQa
  std::string statement; // kQa
  std::string text;      // kExtraction
};

// Returns nullopt when `prompt` was not produced by one of the renderers.
std::optional<ParsedPrompt> parse_prompt(std::string_view prompt);

}  // namespace memmine
