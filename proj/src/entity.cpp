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

#include "memmine/entity.hpp"

#include <cctype>

#include "memmine/error.hpp"

namespace memmine {
namespace {

bool is_space(unsigned char c) { return c < 0x80 && std::isspace(c); }
bool is_punct(unsigned char c) { return c < 0x80 && std::ispunct(c); }
bool is_alnum(unsigned char c) { return c >= 0x80 || std::isalnum(c); }

std::string fold_and_collapse(std::string_view raw) {
  std::string out;
  out.reserve(raw.size());
  bool pending_space = false;
  for (unsigned char c : raw) {
    if (is_space(c)) {
      pending_space = !out.empty();
      continue;
    }
    if (pending_space) {
      out.push_back(' ');
      pending_space = false;
    }
    out.push_back(c < 0x80 ? static_cast<char>(std::tolower(c))
                           : static_cast<char>(c));
  }
  return out;
}

}  // namespace

std::string normalize_text(std::string_view raw) {
  std::string folded = fold_and_collapse(raw);
  std::size_t begin = 0;
  std::size_t end = folded.size();
  auto trimmable = [](unsigned char c) { return is_space(c) || is_punct(c); };
  while (begin < end && trimmable(folded[begin])) ++begin;
  while (end > begin && trimmable(folded[end - 1])) --end;
  return folded.substr(begin, end - begin);
}

EntityId EntityId::from_mention(std::string_view raw) {
  std::string key = normalize_text(raw);
  if (key.empty()) {
    throw Error(Errc::kEmptyMention,
                "mention '" + std::string(raw) + "' normalizes to nothing");
  }
  return EntityId(std::move(key));
}

EntityId EntityId::from_key(std::string_view key) {
  if (key.empty() || normalize_text(key) != key) {
    throw Error(Errc::kInvalidArgument,
                "'" + std::string(key) + "' is not a normalized entity key");
  }
  return EntityId(std::string(key));
}

bool mentions(std::string_view text, std::string_view form) {
  const std::string hay = fold_and_collapse(text);
  const std::string needle = normalize_text(form);
  if (needle.empty()) return false;
  std::size_t pos = hay.find(needle);
  while (pos != std::string::npos) {
    const bool left_ok =
        pos == 0 || !is_alnum(static_cast<unsigned char>(hay[pos - 1]));
    const std::size_t after = pos + needle.size();
    const bool right_ok =
        after == hay.size() || !is_alnum(static_cast<unsigned char>(hay[after]));
    if (left_ok && right_ok) return true;
    pos = hay.find(needle, pos + 1);
  }
  return false;
}

std::size_t utf8_length(std::string_view s) {
  std::size_t n = 0;
  for (unsigned char c : s) {
    if ((c & 0xC0) != 0x80) ++n;
  }
  return n;
}

}  // namespace memmine
