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

#include <compare>
#include <cstddef>
#include <functional>
#include <ostream>
#include <string>
#include <string_view>

namespace memmine {

// Lower-cases ASCII letters, collapses whitespace runs to one space and trims
// leading/trailing whitespace and ASCII punctuation. Bytes >= 0x80 pass
// through untouched. May return an empty string.
std::string normalize_text(std::string_view raw);

// Normalized entity identity. The key is never empty and is a fixed point of
// normalize_text.
class EntityId {
 public:
  // Normalizes `raw`. Throws Error(kEmptyMention) when nothing is left.
  static EntityId from_mention(std::string_view raw);

  // Accepts an already-normalized key (deserialization). Throws
  // Error(kInvalidArgument) when `key` is not its own normalization.
  static EntityId from_key(std::string_view key);

  const std::string& key() const noexcept { return key_; }

  friend auto operator<=>(const EntityId&, const EntityId&) = default;
  friend bool operator==(const EntityId&, const EntityId&) = default;

 private:
  explicit EntityId(std::string key) : key_(std::move(key)) {}
  std::string key_;
};

// Alias for EntityId::from_mention.
inline EntityId normalize_mention(std::string_view raw) {
  return EntityId::from_mention(raw);
}

inline std::ostream& operator<<(std::ostream& os, const EntityId& id) {
  return os << id.key();
}

// True when `form` occurs in `text` case-insensitively (after whitespace
// collapsing) with non-alphanumeric characters (or text edges) on both sides.
bool mentions(std::string_view text, std::string_view form);

// Number of Unicode code points in a UTF-8 string.
std::size_t utf8_length(std::string_view s);

}  // namespace memmine

template <>
struct std::hash<memmine::EntityId> {
  std::size_t operator()(const memmine::EntityId& id) const noexcept {
    return std::hash<std::string>{}(id.key());
  }
};
