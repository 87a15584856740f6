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

// Strict JSON field access that reports failures as SchemaError with a
// dotted field path ("nodes[2].strength").

#pragma once

#include <cstdint>
#include <limits>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <type_traits>
#include <vector>

#include "json.hpp"
#include "memmine/error.hpp"

namespace memmine {

// Parses a whole document; throws kSchemaError on syntax errors or when the
// root is not an object.
nlohmann::json parse_json_document(std::string_view bytes);

class FieldReader {
 public:
  FieldReader(const nlohmann::json& node, std::string prefix)
      : node_(&node), prefix_(std::move(prefix)) {}

  std::string path(std::string_view key) const {
    return prefix_.empty() ? std::string(key) : prefix_ + "." + std::string(key);
  }
  const std::string& prefix() const { return prefix_; }
  const nlohmann::json& raw() const { return *node_; }

  bool has_non_null(std::string_view key) const {
    auto it = node_->find(key);
    return it != node_->end() && !it->is_null();
  }

  template <typename T>
  T get(std::string_view key) const {
    auto it = node_->find(key);
    if (it == node_->end()) throw Error(Errc::kSchemaError, path(key));
    return convert<T>(*it, path(key));
  }

  template <typename T>
  T get_or(std::string_view key, T fallback) const {
    auto it = node_->find(key);
    if (it == node_->end() || it->is_null()) return fallback;
    return convert<T>(*it, path(key));
  }

  template <typename T>
  std::optional<T> get_optional(std::string_view key) const {
    auto it = node_->find(key);
    if (it == node_->end() || it->is_null()) return std::nullopt;
    return convert<T>(*it, path(key));
  }

  FieldReader object(std::string_view key) const {
    auto it = node_->find(key);
    if (it == node_->end() || !it->is_object()) {
      throw Error(Errc::kSchemaError, path(key));
    }
    return FieldReader(*it, path(key));
  }

  std::vector<FieldReader> array(std::string_view key) const {
    auto it = node_->find(key);
    if (it == node_->end() || !it->is_array()) {
      throw Error(Errc::kSchemaError, path(key));
    }
    std::vector<FieldReader> out;
    out.reserve(it->size());
    for (std::size_t i = 0; i < it->size(); ++i) {
      const auto& elem = (*it)[i];
      const std::string p = path(key) + "[" + std::to_string(i) + "]";
      if (!elem.is_object()) throw Error(Errc::kSchemaError, p);
      out.emplace_back(elem, p);
    }
    return out;
  }

  template <typename T>
  static T convert(const nlohmann::json& v, const std::string& where) {
    if constexpr (std::is_same_v<T, bool>) {
      if (!v.is_boolean()) throw Error(Errc::kSchemaError, where);
      return v.get<bool>();
    } else if constexpr (std::is_same_v<T, std::uint64_t>) {
      if (!v.is_number_unsigned()) throw Error(Errc::kSchemaError, where);
      return v.get<std::uint64_t>();
    } else if constexpr (std::is_integral_v<T>) {
      if (!v.is_number_integer()) throw Error(Errc::kSchemaError, where);
      const auto x = v.get<std::int64_t>();
      if (x < static_cast<std::int64_t>(std::numeric_limits<T>::min()) ||
          x > static_cast<std::int64_t>(std::numeric_limits<T>::max())) {
        throw Error(Errc::kSchemaError, where);
      }
      return static_cast<T>(x);
    } else if constexpr (std::is_floating_point_v<T>) {
      if (!v.is_number()) throw Error(Errc::kSchemaError, where);
      return v.get<T>();
    } else if constexpr (std::is_same_v<T, std::string>) {
      if (!v.is_string()) throw Error(Errc::kSchemaError, where);
      return v.get<std::string>();
    } else if constexpr (std::is_same_v<T, std::vector<std::string>> ||
                         std::is_same_v<T, std::set<std::string>>) {
      if (!v.is_array()) throw Error(Errc::kSchemaError, where);
      T out;
      for (std::size_t i = 0; i < v.size(); ++i) {
        if (!v[i].is_string()) {
          throw Error(Errc::kSchemaError, where + "[" + std::to_string(i) + "]");
        }
        out.insert(out.end(), v[i].get<std::string>());
      }
      return out;
    } else {
      static_assert(sizeof(T) == 0, "unsupported field type");
    }
  }

 private:
  const nlohmann::json* node_;
  std::string prefix_;
};

}  // namespace memmine
