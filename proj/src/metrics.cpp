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

#include "memmine/metrics.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <set>

#include "json.hpp"
#include "memmine/error.hpp"
#include "memmine/json_fields.hpp"

namespace memmine {

std::vector<EntityId> top_k(const FrequencyDistribution& dist, std::size_t k) {
  std::vector<std::pair<EntityId, double>> items(dist.begin(), dist.end());
  std::stable_sort(items.begin(), items.end(), [](const auto& x, const auto& y) {
    if (x.second != y.second) return x.second > y.second;
    return x.first < y.first;
  });
  if (items.size() > k) items.erase(items.begin() + static_cast<std::ptrdiff_t>(k), items.end());
  std::vector<EntityId> out;
  out.reserve(items.size());
  for (auto& [id, m] : items) out.push_back(id);
  return out;
}

double jaccard_topk(const FrequencyDistribution& a, const FrequencyDistribution& b,
                    std::size_t k) {
  if (a.empty() || b.empty()) throw Error(Errc::kEmptyInput, "empty ranking");
  if (k == 0) throw Error(Errc::kInvalidArgument, "k must be >= 1");
  const auto ta = top_k(a, k);
  const auto tb = top_k(b, k);
  const std::set<EntityId> sa(ta.begin(), ta.end());
  const std::set<EntityId> sb(tb.begin(), tb.end());
  std::size_t inter = 0;
  for (const auto& id : sa) inter += sb.count(id);
  const std::size_t uni = sa.size() + sb.size() - inter;
  return uni == 0 ? 0.0 : static_cast<double>(inter) / static_cast<double>(uni);
}

double frequency_cosine(const FrequencyDistribution& a, const FrequencyDistribution& b) {
  double dot = 0.0;
  double na = 0.0;
  double nb = 0.0;
  for (const auto& [id, m] : a) {
    na += m * m;
    auto it = b.find(id);
    if (it != b.end()) dot += m * it->second;
  }
  for (const auto& [id, m] : b) nb += m * m;
  if (!(na > 0.0) || !(nb > 0.0)) {
    throw Error(Errc::kEmptyInput, "zero-norm distribution");
  }
  const double c = dot / (std::sqrt(na) * std::sqrt(nb));
  return std::clamp(c, 0.0, 1.0);
}

std::vector<std::string> tokenize(std::string_view text) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : text) {
    if (std::isspace(static_cast<unsigned char>(c)) != 0) {
      if (!cur.empty()) out.push_back(std::move(cur));
      cur.clear();
    } else {
      cur += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    }
  }
  if (!cur.empty()) out.push_back(std::move(cur));
  return out;
}

std::size_t lcs_length(const std::vector<std::string>& a,
                       const std::vector<std::string>& b) {
  std::vector<std::size_t> prev(b.size() + 1, 0);
  std::vector<std::size_t> cur(b.size() + 1, 0);
  for (std::size_t i = 1; i <= a.size(); ++i) {
    for (std::size_t j = 1; j <= b.size(); ++j) {
      cur[j] = a[i - 1] == b[j - 1] ? prev[j - 1] + 1 : std::max(prev[j], cur[j - 1]);
    }
    std::swap(prev, cur);
  }
  return prev[b.size()];
}

double rouge_l_recall(std::string_view candidate, std::string_view reference) {
  const auto ref = tokenize(reference);
  if (ref.empty()) throw Error(Errc::kEmptyReference, "reference has no tokens");
  return static_cast<double>(lcs_length(tokenize(candidate), ref)) /
         static_cast<double>(ref.size());
}

RecoveryFidelity recovery_fidelity(const MemoryGraph& graph,
                                   const std::vector<EntityId>& truth) {
  std::set<EntityId> t(truth.begin(), truth.end());
  t.erase(graph.target());
  std::size_t mined = 0;
  std::size_t hit = 0;
  for (const auto& [id, node] : graph.nodes()) {
    if (id == graph.target()) continue;
    ++mined;
    hit += t.count(id);
  }
  RecoveryFidelity f;
  f.precision = mined == 0 ? 1.0 : static_cast<double>(hit) / static_cast<double>(mined);
  f.recall = t.empty() ? 1.0 : static_cast<double>(hit) / static_cast<double>(t.size());
  return f;
}

RecoveryFidelity recovery_fidelity(const MemoryGraph& mined,
                                   const MemoryGraph& expected) {
  std::vector<EntityId> truth;
  for (const auto& [id, node] : expected.nodes()) truth.push_back(id);
  return recovery_fidelity(mined, truth);
}

FrequencyDistribution graph_distribution(const MemoryGraph& graph) {
  FrequencyDistribution d;
  double total = 0.0;
  for (const auto& [id, node] : graph.nodes()) {
    if (id == graph.target()) continue;
    d[id] = node.strength;
    total += node.strength;
  }
  if (total > 0.0) {
    for (auto& [id, m] : d) m /= total;
  }
  return d;
}

FrequencyDistribution parse_distribution(std::string_view json) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(json);
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(Errc::kSchemaError, std::string("<document>: ") + e.what());
  }
  FrequencyDistribution d;
  auto add = [&](const std::string& name, const nlohmann::json& mass,
                 const std::string& where) {
    if (!mass.is_number() || !(mass.get<double>() >= 0.0)) {
      throw Error(Errc::kSchemaError, where);
    }
    try {
      d[EntityId::from_mention(name)] += mass.get<double>();
    } catch (const Error&) {
      throw Error(Errc::kSchemaError, where);
    }
  };
  if (j.is_object()) {
    for (const auto& [k, v] : j.items()) add(k, v, k);
  } else if (j.is_array()) {
    for (std::size_t i = 0; i < j.size(); ++i) {
      const std::string where = "[" + std::to_string(i) + "]";
      if (!j[i].is_object() || !j[i].contains("mass")) throw Error(Errc::kSchemaError, where);
      const FieldReader r(j[i], where);
      add(r.get<std::string>("id"), j[i]["mass"], r.path("mass"));
    }
  } else {
    throw Error(Errc::kSchemaError, "<document>: expected object or array");
  }
  return d;
}

}  // namespace memmine
