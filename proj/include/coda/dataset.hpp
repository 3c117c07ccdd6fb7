// Copyright 2026 The Coda Authors
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

// Dataset JSONL: one {"id", "code", "label", "split"} object per line.

#include <algorithm>
#include <fstream>
#include <istream>
#include <ostream>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "coda/error.hpp"

namespace coda {

enum class Split { Train, Test };

inline std::string to_string(Split s) { return s == Split::Train ? "train" : "test"; }

struct LabeledSnippet {
  std::string id;
  std::string code;
  int label = 0;
  Split split = Split::Train;
  friend bool operator==(const LabeledSnippet&, const LabeledSnippet&) = default;
};

struct Dataset {
  std::vector<LabeledSnippet> items;

  std::vector<LabeledSnippet> split(Split s) const {
    std::vector<LabeledSnippet> out;
    for (const auto& x : items)
      if (x.split == s) out.push_back(x);
    return out;
  }
  std::vector<LabeledSnippet> train() const { return split(Split::Train); }
  std::vector<LabeledSnippet> test() const { return split(Split::Test); }

  int num_classes() const {
    int n = 0;
    for (const auto& x : items) n = std::max(n, x.label + 1);
    return n;
  }
};

inline std::string to_jsonl_line(const LabeledSnippet& s) {
  nlohmann::ordered_json j;
  j["id"] = s.id;
  j["code"] = s.code;
  j["label"] = s.label;
  j["split"] = to_string(s.split);
  return j.dump();
}

inline LabeledSnippet snippet_from_json(const nlohmann::json& j, std::size_t line) {
  if (!j.is_object()) throw DatasetError("expected a JSON object", line);
  for (const char* key : {"id", "code", "label", "split"})
    if (!j.contains(key)) throw DatasetError(std::string("missing field \"") + key + "\"", line);
  if (!j["id"].is_string() || j["id"].get<std::string>().empty())
    throw DatasetError("\"id\" must be a non-empty string", line);
  if (!j["code"].is_string()) throw DatasetError("\"code\" must be a string", line);
  if (!j["label"].is_number_integer() || j["label"].get<long long>() < 0)
    throw DatasetError("\"label\" must be a non-negative integer", line);
  if (!j["split"].is_string()) throw DatasetError("\"split\" must be a string", line);
  const std::string split = j["split"].get<std::string>();
  if (split != "train" && split != "test")
    throw DatasetError("\"split\" must be \"train\" or \"test\"", line);
  LabeledSnippet s;
  s.id = j["id"].get<std::string>();
  s.code = j["code"].get<std::string>();
  s.label = static_cast<int>(j["label"].get<long long>());
  s.split = split == "train" ? Split::Train : Split::Test;
  return s;
}

inline Dataset read_dataset(std::istream& in) {
  Dataset d;
  std::set<std::string> ids;
  std::string text;
  std::size_t line = 0;
  while (std::getline(in, text)) {
    ++line;
    if (!text.empty() && text.back() == '\r') text.pop_back();
    if (text.find_first_not_of(" \t") == std::string::npos) continue;
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
      throw DatasetError(std::string("invalid JSON: ") + e.what(), line);
    }
    LabeledSnippet s = snippet_from_json(j, line);
    if (!ids.insert(s.id).second) throw DatasetError("duplicate id \"" + s.id + "\"", line);
    d.items.push_back(std::move(s));
  }
  return d;
}

inline Dataset load_dataset(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IOError("cannot open dataset " + path);
  return read_dataset(in);
}

inline void write_dataset(std::ostream& out, const std::vector<LabeledSnippet>& items) {
  for (const auto& s : items) out << to_jsonl_line(s) << '\n';
}

inline void save_dataset(const std::string& path, const std::vector<LabeledSnippet>& items) {
  std::ofstream out(path);
  if (!out) throw IOError("cannot write " + path);
  write_dataset(out, items);
  if (!out) throw IOError("write failed for " + path);
}

}  // namespace coda
