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

// Identifier renaming stage: (target name, reference name) pairs ranked by
// identifier-embedding similarity, applied one at a time.

#include <algorithm>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "coda/embedding.hpp"
#include "coda/identifiers.hpp"
#include "coda/lexer.hpp"
#include "coda/parser.hpp"
#include "coda/reference.hpp"

namespace coda {

struct RenamePair {
  std::string from;
  std::string to;
  double similarity = 0;
  friend bool operator==(const RenamePair&, const RenamePair&) = default;
};

struct RenamePlan {
  std::vector<RenamePair> pairs;
  std::size_t cursor = 0;

  bool done() const { return cursor >= pairs.size(); }
  const RenamePair& next() { return pairs[cursor++]; }
};

/// Identifiers of the reference members in member order, first occurrence
/// wins. Unparseable members contribute nothing.
inline std::vector<std::string> reference_identifiers(
    const ReferenceSet& refs, const IdentifierOptions& opts = default_identifier_options()) {
  std::vector<std::string> out;
  std::set<std::string> seen;
  for (const auto& m : refs.members) {
    try {
      for (auto& n : collect_identifiers(parse(m.snippet.code), opts))
        if (seen.insert(n).second) out.push_back(std::move(n));
    } catch (const ParseError&) {
    }
  }
  return out;
}

/// Keywords and builtins cannot be introduced by a rename.
inline bool renameable_to(const std::string& name, DialectId d = DialectId::CLike,
                          const IdentifierOptions& opts = default_identifier_options()) {
  if (name.empty() || !detail::ident_start(static_cast<unsigned char>(name[0]))) return false;
  for (char c : name)
    if (!detail::ident_char(static_cast<unsigned char>(c))) return false;
  return !dialect(d).keywords.count(name) && !opts.is_builtin(name);
}

inline RenamePlan build_rename_plan(const SourceUnit& current,
                                    const std::vector<std::string>& reference_names,
                                    const IdentifierEmbedder& provider,
                                    const IdentifierOptions& opts = default_identifier_options()) {
  const std::vector<std::string> vt = collect_identifiers(current, opts);
  const std::set<std::string> present = names_occurring(current);
  std::vector<std::string> candidates;
  for (const auto& n : reference_names)
    if (!present.count(n) && renameable_to(n, current.dialect, opts)) candidates.push_back(n);

  std::map<std::string, EmbeddingVector> cache;
  auto vec = [&](const std::string& n) -> const EmbeddingVector& {
    auto it = cache.find(n);
    if (it == cache.end()) it = cache.emplace(n, provider.embed(n)).first;
    return it->second;
  };
  RenamePlan plan;
  for (const auto& from : vt)
    for (const auto& to : candidates) plan.pairs.push_back({from, to, cosine(vec(from), vec(to))});
  std::sort(plan.pairs.begin(), plan.pairs.end(), [](const RenamePair& a, const RenamePair& b) {
    if (a.similarity != b.similarity) return a.similarity > b.similarity;
    if (a.from != b.from) return a.from < b.from;
    return a.to < b.to;
  });
  return plan;
}

inline RenamePlan build_rename_plan(const SourceUnit& current, const ReferenceSet& refs,
                                    const IdentifierEmbedder& provider,
                                    const IdentifierOptions& opts = default_identifier_options()) {
  return build_rename_plan(current, reference_identifiers(refs, opts), provider, opts);
}

enum class RenameSkip { None, Duplicate, Consumed, Invalid };

inline std::string to_string(RenameSkip s) {
  switch (s) {
    case RenameSkip::None: return "none";
    case RenameSkip::Duplicate: return "duplicate";
    case RenameSkip::Consumed: return "consumed";
    case RenameSkip::Invalid: return "invalid";
  }
  return "?";
}

struct RenameOutcome {
  std::optional<SourceUnit> renamed;
  RenameSkip reason = RenameSkip::None;
  explicit operator bool() const { return renamed.has_value(); }
};

/// Renames every occurrence of `from`, opaque tokens included, unless that
/// would reuse a present name, `from` is gone, or `to` is reserved.
inline RenameOutcome apply_rename(const SourceUnit& current, const std::string& from,
                                  const std::string& to,
                                  const IdentifierOptions& opts = default_identifier_options()) {
  if (!renameable_to(to, current.dialect, opts)) return {std::nullopt, RenameSkip::Invalid};
  const std::set<std::string> present = names_occurring(current);
  if (present.count(to)) return {std::nullopt, RenameSkip::Duplicate};
  if (!present.count(from)) return {std::nullopt, RenameSkip::Consumed};
  return {rename_identifier(current, from, to), RenameSkip::None};
}

inline RenameOutcome apply_rename(const SourceUnit& current, const RenamePair& p,
                                  const IdentifierOptions& opts = default_identifier_options()) {
  return apply_rename(current, p.from, p.to, opts);
}

}  // namespace coda
