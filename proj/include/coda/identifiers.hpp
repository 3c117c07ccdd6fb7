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

#include <set>
#include <string>
#include <unordered_set>
#include <vector>

#include "coda/ast.hpp"
#include "coda/lexer.hpp"
#include "coda/printer.hpp"
#include "coda/walk.hpp"

namespace coda {

inline constexpr const char* kDefaultPlaceholder = "<unk>";

struct IdentifierOptions {
  /// Library and intrinsic names that are never treated as user identifiers.
  std::unordered_set<std::string> builtins = {
      "printf", "scanf",  "malloc", "free",   "strlen", "main",   "read",
      "emit",   "puts",   "putchar", "getchar", "gets",  "memset", "memcpy",
      "strcpy", "strcmp", "strcat", "abs",    "sqrt",   "pow",    "exit",
      "calloc", "realloc", "fprintf", "sprintf", "NULL", "EOF",   "stdin",
      "stdout", "stderr", "std",    "cin",    "cout",   "endl",   "string",
      "vector", "size_t", "max",    "min",    "swap",   "sort"};
  /// When set, `a.b` / `a->b` inside opaque code contributes only `a`.
  bool field_access_as_one = false;

  bool is_builtin(const std::string& name) const { return builtins.count(name) > 0; }
};

inline const IdentifierOptions& default_identifier_options() {
  static const IdentifierOptions o;
  return o;
}

/// User-defined identifiers in first-occurrence order: declared variables,
/// parameters and functions, plus identifier tokens found in opaque code.
/// Keywords and builtins are excluded.
inline std::vector<std::string> collect_identifiers(
    const SourceUnit& unit, const IdentifierOptions& opts = default_identifier_options()) {
  std::set<std::string> declared;
  for (const auto& s : unit.symbols) declared.insert(s.name);

  std::vector<std::string> out;
  std::set<std::string> seen;
  auto take = [&](const std::string& name) {
    if (opts.is_builtin(name) || !seen.insert(name).second) return;
    out.push_back(name);
  };

  // Identifier tokens inside opaque runs count as user identifiers; the
  // printed token stream then fixes first-occurrence order.
  const TokenStream toks = lex(print(unit), dialect(unit.dialect));
  std::set<std::string> opaque_names;
  for_each_opaque_run(unit, [&](const TokenStream& ts) {
    const Token* prev = nullptr;
    for (const auto& t : ts) {
      if (t.trivia()) continue;
      if (t.kind == TokenKind::Identifier &&
          !(opts.field_access_as_one && prev && (prev->is(".") || prev->is("->"))))
        opaque_names.insert(t.text);
      prev = &t;
    }
  });
  for (const auto& t : toks) {
    if (t.kind != TokenKind::Identifier) continue;
    if (declared.count(t.text) || opaque_names.count(t.text)) take(t.text);
  }
  return out;
}

/// Every identifier-kind token text appearing anywhere in the unit,
/// including type names and undeclared externals.
inline std::set<std::string> names_occurring(const SourceUnit& unit) {
  std::set<std::string> out;
  for (const auto& t : lex(print(unit), dialect(unit.dialect)))
    if (t.kind == TokenKind::Identifier) out.insert(t.text);
  return out;
}

/// Significant tokens of the printed unit with every non-builtin identifier
/// replaced by `placeholder`. Whitespace, comments and directives' interior
/// layout are dropped.
inline TokenStream mask_identifiers(
    const SourceUnit& unit, const std::string& placeholder = kDefaultPlaceholder,
    const IdentifierOptions& opts = default_identifier_options()) {
  TokenStream out;
  for (auto& t : lex(print(unit), dialect(unit.dialect))) {
    if (t.trivia()) continue;
    if (t.kind == TokenKind::Identifier && !opts.is_builtin(t.text))
      t.text = placeholder;
    out.push_back(std::move(t));
  }
  return out;
}

inline std::vector<std::string> token_texts(const TokenStream& toks) {
  std::vector<std::string> out;
  out.reserve(toks.size());
  for (const auto& t : toks) out.push_back(t.text);
  return out;
}

/// Replaces every occurrence of identifier `from` with `to`.
inline SourceUnit rename_identifier(const SourceUnit& unit, const std::string& from,
                                    const std::string& to) {
  return map_names(unit, [&](const std::string& n) { return n == from ? to : n; });
}

}  // namespace coda
