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

// Lossless tokenizer. Whitespace, comments and preprocessor lines are tokens,
// so concatenating token texts reproduces the input byte for byte.

#include <algorithm>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

#include "coda/error.hpp"

namespace coda {

enum class TokenKind {
  Keyword,
  Identifier,
  IntegerLiteral,
  FloatLiteral,
  CharLiteral,
  StringLiteral,
  Operator,
  Punctuation,
  Comment,
  Whitespace,
  Directive,
};

inline const char* to_string(TokenKind k) {
  switch (k) {
    case TokenKind::Keyword: return "keyword";
    case TokenKind::Identifier: return "identifier";
    case TokenKind::IntegerLiteral: return "integer-literal";
    case TokenKind::FloatLiteral: return "float-literal";
    case TokenKind::CharLiteral: return "char-literal";
    case TokenKind::StringLiteral: return "string-literal";
    case TokenKind::Operator: return "operator";
    case TokenKind::Punctuation: return "punctuation";
    case TokenKind::Comment: return "comment";
    case TokenKind::Whitespace: return "whitespace";
    case TokenKind::Directive: return "directive";
  }
  return "?";
}

struct Position {
  int line = 1;
  int column = 1;
};

struct Token {
  TokenKind kind = TokenKind::Whitespace;
  std::string text;
  Position pos;

  bool trivia() const {
    return kind == TokenKind::Whitespace || kind == TokenKind::Comment;
  }
  bool is(std::string_view t) const {
    return !trivia() && kind != TokenKind::StringLiteral &&
           kind != TokenKind::CharLiteral && text == t;
  }

  friend bool operator==(const Token& a, const Token& b) {
    return a.kind == b.kind && a.text == b.text;
  }
};

using TokenStream = std::vector<Token>;

enum class DialectId { CLike };

/// Token tables for one source language family. The grammar is shared; a new
/// dialect supplies its own tables.
struct Dialect {
  DialectId id;
  std::unordered_set<std::string> keywords;
  /// Keywords that may start or continue a declaration's type.
  std::unordered_set<std::string> type_keywords;
  /// Multi-character operators, longest first.
  std::vector<std::string> operators;
  std::string punctuation;
};

inline const Dialect& c_like_dialect() {
  static const Dialect d = [] {
    Dialect r;
    r.id = DialectId::CLike;
    r.keywords = {
        "auto", "break", "case", "char", "const", "continue", "default", "do",
        "double", "else", "enum", "extern", "float", "for", "goto", "if",
        "inline", "int", "long", "register", "restrict", "return", "short",
        "signed", "sizeof", "static", "struct", "switch", "typedef", "union",
        "unsigned", "void", "volatile", "while", "_Bool", "bool", "true",
        "false", "class", "public", "private", "protected", "new", "delete",
        "this", "namespace", "using", "template", "typename", "try", "catch",
        "throw", "nullptr", "operator", "virtual", "friend", "constexpr",
        "static_cast", "const_cast", "reinterpret_cast", "dynamic_cast",
        "mutable", "explicit", "noexcept", "decltype"};
    r.type_keywords = {"void",  "char",     "short",    "int",    "long",
                       "float", "double",   "signed",   "unsigned", "_Bool",
                       "bool",  "const",    "static",   "volatile", "register",
                       "extern", "inline",  "auto",     "constexpr"};
    r.operators = {"<<=", ">>=", "...", "->", "++", "--", "<<", ">>", "<=",
                   ">=",  "==",  "!=",  "&&", "||", "+=", "-=", "*=", "/=",
                   "%=",  "&=",  "|=",  "^=", "::"};
    r.punctuation = "(){}[];,";
    return r;
  }();
  return d;
}

inline const Dialect& dialect(DialectId id) {
  switch (id) {
    case DialectId::CLike: return c_like_dialect();
  }
  return c_like_dialect();
}

namespace detail {

inline bool ident_start(unsigned char c) {
  return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c == '_' ||
         c >= 0x80;
}
inline bool ident_char(unsigned char c) {
  return ident_start(c) || (c >= '0' && c <= '9');
}
inline bool digit(unsigned char c) { return c >= '0' && c <= '9'; }

}  // namespace detail

/// Splits `source` into tokens. Throws ParseError on unterminated string,
/// char literal or block comment.
inline TokenStream lex(std::string_view source,
                       const Dialect& dia = c_like_dialect()) {
  TokenStream out;
  std::size_t i = 0;
  int line = 1;
  int col = 1;
  bool line_start = true;

  auto advance_pos = [&](std::string_view text) {
    for (char c : text) {
      if (c == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
  };
  auto emit = [&](TokenKind kind, std::size_t len) {
    Token t{kind, std::string(source.substr(i, len)), {line, col}};
    advance_pos(t.text);
    i += len;
    out.push_back(std::move(t));
  };

  const std::size_t n = source.size();
  while (i < n) {
    const unsigned char c = source[i];
    if (c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' ||
        c == '\v') {
      std::size_t j = i;
      bool saw_newline = false;
      while (j < n && (source[j] == ' ' || source[j] == '\t' ||
                       source[j] == '\n' || source[j] == '\r' ||
                       source[j] == '\f' || source[j] == '\v')) {
        saw_newline |= source[j] == '\n';
        ++j;
      }
      emit(TokenKind::Whitespace, j - i);
      if (saw_newline) line_start = true;
      continue;
    }
    if (c == '#' && line_start) {
      std::size_t j = i;
      while (j < n && source[j] != '\n') {
        if (source[j] == '\\' && j + 1 < n && source[j + 1] == '\n') ++j;
        ++j;
      }
      emit(TokenKind::Directive, j - i);
      continue;
    }
    line_start = false;
    if (c == '/' && i + 1 < n && source[i + 1] == '/') {
      std::size_t j = i;
      while (j < n && source[j] != '\n') ++j;
      emit(TokenKind::Comment, j - i);
      continue;
    }
    if (c == '/' && i + 1 < n && source[i + 1] == '*') {
      std::size_t end = source.find("*/", i + 2);
      if (end == std::string_view::npos)
        throw ParseError("unterminated block comment", line, col);
      emit(TokenKind::Comment, end + 2 - i);
      continue;
    }
    if (c == '"' || c == '\'') {
      std::size_t j = i + 1;
      while (j < n && source[j] != c) {
        if (source[j] == '\n') break;
        if (source[j] == '\\' && j + 1 < n) ++j;
        ++j;
      }
      if (j >= n || source[j] != c)
        throw ParseError(c == '"' ? "unterminated string literal"
                                  : "unterminated char literal",
                         line, col);
      emit(c == '"' ? TokenKind::StringLiteral : TokenKind::CharLiteral,
           j + 1 - i);
      continue;
    }
    if (detail::digit(c) ||
        (c == '.' && i + 1 < n && detail::digit(source[i + 1]))) {
      std::size_t j = i;
      const bool hex = c == '0' && i + 1 < n &&
                       (source[i + 1] == 'x' || source[i + 1] == 'X');
      bool is_float = false;
      while (j < n) {
        const unsigned char d = source[j];
        if (detail::ident_char(d)) {
          if (!hex && (d == 'e' || d == 'E')) is_float = true;
          if (hex && (d == 'p' || d == 'P')) is_float = true;
          ++j;
          if ((d == 'e' || d == 'E' || d == 'p' || d == 'P') && j < n &&
              (source[j] == '+' || source[j] == '-') &&
              (!hex || d == 'p' || d == 'P'))
            ++j;
        } else if (d == '.') {
          is_float = true;
          ++j;
        } else {
          break;
        }
      }
      emit(is_float ? TokenKind::FloatLiteral : TokenKind::IntegerLiteral,
           j - i);
      continue;
    }
    if (detail::ident_start(c)) {
      std::size_t j = i;
      while (j < n && detail::ident_char(source[j])) ++j;
      const std::string word(source.substr(i, j - i));
      emit(dia.keywords.count(word) ? TokenKind::Keyword
                                    : TokenKind::Identifier,
           j - i);
      continue;
    }
    if (dia.punctuation.find(static_cast<char>(c)) != std::string::npos) {
      emit(TokenKind::Punctuation, 1);
      continue;
    }
    std::size_t len = 1;
    for (const auto& op : dia.operators) {
      if (source.substr(i, op.size()) == op) {
        len = op.size();
        break;
      }
    }
    emit(TokenKind::Operator, len);
  }
  return out;
}

/// Throws ParseError unless (), [] and {} nest properly.
inline void check_balanced(const TokenStream& tokens) {
  std::vector<const Token*> stack;
  for (const auto& t : tokens) {
    if (t.kind != TokenKind::Punctuation) continue;
    const char c = t.text[0];
    if (c == '(' || c == '[' || c == '{') {
      stack.push_back(&t);
    } else if (c == ')' || c == ']' || c == '}') {
      const char open = c == ')' ? '(' : c == ']' ? '[' : '{';
      if (stack.empty() || stack.back()->text[0] != open)
        throw ParseError(std::string("unbalanced '") + c + "'", t.pos.line,
                         t.pos.column);
      stack.pop_back();
    }
  }
  if (!stack.empty())
    throw ParseError(std::string("unclosed '") + stack.back()->text + "'",
                     stack.back()->pos.line, stack.back()->pos.column);
}

inline std::string concat(const TokenStream& tokens) {
  std::string s;
  for (const auto& t : tokens) s += t.text;
  return s;
}

}  // namespace coda
