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

// Immutable syntax tree for the supported C-like subset. Nodes are held by
// shared_ptr<const>, so rewrites share every untouched subtree and a parsed
// unit can be read from many threads at once.

#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "coda/lexer.hpp"

namespace coda {

struct Expr;
struct Stmt;
using ExprPtr = std::shared_ptr<const Expr>;
using StmtPtr = std::shared_ptr<const Stmt>;

/// Deep structural equality; null equals null only.
bool deep_eq(const ExprPtr& a, const ExprPtr& b);
bool deep_eq(const StmtPtr& a, const StmtPtr& b);

inline bool opaque_eq(const TokenStream& a, const TokenStream& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i)
    if (a[i].text != b[i].text) return false;
  return true;
}

// Binding strength used by the parser and the printer.
namespace prec {
inline constexpr int kComma = 1;
inline constexpr int kAssign = 2;
inline constexpr int kConditional = 3;
inline constexpr int kUnary = 14;
inline constexpr int kPostfix = 15;
inline constexpr int kPrimary = 16;
}  // namespace prec

enum class UnaryOp { PreInc, PreDec, PostInc, PostDec, Not, Neg, BitNot };

inline std::string_view op_text(UnaryOp op) {
  switch (op) {
    case UnaryOp::PreInc:
    case UnaryOp::PostInc: return "++";
    case UnaryOp::PreDec:
    case UnaryOp::PostDec: return "--";
    case UnaryOp::Not: return "!";
    case UnaryOp::Neg: return "-";
    case UnaryOp::BitNot: return "~";
  }
  return "?";
}

inline bool is_postfix(UnaryOp op) {
  return op == UnaryOp::PostInc || op == UnaryOp::PostDec;
}
inline bool is_increment(UnaryOp op) {
  return op == UnaryOp::PreInc || op == UnaryOp::PreDec ||
         op == UnaryOp::PostInc || op == UnaryOp::PostDec;
}

enum class BinaryOp {
  Mul, Div, Mod, Add, Sub, Shl, Shr, Lt, Le, Gt, Ge, Eq, Ne, BitAnd, BitXor,
  BitOr, And, Or,
};

inline std::string_view op_text(BinaryOp op) {
  static constexpr std::string_view names[] = {
      "*", "/", "%", "+", "-", "<<", ">>", "<", "<=", ">", ">=", "==", "!=",
      "&", "^", "|", "&&", "||"};
  return names[static_cast<int>(op)];
}

inline int precedence(BinaryOp op) {
  switch (op) {
    case BinaryOp::Mul:
    case BinaryOp::Div:
    case BinaryOp::Mod: return 13;
    case BinaryOp::Add:
    case BinaryOp::Sub: return 12;
    case BinaryOp::Shl:
    case BinaryOp::Shr: return 11;
    case BinaryOp::Lt:
    case BinaryOp::Le:
    case BinaryOp::Gt:
    case BinaryOp::Ge: return 10;
    case BinaryOp::Eq:
    case BinaryOp::Ne: return 9;
    case BinaryOp::BitAnd: return 8;
    case BinaryOp::BitXor: return 7;
    case BinaryOp::BitOr: return 6;
    case BinaryOp::And: return 5;
    case BinaryOp::Or: return 4;
  }
  return 0;
}

inline std::optional<BinaryOp> binary_op_from(std::string_view t) {
  for (int i = 0; i <= static_cast<int>(BinaryOp::Or); ++i) {
    auto op = static_cast<BinaryOp>(i);
    if (op_text(op) == t) return op;
  }
  return std::nullopt;
}

enum class AssignOp {
  Set, Add, Sub, Mul, Div, Mod, Shl, Shr, BitAnd, BitOr, BitXor,
};

inline std::string_view op_text(AssignOp op) {
  static constexpr std::string_view names[] = {
      "=", "+=", "-=", "*=", "/=", "%=", "<<=", ">>=", "&=", "|=", "^="};
  return names[static_cast<int>(op)];
}

inline std::optional<AssignOp> assign_op_from(std::string_view t) {
  for (int i = 0; i <= static_cast<int>(AssignOp::BitXor); ++i) {
    auto op = static_cast<AssignOp>(i);
    if (op_text(op) == t) return op;
  }
  return std::nullopt;
}

/// The binary operator a compound assignment applies (`+=` -> `+`).
inline std::optional<BinaryOp> underlying(AssignOp op) {
  switch (op) {
    case AssignOp::Set: return std::nullopt;
    case AssignOp::Add: return BinaryOp::Add;
    case AssignOp::Sub: return BinaryOp::Sub;
    case AssignOp::Mul: return BinaryOp::Mul;
    case AssignOp::Div: return BinaryOp::Div;
    case AssignOp::Mod: return BinaryOp::Mod;
    case AssignOp::Shl: return BinaryOp::Shl;
    case AssignOp::Shr: return BinaryOp::Shr;
    case AssignOp::BitAnd: return BinaryOp::BitAnd;
    case AssignOp::BitOr: return BinaryOp::BitOr;
    case AssignOp::BitXor: return BinaryOp::BitXor;
  }
  return std::nullopt;
}

enum class LiteralKind { Integer, Float, Char, String, Bool };

struct Ident {
  std::string name;
  friend bool operator==(const Ident&, const Ident&) = default;
};

struct Literal {
  LiteralKind kind;
  std::string text;
  friend bool operator==(const Literal&, const Literal&) = default;
};

struct Unary {
  UnaryOp op;
  ExprPtr operand;
  friend bool operator==(const Unary& a, const Unary& b) {
    return a.op == b.op && deep_eq(a.operand, b.operand);
  }
};

struct Binary {
  BinaryOp op;
  ExprPtr lhs;
  ExprPtr rhs;
  friend bool operator==(const Binary& a, const Binary& b) {
    return a.op == b.op && deep_eq(a.lhs, b.lhs) && deep_eq(a.rhs, b.rhs);
  }
};

struct Assign {
  AssignOp op;
  ExprPtr target;
  ExprPtr value;
  friend bool operator==(const Assign& a, const Assign& b) {
    return a.op == b.op && deep_eq(a.target, b.target) &&
           deep_eq(a.value, b.value);
  }
};

struct Call {
  ExprPtr callee;
  std::vector<ExprPtr> args;
  friend bool operator==(const Call& a, const Call& b) {
    if (!deep_eq(a.callee, b.callee) || a.args.size() != b.args.size())
      return false;
    for (std::size_t i = 0; i < a.args.size(); ++i)
      if (!deep_eq(a.args[i], b.args[i])) return false;
    return true;
  }
};

struct Index {
  ExprPtr base;
  ExprPtr index;
  friend bool operator==(const Index& a, const Index& b) {
    return deep_eq(a.base, b.base) && deep_eq(a.index, b.index);
  }
};

/// Verbatim tokens of an expression outside the subset. `precedence` is the
/// grammar level it was parsed at, so the printer knows when to bracket it.
struct OpaqueExpr {
  TokenStream tokens;
  int precedence = prec::kPrimary;
  friend bool operator==(const OpaqueExpr& a, const OpaqueExpr& b) {
    return a.precedence == b.precedence && opaque_eq(a.tokens, b.tokens);
  }
};

struct Expr {
  using Node =
      std::variant<Ident, Literal, Unary, Binary, Assign, Call, Index, OpaqueExpr>;
  Node node;

  template <typename T>
  const T* as() const {
    return std::get_if<T>(&node);
  }
  template <typename T>
  bool is() const {
    return std::holds_alternative<T>(node);
  }
  friend bool operator==(const Expr& a, const Expr& b) { return a.node == b.node; }
};

struct Block {
  std::vector<StmtPtr> stmts;
  friend bool operator==(const Block& a, const Block& b) {
    if (a.stmts.size() != b.stmts.size()) return false;
    for (std::size_t i = 0; i < a.stmts.size(); ++i)
      if (!deep_eq(a.stmts[i], b.stmts[i])) return false;
    return true;
  }
};

struct For {
  StmtPtr init;  // Decl or ExprStmt, may be null
  ExprPtr cond;  // may be null
  ExprPtr step;  // may be null
  StmtPtr body;
  friend bool operator==(const For& a, const For& b) {
    return deep_eq(a.init, b.init) && deep_eq(a.cond, b.cond) &&
           deep_eq(a.step, b.step) && deep_eq(a.body, b.body);
  }
};

struct While {
  ExprPtr cond;
  StmtPtr body;
  friend bool operator==(const While& a, const While& b) {
    return deep_eq(a.cond, b.cond) && deep_eq(a.body, b.body);
  }
};

struct DoWhile {
  StmtPtr body;
  ExprPtr cond;
  friend bool operator==(const DoWhile& a, const DoWhile& b) {
    return deep_eq(a.body, b.body) && deep_eq(a.cond, b.cond);
  }
};

struct Branch {
  ExprPtr cond;
  StmtPtr body;
  friend bool operator==(const Branch& a, const Branch& b) {
    return deep_eq(a.cond, b.cond) && deep_eq(a.body, b.body);
  }
};

/// if / else if ... / else. `branches` is never empty.
struct If {
  std::vector<Branch> branches;
  StmtPtr else_body;  // may be null
  friend bool operator==(const If& a, const If& b) {
    return a.branches == b.branches && deep_eq(a.else_body, b.else_body);
  }
};

struct ExprStmt {
  ExprPtr expr;
  friend bool operator==(const ExprStmt& a, const ExprStmt& b) {
    return deep_eq(a.expr, b.expr);
  }
};

struct Decl {
  std::string type;  // normalized, e.g. "const char*"
  std::string name;
  ExprPtr array_size;  // non-null for `T name[size]`
  ExprPtr init;        // may be null
  bool is_const() const {
    return type == "const" || type.rfind("const ", 0) == 0 ||
           type.find(" const") != std::string::npos;
  }
  friend bool operator==(const Decl& a, const Decl& b) {
    return a.type == b.type && a.name == b.name &&
           deep_eq(a.array_size, b.array_size) && deep_eq(a.init, b.init);
  }
};

struct Return {
  ExprPtr value;  // may be null
  friend bool operator==(const Return& a, const Return& b) {
    return deep_eq(a.value, b.value);
  }
};

struct Break {
  friend bool operator==(const Break&, const Break&) = default;
};
struct Continue {
  friend bool operator==(const Continue&, const Continue&) = default;
};

/// Verbatim, bracket-balanced tokens of a statement outside the subset.
struct OpaqueStmt {
  TokenStream tokens;
  friend bool operator==(const OpaqueStmt& a, const OpaqueStmt& b) {
    return opaque_eq(a.tokens, b.tokens);
  }
};

struct Stmt {
  using Node = std::variant<Block, For, While, DoWhile, If, ExprStmt, Decl,
                            Return, Break, Continue, OpaqueStmt>;
  Node node;

  template <typename T>
  const T* as() const {
    return std::get_if<T>(&node);
  }
  template <typename T>
  bool is() const {
    return std::holds_alternative<T>(node);
  }
  friend bool operator==(const Stmt& a, const Stmt& b) { return a.node == b.node; }
};

inline bool deep_eq(const ExprPtr& a, const ExprPtr& b) {
  if (!a || !b) return !a && !b;
  return a == b || *a == *b;
}
inline bool deep_eq(const StmtPtr& a, const StmtPtr& b) {
  if (!a || !b) return !a && !b;
  return a == b || *a == *b;
}

struct Param {
  std::string type;
  std::string name;
  TokenStream suffix;  // array brackets such as "[]" or "[100]"
  friend bool operator==(const Param& a, const Param& b) {
    return a.type == b.type && a.name == b.name && opaque_eq(a.suffix, b.suffix);
  }
};

struct FunctionDef {
  std::string return_type;
  std::string name;
  std::vector<Param> params;
  StmtPtr body;  // always a Block
  friend bool operator==(const FunctionDef& a, const FunctionDef& b) {
    return a.return_type == b.return_type && a.name == b.name &&
           a.params == b.params && deep_eq(a.body, b.body);
  }
};

struct GlobalDecl {
  StmtPtr decl;  // a Decl statement
  friend bool operator==(const GlobalDecl& a, const GlobalDecl& b) {
    return deep_eq(a.decl, b.decl);
  }
};

/// A free statement outside any function (script-style snippets).
struct TopLevelStmt {
  StmtPtr stmt;
  friend bool operator==(const TopLevelStmt& a, const TopLevelStmt& b) {
    return deep_eq(a.stmt, b.stmt);
  }
};

struct OpaqueSegment {
  TokenStream tokens;
  friend bool operator==(const OpaqueSegment& a, const OpaqueSegment& b) {
    return opaque_eq(a.tokens, b.tokens);
  }
};

using TopLevelItem =
    std::variant<FunctionDef, GlobalDecl, TopLevelStmt, OpaqueSegment>;

struct Symbol {
  std::string name;
  std::string scope;  // "global", or a function name plus block path
  friend bool operator==(const Symbol&, const Symbol&) = default;
};

struct SourceUnit {
  DialectId dialect = DialectId::CLike;
  std::vector<TopLevelItem> items;
  std::vector<Symbol> symbols;

  bool declares(std::string_view name) const {
    for (const auto& s : symbols)
      if (s.name == name) return true;
    return false;
  }

  /// Structural equality of the items (the symbol table is derived).
  friend bool operator==(const SourceUnit& a, const SourceUnit& b) {
    return a.items == b.items;
  }
};

/// Recomputes `unit.symbols` from its declarations (defined in walk.hpp).
inline void rebuild_symbols(SourceUnit& unit);

// Construction helpers.

template <typename T>
ExprPtr make_expr(T node) {
  return std::make_shared<const Expr>(Expr{std::move(node)});
}
template <typename T>
StmtPtr make_stmt(T node) {
  return std::make_shared<const Stmt>(Stmt{std::move(node)});
}

inline ExprPtr ident(std::string name) { return make_expr(Ident{std::move(name)}); }
inline ExprPtr int_lit(long long v) {
  return make_expr(Literal{LiteralKind::Integer, std::to_string(v)});
}
inline ExprPtr unary(UnaryOp op, ExprPtr e) { return make_expr(Unary{op, std::move(e)}); }
inline ExprPtr binary(BinaryOp op, ExprPtr l, ExprPtr r) {
  return make_expr(Binary{op, std::move(l), std::move(r)});
}
inline ExprPtr assign(AssignOp op, ExprPtr t, ExprPtr v) {
  return make_expr(Assign{op, std::move(t), std::move(v)});
}
inline StmtPtr expr_stmt(ExprPtr e) { return make_stmt(ExprStmt{std::move(e)}); }
inline StmtPtr block(std::vector<StmtPtr> s) { return make_stmt(Block{std::move(s)}); }

}  // namespace coda
