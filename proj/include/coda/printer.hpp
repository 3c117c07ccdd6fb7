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

// Canonical pretty printer. Structured nodes are laid out with two-space
// indentation and minimal parentheses; opaque nodes are emitted verbatim.

#include <string>
#include <type_traits>

#include "coda/ast.hpp"

namespace coda {

namespace detail {

inline int expr_precedence(const Expr& e) {
  return std::visit(
      [](const auto& n) -> int {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, Unary>) {
          return is_postfix(n.op) ? prec::kPostfix : prec::kUnary;
        } else if constexpr (std::is_same_v<T, Binary>) {
          return precedence(n.op);
        } else if constexpr (std::is_same_v<T, Assign>) {
          return prec::kAssign;
        } else if constexpr (std::is_same_v<T, Call> || std::is_same_v<T, Index>) {
          return prec::kPostfix;
        } else if constexpr (std::is_same_v<T, OpaqueExpr>) {
          return n.precedence;
        } else {
          return prec::kPrimary;
        }
      },
      e.node);
}

class Printer {
 public:
  std::string out;

  void expr(const ExprPtr& e, int min_prec = 0) {
    const bool paren = expr_precedence(*e) < min_prec;
    if (paren) out += '(';
    std::visit([&](const auto& n) { expr_node(n); }, e->node);
    if (paren) out += ')';
  }

  void stmt(const StmtPtr& s, int depth) {
    indent(depth);
    stmt_inline(s, depth);
    out += '\n';
  }

  void indent(int depth) { out.append(static_cast<std::size_t>(depth) * 2, ' '); }

  void block(const Block& b, int depth) {
    out += "{\n";
    for (const auto& s : b.stmts) stmt(s, depth + 1);
    indent(depth);
    out += '}';
  }

  // Statement text without leading indentation or trailing newline.
  void stmt_inline(const StmtPtr& s, int depth) {
    std::visit([&](const auto& n) { stmt_node(n, depth); }, s->node);
  }

  /// Prints a body after a header such as `while (c)`. When `force_block` is
  /// set a bare statement is wrapped in braces (dangling-else protection).
  void body(const StmtPtr& s, int depth, bool force_block = false) {
    if (const auto* b = s->as<Block>()) {
      out += ' ';
      block(*b, depth);
    } else if (force_block) {
      out += " {\n";
      stmt(s, depth + 1);
      indent(depth);
      out += '}';
    } else {
      out += '\n';
      indent(depth + 1);
      stmt_inline(s, depth + 1);
    }
  }

  void function(const FunctionDef& f) {
    out += f.return_type;
    out += ' ';
    out += f.name;
    out += '(';
    for (std::size_t i = 0; i < f.params.size(); ++i) {
      if (i) out += ", ";
      out += f.params[i].type;
      out += ' ';
      out += f.params[i].name;
      out += concat(f.params[i].suffix);
    }
    out += ") ";
    block(*f.body->as<Block>(), 0);
    out += '\n';
  }

 private:
  void expr_node(const Ident& n) { out += n.name; }
  void expr_node(const Literal& n) { out += n.text; }
  void expr_node(const OpaqueExpr& n) { out += concat(n.tokens); }

  void expr_node(const Unary& n) {
    if (is_postfix(n.op)) {
      expr(n.operand, prec::kPostfix);
      out += op_text(n.op);
      return;
    }
    const std::string_view op = op_text(n.op);
    out += op;
    // `- -x` must not print as `--x`.
    bool glue_risk = false;
    if (const auto* inner = n.operand->as<Unary>())
      glue_risk = !is_postfix(inner->op) && op_text(inner->op)[0] == op.back();
    if (const auto* o = n.operand->as<OpaqueExpr>()) {
      const std::string t = concat(o->tokens);
      glue_risk = !t.empty() && t[0] == op.back();
    }
    if (glue_risk) {
      out += '(';
      expr(n.operand);
      out += ')';
    } else {
      expr(n.operand, prec::kUnary);
    }
  }

  void expr_node(const Binary& n) {
    const int p = precedence(n.op);
    expr(n.lhs, p);
    out += ' ';
    out += op_text(n.op);
    out += ' ';
    expr(n.rhs, p + 1);
  }

  void expr_node(const Assign& n) {
    expr(n.target, prec::kUnary);
    out += ' ';
    out += op_text(n.op);
    out += ' ';
    expr(n.value, prec::kAssign);
  }

  void expr_node(const Call& n) {
    expr(n.callee, prec::kPostfix);
    out += '(';
    for (std::size_t i = 0; i < n.args.size(); ++i) {
      if (i) out += ", ";
      expr(n.args[i], prec::kAssign);
    }
    out += ')';
  }

  void expr_node(const Index& n) {
    expr(n.base, prec::kPostfix);
    out += '[';
    expr(n.index);
    out += ']';
  }

  void decl_text(const Decl& d) {
    out += d.type;
    out += ' ';
    out += d.name;
    if (d.array_size) {
      out += '[';
      expr(d.array_size);
      out += ']';
    }
    if (d.init) {
      out += " = ";
      expr(d.init, prec::kAssign);
    }
  }

  void stmt_node(const Block& n, int depth) { block(n, depth); }

  void stmt_node(const For& n, int depth) {
    out += "for (";
    if (n.init) {
      if (const auto* d = n.init->as<Decl>())
        decl_text(*d);
      else
        expr(n.init->as<ExprStmt>()->expr);
    }
    out += ';';
    if (n.cond) {
      out += ' ';
      expr(n.cond);
    }
    out += ';';
    if (n.step) {
      out += ' ';
      expr(n.step);
    }
    out += ')';
    body(n.body, depth);
  }

  void stmt_node(const While& n, int depth) {
    out += "while (";
    expr(n.cond);
    out += ')';
    body(n.body, depth);
  }

  void stmt_node(const DoWhile& n, int depth) {
    out += "do";
    body(n.body, depth);
    if (n.body->is<Block>()) {
      out += ' ';
    } else {
      out += '\n';
      indent(depth);
    }
    out += "while (";
    expr(n.cond);
    out += ");";
  }

  static bool ends_with_open_if(const StmtPtr& s) {
    if (const auto* i = s->as<If>())
      return !i->else_body || ends_with_open_if(i->else_body);
    if (const auto* f = s->as<For>()) return ends_with_open_if(f->body);
    if (const auto* w = s->as<While>()) return ends_with_open_if(w->body);
    return false;
  }

  void stmt_node(const If& n, int depth) {
    for (std::size_t i = 0; i < n.branches.size(); ++i) {
      const auto& br = n.branches[i];
      if (i) {
        if (n.branches[i - 1].body->is<Block>()) {
          out += ' ';
        } else {
          out += '\n';
          indent(depth);
        }
        out += "else ";
      }
      out += "if (";
      expr(br.cond);
      out += ')';
      const bool followed = i + 1 < n.branches.size() || n.else_body;
      body(br.body, depth, followed && ends_with_open_if(br.body));
    }
    if (n.else_body) {
      const auto& last = n.branches.back().body;
      const bool last_braced = last->is<Block>() || ends_with_open_if(last);
      if (last_braced) {
        out += ' ';
      } else {
        out += '\n';
        indent(depth);
      }
      out += "else";
      body(n.else_body, depth);
    }
  }

  void stmt_node(const ExprStmt& n, int) {
    expr(n.expr);
    out += ';';
  }

  void stmt_node(const Decl& n, int) {
    decl_text(n);
    out += ';';
  }

  void stmt_node(const Return& n, int) {
    out += "return";
    if (n.value) {
      out += ' ';
      expr(n.value);
    }
    out += ';';
  }

  void stmt_node(const Break&, int) { out += "break;"; }
  void stmt_node(const Continue&, int) { out += "continue;"; }
  void stmt_node(const OpaqueStmt& n, int) { out += concat(n.tokens); }
};

}  // namespace detail

inline std::string print(const ExprPtr& e) {
  detail::Printer p;
  p.expr(e);
  return p.out;
}

inline std::string print(const StmtPtr& s) {
  detail::Printer p;
  p.stmt(s, 0);
  return p.out;
}

inline std::string print(const SourceUnit& unit) {
  detail::Printer p;
  for (const auto& item : unit.items) {
    std::visit(
        [&](const auto& n) {
          using T = std::decay_t<decltype(n)>;
          if constexpr (std::is_same_v<T, FunctionDef>) {
            p.function(n);
          } else if constexpr (std::is_same_v<T, GlobalDecl>) {
            p.stmt(n.decl, 0);
          } else if constexpr (std::is_same_v<T, TopLevelStmt>) {
            p.stmt(n.stmt, 0);
          } else {
            p.out += concat(n.tokens);
            p.out += '\n';
          }
        },
        item);
  }
  return p.out;
}

}  // namespace coda
