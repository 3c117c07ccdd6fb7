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

#include <functional>
#include <string>
#include <string_view>
#include <type_traits>

#include "coda/ast.hpp"

namespace coda {

enum class NameRole { Declaration, Use, Opaque };

using NameVisitor = std::function<void(const std::string&, NameRole)>;

namespace detail {

inline void visit_tokens(const TokenStream& toks, const NameVisitor& fn) {
  for (const auto& t : toks)
    if (t.kind == TokenKind::Identifier) fn(t.text, NameRole::Opaque);
}

inline void visit_names(const ExprPtr& e, const NameVisitor& fn);

inline void visit_names(const StmtPtr& s, const NameVisitor& fn) {
  if (!s) return;
  std::visit(
      [&](const auto& n) {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, Block>) {
          for (const auto& c : n.stmts) visit_names(c, fn);
        } else if constexpr (std::is_same_v<T, For>) {
          visit_names(n.init, fn);
          visit_names(n.cond, fn);
          visit_names(n.step, fn);
          visit_names(n.body, fn);
        } else if constexpr (std::is_same_v<T, While>) {
          visit_names(n.cond, fn);
          visit_names(n.body, fn);
        } else if constexpr (std::is_same_v<T, DoWhile>) {
          visit_names(n.body, fn);
          visit_names(n.cond, fn);
        } else if constexpr (std::is_same_v<T, If>) {
          for (const auto& b : n.branches) {
            visit_names(b.cond, fn);
            visit_names(b.body, fn);
          }
          visit_names(n.else_body, fn);
        } else if constexpr (std::is_same_v<T, ExprStmt>) {
          visit_names(n.expr, fn);
        } else if constexpr (std::is_same_v<T, Decl>) {
          fn(n.name, NameRole::Declaration);
          visit_names(n.array_size, fn);
          visit_names(n.init, fn);
        } else if constexpr (std::is_same_v<T, Return>) {
          visit_names(n.value, fn);
        } else if constexpr (std::is_same_v<T, OpaqueStmt>) {
          visit_tokens(n.tokens, fn);
        }
      },
      s->node);
}

inline void visit_names(const ExprPtr& e, const NameVisitor& fn) {
  if (!e) return;
  std::visit(
      [&](const auto& n) {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, Ident>) {
          fn(n.name, NameRole::Use);
        } else if constexpr (std::is_same_v<T, Unary>) {
          visit_names(n.operand, fn);
        } else if constexpr (std::is_same_v<T, Binary>) {
          visit_names(n.lhs, fn);
          visit_names(n.rhs, fn);
        } else if constexpr (std::is_same_v<T, Assign>) {
          visit_names(n.target, fn);
          visit_names(n.value, fn);
        } else if constexpr (std::is_same_v<T, Call>) {
          visit_names(n.callee, fn);
          for (const auto& a : n.args) visit_names(a, fn);
        } else if constexpr (std::is_same_v<T, Index>) {
          visit_names(n.base, fn);
          visit_names(n.index, fn);
        } else if constexpr (std::is_same_v<T, OpaqueExpr>) {
          visit_tokens(n.tokens, fn);
        }
      },
      e->node);
}

}  // namespace detail

/// Visits every identifier occurrence of the unit in source order. Names
/// inside opaque token runs are reported with NameRole::Opaque.
inline void visit_names(const SourceUnit& unit, const NameVisitor& fn) {
  for (const auto& item : unit.items) {
    std::visit(
        [&](const auto& n) {
          using T = std::decay_t<decltype(n)>;
          if constexpr (std::is_same_v<T, FunctionDef>) {
            fn(n.name, NameRole::Declaration);
            for (const auto& p : n.params) {
              fn(p.name, NameRole::Declaration);
              detail::visit_tokens(p.suffix, fn);
            }
            detail::visit_names(n.body, fn);
          } else if constexpr (std::is_same_v<T, GlobalDecl>) {
            detail::visit_names(n.decl, fn);
          } else if constexpr (std::is_same_v<T, TopLevelStmt>) {
            detail::visit_names(n.stmt, fn);
          } else if constexpr (std::is_same_v<T, OpaqueSegment>) {
            detail::visit_tokens(n.tokens, fn);
          }
        },
        item);
  }
}

// ---- generic traversal ---------------------------------------------------

namespace detail {

template <typename S, typename E>
void for_each_expr(const ExprPtr& e, S& on_stmt, E& on_expr);

template <typename S, typename E>
void for_each_stmt(const StmtPtr& s, S& on_stmt, E& on_expr) {
  if (!s) return;
  on_stmt(*s);
  std::visit(
      [&](const auto& n) {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, Block>) {
          for (const auto& c : n.stmts) for_each_stmt(c, on_stmt, on_expr);
        } else if constexpr (std::is_same_v<T, For>) {
          for_each_stmt(n.init, on_stmt, on_expr);
          for_each_expr(n.cond, on_stmt, on_expr);
          for_each_expr(n.step, on_stmt, on_expr);
          for_each_stmt(n.body, on_stmt, on_expr);
        } else if constexpr (std::is_same_v<T, While>) {
          for_each_expr(n.cond, on_stmt, on_expr);
          for_each_stmt(n.body, on_stmt, on_expr);
        } else if constexpr (std::is_same_v<T, DoWhile>) {
          for_each_stmt(n.body, on_stmt, on_expr);
          for_each_expr(n.cond, on_stmt, on_expr);
        } else if constexpr (std::is_same_v<T, If>) {
          for (const auto& b : n.branches) {
            for_each_expr(b.cond, on_stmt, on_expr);
            for_each_stmt(b.body, on_stmt, on_expr);
          }
          for_each_stmt(n.else_body, on_stmt, on_expr);
        } else if constexpr (std::is_same_v<T, ExprStmt>) {
          for_each_expr(n.expr, on_stmt, on_expr);
        } else if constexpr (std::is_same_v<T, Decl>) {
          for_each_expr(n.array_size, on_stmt, on_expr);
          for_each_expr(n.init, on_stmt, on_expr);
        } else if constexpr (std::is_same_v<T, Return>) {
          for_each_expr(n.value, on_stmt, on_expr);
        }
      },
      s->node);
}

template <typename S, typename E>
void for_each_expr(const ExprPtr& e, S& on_stmt, E& on_expr) {
  if (!e) return;
  on_expr(*e);
  std::visit(
      [&](const auto& n) {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, Unary>) {
          for_each_expr(n.operand, on_stmt, on_expr);
        } else if constexpr (std::is_same_v<T, Binary>) {
          for_each_expr(n.lhs, on_stmt, on_expr);
          for_each_expr(n.rhs, on_stmt, on_expr);
        } else if constexpr (std::is_same_v<T, Assign>) {
          for_each_expr(n.target, on_stmt, on_expr);
          for_each_expr(n.value, on_stmt, on_expr);
        } else if constexpr (std::is_same_v<T, Call>) {
          for_each_expr(n.callee, on_stmt, on_expr);
          for (const auto& a : n.args) for_each_expr(a, on_stmt, on_expr);
        } else if constexpr (std::is_same_v<T, Index>) {
          for_each_expr(n.base, on_stmt, on_expr);
          for_each_expr(n.index, on_stmt, on_expr);
        }
      },
      e->node);
}

}  // namespace detail

/// Pre-order traversal of every statement and expression below `s`.
template <typename S, typename E>
void for_each_node(const StmtPtr& s, S&& on_stmt, E&& on_expr) {
  detail::for_each_stmt(s, on_stmt, on_expr);
}

/// Pre-order traversal of function bodies, global declarations and
/// top-level statements. Opaque segments are not visited.
template <typename S, typename E>
void for_each_node(const SourceUnit& unit, S&& on_stmt, E&& on_expr) {
  for (const auto& item : unit.items) {
    if (const auto* f = std::get_if<FunctionDef>(&item))
      detail::for_each_stmt(f->body, on_stmt, on_expr);
    else if (const auto* g = std::get_if<GlobalDecl>(&item))
      detail::for_each_stmt(g->decl, on_stmt, on_expr);
    else if (const auto* t = std::get_if<TopLevelStmt>(&item))
      detail::for_each_stmt(t->stmt, on_stmt, on_expr);
  }
}

/// Calls `fn` with the token run of every opaque node.
template <typename Fn>
void for_each_opaque_run(const SourceUnit& unit, Fn&& fn) {
  for_each_node(
      unit,
      [&](const Stmt& s) {
        if (const auto* o = s.as<OpaqueStmt>()) fn(o->tokens);
      },
      [&](const Expr& e) {
        if (const auto* o = e.as<OpaqueExpr>()) fn(o->tokens);
      });
  for (const auto& item : unit.items)
    if (const auto* o = std::get_if<OpaqueSegment>(&item)) fn(o->tokens);
}

// ---- renaming ------------------------------------------------------------

using NameMap = std::function<std::string(const std::string&)>;

namespace detail {

inline TokenStream map_tokens(const TokenStream& toks, const NameMap& fn) {
  TokenStream out = toks;
  for (auto& t : out)
    if (t.kind == TokenKind::Identifier) t.text = fn(t.text);
  return out;
}

inline ExprPtr map_names(const ExprPtr& e, const NameMap& fn);

inline StmtPtr map_names(const StmtPtr& s, const NameMap& fn) {
  if (!s) return s;
  return std::visit(
      [&](const auto& n) -> StmtPtr {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, Block>) {
          Block b;
          for (const auto& c : n.stmts) b.stmts.push_back(map_names(c, fn));
          return make_stmt(std::move(b));
        } else if constexpr (std::is_same_v<T, For>) {
          return make_stmt(For{map_names(n.init, fn), map_names(n.cond, fn),
                               map_names(n.step, fn), map_names(n.body, fn)});
        } else if constexpr (std::is_same_v<T, While>) {
          return make_stmt(While{map_names(n.cond, fn), map_names(n.body, fn)});
        } else if constexpr (std::is_same_v<T, DoWhile>) {
          return make_stmt(DoWhile{map_names(n.body, fn), map_names(n.cond, fn)});
        } else if constexpr (std::is_same_v<T, If>) {
          If r;
          for (const auto& b : n.branches)
            r.branches.push_back({map_names(b.cond, fn), map_names(b.body, fn)});
          r.else_body = map_names(n.else_body, fn);
          return make_stmt(std::move(r));
        } else if constexpr (std::is_same_v<T, ExprStmt>) {
          return expr_stmt(map_names(n.expr, fn));
        } else if constexpr (std::is_same_v<T, Decl>) {
          return make_stmt(Decl{n.type, fn(n.name), map_names(n.array_size, fn),
                                map_names(n.init, fn)});
        } else if constexpr (std::is_same_v<T, Return>) {
          return make_stmt(Return{map_names(n.value, fn)});
        } else if constexpr (std::is_same_v<T, OpaqueStmt>) {
          return make_stmt(OpaqueStmt{map_tokens(n.tokens, fn)});
        } else {
          return s;
        }
      },
      s->node);
}

inline ExprPtr map_names(const ExprPtr& e, const NameMap& fn) {
  if (!e) return e;
  return std::visit(
      [&](const auto& n) -> ExprPtr {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, Ident>) {
          return ident(fn(n.name));
        } else if constexpr (std::is_same_v<T, Unary>) {
          return unary(n.op, map_names(n.operand, fn));
        } else if constexpr (std::is_same_v<T, Binary>) {
          return binary(n.op, map_names(n.lhs, fn), map_names(n.rhs, fn));
        } else if constexpr (std::is_same_v<T, Assign>) {
          return assign(n.op, map_names(n.target, fn), map_names(n.value, fn));
        } else if constexpr (std::is_same_v<T, Call>) {
          Call c{map_names(n.callee, fn), {}};
          for (const auto& a : n.args) c.args.push_back(map_names(a, fn));
          return make_expr(std::move(c));
        } else if constexpr (std::is_same_v<T, Index>) {
          return make_expr(Index{map_names(n.base, fn), map_names(n.index, fn)});
        } else if constexpr (std::is_same_v<T, OpaqueExpr>) {
          return make_expr(OpaqueExpr{map_tokens(n.tokens, fn), n.precedence});
        } else {
          return e;
        }
      },
      e->node);
}

}  // namespace detail

/// Applies `fn` to every identifier occurrence (declarations, uses and
/// identifier tokens inside opaque runs). Type names are left alone.
inline SourceUnit map_names(const SourceUnit& unit, const NameMap& fn) {
  SourceUnit out;
  out.dialect = unit.dialect;
  for (const auto& item : unit.items) {
    out.items.push_back(std::visit(
        [&](const auto& n) -> TopLevelItem {
          using T = std::decay_t<decltype(n)>;
          if constexpr (std::is_same_v<T, FunctionDef>) {
            FunctionDef f{n.return_type, fn(n.name), {}, detail::map_names(n.body, fn)};
            for (const auto& p : n.params)
              f.params.push_back({p.type, fn(p.name), detail::map_tokens(p.suffix, fn)});
            return f;
          } else if constexpr (std::is_same_v<T, GlobalDecl>) {
            return GlobalDecl{detail::map_names(n.decl, fn)};
          } else if constexpr (std::is_same_v<T, TopLevelStmt>) {
            return TopLevelStmt{detail::map_names(n.stmt, fn)};
          } else {
            return OpaqueSegment{detail::map_tokens(n.tokens, fn)};
          }
        },
        item));
  }
  rebuild_symbols(out);
  return out;
}

// ---- symbol table --------------------------------------------------------

namespace detail {

inline void collect_symbols(const StmtPtr& s, const std::string& scope,
                            std::vector<Symbol>& out) {
  if (!s) return;
  if (const auto* d = s->as<Decl>()) {
    out.push_back({d->name, scope});
  } else if (const auto* b = s->as<Block>()) {
    int k = 0;
    for (const auto& c : b->stmts) {
      if (c->is<Decl>())
        collect_symbols(c, scope, out);
      else
        collect_symbols(c, scope + "/" + std::to_string(k), out);
      ++k;
    }
  } else if (const auto* f = s->as<For>()) {
    collect_symbols(f->init, scope + "/for", out);
    collect_symbols(f->body, scope + "/for", out);
  } else if (const auto* w = s->as<While>()) {
    collect_symbols(w->body, scope, out);
  } else if (const auto* dw = s->as<DoWhile>()) {
    collect_symbols(dw->body, scope, out);
  } else if (const auto* i = s->as<If>()) {
    int k = 0;
    for (const auto& br : i->branches)
      collect_symbols(br.body, scope + "/if" + std::to_string(k++), out);
    collect_symbols(i->else_body, scope + "/else", out);
  }
}

}  // namespace detail

inline void rebuild_symbols(SourceUnit& unit) {
  unit.symbols.clear();
  for (const auto& item : unit.items) {
    if (const auto* f = std::get_if<FunctionDef>(&item)) {
      unit.symbols.push_back({f->name, "global"});
      for (const auto& p : f->params) unit.symbols.push_back({p.name, f->name});
      detail::collect_symbols(f->body, f->name, unit.symbols);
    } else if (const auto* g = std::get_if<GlobalDecl>(&item)) {
      detail::collect_symbols(g->decl, "global", unit.symbols);
    } else if (const auto* t = std::get_if<TopLevelStmt>(&item)) {
      detail::collect_symbols(t->stmt, "global", unit.symbols);
    }
  }
}

}  // namespace coda
