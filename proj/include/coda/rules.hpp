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

// Equivalent structure rules: the catalog, the structure census and a
// single-pass probabilistic rewriter.

#include <algorithm>
#include <array>
#include <cctype>
#include <cstring>
#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "coda/ast.hpp"
#include "coda/error.hpp"
#include "coda/identifiers.hpp"
#include "coda/interpreter.hpp"
#include "coda/random.hpp"
#include "coda/walk.hpp"

namespace coda {

enum class RuleId : int {
  R1a, R1b,
  R2a, R2b,
  R3a, R3b, R3c, R3d,
  R3e, R3f, R3g, R3h, R3i, R3j, R3k, R3l, R3m,
  R3n,
  R4a, R4b,
};

inline constexpr std::size_t kRuleCount = 20;

inline constexpr std::size_t index_of(RuleId r) { return static_cast<std::size_t>(r); }

enum class RuleCategory { Loop, Branch, Calculation, Constant };

inline std::string to_string(RuleCategory c) {
  switch (c) {
    case RuleCategory::Loop: return "R1-loop";
    case RuleCategory::Branch: return "R2-branch";
    case RuleCategory::Calculation: return "R3-calculation";
    case RuleCategory::Constant: return "R4-constant";
  }
  return "?";
}

/// Compound operators handled one rule each (R3e..R3m), in rule order.
inline constexpr std::array<AssignOp, 9> kCompoundOps = {
    AssignOp::Add, AssignOp::Sub,    AssignOp::Mul,   AssignOp::Div, AssignOp::Mod,
    AssignOp::Shl, AssignOp::Shr, AssignOp::BitAnd, AssignOp::BitOr};

inline std::optional<std::size_t> compound_index(AssignOp op) {
  for (std::size_t k = 0; k < kCompoundOps.size(); ++k)
    if (kCompoundOps[k] == op) return k;
  return std::nullopt;
}

struct RuleInfo {
  RuleId id;
  std::string name;
  RuleCategory category;
  std::optional<RuleId> inverse;
  std::string description;
};

inline const std::vector<RuleInfo>& rule_catalog() {
  static const std::vector<RuleInfo> rules = [] {
    std::vector<RuleInfo> r = {
        {RuleId::R1a, "R1a", RuleCategory::Loop, RuleId::R1b,
         "for loop -> while loop (init hoisted, step appended to the body)"},
        {RuleId::R1b, "R1b", RuleCategory::Loop, RuleId::R1a,
         "while loop -> for loop with empty init and step"},
        {RuleId::R2a, "R2a", RuleCategory::Branch, RuleId::R2b,
         "if/else-if/else chain -> independent ifs guarded by negated earlier conditions"},
        {RuleId::R2b, "R2b", RuleCategory::Branch, RuleId::R2a,
         "guarded independent ifs -> if/else-if/else chain"},
        {RuleId::R3a, "R3a", RuleCategory::Calculation, std::nullopt, "++x -> x += 1"},
        {RuleId::R3b, "R3b", RuleCategory::Calculation, std::nullopt, "x++ -> x += 1"},
        {RuleId::R3c, "R3c", RuleCategory::Calculation, std::nullopt, "--x -> x -= 1"},
        {RuleId::R3d, "R3d", RuleCategory::Calculation, std::nullopt, "x-- -> x -= 1"},
    };
    const char* ids = "efghijklm";
    for (std::size_t k = 0; k < kCompoundOps.size(); ++k) {
      const std::string op(op_text(kCompoundOps[k]));
      const std::string bin = op.substr(0, op.size() - 1);
      r.push_back({static_cast<RuleId>(index_of(RuleId::R3e) + k), std::string("R3") + ids[k],
                   RuleCategory::Calculation, RuleId::R3n,
                   "x " + op + " e -> x = x " + bin + " e"});
    }
    r.push_back({RuleId::R3n, "R3n", RuleCategory::Calculation, std::nullopt,
                 "x = x op e -> x op= e"});
    r.push_back({RuleId::R4a, "R4a", RuleCategory::Constant, RuleId::R4b,
                 "literal -> fresh const variable declared at the start of the block"});
    r.push_back({RuleId::R4b, "R4b", RuleCategory::Constant, RuleId::R4a,
                 "const variable initialized by a literal -> inlined literal"});
    return r;
  }();
  return rules;
}

inline const RuleInfo& rule_info(RuleId r) { return rule_catalog()[index_of(r)]; }
inline const std::string& rule_name(RuleId r) { return rule_info(r).name; }

inline std::optional<RuleId> rule_from_name(std::string_view name) {
  for (const auto& r : rule_catalog())
    if (r.name == name) return r.id;
  return std::nullopt;
}

using RuleMask = std::array<bool, kRuleCount>;

inline RuleMask all_rules() {
  RuleMask m;
  m.fill(true);
  return m;
}

inline nlohmann::ordered_json rule_catalog_json(const RuleMask& enabled = all_rules()) {
  nlohmann::ordered_json out = nlohmann::ordered_json::array();
  for (const auto& r : rule_catalog()) {
    nlohmann::ordered_json j;
    j["ruleId"] = r.name;
    j["category"] = to_string(r.category);
    j["description"] = r.description;
    j["enabled"] = enabled[index_of(r.id)];
    out.push_back(std::move(j));
  }
  return out;
}

/// Reads a catalog dump; rules missing from it stay enabled.
inline RuleMask rule_mask_from_json(const nlohmann::json& j) {
  if (!j.is_array()) throw Error("rule list must be a JSON array");
  RuleMask m = all_rules();
  for (const auto& e : j) {
    const auto id = rule_from_name(e.at("ruleId").get<std::string>());
    if (!id) throw Error("unknown rule " + e.at("ruleId").get<std::string>());
    m[index_of(*id)] = e.value("enabled", true);
  }
  return m;
}

// ---- census ------------------------------------------------------------------

struct CensusEntry {
  std::size_t n_b = 0;
  std::size_t n_a = 0;
  friend bool operator==(const CensusEntry&, const CensusEntry&) = default;
};

struct StructureCensus {
  std::array<CensusEntry, kRuleCount> counts{};

  CensusEntry& operator[](RuleId r) { return counts[index_of(r)]; }
  const CensusEntry& operator[](RuleId r) const { return counts[index_of(r)]; }

  StructureCensus& operator+=(const StructureCensus& o) {
    for (std::size_t i = 0; i < kRuleCount; ++i) {
      counts[i].n_b += o.counts[i].n_b;
      counts[i].n_a += o.counts[i].n_a;
    }
    return *this;
  }
  friend bool operator==(const StructureCensus&, const StructureCensus&) = default;
};

/// n_a / (n_b + n_a); a structure seen nowhere is never rewritten.
inline double application_probability(const CensusEntry& e) {
  const std::size_t total = e.n_b + e.n_a;
  return total == 0 ? 0.0 : static_cast<double>(e.n_a) / static_cast<double>(total);
}

/// Raw structure counts of one unit. The census pairs them up per rule.
struct ShapeCounts {
  std::size_t for_loops = 0;
  std::size_t while_loops = 0;
  std::size_t if_chains = 0;  // an if with an else or an else-if
  std::size_t if_runs = 0;    // maximal runs of >= 2 adjacent else-less ifs
  std::array<std::size_t, 4> steps{};  // ++x, --x, x++, x-- as statements
  std::size_t add_one = 0;             // x += 1 as a statement
  std::size_t sub_one = 0;             // x -= 1 as a statement
  std::array<std::size_t, 9> compound{};
  std::array<std::size_t, 9> plain{};  // x = x op e
  std::size_t literals = 0;
  std::size_t const_decls = 0;
};

namespace detail {

inline bool is_r4_literal(const Literal& l) {
  return l.kind == LiteralKind::Integer || l.kind == LiteralKind::Char ||
         l.kind == LiteralKind::String;
}

/// `const T name = LIT;` or `const T name = -INT;`
inline const Expr* const_literal_init(const Decl& d) {
  if (!d.is_const() || d.array_size || !d.init) return nullptr;
  if (const auto* l = d.init->as<Literal>()) return is_r4_literal(*l) ? d.init.get() : nullptr;
  if (const auto* u = d.init->as<Unary>())
    if (u->op == UnaryOp::Neg)
      if (const auto* l = u->operand->as<Literal>())
        if (l->kind == LiteralKind::Integer) return d.init.get();
  return nullptr;
}

/// `x = x op e` for one of the compound-capable operators.
inline std::optional<std::size_t> plain_compound_form(const Assign& a) {
  if (a.op != AssignOp::Set) return std::nullopt;
  const auto* b = a.value->as<Binary>();
  if (!b || !deep_eq(b->lhs, a.target)) return std::nullopt;
  for (std::size_t k = 0; k < kCompoundOps.size(); ++k)
    if (underlying(kCompoundOps[k]) == b->op) return k;
  return std::nullopt;
}

inline bool is_plain_if(const StmtPtr& s) {
  const auto* i = s->as<If>();
  return i && i->branches.size() == 1 && !i->else_body;
}

class ShapeCounter {
 public:
  ShapeCounts c;

  void unit(const SourceUnit& u) {
    for (const auto& item : u.items) {
      if (const auto* f = std::get_if<FunctionDef>(&item)) {
        in_fn_ = true;
        stmt(f->body);
        in_fn_ = false;
      } else if (const auto* g = std::get_if<GlobalDecl>(&item)) {
        stmt(g->decl);
      } else if (const auto* t = std::get_if<TopLevelStmt>(&item)) {
        stmt(t->stmt);
      }
    }
  }

 private:
  bool in_fn_ = false;

  void stmt(const StmtPtr& s) {
    if (!s) return;
    if (const auto* b = s->as<Block>()) {
      std::size_t run = 0;
      for (const auto& x : b->stmts) {
        stmt(x);
        if (is_plain_if(x)) {
          ++run;
        } else {
          if (run >= 2) ++c.if_runs;
          run = 0;
        }
      }
      if (run >= 2) ++c.if_runs;
    } else if (const auto* f = s->as<For>()) {
      ++c.for_loops;
      if (f->init) {
        if (const auto* d = f->init->as<Decl>())
          decl(*d, false);
        else if (const auto* e = f->init->as<ExprStmt>())
          expr(e->expr, false, false);
      }
      expr(f->cond, false, false);
      expr(f->step, true, false);
      stmt(f->body);
    } else if (const auto* w = s->as<While>()) {
      ++c.while_loops;
      expr(w->cond, false, true);
      stmt(w->body);
    } else if (const auto* dw = s->as<DoWhile>()) {
      stmt(dw->body);
      expr(dw->cond, false, true);
    } else if (const auto* i = s->as<If>()) {
      if (i->else_body || i->branches.size() >= 2) ++c.if_chains;
      for (const auto& br : i->branches) {
        expr(br.cond, false, true);
        stmt(br.body);
      }
      stmt(i->else_body);
    } else if (const auto* e = s->as<ExprStmt>()) {
      expr(e->expr, true, true);
    } else if (const auto* d = s->as<Decl>()) {
      decl(*d, true);
    } else if (const auto* r = s->as<Return>()) {
      expr(r->value, false, true);
    }
  }

  void decl(const Decl& d, bool lit_ok) {
    if (const_literal_init(d)) ++c.const_decls;
    expr(d.array_size, false, false);
    expr(d.init, false, lit_ok);
  }

  void expr(const ExprPtr& e, bool stmt_pos, bool lit_ok) {
    if (!e) return;
    std::visit(
        [&](const auto& n) {
          using T = std::decay_t<decltype(n)>;
          if constexpr (std::is_same_v<T, Literal>) {
            if (lit_ok && in_fn_ && is_r4_literal(n)) ++c.literals;
          } else if constexpr (std::is_same_v<T, Unary>) {
            if (stmt_pos && is_increment(n.op)) ++c.steps[static_cast<std::size_t>(n.op)];
            expr(n.operand, false, lit_ok);
          } else if constexpr (std::is_same_v<T, Binary>) {
            expr(n.lhs, false, lit_ok);
            expr(n.rhs, false, lit_ok);
          } else if constexpr (std::is_same_v<T, Assign>) {
            if (auto k = compound_index(n.op)) ++c.compound[*k];
            if (auto k = plain_compound_form(n)) ++c.plain[*k];
            if (stmt_pos && (n.op == AssignOp::Add || n.op == AssignOp::Sub)) {
              const auto* l = n.value->template as<Literal>();
              if (l && l->kind == LiteralKind::Integer && l->text == "1")
                ++(n.op == AssignOp::Add ? c.add_one : c.sub_one);
            }
            expr(n.target, false, lit_ok);
            expr(n.value, false, lit_ok);
          } else if constexpr (std::is_same_v<T, Call>) {
            expr(n.callee, false, lit_ok);
            for (const auto& a : n.args) expr(a, false, lit_ok);
          } else if constexpr (std::is_same_v<T, Index>) {
            expr(n.base, false, lit_ok);
            expr(n.index, false, lit_ok);
          }
        },
        e->node);
  }
};

}  // namespace detail

inline ShapeCounts count_shapes(const SourceUnit& unit) {
  detail::ShapeCounter w;
  w.unit(unit);
  return w.c;
}

inline StructureCensus census_of(const ShapeCounts& s) {
  StructureCensus c;
  c[RuleId::R1a] = {s.for_loops, s.while_loops};
  c[RuleId::R1b] = {s.while_loops, s.for_loops};
  c[RuleId::R2a] = {s.if_chains, s.if_runs};
  c[RuleId::R2b] = {s.if_runs, s.if_chains};
  c[RuleId::R3a] = {s.steps[0], s.add_one};
  c[RuleId::R3c] = {s.steps[1], s.sub_one};
  c[RuleId::R3b] = {s.steps[2], s.add_one};
  c[RuleId::R3d] = {s.steps[3], s.sub_one};
  std::size_t plain = 0, compound = 0;
  for (std::size_t k = 0; k < kCompoundOps.size(); ++k) {
    c.counts[index_of(RuleId::R3e) + k] = {s.compound[k], s.plain[k]};
    plain += s.plain[k];
    compound += s.compound[k];
  }
  c[RuleId::R3n] = {plain, compound};
  c[RuleId::R4a] = {s.literals, s.const_decls};
  c[RuleId::R4b] = {s.const_decls, s.literals};
  return c;
}

inline StructureCensus census(const SourceUnit& unit) { return census_of(count_shapes(unit)); }

inline StructureCensus census(const std::vector<SourceUnit>& units) {
  StructureCensus c;
  for (const auto& u : units) c += census(u);
  return c;
}

// ---- probabilities -----------------------------------------------------------

using RuleProbabilities = std::array<double, kRuleCount>;

inline RuleProbabilities guided_probabilities(const StructureCensus& c,
                                              const RuleMask& enabled = all_rules()) {
  RuleProbabilities p{};
  for (std::size_t i = 0; i < kRuleCount; ++i)
    p[i] = enabled[i] ? application_probability(c.counts[i]) : 0.0;
  return p;
}

inline RuleProbabilities uniform_probabilities(double q, const RuleMask& enabled = all_rules()) {
  RuleProbabilities p{};
  for (std::size_t i = 0; i < kRuleCount; ++i) p[i] = enabled[i] ? q : 0.0;
  return p;
}

inline RuleProbabilities only_rule(RuleId r, double q = 1.0) {
  RuleProbabilities p{};
  p[index_of(r)] = q;
  return p;
}

// ---- rewriter ----------------------------------------------------------------

struct RewriteResult {
  SourceUnit unit;
  std::vector<RuleId> applied;  // one entry per rewritten occurrence, in order
};

namespace detail {

// Library calls a branch body may make without touching program variables.
inline bool is_inert_call(const std::string& name) {
  static const std::set<std::string> names = {"emit", "read", "printf", "puts",
                                              "putchar", "strlen", "abs"};
  return names.count(name) > 0;
}

/// Calls, assignments, ++/-- or opaque code anywhere in `e`.
inline bool has_side_effects(const ExprPtr& e) {
  bool found = false;
  if (!e) return false;
  auto on_stmt = [](const Stmt&) {};
  auto on_expr = [&](const Expr& x) {
    if (x.is<Assign>() || x.is<Call>() || x.is<OpaqueExpr>()) found = true;
    if (const auto* u = x.as<Unary>(); u && is_increment(u->op)) found = true;
  };
  detail::for_each_expr(e, on_stmt, on_expr);
  return found;
}

/// Like has_side_effects but calls are allowed.
inline bool writes_anything(const ExprPtr& e) {
  bool found = false;
  if (!e) return false;
  auto on_stmt = [](const Stmt&) {};
  auto on_expr = [&](const Expr& x) {
    if (x.is<Assign>() || x.is<OpaqueExpr>()) found = true;
    if (const auto* u = x.as<Unary>(); u && is_increment(u->op)) found = true;
  };
  detail::for_each_expr(e, on_stmt, on_expr);
  return found;
}

inline bool simple_lvalue(const ExprPtr& e) {
  if (e->is<Ident>()) return true;
  if (const auto* ix = e->as<Index>())
    return ix->base->is<Ident>() && !has_side_effects(ix->index);
  return false;
}

inline const std::string* base_name(const ExprPtr& e) {
  if (const auto* id = e->as<Ident>()) return &id->name;
  if (const auto* ix = e->as<Index>()) return base_name(ix->base);
  return nullptr;
}

inline void read_names(const ExprPtr& e, std::set<std::string>& out) {
  if (!e) return;
  auto on_stmt = [](const Stmt&) {};
  auto on_expr = [&](const Expr& x) {
    if (const auto* id = x.as<Ident>()) out.insert(id->name);
  };
  detail::for_each_expr(e, on_stmt, on_expr);
}

/// Names a statement may write. Sets `unsafe` on opaque code or a call that
/// could write through other means.
inline void written_names(const StmtPtr& s, std::set<std::string>& out, bool& unsafe) {
  auto on_stmt = [&](const Stmt& x) {
    if (x.is<OpaqueStmt>()) unsafe = true;
    if (const auto* d = x.as<Decl>()) out.insert(d->name);
  };
  auto on_expr = [&](const Expr& x) {
    if (x.is<OpaqueExpr>()) unsafe = true;
    if (const auto* a = x.as<Assign>()) {
      if (const auto* n = base_name(a->target)) out.insert(*n); else unsafe = true;
    } else if (const auto* u = x.as<Unary>(); u && is_increment(u->op)) {
      if (const auto* n = base_name(u->operand)) out.insert(*n); else unsafe = true;
    } else if (const auto* c = x.as<Call>()) {
      const auto* callee = c->callee->as<Ident>();
      if (!callee || !is_inert_call(callee->name)) unsafe = true;
    }
  };
  for_each_node(s, on_stmt, on_expr);
}

/// `continue` that belongs to the loop whose body is `s`.
inline bool has_own_continue(const StmtPtr& s) {
  if (!s) return false;
  if (s->is<Continue>()) return true;
  if (s->is<For>() || s->is<While>() || s->is<DoWhile>()) return false;
  if (const auto* o = s->as<OpaqueStmt>()) {
    for (const auto& t : o->tokens)
      if (t.kind == TokenKind::Keyword && t.text == "continue") return true;
    return false;
  }
  if (const auto* b = s->as<Block>()) {
    for (const auto& x : b->stmts)
      if (has_own_continue(x)) return true;
    return false;
  }
  if (const auto* i = s->as<If>()) {
    for (const auto& br : i->branches)
      if (has_own_continue(br.body)) return true;
    return has_own_continue(i->else_body);
  }
  return false;
}

/// Branch conditions and bodies can be reordered into guarded ifs (and back).
inline bool branches_independent(const std::vector<ExprPtr>& conds,
                                 const std::vector<StmtPtr>& bodies) {
  std::set<std::string> reads;
  for (const auto& c : conds) {
    if (has_side_effects(c)) return false;
    read_names(c, reads);
  }
  std::set<std::string> writes;
  bool unsafe = false;
  for (const auto& b : bodies) written_names(b, writes, unsafe);
  if (unsafe) return false;
  for (const auto& w : writes)
    if (reads.count(w)) return false;
  return true;
}

inline std::string strip_words(std::string type, std::initializer_list<const char*> words) {
  for (const char* w : words) {
    const std::string word(w);
    for (std::size_t pos; (pos = type.find(word)) != std::string::npos;) {
      const bool left = pos == 0 || type[pos - 1] == ' ';
      const std::size_t end = pos + word.size();
      const bool right = end == type.size() || type[end] == ' ' || type[end] == '*';
      if (!left || !right) break;
      type.erase(pos, word.size());
    }
  }
  std::string out;
  for (char ch : type)
    if (ch != ' ' || (!out.empty() && out.back() != ' ')) out += ch;
  while (!out.empty() && out.back() == ' ') out.pop_back();
  return out;
}

/// C type of a literal as R4a declares it; nullopt when R4a leaves it alone.
inline std::optional<std::string> literal_type(const Literal& l) {
  if (l.kind == LiteralKind::Integer) {
    std::string suffix;
    for (auto it = l.text.rbegin(); it != l.text.rend() && std::strchr("uUlL", *it); ++it)
      suffix.insert(suffix.begin(), static_cast<char>(std::tolower(static_cast<unsigned char>(*it))));
    if (suffix.find('u') != std::string::npos) return std::nullopt;
    if (suffix == "ll") return "long long";
    if (suffix == "l") return "long";
    if (!suffix.empty()) return std::nullopt;
    const std::uint64_t v = parse_int_literal(l.text);
    const bool decimal = l.text.size() == 1 || l.text[0] != '0';
    if (v <= static_cast<std::uint64_t>(std::numeric_limits<std::int32_t>::max())) return "int";
    if (decimal && v <= static_cast<std::uint64_t>(std::numeric_limits<std::int64_t>::max()))
      return "long";
    return std::nullopt;
  }
  if (l.kind == LiteralKind::Char) {
    if (l.text.empty() || l.text[0] != '\'') return std::nullopt;
    try {
      const std::int64_t v = parse_char_literal(l.text);
      if (v < 0 || v > 127) return std::nullopt;
    } catch (const std::exception&) {
      return std::nullopt;
    }
    return "char";
  }
  if (l.kind == LiteralKind::String) {
    if (l.text.empty() || l.text[0] != '"') return std::nullopt;
    return "const char*";
  }
  return std::nullopt;
}

inline std::string sanitize_literal(const std::string& text) {
  std::string out;
  for (char ch : text) {
    if (std::isalnum(static_cast<unsigned char>(ch)))
      out += ch;
    else if (ch != '"' && ch != '\'' && !out.empty() && out.back() != '_')
      out += '_';
    if (out.size() >= 12) break;
  }
  while (!out.empty() && out.back() == '_') out.pop_back();
  return out;
}

class Rewriter {
 public:
  Rewriter(const SourceUnit& unit, const RuleProbabilities& probs, Rng& rng)
      : unit_(unit), probs_(probs), rng_(rng) {
    for (const auto& item : unit.items)
      if (const auto* f = std::get_if<FunctionDef>(&item)) functions_.insert(f->name);
  }

  RewriteResult run() {
    choose_inlines();
    SourceUnit out;
    out.dialect = unit_.dialect;
    for (const auto& item : unit_.items) {
      if (const auto* f = std::get_if<FunctionDef>(&item)) {
        in_fn_ = true;
        out.items.push_back(FunctionDef{f->return_type, f->name, f->params, single(f->body)});
        in_fn_ = false;
      } else if (const auto* g = std::get_if<GlobalDecl>(&item)) {
        for (auto& s : stmt(g->decl)) out.items.push_back(GlobalDecl{std::move(s)});
      } else if (const auto* t = std::get_if<TopLevelStmt>(&item)) {
        for (auto& s : stmt(t->stmt)) out.items.push_back(TopLevelStmt{std::move(s)});
      } else {
        out.items.push_back(item);
      }
    }
    rebuild_symbols(out);
    return {std::move(out), std::move(applied_)};
  }

 private:
  const SourceUnit& unit_;
  const RuleProbabilities& probs_;
  Rng& rng_;
  std::vector<RuleId> applied_;
  std::set<std::string> functions_;
  std::map<std::string, ExprPtr> inline_;  // R4b choices: name -> literal
  std::vector<std::vector<StmtPtr>> frames_;  // pending R4a declarations per block
  std::optional<std::set<std::string>> taken_;
  bool in_fn_ = false;

  bool draw(RuleId r) {
    const double p = probs_[index_of(r)];
    if (p <= 0) return false;
    if (rng_.uniform() < p) {
      applied_.push_back(r);
      return true;
    }
    return false;
  }

  // R4b decisions come first, in declaration order.
  void choose_inlines() {
    if (probs_[index_of(RuleId::R4b)] <= 0) return;
    std::map<std::string, int> declared;
    for (const auto& s : unit_.symbols) ++declared[s.name];
    std::set<std::string> blocked, used;
    for_each_opaque_run(unit_, [&](const TokenStream& ts) {
      for (const auto& t : ts)
        if (t.kind == TokenKind::Identifier) blocked.insert(t.text);
    });
    for_each_node(
        unit_, [](const Stmt&) {},
        [&](const Expr& e) {
          if (const auto* id = e.as<Ident>()) used.insert(id->name);
          if (const auto* a = e.as<Assign>()) {
            if (const auto* n = base_name(a->target)) blocked.insert(*n);
          } else if (const auto* u = e.as<Unary>(); u && is_increment(u->op)) {
            if (const auto* n = base_name(u->operand)) blocked.insert(*n);
          }
        });
    std::vector<const Decl*> candidates;
    auto consider = [&](const StmtPtr& s) {
      if (const auto* d = s->as<Decl>())
        if (inlinable(*d) && declared[d->name] == 1 && !blocked.count(d->name) &&
            used.count(d->name))
          candidates.push_back(d);
    };
    for (const auto& item : unit_.items) {
      if (const auto* g = std::get_if<GlobalDecl>(&item)) consider(g->decl);
      if (const auto* t = std::get_if<TopLevelStmt>(&item)) consider(t->stmt);
    }
    for_each_node(
        unit_,
        [&](const Stmt& s) {
          if (const auto* b = s.as<Block>())
            for (const auto& x : b->stmts) consider(x);
        },
        [](const Expr&) {});
    for (const Decl* d : candidates)
      if (draw(RuleId::R4b)) inline_[d->name] = d->init;
  }

  static bool inlinable(const Decl& d) {
    const Expr* init = const_literal_init(d);
    if (!init) return false;
    const Literal* lit = init->as<Literal>();
    if (!lit) lit = init->as<Unary>()->operand->as<Literal>();
    const auto lt = literal_type(*lit);
    if (!lt) return false;
    const std::string base = strip_words(d.type, {"const", "static"});
    if (*lt == "const char*") return base == "char*";
    return base == *lt;
  }

  const std::set<std::string>& taken() {
    if (!taken_) {
      taken_ = names_occurring(unit_);
      for (const auto& s : unit_.symbols) taken_->insert(s.name);
      for (const auto& k : dialect(unit_.dialect).keywords) taken_->insert(k);
      for (const auto& b : default_identifier_options().builtins) taken_->insert(b);
    }
    return *taken_;
  }

  std::string fresh_name(const Literal& lit) {
    const std::string stem = "v_" + sanitize_literal(lit.text);
    taken();
    for (std::size_t k = 0;; ++k) {
      std::string name = stem + std::to_string(k);
      if (taken_->insert(name).second) return name;
    }
  }

  StmtPtr single(const StmtPtr& s) {
    if (!s) return s;
    auto v = stmt(s);
    if (v.size() == 1) return v.front();
    return block(std::move(v));
  }

  std::vector<StmtPtr> stmt(const StmtPtr& s) {
    return std::visit([&](const auto& n) { return stmt_node(s, n); }, s->node);
  }

  std::vector<StmtPtr> stmt_node(const StmtPtr&, const Block& b) {
    frames_.emplace_back();
    std::vector<StmtPtr> out;
    const auto& in = b.stmts;
    std::size_t chain_end = 0;
    for (std::size_t i = 0; i < in.size();) {
      if (i >= chain_end) {
        if (auto chain = guard_chain(in, i); chain.length >= 2) {
          chain_end = i + chain.length;
          if (branches_independent(chain.conds, chain.bodies) && draw(RuleId::R2b)) {
            out.push_back(build_chain(chain));
            i = chain_end;
            continue;
          }
        }
      }
      for (auto& x : stmt(in[i])) out.push_back(std::move(x));
      ++i;
    }
    std::vector<StmtPtr> hoisted = std::move(frames_.back());
    frames_.pop_back();
    out.insert(out.begin(), hoisted.begin(), hoisted.end());
    return {block(std::move(out))};
  }

  std::vector<StmtPtr> stmt_node(const StmtPtr&, const For& f) {
    StmtPtr init;
    if (f.init) {
      if (const auto* d = f.init->as<Decl>())
        init = make_stmt(Decl{d->type, d->name, expr(d->array_size, false, false),
                              expr(d->init, false, false)});
      else
        init = expr_stmt(expr(f.init->as<ExprStmt>()->expr, false, false));
    }
    ExprPtr cond = expr(f.cond, false, false);
    ExprPtr step = expr(f.step, true, false);
    StmtPtr body = single(f.body);
    if (!(step && has_own_continue(f.body)) && draw(RuleId::R1a))
      return for_to_while(init, cond, step, body);
    return {make_stmt(For{init, cond, step, body})};
  }

  std::vector<StmtPtr> for_to_while(const StmtPtr& init, ExprPtr cond, const ExprPtr& step,
                                    StmtPtr body) {
    if (!cond) cond = int_lit(1);
    if (step) {
      const auto* b = body->as<Block>();
      std::set<std::string> step_names;
      read_names(step, step_names);
      bool shadows = false;
      if (b)
        for (const auto& x : b->stmts)
          if (const auto* d = x->as<Decl>(); d && step_names.count(d->name)) shadows = true;
      std::vector<StmtPtr> stmts;
      if (b && !shadows)
        stmts = b->stmts;
      else
        stmts.push_back(body);
      stmts.push_back(expr_stmt(step));
      body = block(std::move(stmts));
    }
    StmtPtr loop = make_stmt(While{cond, body});
    if (!init) return {loop};
    if (init->is<Decl>()) return {block({init, loop})};
    return {init, loop};
  }

  std::vector<StmtPtr> stmt_node(const StmtPtr&, const While& w) {
    ExprPtr cond = expr(w.cond, false, true);
    StmtPtr body = single(w.body);
    if (draw(RuleId::R1b)) return {make_stmt(For{nullptr, cond, nullptr, body})};
    return {make_stmt(While{cond, body})};
  }

  std::vector<StmtPtr> stmt_node(const StmtPtr&, const DoWhile& d) {
    StmtPtr body = single(d.body);
    return {make_stmt(DoWhile{body, expr(d.cond, false, true)})};
  }

  std::vector<StmtPtr> stmt_node(const StmtPtr&, const If& i) {
    std::vector<ExprPtr> orig_conds;
    std::vector<StmtPtr> orig_bodies;
    If out;
    for (const auto& br : i.branches) {
      orig_conds.push_back(br.cond);
      orig_bodies.push_back(br.body);
      ExprPtr c = expr(br.cond, false, true);
      out.branches.push_back({c, single(br.body)});
    }
    if (i.else_body) {
      orig_bodies.push_back(i.else_body);
      out.else_body = single(i.else_body);
    }
    const bool chain = i.else_body || i.branches.size() >= 2;
    if (chain && branches_independent(orig_conds, orig_bodies) && draw(RuleId::R2a))
      return guarded_ifs(out);
    return {make_stmt(std::move(out))};
  }

  static ExprPtr negations(const std::vector<ExprPtr>& conds, std::size_t k) {
    ExprPtr n;
    for (std::size_t j = 0; j < k; ++j) {
      ExprPtr x = unary(UnaryOp::Not, conds[j]);
      n = n ? binary(BinaryOp::And, n, x) : x;
    }
    return n;
  }

  static std::vector<StmtPtr> guarded_ifs(const If& chain) {
    std::vector<ExprPtr> conds;
    for (const auto& br : chain.branches) conds.push_back(br.cond);
    std::vector<StmtPtr> out;
    for (std::size_t k = 0; k < conds.size(); ++k) {
      ExprPtr c = k == 0 ? conds[0] : binary(BinaryOp::And, negations(conds, k), conds[k]);
      out.push_back(make_stmt(If{{{c, chain.branches[k].body}}, nullptr}));
    }
    if (chain.else_body)
      out.push_back(make_stmt(If{{{negations(conds, conds.size()), chain.else_body}}, nullptr}));
    return out;
  }

  struct Chain {
    std::size_t length = 0;
    std::vector<ExprPtr> conds;   // own condition of each branch (original)
    std::vector<StmtPtr> bodies;  // branch bodies, then the else body if any
    bool has_else = false;
  };

  /// Adjacent else-less ifs shaped exactly like guarded_ifs output.
  static Chain guard_chain(const std::vector<StmtPtr>& in, std::size_t i) {
    Chain c;
    if (!is_plain_if(in[i])) return c;
    const auto& first = in[i]->as<If>()->branches[0];
    c.conds.push_back(first.cond);
    c.bodies.push_back(first.body);
    std::size_t j = i + 1;
    for (; j < in.size() && is_plain_if(in[j]); ++j) {
      const auto& br = in[j]->as<If>()->branches[0];
      const ExprPtr n = negations(c.conds, c.conds.size());
      if (deep_eq(br.cond, n)) {
        c.bodies.push_back(br.body);
        c.has_else = true;
        ++j;
        break;
      }
      const auto* b = br.cond->as<Binary>();
      if (!b || b->op != BinaryOp::And || !deep_eq(b->lhs, n)) break;
      c.conds.push_back(b->rhs);
      c.bodies.push_back(br.body);
    }
    c.length = j - i;
    return c;
  }

  StmtPtr build_chain(const Chain& c) {
    If out;
    for (std::size_t k = 0; k < c.conds.size(); ++k)
      out.branches.push_back({expr(c.conds[k], false, true), single(c.bodies[k])});
    if (c.has_else) out.else_body = single(c.bodies.back());
    return make_stmt(std::move(out));
  }

  std::vector<StmtPtr> stmt_node(const StmtPtr&, const ExprStmt& e) {
    return {expr_stmt(expr(e.expr, true, true))};
  }

  std::vector<StmtPtr> stmt_node(const StmtPtr&, const Decl& d) {
    if (inline_.count(d.name)) return {};
    return {make_stmt(Decl{d.type, d.name, expr(d.array_size, false, false),
                           expr(d.init, false, true)})};
  }

  std::vector<StmtPtr> stmt_node(const StmtPtr&, const Return& r) {
    return {make_stmt(Return{expr(r.value, false, true)})};
  }

  template <typename T>
  std::vector<StmtPtr> stmt_node(const StmtPtr& s, const T&) {
    return {s};  // break, continue, opaque
  }

  ExprPtr expr(const ExprPtr& e, bool stmt_pos, bool lit_ok) {
    if (!e) return e;
    return std::visit([&](const auto& n) { return expr_node(e, n, stmt_pos, lit_ok); }, e->node);
  }

  ExprPtr expr_node(const ExprPtr& e, const Ident& n, bool, bool) {
    if (auto it = inline_.find(n.name); it != inline_.end()) return it->second;
    return e;
  }

  ExprPtr expr_node(const ExprPtr& e, const Literal& n, bool, bool lit_ok) {
    if (!lit_ok || !in_fn_ || frames_.empty() || !is_r4_literal(n)) return e;
    const auto type = literal_type(n);
    if (!type || !draw(RuleId::R4a)) return e;
    const std::string name = fresh_name(n);
    const std::string decl_type = *type == "const char*" ? *type : "const " + *type;
    frames_.back().push_back(make_stmt(Decl{decl_type, name, nullptr, e}));
    return ident(name);
  }

  ExprPtr expr_node(const ExprPtr&, const Unary& n, bool stmt_pos, bool lit_ok) {
    ExprPtr operand = expr(n.operand, false, lit_ok);
    if (stmt_pos && is_increment(n.op) && simple_lvalue(n.operand)) {
      static constexpr RuleId by_op[] = {RuleId::R3a, RuleId::R3c, RuleId::R3b, RuleId::R3d};
      if (draw(by_op[static_cast<int>(n.op)])) {
        const bool up = n.op == UnaryOp::PreInc || n.op == UnaryOp::PostInc;
        return assign(up ? AssignOp::Add : AssignOp::Sub, operand, int_lit(1));
      }
    }
    return unary(n.op, operand);
  }

  ExprPtr expr_node(const ExprPtr&, const Binary& n, bool, bool lit_ok) {
    return binary(n.op, expr(n.lhs, false, lit_ok), expr(n.rhs, false, lit_ok));
  }

  bool r3_safe(const Assign& n, const ExprPtr& operand_value) const {
    if (!simple_lvalue(n.target)) return false;
    return n.target->is<Ident>() ? !writes_anything(operand_value)
                                 : !has_side_effects(operand_value);
  }

  ExprPtr expr_node(const ExprPtr&, const Assign& n, bool, bool lit_ok) {
    ExprPtr target = expr(n.target, false, lit_ok);
    if (auto k = compound_index(n.op)) {
      ExprPtr value = expr(n.value, false, lit_ok);
      if (r3_safe(n, n.value) && draw(static_cast<RuleId>(index_of(RuleId::R3e) + *k)))
        return assign(AssignOp::Set, target, binary(*underlying(n.op), target, value));
      return assign(n.op, target, value);
    }
    if (auto k = plain_compound_form(n)) {
      const auto& b = *n.value->as<Binary>();
      ExprPtr lhs = expr(b.lhs, false, lit_ok);
      ExprPtr rhs = expr(b.rhs, false, lit_ok);
      if (r3_safe(n, b.rhs) && draw(RuleId::R3n)) return assign(kCompoundOps[*k], target, rhs);
      return assign(n.op, target, binary(b.op, lhs, rhs));
    }
    return assign(n.op, target, expr(n.value, false, lit_ok));
  }

  ExprPtr expr_node(const ExprPtr&, const Call& n, bool, bool lit_ok) {
    Call c{n.callee, {}};
    for (const auto& a : n.args) c.args.push_back(expr(a, false, lit_ok));
    return make_expr(std::move(c));
  }

  ExprPtr expr_node(const ExprPtr&, const Index& n, bool, bool lit_ok) {
    return make_expr(Index{expr(n.base, false, lit_ok), expr(n.index, false, lit_ok)});
  }

  ExprPtr expr_node(const ExprPtr& e, const OpaqueExpr&, bool, bool) { return e; }
};

}  // namespace detail

/// One rewriting pass: every matching occurrence is rewritten with its rule's
/// probability, and nothing a rule produced is matched again.
inline RewriteResult apply_rules(const SourceUnit& unit, const RuleProbabilities& probs, Rng& rng) {
  return detail::Rewriter(unit, probs, rng).run();
}

inline RewriteResult apply_rules(const SourceUnit& unit, const RuleProbabilities& probs,
                                 std::uint64_t seed) {
  Rng rng(seed);
  return apply_rules(unit, probs, rng);
}

}  // namespace coda
