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

// Recursive-descent parser for the C-like subset. Any statement, expression
// or top-level item that falls outside the subset is captured as an opaque
// node holding its original tokens, so parsing only fails on lexical errors
// and unbalanced brackets.

#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "coda/ast.hpp"
#include "coda/error.hpp"
#include "coda/lexer.hpp"

namespace coda {

namespace detail {

// Internal backtracking signal; never escapes parse().
struct SyntaxFail {};

class Parser {
 public:
  Parser(const TokenStream& tokens, const Dialect& dia)
      : toks_(tokens), dia_(dia) {
    for (std::size_t i = 0; i < toks_.size(); ++i)
      if (!toks_[i].trivia()) sig_.push_back(i);
  }

  SourceUnit parse_unit() {
    SourceUnit unit;
    unit.dialect = dia_.id;
    while (!eof()) parse_item_into(unit.items);
    return unit;
  }

 private:
  const TokenStream& toks_;
  const Dialect& dia_;
  std::vector<std::size_t> sig_;
  std::size_t p_ = 0;

  static const Token& eof_token() {
    static const Token t{TokenKind::Whitespace, "", {}};
    return t;
  }

  bool eof() const { return p_ >= sig_.size(); }
  const Token& peek(std::size_t k = 0) const {
    return p_ + k < sig_.size() ? toks_[sig_[p_ + k]] : eof_token();
  }
  bool at(std::string_view t, std::size_t k = 0) const { return peek(k).is(t); }
  bool accept(std::string_view t) {
    if (!at(t)) return false;
    ++p_;
    return true;
  }
  void expect(std::string_view t) {
    if (!accept(t)) throw SyntaxFail{};
  }
  bool is_ident(std::size_t k = 0) const {
    return peek(k).kind == TokenKind::Identifier;
  }
  bool is_type_keyword(std::size_t k = 0) const {
    const auto& t = peek(k);
    return t.kind == TokenKind::Keyword && dia_.type_keywords.count(t.text);
  }
  std::string take_ident() {
    if (!is_ident()) throw SyntaxFail{};
    return toks_[sig_[p_++]].text;
  }

  /// Original tokens (trivia included) of significant positions [from, to).
  TokenStream span(std::size_t from, std::size_t to) const {
    if (from >= to) return {};
    return TokenStream(toks_.begin() + static_cast<std::ptrdiff_t>(sig_[from]),
                       toks_.begin() + static_cast<std::ptrdiff_t>(sig_[to - 1]) + 1);
  }
  ExprPtr opaque_expr(std::size_t from, int level) const {
    return make_expr(OpaqueExpr{span(from, p_), level});
  }

  // Skips a bracketed group starting at the current token.
  void skip_group() {
    int depth = 0;
    do {
      const auto& t = peek();
      if (eof()) throw SyntaxFail{};
      if (t.is("(") || t.is("[") || t.is("{")) ++depth;
      if (t.is(")") || t.is("]") || t.is("}")) --depth;
      ++p_;
    } while (depth > 0);
  }

  /// Consumes one opaque statement: up to a `;` or a closing `}` at depth 0,
  /// never past the `}` of the enclosing block.
  TokenStream opaque_run() {
    const std::size_t from = p_;
    int depth = 0;
    while (!eof()) {
      const auto& t = peek();
      if (t.kind == TokenKind::Directive && p_ == from) {
        ++p_;
        break;
      }
      if (t.is("(") || t.is("[") || t.is("{")) {
        ++depth;
      } else if (t.is(")") || t.is("]")) {
        --depth;
      } else if (t.is("}")) {
        if (depth == 0) break;
        --depth;
        if (depth == 0) {
          ++p_;
          if (!(at(";") || at(","))) break;
          continue;
        }
      } else if (t.is(";") && depth == 0) {
        ++p_;
        break;
      }
      ++p_;
    }
    if (p_ == from) ++p_;  // always make progress
    return span(from, p_);
  }

  // ---- types -----------------------------------------------------------

  static void append_type_token(std::string& type, const std::string& t) {
    if (t == "*" || t == "&") {
      type += t;
    } else {
      if (!type.empty()) type += ' ';
      type += t;
    }
  }

  bool at_decl_start() const {
    if (is_type_keyword()) return true;
    return is_ident(0) && is_ident(1);
  }

  /// Type keywords, or a single user type name, then pointer/reference marks.
  std::string parse_type() {
    std::string type;
    if (is_type_keyword()) {
      while (is_type_keyword()) append_type_token(type, toks_[sig_[p_++]].text);
      if (type == "const" && is_ident() && is_ident(1))
        append_type_token(type, take_ident());
    } else if (is_ident() && (is_ident(1) || at("*", 1) || at("&", 1))) {
      append_type_token(type, take_ident());
      while (is_type_keyword()) append_type_token(type, toks_[sig_[p_++]].text);
    } else {
      throw SyntaxFail{};
    }
    while (at("*") || at("&")) {
      append_type_token(type, toks_[sig_[p_]].text);
      ++p_;
    }
    return type;
  }

  // ---- top level -------------------------------------------------------

  void parse_item_into(std::vector<TopLevelItem>& out) {
    if (peek().kind == TokenKind::Directive) {
      ++p_;
      out.push_back(OpaqueSegment{span(p_ - 1, p_)});
      return;
    }
    const std::size_t save = p_;
    try {
      out.push_back(parse_function());
      return;
    } catch (SyntaxFail&) {
      p_ = save;
    }
    if (at_decl_start()) {
      try {
        for (auto& d : parse_decl_list(/*allow_multi=*/true))
          out.push_back(GlobalDecl{std::move(d)});
        return;
      } catch (SyntaxFail&) {
        p_ = save;
      }
    }
    if (!at("{")) {
      try {
        auto s = parse_strict_statement();
        if (s.size() == 1 && !s.front()->is<Block>() && !s.front()->is<Decl>()) {
          out.push_back(TopLevelStmt{s.front()});
          return;
        }
      } catch (SyntaxFail&) {
      }
      p_ = save;
    }
    out.push_back(OpaqueSegment{opaque_run()});
  }

  FunctionDef parse_function() {
    FunctionDef fn;
    fn.return_type = parse_type();
    fn.name = take_ident();
    expect("(");
    if (at("void") && at(")", 1)) ++p_;
    if (!at(")")) {
      do {
        Param prm;
        prm.type = parse_type();
        prm.name = take_ident();
        const std::size_t from = p_;
        while (at("[")) skip_group();
        prm.suffix = span(from, p_);
        fn.params.push_back(std::move(prm));
      } while (accept(","));
    }
    expect(")");
    if (!at("{")) throw SyntaxFail{};
    fn.body = parse_block();
    return fn;
  }

  // ---- statements ------------------------------------------------------

  StmtPtr parse_block() {
    expect("{");
    std::vector<StmtPtr> stmts;
    while (!eof() && !at("}")) parse_statement_into(stmts);
    expect("}");
    return make_stmt(Block{std::move(stmts)});
  }

  void parse_statement_into(std::vector<StmtPtr>& out) {
    const std::size_t save = p_;
    try {
      auto s = parse_strict_statement();
      for (auto& x : s) out.push_back(std::move(x));
      return;
    } catch (SyntaxFail&) {
      p_ = save;
    }
    out.push_back(make_stmt(OpaqueStmt{opaque_run()}));
  }

  /// A single statement in a body position (if/loop bodies).
  StmtPtr parse_sub_statement() {
    const std::size_t save = p_;
    try {
      auto s = parse_strict_statement();
      if (s.size() == 1) return s.front();
    } catch (SyntaxFail&) {
    }
    p_ = save;
    return make_stmt(OpaqueStmt{opaque_run()});
  }

  std::vector<StmtPtr> parse_strict_statement() {
    const auto& t = peek();
    if (t.kind == TokenKind::Directive) throw SyntaxFail{};
    if (t.is("{")) return {parse_block()};
    if (t.is("if")) return {parse_if()};
    if (t.is("for")) return {parse_for()};
    if (t.is("while")) {
      ++p_;
      expect("(");
      auto cond = parse_expression();
      expect(")");
      auto body = parse_sub_statement();
      return {make_stmt(While{std::move(cond), std::move(body)})};
    }
    if (t.is("do")) {
      ++p_;
      auto body = parse_sub_statement();
      expect("while");
      expect("(");
      auto cond = parse_expression();
      expect(")");
      expect(";");
      return {make_stmt(DoWhile{std::move(body), std::move(cond)})};
    }
    if (t.is("return")) {
      ++p_;
      ExprPtr value;
      if (!at(";")) value = parse_expression();
      expect(";");
      return {make_stmt(Return{std::move(value)})};
    }
    if (t.is("break")) {
      ++p_;
      expect(";");
      return {make_stmt(Break{})};
    }
    if (t.is("continue")) {
      ++p_;
      expect(";");
      return {make_stmt(Continue{})};
    }
    if (t.is(";")) throw SyntaxFail{};
    if (at_decl_start()) return parse_decl_list(/*allow_multi=*/true);
    if (t.kind == TokenKind::Keyword && !t.is("true") && !t.is("false") &&
        !t.is("sizeof"))
      throw SyntaxFail{};
    auto e = parse_expression();
    expect(";");
    return {expr_stmt(std::move(e))};
  }

  StmtPtr parse_if() {
    If node;
    expect("if");
    while (true) {
      expect("(");
      auto cond = parse_expression();
      expect(")");
      auto body = parse_sub_statement();
      node.branches.push_back(Branch{std::move(cond), std::move(body)});
      if (!at("else")) break;
      ++p_;
      if (at("if")) {
        ++p_;
        continue;
      }
      node.else_body = parse_sub_statement();
      break;
    }
    return make_stmt(std::move(node));
  }

  StmtPtr parse_for() {
    expect("for");
    expect("(");
    For node;
    if (!at(";")) {
      if (at_decl_start()) {
        auto decls = parse_decl_list(/*allow_multi=*/false);
        node.init = decls.front();
      } else {
        node.init = expr_stmt(parse_expression());
        expect(";");
      }
    } else {
      ++p_;
    }
    if (!at(";")) node.cond = parse_expression();
    expect(";");
    if (!at(")")) node.step = parse_expression();
    expect(")");
    node.body = parse_sub_statement();
    return make_stmt(std::move(node));
  }

  /// Declarations through the terminating `;`. One Decl per declarator.
  std::vector<StmtPtr> parse_decl_list(bool allow_multi) {
    const std::string type = parse_type();
    std::vector<StmtPtr> out;
    do {
      Decl d;
      d.type = type;
      d.name = take_ident();
      if (accept("[")) {
        if (at("]")) throw SyntaxFail{};
        d.array_size = parse_expression();
        expect("]");
        if (at("[")) throw SyntaxFail{};
      }
      if (accept("=")) {
        if (at("{")) throw SyntaxFail{};
        d.init = parse_assignment();
      }
      out.push_back(make_stmt(std::move(d)));
      if (at(",") && (!allow_multi || at("*", 1) || at("&", 1)))
        throw SyntaxFail{};
    } while (accept(","));
    expect(";");
    return out;
  }

  // ---- expressions -----------------------------------------------------

  ExprPtr parse_expression() {
    const std::size_t from = p_;
    auto e = parse_assignment();
    if (!at(",")) return e;
    while (accept(",")) parse_assignment();
    return opaque_expr(from, prec::kComma);
  }

  ExprPtr parse_assignment() {
    auto lhs = parse_conditional();
    const auto& t = peek();
    if (t.kind == TokenKind::Operator) {
      if (auto op = assign_op_from(t.text)) {
        if (!(lhs->is<Ident>() || lhs->is<Index>() || lhs->is<OpaqueExpr>()))
          throw SyntaxFail{};
        ++p_;
        auto rhs = parse_assignment();
        return assign(*op, std::move(lhs), std::move(rhs));
      }
    }
    return lhs;
  }

  ExprPtr parse_conditional() {
    const std::size_t from = p_;
    auto c = parse_binary(4);
    if (!at("?")) return c;
    ++p_;
    parse_expression();
    expect(":");
    parse_conditional();
    return opaque_expr(from, prec::kConditional);
  }

  ExprPtr parse_binary(int min_prec) {
    auto lhs = parse_unary();
    while (true) {
      const auto& t = peek();
      if (t.kind != TokenKind::Operator) break;
      auto op = binary_op_from(t.text);
      if (!op || precedence(*op) < min_prec) break;
      ++p_;
      auto rhs = parse_binary(precedence(*op) + 1);
      lhs = binary(*op, std::move(lhs), std::move(rhs));
    }
    return lhs;
  }

  ExprPtr parse_unary() {
    const std::size_t from = p_;
    const auto& t = peek();
    if (t.is("++") || t.is("--")) {
      ++p_;
      auto e = parse_unary();
      return unary(t.text == "++" ? UnaryOp::PreInc : UnaryOp::PreDec, std::move(e));
    }
    if (t.is("!") || t.is("-") || t.is("~")) {
      const UnaryOp op = t.text == "!" ? UnaryOp::Not
                         : t.text == "-" ? UnaryOp::Neg
                                         : UnaryOp::BitNot;
      ++p_;
      return unary(op, parse_unary());
    }
    if (t.is("*") || t.is("&") || t.is("+")) {
      ++p_;
      parse_unary();
      return opaque_expr(from, prec::kUnary);
    }
    if (t.is("sizeof")) {
      ++p_;
      if (at("("))
        skip_group();
      else
        parse_unary();
      return opaque_expr(from, prec::kUnary);
    }
    if (t.is("(") && (is_type_keyword(1) || (is_ident(1) && at("*", 2) && at(")", 3)))) {
      skip_group();
      parse_unary();
      return opaque_expr(from, prec::kUnary);
    }
    return parse_postfix();
  }

  ExprPtr parse_postfix() {
    const std::size_t from = p_;
    auto e = parse_primary();
    while (true) {
      if (accept("[")) {
        auto idx = parse_expression();
        expect("]");
        e = make_expr(Index{std::move(e), std::move(idx)});
      } else if (accept("(")) {
        Call c{std::move(e), {}};
        if (!at(")")) {
          do {
            c.args.push_back(parse_assignment());
          } while (accept(","));
        }
        expect(")");
        e = make_expr(std::move(c));
      } else if (at("++") || at("--")) {
        const bool inc = at("++");
        ++p_;
        e = unary(inc ? UnaryOp::PostInc : UnaryOp::PostDec, std::move(e));
      } else if ((at(".") || at("->")) && is_ident(1)) {
        p_ += 2;
        e = opaque_expr(from, prec::kPostfix);
      } else {
        break;
      }
    }
    return e;
  }

  ExprPtr parse_primary() {
    const std::size_t from = p_;
    const auto& t = peek();
    switch (t.kind) {
      case TokenKind::Identifier:
        ++p_;
        return ident(t.text);
      case TokenKind::IntegerLiteral:
        ++p_;
        return make_expr(Literal{LiteralKind::Integer, t.text});
      case TokenKind::FloatLiteral:
        ++p_;
        return make_expr(Literal{LiteralKind::Float, t.text});
      case TokenKind::CharLiteral:
        ++p_;
        return make_expr(Literal{LiteralKind::Char, t.text});
      case TokenKind::StringLiteral:
        ++p_;
        if (peek().kind != TokenKind::StringLiteral)
          return make_expr(Literal{LiteralKind::String, t.text});
        while (peek().kind == TokenKind::StringLiteral) ++p_;
        return opaque_expr(from, prec::kPrimary);
      case TokenKind::Keyword:
        if (t.is("true") || t.is("false")) {
          ++p_;
          return make_expr(Literal{LiteralKind::Bool, t.text});
        }
        if (t.is("nullptr") || t.is("this")) {
          ++p_;
          return opaque_expr(from, prec::kPrimary);
        }
        throw SyntaxFail{};
      default:
        break;
    }
    if (t.is("(")) {
      ++p_;
      try {
        auto inner = parse_expression();
        expect(")");
        return inner;
      } catch (SyntaxFail&) {
        p_ = from;
        skip_group();
        return opaque_expr(from, prec::kPrimary);
      }
    }
    throw SyntaxFail{};
  }
};

}  // namespace detail

/// Parses a snippet. Throws ParseError on empty input, unbalanced brackets,
/// or unterminated literals/comments.
inline SourceUnit parse(std::string_view source, DialectId dia = DialectId::CLike) {
  if (source.empty()) throw ParseError("empty input");
  const Dialect& d = dialect(dia);
  TokenStream tokens = lex(source, d);
  check_balanced(tokens);
  detail::Parser parser(tokens, d);
  SourceUnit unit = parser.parse_unit();
  rebuild_symbols(unit);
  return unit;
}

}  // namespace coda

#include "coda/walk.hpp"
