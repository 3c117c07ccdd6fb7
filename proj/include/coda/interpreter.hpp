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

// Reference interpreter for the executable subset. Integers are 64-bit
// two's complement with wrapping arithmetic; evaluation is left to right.
// `read()` consumes the next input value and `emit(v)` appends to the
// output log. Every runtime fault becomes a status value.

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <type_traits>
#include <unordered_map>
#include <utility>
#include <vector>

#include "coda/ast.hpp"
#include "coda/error.hpp"
#include "coda/random.hpp"
#include "coda/walk.hpp"

namespace coda {

inline constexpr std::int64_t kDefaultStepLimit = 100000;

struct OutputEvent {
  std::string channel;
  std::int64_t value = 0;
  friend bool operator==(const OutputEvent&, const OutputEvent&) = default;
};

enum class ExecState { Completed, StepLimitExceeded, RuntimeError };

struct ExecStatus {
  ExecState state = ExecState::Completed;
  std::string error;  // runtime-error kind, empty otherwise
  friend bool operator==(const ExecStatus&, const ExecStatus&) = default;
};

inline std::string to_string(const ExecStatus& s) {
  switch (s.state) {
    case ExecState::Completed: return "completed";
    case ExecState::StepLimitExceeded: return "step-limit-exceeded";
    case ExecState::RuntimeError: return "runtime-error(" + s.error + ")";
  }
  return "?";
}

struct ExecTrace {
  std::optional<std::int64_t> return_value;
  std::vector<OutputEvent> output;
  std::int64_t step_count = 0;
  ExecStatus status;
};

/// Observable behaviour used for differential comparison. Two step-limit
/// aborts agree regardless of partial output.
inline bool same_behaviour(const ExecTrace& a, const ExecTrace& b) {
  if (a.status.state == ExecState::StepLimitExceeded &&
      b.status.state == ExecState::StepLimitExceeded)
    return true;
  return a.status == b.status && a.return_value == b.return_value && a.output == b.output;
}

namespace detail {

inline std::uint64_t parse_int_literal(const std::string& text) {
  std::string s;
  for (char c : text)
    if (c != 'u' && c != 'U' && c != 'l' && c != 'L' && c != '\'') s += c;
  int base = 10;
  std::size_t i = 0;
  if (s.size() > 1 && s[0] == '0' && (s[1] == 'x' || s[1] == 'X')) {
    base = 16;
    i = 2;
  } else if (s.size() > 1 && s[0] == '0' && (s[1] == 'b' || s[1] == 'B')) {
    base = 2;
    i = 2;
  } else if (s.size() > 1 && s[0] == '0') {
    base = 8;
    i = 1;
  }
  std::uint64_t v = 0;
  for (; i < s.size(); ++i) {
    const char c = s[i];
    int d = 0;
    if (c >= '0' && c <= '9') d = c - '0';
    else if (c >= 'a' && c <= 'f') d = c - 'a' + 10;
    else if (c >= 'A' && c <= 'F') d = c - 'A' + 10;
    else throw UnsupportedConstruct("integer literal " + text);
    if (d >= base) throw UnsupportedConstruct("integer literal " + text);
    v = v * static_cast<std::uint64_t>(base) + static_cast<std::uint64_t>(d);
  }
  return v;
}

inline std::int64_t parse_char_literal(const std::string& text) {
  // text includes the quotes, possibly with an L/u/U prefix.
  const auto open = text.find('\'');
  const std::string body = text.substr(open + 1, text.size() - open - 2);
  if (body.empty()) throw UnsupportedConstruct("empty char literal");
  if (body[0] != '\\') return static_cast<unsigned char>(body[0]);
  if (body.size() < 2) throw UnsupportedConstruct("char literal " + text);
  switch (body[1]) {
    case 'n': return '\n';
    case 't': return '\t';
    case 'r': return '\r';
    case 'a': return '\a';
    case 'b': return '\b';
    case 'f': return '\f';
    case 'v': return '\v';
    case '\\': return '\\';
    case '\'': return '\'';
    case '"': return '"';
    case '?': return '?';
    case 'x': return static_cast<std::int64_t>(std::stoull(body.substr(2), nullptr, 16));
    default:
      if (body[1] >= '0' && body[1] <= '7')
        return static_cast<std::int64_t>(std::stoull(body.substr(1), nullptr, 8));
  }
  throw UnsupportedConstruct("char literal " + text);
}

inline bool is_array_param(const Param& p) {
  if (p.type.find('*') != std::string::npos) return true;
  for (const auto& t : p.suffix)
    if (t.is("[")) return true;
  return false;
}

inline bool is_float_type(const std::string& type) {
  return type.find("float") != std::string::npos || type.find("double") != std::string::npos;
}

// Static screen: rejects anything the interpreter cannot give a meaning to.
inline void screen(const SourceUnit& unit) {
  std::set<std::string> functions;
  for (const auto& item : unit.items) {
    if (const auto* f = std::get_if<FunctionDef>(&item)) {
      functions.insert(f->name);
      if (is_float_type(f->return_type)) throw UnsupportedConstruct("floating-point return");
      for (const auto& p : f->params)
        if (is_float_type(p.type)) throw UnsupportedConstruct("floating-point parameter");
    } else if (std::holds_alternative<OpaqueSegment>(item)) {
      throw UnsupportedConstruct("opaque segment");
    }
  }
  for_each_node(
      unit,
      [&](const Stmt& s) {
        if (s.is<OpaqueStmt>()) throw UnsupportedConstruct("opaque statement");
        if (const auto* d = s.as<Decl>()) {
          if (is_float_type(d->type)) throw UnsupportedConstruct("floating-point declaration");
          if (d->type.find('*') != std::string::npos)
            throw UnsupportedConstruct("pointer declaration");
        }
      },
      [&](const Expr& e) {
        if (e.is<OpaqueExpr>()) throw UnsupportedConstruct("opaque expression");
        if (const auto* l = e.as<Literal>()) {
          if (l->kind == LiteralKind::Float) throw UnsupportedConstruct("floating-point literal");
          if (l->kind == LiteralKind::String) throw UnsupportedConstruct("string literal");
          if (l->kind == LiteralKind::Integer) parse_int_literal(l->text);
          if (l->kind == LiteralKind::Char) parse_char_literal(l->text);
        }
        if (const auto* c = e.as<Call>()) {
          const auto* callee = c->callee->as<Ident>();
          if (!callee) throw UnsupportedConstruct("indirect call");
          if (callee->name != "read" && callee->name != "emit" && !functions.count(callee->name))
            throw UnsupportedConstruct("call to undefined function " + callee->name);
        }
      });
}

struct Fault {
  std::string kind;
};
struct StepLimitHit {};

struct Storage {
  std::vector<std::int64_t> data;
  bool array = false;
};
using StoragePtr = std::shared_ptr<Storage>;

struct Location {
  Storage* storage;
  std::size_t index;
  std::int64_t get() const { return storage->data[index]; }
  void set(std::int64_t v) const { storage->data[index] = v; }
};

enum class Flow { Normal, Break, Continue, Return };

inline std::int64_t wrap(std::uint64_t v) { return static_cast<std::int64_t>(v); }

inline std::int64_t apply_binary(BinaryOp op, std::int64_t a, std::int64_t b) {
  const auto ua = static_cast<std::uint64_t>(a);
  const auto ub = static_cast<std::uint64_t>(b);
  switch (op) {
    case BinaryOp::Mul: return wrap(ua * ub);
    case BinaryOp::Div:
      if (b == 0) throw Fault{"division-by-zero"};
      if (a == INT64_MIN && b == -1) return INT64_MIN;
      return a / b;
    case BinaryOp::Mod:
      if (b == 0) throw Fault{"division-by-zero"};
      if (a == INT64_MIN && b == -1) return 0;
      return a % b;
    case BinaryOp::Add: return wrap(ua + ub);
    case BinaryOp::Sub: return wrap(ua - ub);
    case BinaryOp::Shl: return wrap(ua << (ub & 63u));
    case BinaryOp::Shr: return a >> (ub & 63u);
    case BinaryOp::Lt: return a < b;
    case BinaryOp::Le: return a <= b;
    case BinaryOp::Gt: return a > b;
    case BinaryOp::Ge: return a >= b;
    case BinaryOp::Eq: return a == b;
    case BinaryOp::Ne: return a != b;
    case BinaryOp::BitAnd: return a & b;
    case BinaryOp::BitXor: return a ^ b;
    case BinaryOp::BitOr: return a | b;
    case BinaryOp::And:
    case BinaryOp::Or: break;  // short-circuit, handled by the caller
  }
  return 0;
}

class Interpreter {
 public:
  Interpreter(const SourceUnit& unit, const std::vector<std::int64_t>& inputs,
              std::int64_t step_limit)
      : inputs_(inputs), step_limit_(step_limit) {
    for (const auto& item : unit.items)
      if (const auto* f = std::get_if<FunctionDef>(&item)) functions_.emplace(f->name, f);
  }

  ExecTrace run(const SourceUnit& unit) {
    try {
      bool returned = false;
      for (const auto& item : unit.items) {
        if (const auto* g = std::get_if<GlobalDecl>(&item)) {
          exec(g->decl);
        } else if (const auto* t = std::get_if<TopLevelStmt>(&item)) {
          const Flow f = exec(t->stmt);
          if (f == Flow::Return) {
            trace_.return_value = ret_;
            returned = true;
            break;
          }
          if (f != Flow::Normal) throw Fault{"stray-jump"};
        }
      }
      if (!returned) {
        if (auto it = functions_.find("main"); it != functions_.end())
          trace_.return_value = call(*it->second, {});
      }
    } catch (const Fault& f) {
      trace_.status = {ExecState::RuntimeError, f.kind};
      trace_.return_value.reset();
    } catch (const StepLimitHit&) {
      trace_.status = {ExecState::StepLimitExceeded, {}};
      trace_.return_value.reset();
    }
    return std::move(trace_);
  }

 private:
  static constexpr std::size_t kMaxDepth = 256;
  static constexpr std::int64_t kMaxArray = 1 << 20;

  const std::vector<std::int64_t>& inputs_;
  std::size_t next_input_ = 0;
  std::int64_t step_limit_;
  std::unordered_map<std::string, const FunctionDef*> functions_;
  std::vector<std::pair<std::string, StoragePtr>> globals_;
  std::vector<std::pair<std::string, StoragePtr>> locals_;
  std::size_t frame_base_ = 0;
  std::size_t depth_ = 0;
  bool in_function_ = false;
  std::optional<std::int64_t> ret_;
  ExecTrace trace_;

  void step() {
    if (trace_.step_count >= step_limit_) throw StepLimitHit{};
    ++trace_.step_count;
  }

  Storage* lookup(const std::string& name) {
    for (std::size_t i = locals_.size(); i > frame_base_; --i)
      if (locals_[i - 1].first == name) return locals_[i - 1].second.get();
    for (std::size_t i = globals_.size(); i > 0; --i)
      if (globals_[i - 1].first == name) return globals_[i - 1].second.get();
    throw Fault{"undefined-variable"};
  }

  void declare(const std::string& name, StoragePtr s) {
    if (in_function_)
      locals_.emplace_back(name, std::move(s));
    else
      globals_.emplace_back(name, std::move(s));
  }

  Location locate(const ExprPtr& e) {
    if (const auto* id = e->as<Ident>()) {
      Storage* s = lookup(id->name);
      if (s->array) throw Fault{"array-as-scalar"};
      return {s, 0};
    }
    if (const auto* ix = e->as<Index>()) return locate(*ix);
    throw Fault{"not-an-lvalue"};
  }

  Location locate(const Index& ix) {
    const auto* base = ix.base->as<Ident>();
    if (!base) throw Fault{"bad-index-base"};
    Storage* s = lookup(base->name);
    if (!s->array) throw Fault{"scalar-indexed"};
    const std::int64_t i = eval(ix.index);
    if (i < 0 || static_cast<std::uint64_t>(i) >= s->data.size())
      throw Fault{"index-out-of-bounds"};
    return {s, static_cast<std::size_t>(i)};
  }

  std::int64_t eval(const ExprPtr& e) {
    return std::visit([&](const auto& n) -> std::int64_t { return eval_node(n); }, e->node);
  }

  std::int64_t eval_node(const Ident& n) {
    Storage* s = lookup(n.name);
    if (s->array) throw Fault{"array-as-scalar"};
    return s->data[0];
  }

  std::int64_t eval_node(const Literal& n) {
    switch (n.kind) {
      case LiteralKind::Integer: return wrap(parse_int_literal(n.text));
      case LiteralKind::Char: return parse_char_literal(n.text);
      case LiteralKind::Bool: return n.text == "true";
      default: throw UnsupportedConstruct("literal " + n.text);
    }
  }

  std::int64_t eval_node(const Unary& n) {
    switch (n.op) {
      case UnaryOp::PreInc:
      case UnaryOp::PreDec:
      case UnaryOp::PostInc:
      case UnaryOp::PostDec: {
        const Location loc = locate(n.operand);
        const std::int64_t old = loc.get();
        const bool inc = n.op == UnaryOp::PreInc || n.op == UnaryOp::PostInc;
        const std::int64_t now = apply_binary(inc ? BinaryOp::Add : BinaryOp::Sub, old, 1);
        loc.set(now);
        return is_postfix(n.op) ? old : now;
      }
      case UnaryOp::Not: return eval(n.operand) == 0;
      case UnaryOp::Neg: return wrap(0u - static_cast<std::uint64_t>(eval(n.operand)));
      case UnaryOp::BitNot: return ~eval(n.operand);
    }
    return 0;
  }

  std::int64_t eval_node(const Binary& n) {
    if (n.op == BinaryOp::And) return eval(n.lhs) != 0 && eval(n.rhs) != 0;
    if (n.op == BinaryOp::Or) return eval(n.lhs) != 0 || eval(n.rhs) != 0;
    const std::int64_t a = eval(n.lhs);
    const std::int64_t b = eval(n.rhs);
    return apply_binary(n.op, a, b);
  }

  // Order: locate the target, read it (compound forms), evaluate the value,
  // store. `x op= e` therefore behaves exactly like `x = x op e`.
  std::int64_t eval_node(const Assign& n) {
    const Location loc = locate(n.target);
    if (n.op == AssignOp::Set) {
      const std::int64_t v = eval(n.value);
      loc.set(v);
      return v;
    }
    const std::int64_t old = loc.get();
    const std::int64_t v = apply_binary(*underlying(n.op), old, eval(n.value));
    loc.set(v);
    return v;
  }

  std::int64_t eval_node(const Call& n) {
    const std::string& name = n.callee->as<Ident>()->name;
    if (auto it = functions_.find(name); it != functions_.end())
      return call(*it->second, n.args).value_or(0);
    if (name == "read") {
      if (!n.args.empty()) throw Fault{"arity"};
      if (next_input_ >= inputs_.size()) throw Fault{"input-exhausted"};
      return inputs_[next_input_++];
    }
    if (name == "emit") {
      if (n.args.size() != 1) throw Fault{"arity"};
      const std::int64_t v = eval(n.args[0]);
      trace_.output.push_back({"out", v});
      return v;
    }
    throw Fault{"undefined-function"};
  }

  std::int64_t eval_node(const Index& n) {
    return locate(n).get();
  }

  std::int64_t eval_node(const OpaqueExpr&) { throw UnsupportedConstruct("opaque expression"); }

  std::optional<std::int64_t> call(const FunctionDef& f, const std::vector<ExprPtr>& args) {
    if (args.size() != f.params.size() && !(f.name == "main" && args.empty()))
      throw Fault{"arity"};
    if (depth_ >= kMaxDepth) throw Fault{"stack-overflow"};
    step();
    std::vector<std::pair<std::string, StoragePtr>> bound;
    for (std::size_t i = 0; i < f.params.size(); ++i) {
      const Param& p = f.params[i];
      if (args.empty()) {
        bound.emplace_back(p.name, std::make_shared<Storage>(Storage{{0}, false}));
      } else if (is_array_param(p)) {
        const auto* id = args[i]->as<Ident>();
        if (!id) throw Fault{"array-argument"};
        Storage* s = lookup(id->name);
        if (!s->array) throw Fault{"array-argument"};
        bound.emplace_back(p.name, find_owner(id->name));
      } else {
        bound.emplace_back(p.name,
                           std::make_shared<Storage>(Storage{{eval(args[i])}, false}));
      }
    }
    const std::size_t saved_base = frame_base_;
    const std::size_t saved_size = locals_.size();
    const bool saved_in = in_function_;
    frame_base_ = locals_.size();
    in_function_ = true;
    ++depth_;
    for (auto& b : bound) locals_.push_back(std::move(b));
    ret_.reset();
    const Flow flow = exec(f.body);
    std::optional<std::int64_t> result;
    if (flow == Flow::Return) result = ret_;
    else if (flow != Flow::Normal) throw Fault{"stray-jump"};
    --depth_;
    locals_.resize(saved_size);
    frame_base_ = saved_base;
    in_function_ = saved_in;
    ret_.reset();
    return result;
  }

  StoragePtr find_owner(const std::string& name) {
    for (std::size_t i = locals_.size(); i > frame_base_; --i)
      if (locals_[i - 1].first == name) return locals_[i - 1].second;
    for (std::size_t i = globals_.size(); i > 0; --i)
      if (globals_[i - 1].first == name) return globals_[i - 1].second;
    throw Fault{"undefined-variable"};
  }

  struct ScopeGuard {
    Interpreter& in;
    std::size_t mark;
    explicit ScopeGuard(Interpreter& i) : in(i), mark(i.locals_.size()) {}
    ~ScopeGuard() {
      if (in.locals_.size() > mark) in.locals_.resize(mark);
    }
  };

  bool truthy(const ExprPtr& e) { return eval(e) != 0; }

  Flow exec(const StmtPtr& s) {
    step();
    return std::visit([&](const auto& n) { return exec_node(n); }, s->node);
  }

  Flow exec_node(const Block& n) {
    ScopeGuard g(*this);
    for (const auto& c : n.stmts) {
      const Flow f = exec(c);
      if (f != Flow::Normal) return f;
    }
    return Flow::Normal;
  }

  Flow loop_body(const StmtPtr& body, bool& stop) {
    const Flow f = exec(body);
    stop = f == Flow::Break || f == Flow::Return;
    return f == Flow::Return ? Flow::Return : Flow::Normal;
  }

  Flow exec_node(const For& n) {
    ScopeGuard g(*this);
    if (n.init) exec(n.init);
    for (;;) {
      step();
      if (n.cond && !truthy(n.cond)) break;
      bool stop = false;
      const Flow f = loop_body(n.body, stop);
      if (f == Flow::Return) return f;
      if (stop) break;
      if (n.step) eval(n.step);
    }
    return Flow::Normal;
  }

  Flow exec_node(const While& n) {
    for (;;) {
      step();
      if (!truthy(n.cond)) break;
      bool stop = false;
      const Flow f = loop_body(n.body, stop);
      if (f == Flow::Return) return f;
      if (stop) break;
    }
    return Flow::Normal;
  }

  Flow exec_node(const DoWhile& n) {
    for (;;) {
      bool stop = false;
      const Flow f = loop_body(n.body, stop);
      if (f == Flow::Return) return f;
      if (stop) break;
      step();
      if (!truthy(n.cond)) break;
    }
    return Flow::Normal;
  }

  Flow exec_node(const If& n) {
    for (const auto& b : n.branches)
      if (truthy(b.cond)) return exec(b.body);
    if (n.else_body) return exec(n.else_body);
    return Flow::Normal;
  }

  Flow exec_node(const ExprStmt& n) {
    eval(n.expr);
    return Flow::Normal;
  }

  Flow exec_node(const Decl& n) {
    auto s = std::make_shared<Storage>();
    if (n.array_size) {
      const std::int64_t size = eval(n.array_size);
      if (size <= 0 || size > kMaxArray) throw Fault{"bad-array-size"};
      s->data.assign(static_cast<std::size_t>(size), 0);
      s->array = true;
      if (n.init) throw Fault{"array-initializer"};
    } else {
      s->data.assign(1, n.init ? eval(n.init) : 0);
    }
    declare(n.name, std::move(s));
    return Flow::Normal;
  }

  Flow exec_node(const Return& n) {
    ret_ = n.value ? std::optional<std::int64_t>(eval(n.value)) : std::nullopt;
    return Flow::Return;
  }

  Flow exec_node(const Break&) { return Flow::Break; }
  Flow exec_node(const Continue&) { return Flow::Continue; }
  Flow exec_node(const OpaqueStmt&) { throw UnsupportedConstruct("opaque statement"); }
};

}  // namespace detail

/// Throws UnsupportedConstruct when `unit` uses opaque code, floating point,
/// strings, pointers or calls to functions that are neither defined nor
/// intrinsic.
inline void check_executable(const SourceUnit& unit) { detail::screen(unit); }

inline bool is_executable(const SourceUnit& unit) {
  try {
    check_executable(unit);
    return true;
  } catch (const UnsupportedConstruct&) {
    return false;
  }
}

/// Runs globals and top-level statements in order, then `main` if defined.
inline ExecTrace execute(const SourceUnit& unit, const std::vector<std::int64_t>& inputs,
                         std::int64_t step_limit = kDefaultStepLimit) {
  check_executable(unit);
  return detail::Interpreter(unit, inputs, step_limit).run(unit);
}

struct InputDistribution {
  std::int64_t lo = -100;
  std::int64_t hi = 100;
  std::size_t length = 8;
  std::int64_t step_limit = kDefaultStepLimit;
};

struct Verdict {
  bool equivalent = true;
  std::vector<std::int64_t> input;  // diverging input, empty when equivalent
  ExecTrace trace_a;
  ExecTrace trace_b;
  explicit operator bool() const { return equivalent; }
};

/// Differential execution over `trials` seeded random input vectors.
inline Verdict equivalent(const SourceUnit& a, const SourceUnit& b, int trials,
                          std::uint64_t seed, const InputDistribution& dist = {}) {
  check_executable(a);
  check_executable(b);
  Rng rng(seed);
  std::vector<std::int64_t> input(dist.length);
  for (int t = 0; t < trials; ++t) {
    for (auto& v : input) v = rng.between(dist.lo, dist.hi);
    ExecTrace ta = detail::Interpreter(a, input, dist.step_limit).run(a);
    ExecTrace tb = detail::Interpreter(b, input, dist.step_limit).run(b);
    if (!same_behaviour(ta, tb)) return {false, input, std::move(ta), std::move(tb)};
  }
  return {};
}

}  // namespace coda
