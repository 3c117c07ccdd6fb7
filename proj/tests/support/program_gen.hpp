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

// Random terminating programs in the executable subset, dense in the
// structures the rewrite rules look for.

#include <cstdint>
#include <string>
#include <vector>

#include "coda/random.hpp"

namespace testgen {

class ProgramGenerator {
 public:
  explicit ProgramGenerator(std::uint64_t seed) : rng_(seed) {}

  std::string generate() {
    out_.clear();
    vars_.clear();
    fresh_ = 0;
    budget_ = 14 + static_cast<int>(rng_.below(10));

    std::string g = name("g");
    line(0, "int " + g + " = " + small_lit() + ";");
    vars_.push_back({g, true});
    std::string k = name("k");
    line(0, "const int " + k + " = " + std::to_string(rng_.between(1, 9)) + ";");
    vars_.push_back({k, false});

    const bool helper = rng_.chance(0.6);
    std::string h;
    if (helper) {
      h = name("h");
      const std::string p = name("p"), n = name("n"), s = name("s");
      line(0, "int " + h + "(int " + p + "[], int " + n + ") {");
      const auto mark = vars_.size();
      const auto arrays = arrays_;
      arrays_ = {p};
      vars_.push_back({n, true});
      line(1, "int " + s + " = " + n + ";");
      vars_.push_back({s, true});
      helper_ = "";
      const int saved = budget_;
      budget_ = 4;
      stmts(1, 0, 3);
      budget_ = saved;
      line(1, p + "[" + n + " & 7] = " + s + ";");
      line(1, "return " + s + ";");
      line(0, "}");
      vars_.resize(mark);
      arrays_ = arrays;
    }
    helper_ = h;

    line(0, "int main() {");
    const auto mark = vars_.size();
    std::vector<std::string> scalars;
    for (int i = 0; i < 3; ++i) {
      std::string x = name("x");
      line(1, "int " + x + " = read();");
      vars_.push_back({x, true});
      scalars.push_back(x);
    }
    std::string y = name("y");
    line(1, "int " + y + " = 0;");
    vars_.push_back({y, true});
    scalars.push_back(y);
    std::string a = name("a");
    line(1, "int " + a + "[8];");
    std::string i = name("i");
    line(1, "for (int " + i + " = 0; " + i + " < 4; " + i + "++) " + a + "[" + i + "] = read();");
    arrays_ = {a};
    stmts(1, 0, 6);
    for (const auto& x : scalars) line(1, "emit(" + x + ");");
    line(1, "emit(" + a + "[" + std::to_string(rng_.below(8)) + "]);");
    line(1, "emit(" + g + ");");
    line(1, "return " + scalars[0] + " & 255;");
    line(0, "}");
    vars_.resize(mark);
    return out_;
  }

 private:
  struct Var {
    std::string name;
    bool writable;
  };

  coda::Rng rng_;
  std::string out_;
  std::vector<Var> vars_;
  std::vector<std::string> arrays_;
  std::string helper_;
  int fresh_ = 0;
  int budget_ = 0;

  std::string name(const char* stem) { return stem + std::to_string(fresh_++); }

  void line(int depth, const std::string& s) {
    out_.append(static_cast<std::size_t>(depth) * 2, ' ');
    out_ += s;
    out_ += '\n';
  }

  bool is_writable(const std::string& n) const {
    for (auto it = vars_.rbegin(); it != vars_.rend(); ++it)
      if (it->name == n) return it->writable;
    return false;
  }

  std::vector<std::string> writable() const {
    std::vector<std::string> out;
    for (const auto& v : vars_)
      if (is_writable(v.name)) {
        bool dup = false;
        for (const auto& o : out) dup = dup || o == v.name;
        if (!dup) out.push_back(v.name);
      }
    return out;
  }

  std::string small_lit() {
    switch (rng_.below(8)) {
      case 0: return "'a'";
      case 1: return "0x1f";
      case 2: return std::to_string(rng_.between(10, 120));
      default: return std::to_string(rng_.between(0, 9));
    }
  }

  std::string index_expr() {
    if (rng_.chance(0.3)) return std::to_string(rng_.below(8));
    return "(" + expr(1) + ") & 7";
  }

  std::string atom() {
    const auto r = rng_.below(10);
    if (r < 5 && !vars_.empty()) return rng_.pick(vars_).name;
    if (r < 7 && !arrays_.empty()) return rng_.pick(arrays_) + "[" + index_expr() + "]";
    return small_lit();
  }

  std::string expr(int depth) {
    if (depth <= 0 || rng_.chance(0.35)) return atom();
    static const std::vector<std::string> ops = {"+", "-", "*", "&", "|", "^", "<<", ">>",
                                                 "<", "==", "!=", "&&", "||", "%", "/"};
    const auto r = rng_.below(10);
    if (r == 0) return "-" + atom();
    if (r == 1) return "!(" + expr(depth - 1) + ")";
    if (r == 2) return "~" + atom();
    if (r == 3 && !helper_.empty() && !arrays_.empty() && rng_.chance(0.3))
      return helper_ + "(" + rng_.pick(arrays_) + ", " + expr(depth - 1) + ")";
    const std::string& op = rng_.pick(ops);
    std::string rhs = expr(depth - 1);
    if ((op == "/" || op == "%") && rng_.chance(0.9)) rhs = "(" + rhs + " | 1)";
    if ((op == "<<" || op == ">>") && rng_.chance(0.8)) rhs = "(" + rhs + " & 7)";
    return "(" + expr(depth - 1) + " " + op + " " + rhs + ")";
  }

  std::string cond() {
    static const std::vector<std::string> cmp = {"<", "<=", ">", ">=", "==", "!="};
    std::string c = expr(1) + " " + rng_.pick(cmp) + " " + expr(1);
    if (rng_.chance(0.2)) c = "(" + c + ") && (" + expr(1) + " != 0)";
    // Mostly side-effect free; a helper call now and then checks the guards.
    return c;
  }

  std::string target() {
    auto w = writable();
    if (!arrays_.empty() && (w.empty() || rng_.chance(0.25)))
      return rng_.pick(arrays_) + "[" + index_expr() + "]";
    if (w.empty()) return "";
    return rng_.pick(w);
  }

  void stmts(int depth, int loops, int count) {
    for (int i = 0; i < count && budget_ > 0; ++i) stmt(depth, loops);
  }

  void body(int depth, int loops, int count) {
    const auto mark = vars_.size();
    stmts(depth, loops, count);
    vars_.resize(mark);
  }

  void stmt(int depth, int loops) {
    --budget_;
    const std::uint64_t kind = depth > 4 ? rng_.below(6) : rng_.below(19);
    const std::string t = target();
    if (t.empty() && kind < 6) {
      line(depth, "emit(" + expr(2) + ");");
      return;
    }
    static const std::vector<std::string> compound = {"+=", "-=", "*=", "/=", "%=",
                                                      "<<=", ">>=", "&=", "|=", "^="};
    switch (kind) {
      case 0:
        line(depth, t + " = " + expr(2) + ";");
        return;
      case 1: {
        const std::string& op = rng_.pick(compound);
        std::string v = expr(2);
        if (op == "/=" || op == "%=") v = "(" + v + ") | 1";
        if (op == "<<=" || op == ">>=") v = "(" + v + ") & 7";
        line(depth, t + " " + op + " " + v + ";");
        return;
      }
      case 2: {
        const std::string& op = rng_.pick(compound);
        const std::string bin = op.substr(0, op.size() - 1);
        std::string v = expr(1);
        if (bin == "/" || bin == "%") v = "(" + v + " | 1)";
        if (bin == "<<" || bin == ">>") v = "(" + v + " & 7)";
        line(depth, t + " = " + t + " " + bin + " " + v + ";");
        return;
      }
      case 3: {
        static const char* forms[] = {"%s++;", "++%s;", "%s--;", "--%s;"};
        std::string f = forms[rng_.below(4)];
        f.replace(f.find("%s"), 2, t);
        line(depth, f);
        return;
      }
      case 4: {
        // Value-position increments and side effects in values.
        auto w = writable();
        const std::string& u = w.empty() ? t : rng_.pick(w);
        if (u == t || rng_.chance(0.5))
          line(depth, t + " = " + expr(1) + " + 1;");
        else if (rng_.chance(0.5))
          line(depth, t + " = " + u + "++ + " + expr(1) + ";");
        else
          line(depth, t + " += (" + u + " = " + expr(1) + ");");
        return;
      }
      case 5:
        line(depth, "emit(" + expr(2) + ");");
        return;
      case 6: {
        line(depth, "if (" + cond() + ") {");
        body(depth + 1, loops, 2);
        if (rng_.chance(0.5)) {
          line(depth, "} else {");
          body(depth + 1, loops, 2);
        }
        line(depth, "}");
        return;
      }
      case 7: {
        const int n = 1 + static_cast<int>(rng_.below(3));
        line(depth, "if (" + cond() + ") {");
        body(depth + 1, loops, 1);
        for (int k = 0; k < n; ++k) {
          line(depth, "} else if (" + cond() + ") {");
          body(depth + 1, loops, 1);
        }
        if (rng_.chance(0.6)) {
          line(depth, "} else {");
          body(depth + 1, loops, 1);
        }
        line(depth, "}");
        return;
      }
      case 8: {
        // The shape guarded ifs take after an if/else-if/else rewrite.
        const int n = 2 + static_cast<int>(rng_.below(2));
        std::vector<std::string> conds;
        for (int k = 0; k < n; ++k) conds.push_back(cond());
        std::string neg;
        for (int k = 0; k < n; ++k) {
          line(depth, "if (" + (k == 0 ? conds[0] : neg + " && (" + conds[k] + ")") + ") {");
          body(depth + 1, loops, 1);
          line(depth, "}");
          neg += (k ? " && !(" : "!(") + conds[k] + ")";
        }
        if (rng_.chance(0.5)) {
          line(depth, "if (" + neg + ") {");
          body(depth + 1, loops, 1);
          line(depth, "}");
        }
        return;
      }
      case 9:
      case 10:
        if (loops < 2) return for_loop(depth, loops);
        return stmt(depth, loops);
      case 11:
        if (loops < 2) return while_loop(depth, loops);
        return stmt(depth, loops);
      case 12:
        if (loops < 2) return do_loop(depth, loops);
        return stmt(depth, loops);
      case 13: {
        line(depth, "{");
        const auto mark = vars_.size();
        // Shadow an outer variable about half the time.
        // Literal init: `int v = v + 1;` would read the new, uninitialized v.
        std::string v = !vars_.empty() && rng_.chance(0.5) ? rng_.pick(vars_).name : name("t");
        line(depth + 1, "int " + v + " = " + small_lit() + ";");
        vars_.push_back({v, true});
        stmts(depth + 1, loops, 2);
        vars_.resize(mark);
        line(depth, "}");
        return;
      }
      case 14: {
        std::string c = name("c");
        line(depth, "const int " + c + " = " + small_lit() + ";");
        vars_.push_back({c, false});
        line(depth, t + " = " + t + " + " + c + ";");
        return;
      }
      case 15:
        if (loops > 0) {
          line(depth, std::string("if (") + cond() + ") " + (rng_.chance(0.5) ? "continue;" : "break;"));
          return;
        }
        line(depth, "if (" + cond() + ") return " + expr(1) + ";");
        return;
      case 16:
        if (!helper_.empty() && !arrays_.empty()) {
          line(depth, t + " = " + helper_ + "(" + rng_.pick(arrays_) + ", " + expr(1) + ");");
          return;
        }
        line(depth, t + " ^= " + expr(1) + ";");
        return;
      case 17: {
        std::string c = name("c");
        line(depth, "const char " + c + " = 'z';");
        vars_.push_back({c, false});
        line(depth, "emit(" + c + " - " + expr(1) + ");");
        return;
      }
      default:
        line(depth, "emit(" + expr(2) + ");");
        return;
    }
  }

  std::string bound() {
    if (rng_.chance(0.6)) return std::to_string(rng_.between(0, 5));
    return "(" + expr(1) + " & 3)";
  }

  void for_loop(int depth, int loops) {
    const auto mark = vars_.size();
    const auto form = rng_.below(5);
    std::string i = name("i");
    const std::string b = bound();
    if (form == 0) {
      // Counter declared outside the loop and readable afterwards.
      line(depth, "int " + i + " = 0;");
      line(depth, "for (" + i + " = 0; " + i + " < " + b + "; " + i + "++) {");
    } else if (form == 1) {
      line(depth, "int " + i + " = 0;");
      line(depth, "for (; " + i + " < " + b + "; " + i + " += 1) {");
    } else if (form == 2) {
      line(depth, "for (int " + i + " = 0; " + i + " < " + b + ";) {");
      line(depth + 1, i + "++;");
    } else {
      line(depth, "for (int " + i + " = " + b + "; " + i + " > 0; --" + i + ") {");
    }
    vars_.push_back({i, false});
    if (rng_.chance(0.2)) {
      // Body-level declaration that shadows the counter.
      line(depth + 1, "int " + i + " = " + small_lit() + ";");
      vars_.push_back({i, true});
    }
    body(depth + 1, loops + 1, 2);
    line(depth, "}");
    vars_.resize(mark);
    if (form <= 1) vars_.push_back({i, true});
  }

  void while_loop(int depth, int loops) {
    std::string w = name("w");
    line(depth, "int " + w + " = 0;");
    line(depth, "while (" + w + " < " + bound() + ") {");
    line(depth + 1, w + "++;");
    const auto mark = vars_.size();
    vars_.push_back({w, false});
    body(depth + 1, loops + 1, 2);
    vars_.resize(mark);
    line(depth, "}");
    vars_.push_back({w, true});
  }

  void do_loop(int depth, int loops) {
    std::string w = name("w");
    line(depth, "int " + w + " = 0;");
    line(depth, "do {");
    line(depth + 1, w + " += 1;");
    const auto mark = vars_.size();
    vars_.push_back({w, false});
    body(depth + 1, loops + 1, 2);
    vars_.resize(mark);
    line(depth, "} while (" + w + " < " + bound() + ");");
    vars_.push_back({w, true});
  }
};

}  // namespace testgen
