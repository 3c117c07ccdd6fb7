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

// Synthetic classification benchmark: small oracle-executable array
// programs whose class correlates with the computed task, the coding style
// (loop form, increments, compound operators, named constants) and the
// identifier vocabulary.

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "coda/dataset.hpp"
#include "coda/random.hpp"

namespace coda::bench {

struct BenchOptions {
  std::size_t per_class = 200;
  double test_fraction = 0.25;
  double style_affinity = 0.8;  // chance each style trait follows the class
  double name_affinity = 0.75;  // chance each name comes from the class pool
  double task_affinity = 0.8;
};

inline constexpr int kBenchClasses = 4;

namespace detail {

struct Style {
  bool while_loop;
  int step;  // 0: i++, 1: ++i, 2: i += 1
  bool compound;
  bool named_const;
  bool chained_if;
};

inline const std::array<Style, kBenchClasses> kStyles = {{
    {false, 0, true, false, true},
    {true, 2, false, true, false},
    {false, 1, false, true, true},
    {true, 0, true, false, false},
}};

// Per role: function, array param, length param, accumulator, index,
// buffer, count.
using Pool = std::array<std::vector<std::string>, 7>;

inline const std::array<Pool, kBenchClasses> kPools = {{
    {{{"sumAll", "total_of", "accumulate"}, {"vals", "data", "nums"}, {"cnt", "num", "size"},
      {"total", "sum", "acc"}, {"idx", "p", "pos"}, {"input", "values", "arr"},
      {"count", "amount", "items"}}},
    {{{"findMax", "largest", "peak_of"}, {"seq", "elems", "xs"}, {"len", "length", "limit"},
      {"best", "top", "hi"}, {"j", "at", "cur"}, {"buffer", "list", "series"},
      {"m", "howMany", "total_n"}}},
    {{{"countEven", "tally_even", "evens"}, {"a", "bag", "src"}, {"bound", "upto", "end"},
      {"hits", "tally", "found"}, {"k", "step", "w"}, {"cells", "slots", "store"},
      {"width", "span", "reach"}}},
    {{{"mixHash", "digest", "checksum"}, {"bytes", "block", "chunk"}, {"n", "nbytes", "sz"},
      {"h", "state", "seed"}, {"q", "off", "r"}, {"raw", "packet", "msg"},
      {"used", "filled", "got"}}},
}};

inline const Pool kShared = {{{"compute", "solve", "run"}, {"arr", "v", "t"}, {"n", "len", "cnt"},
                              {"res", "ans", "out"}, {"i", "x", "it"}, {"buf", "b", "tmp"},
                              {"c", "k2", "num"}}};

class Generator {
 public:
  Generator(std::uint64_t seed, BenchOptions opts) : rng_(seed), opts_(opts) {}

  std::string program(int cls) {
    const auto name = [&](int role) -> std::string {
      const bool own = rng_.chance(opts_.name_affinity);
      const int c = own ? cls : static_cast<int>(rng_.below(kBenchClasses + 1));
      const auto& pool = c == kBenchClasses ? kShared[role] : kPools[c][role];
      return rng_.pick(pool);
    };
    std::string fn = name(0), arr = name(1), len = name(2), acc = name(3), idx = name(4),
                buf = name(5), cnt = name(6);
    // distinct roles must not collide
    std::vector<std::string*> roles = {&fn, &arr, &len, &acc, &idx, &buf, &cnt};
    for (std::size_t i = 0; i < roles.size(); ++i)
      for (std::size_t j = 0; j < i; ++j)
        if (*roles[i] == *roles[j]) *roles[i] += std::to_string(i);
    if (fn == "main") fn += "_";

    Style st;
    const auto trait = [&](auto own_value, auto random_value) {
      return rng_.chance(opts_.style_affinity) ? own_value : random_value;
    };
    const Style& own = kStyles[static_cast<std::size_t>(cls)];
    st.while_loop = trait(own.while_loop, rng_.chance(0.5));
    st.step = trait(own.step, static_cast<int>(rng_.below(3)));
    st.compound = trait(own.compound, rng_.chance(0.5));
    st.named_const = trait(own.named_const, rng_.chance(0.5));
    st.chained_if = trait(own.chained_if, rng_.chance(0.5));
    const int task = rng_.chance(opts_.task_affinity) ? cls : static_cast<int>(rng_.below(kBenchClasses));

    std::string out;
    out += "int " + fn + "(int " + arr + "[], int " + len + ") {\n";
    std::string k = "3";
    if (st.named_const) {
      k = "K" + std::to_string(rng_.between(1, 3));
      if (k == acc || k == idx) k += "_";
      out += "  const int " + k + " = " + std::to_string(rng_.between(2, 5)) + ";\n";
    }
    const std::string init = task == 1 ? "-1000" : (task == 3 ? "7" : "0");
    out += "  int " + acc + " = " + init + ";\n";
    const std::string el = arr + "[" + idx + "]";
    std::vector<std::string> body;
    switch (task) {
      case 0: body.push_back(update(acc, "+", el, st)); break;
      case 1: body.push_back("if (" + el + " > " + acc + ")\n      " + acc + " = " + el + ";"); break;
      case 2: body.push_back("if (" + el + " % 2 == 0)\n      " + step(acc, st) + ";"); break;
      default:
        body.push_back(update(acc, "*", k, st));
        body.push_back(update(acc, "^", el, st));
        break;
    }
    if (rng_.chance(0.5)) body.push_back(branch(acc, el, k, st));
    out += loop(idx, "0", len, body, st, "  ");
    out += "  return " + acc + ";\n}\n";

    out += "int main() {\n";
    out += "  int " + buf + "[8];\n";
    out += "  int " + cnt + " = read() & 7;\n";
    out += loop(idx, "0", "8", {buf + "[" + idx + "] = read();"}, st, "  ");
    out += "  emit(" + fn + "(" + buf + ", " + cnt + "));\n";
    out += "  return 0;\n}\n";
    return out;
  }

 private:
  Rng rng_;
  BenchOptions opts_;

  static std::string step(const std::string& v, const Style& st) {
    switch (st.step) {
      case 0: return v + "++";
      case 1: return "++" + v;
      default: return v + " += 1";
    }
  }

  static std::string update(const std::string& v, const std::string& op, const std::string& e,
                            const Style& st) {
    if (st.compound) return v + " " + op + "= " + e + ";";
    return v + " = " + v + " " + op + " " + e + ";";
  }

  std::string branch(const std::string& acc, const std::string& el, const std::string& k,
                     const Style& st) {
    const std::string a = acc + " " + (st.compound ? "-= 1;" : "= " + acc + " - 1;");
    const std::string b = acc + " " + (st.compound ? "+= 2;" : "= " + acc + " + 2;");
    if (st.chained_if)
      return "if (" + el + " > " + k + ")\n      " + a + "\n    else if (" + el + " < -" + k +
             ")\n      " + b;
    return "if (" + el + " > " + k + ")\n      " + a + "\n    if (!(" + el + " > " + k + ") && " +
           el + " < -" + k + ")\n      " + b;
  }

  static std::string loop(const std::string& i, const std::string& from, const std::string& to,
                          const std::vector<std::string>& body, const Style& st,
                          const std::string& ind) {
    std::string out;
    if (st.while_loop) {
      out += ind + "int " + i + " = " + from + ";\n";
      out += ind + "while (" + i + " < " + to + ") {\n";
      for (const auto& s : body) out += ind + "  " + s + "\n";
      out += ind + "  " + step(i, st) + ";\n";
      out += ind + "}\n";
    } else {
      out += ind + "int " + i + ";\n";
      out += ind + "for (" + i + " = " + from + "; " + i + " < " + to + "; " + step(i, st) + ") {\n";
      for (const auto& s : body) out += ind + "  " + s + "\n";
      out += ind + "}\n";
    }
    return out;
  }
};

}  // namespace detail

/// per_class programs for each of the four classes, interleaved by class,
/// the last test_fraction of each class marked as test.
inline Dataset generate_synthetic(std::uint64_t seed = 1, BenchOptions opts = {}) {
  detail::Generator gen(seed, opts);
  Dataset d;
  const auto n_test = static_cast<std::size_t>(static_cast<double>(opts.per_class) * opts.test_fraction);
  for (std::size_t i = 0; i < opts.per_class; ++i) {
    for (int c = 0; c < kBenchClasses; ++c) {
      LabeledSnippet s;
      s.id = "c" + std::to_string(c) + "-" + std::to_string(i);
      s.code = gen.program(c);
      s.label = c;
      s.split = i >= opts.per_class - n_test ? Split::Test : Split::Train;
      d.items.push_back(std::move(s));
    }
  }
  return d;
}

}  // namespace coda::bench
