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

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <set>
#include <string>
#include <vector>

#include "coda/est.hpp"
#include "coda/interpreter.hpp"
#include "coda/irt.hpp"
#include "coda/lexer.hpp"
#include "coda/parser.hpp"
#include "coda/printer.hpp"
#include "coda/rules.hpp"
#include "support/fixtures.hpp"
#include "support/program_gen.hpp"
#include "support/stubs.hpp"

using namespace coda;

namespace {

std::string rewrite(const std::string& src, const RuleProbabilities& p, std::uint64_t seed = 1) {
  return print(apply_rules(parse(src), p, seed).unit);
}

RuleProbabilities both(RuleId a, RuleId b) {
  RuleProbabilities p = only_rule(a);
  p[index_of(b)] = 1.0;
  return p;
}

std::size_t count(const std::string& hay, const std::string& needle) {
  std::size_t n = 0;
  for (auto pos = hay.find(needle); pos != std::string::npos; pos = hay.find(needle, pos + 1)) ++n;
  return n;
}

// Census oracle working on the raw token stream rather than the tree.
struct TokenCensus {
  std::size_t fors = 0, whiles = 0, literals = 0, consts = 0;
  std::array<std::size_t, 9> compound{};
};

TokenCensus token_census(const std::string& src) {
  std::vector<Token> t;
  for (auto& tok : lex(src))
    if (!tok.trivia()) t.push_back(tok);
  static const char* ops[] = {"+=", "-=", "*=", "/=", "%=", "<<=", ">>=", "&=", "|="};
  static const std::set<std::string> types = {"int", "char", "long", "short", "unsigned"};
  TokenCensus c;
  std::size_t dos = 0;
  int depth = 0;
  for (std::size_t i = 0; i < t.size(); ++i) {
    const Token& k = t[i];
    if (k.is("{")) ++depth;
    if (k.is("}")) --depth;
    if (k.is("for")) {
      ++c.fors;
      // header literals never count; its operators do
      int paren = 0;
      for (++i; i < t.size(); ++i) {
        if (t[i].is("(")) ++paren;
        if (t[i].is(")") && --paren == 0) break;
        for (std::size_t o = 0; o < 9; ++o)
          if (t[i].kind == TokenKind::Operator && t[i].text == ops[o]) ++c.compound[o];
      }
      continue;
    }
    if (k.is("while")) ++c.whiles;
    if (k.is("do")) ++dos;
    for (std::size_t o = 0; o < 9; ++o)
      if (k.kind == TokenKind::Operator && k.text == ops[o]) ++c.compound[o];
    if (k.is("[") && i >= 2 && t[i - 1].kind == TokenKind::Identifier &&
        types.count(t[i - 2].text)) {
      while (i < t.size() && !t[i].is("]")) ++i;  // array size
      continue;
    }
    if (k.is("const")) {
      std::size_t j = i + 1;
      bool array = false;
      while (j < t.size() && !t[j].is("=") && !t[j].is(";")) array |= t[j++].is("[");
      if (!array && j + 2 < t.size() && t[j].is("=")) {
        std::size_t l = j + 1;
        if (t[l].is("-") && t[l + 1].kind == TokenKind::IntegerLiteral) ++l;
        const bool lit = t[l].kind == TokenKind::IntegerLiteral ||
                         t[l].kind == TokenKind::CharLiteral ||
                         t[l].kind == TokenKind::StringLiteral;
        if (lit && l + 1 < t.size() && t[l + 1].is(";")) ++c.consts;
      }
    }
    if (depth > 0 && (k.kind == TokenKind::IntegerLiteral || k.kind == TokenKind::CharLiteral ||
                      k.kind == TokenKind::StringLiteral))
      ++c.literals;
  }
  c.whiles -= dos;
  return c;
}

const char* kSampleProgram = R"(int main() {
  int s = 0;
  int n = read();
  int i;
  for (i = 0; i < n; i++) s += i;
  emit(s);
  return 0;
}
)";

}  // namespace

// ---- catalog -------------------------------------------------------------------

TEST(RuleCatalog, TwentyRulesInFourCategories) {
  const auto& cat = rule_catalog();
  ASSERT_EQ(cat.size(), 20u);
  std::map<RuleCategory, int> per;
  std::set<std::string> names;
  for (std::size_t i = 0; i < cat.size(); ++i) {
    EXPECT_EQ(index_of(cat[i].id), i);
    ++per[cat[i].category];
    names.insert(cat[i].name);
  }
  EXPECT_EQ(names.size(), 20u);
  EXPECT_EQ(per[RuleCategory::Loop], 2);
  EXPECT_EQ(per[RuleCategory::Branch], 2);
  EXPECT_EQ(per[RuleCategory::Calculation], 14);
  EXPECT_EQ(per[RuleCategory::Constant], 2);
}

TEST(RuleCatalog, PairedRulesAreMutualInverses) {
  for (auto [a, b] : {std::pair{RuleId::R1a, RuleId::R1b}, {RuleId::R2a, RuleId::R2b},
                      {RuleId::R4a, RuleId::R4b}}) {
    EXPECT_EQ(rule_info(a).inverse, b);
    EXPECT_EQ(rule_info(b).inverse, a);
  }
  for (std::size_t k = 0; k < 9; ++k)
    EXPECT_EQ(rule_info(static_cast<RuleId>(index_of(RuleId::R3e) + k)).inverse, RuleId::R3n);
}

TEST(RuleCatalog, JsonDumpRoundTripsTheMask) {
  RuleMask m = all_rules();
  m[index_of(RuleId::R2b)] = false;
  const auto j = rule_catalog_json(m);
  ASSERT_EQ(j.size(), 20u);
  std::vector<std::string> keys;
  for (auto it = j[0].begin(); it != j[0].end(); ++it) keys.push_back(it.key());
  EXPECT_EQ(keys, (std::vector<std::string>{"ruleId", "category", "description", "enabled"}));
  EXPECT_EQ(j[0]["category"], "R1-loop");
  EXPECT_EQ(j[19]["category"], "R4-constant");
  EXPECT_EQ(rule_mask_from_json(nlohmann::json::parse(j.dump())), m);
  EXPECT_EQ(rule_from_name("R3k"), RuleId::R3k);
  EXPECT_FALSE(rule_from_name("R9"));
}

// ---- census --------------------------------------------------------------------

TEST(ApplicationProbability, Formula) {
  EXPECT_DOUBLE_EQ(application_probability({2, 6}), 0.75);
  EXPECT_DOUBLE_EQ(application_probability({0, 0}), 0.0);
  EXPECT_DOUBLE_EQ(application_probability({0, 5}), 1.0);
  EXPECT_DOUBLE_EQ(application_probability({1, 1}), 0.5);
}

TEST(Census, CountsLoopsOverReferences) {
  const std::string two_for =
      "int f(int n){int s=0;int i;for(i=0;i<n;i++)s+=i;for(i=0;i<n;i++)s-=i;return s;}";
  const std::string three_while =
      "int g(int n){while(n>0)n--;while(n<5)n++;int k=0;while(k<2)k+=1;return n;}";
  const StructureCensus c =
      census(std::vector<SourceUnit>{parse(two_for), parse(three_while), parse(three_while)});
  EXPECT_EQ(c[RuleId::R1a], (CensusEntry{2, 6}));
  EXPECT_EQ(c[RuleId::R1b], (CensusEntry{6, 2}));
  EXPECT_DOUBLE_EQ(application_probability(c[RuleId::R1a]), 0.75);
}

TEST(Census, EmptyReferenceSetIsAllZero) {
  EXPECT_EQ(census(std::vector<SourceUnit>{}), StructureCensus{});
  EXPECT_EQ(census(ReferenceSet{}), StructureCensus{});
}

TEST(Census, CalculationAndConstantShapes) {
  const auto c = census(parse(R"(int main() {
  const int k = 4;
  int x = read();
  x++; ++x; x--; x += 1; x -= 1;
  x = x * 3;
  x <<= 1;
  emit(x + k);
  return 0;
})"));
  EXPECT_EQ(c[RuleId::R3b], (CensusEntry{1, 1}));
  EXPECT_EQ(c[RuleId::R3a], (CensusEntry{1, 1}));
  EXPECT_EQ(c[RuleId::R3d], (CensusEntry{1, 1}));
  EXPECT_EQ(c[RuleId::R3c], (CensusEntry{0, 1}));
  EXPECT_EQ(c[RuleId::R3g], (CensusEntry{0, 1}));  // *=
  EXPECT_EQ(c[RuleId::R3j], (CensusEntry{1, 0}));  // <<=
  EXPECT_EQ(c[RuleId::R3n], (CensusEntry{1, 3}));
  // literals: 4, the 1s of +=, -= and <<=, 3, 0
  EXPECT_EQ(c[RuleId::R4a], (CensusEntry{6, 1}));
}

TEST(Census, MatchesTokenOracleOnGeneratedPrograms) {
  testgen::ProgramGenerator gen(2024);
  for (int k = 0; k < 50; ++k) {
    const std::string src = gen.generate();
    const auto shapes = count_shapes(parse(src));
    const auto oracle = token_census(src);
    SCOPED_TRACE(src);
    EXPECT_EQ(shapes.for_loops, oracle.fors);
    EXPECT_EQ(shapes.while_loops, oracle.whiles);
    EXPECT_EQ(shapes.literals, oracle.literals);
    EXPECT_EQ(shapes.const_decls, oracle.consts);
    for (std::size_t o = 0; o < 9; ++o) EXPECT_EQ(shapes.compound[o], oracle.compound[o]) << o;
  }
}

// ---- per-rule behaviour --------------------------------------------------------

TEST(Rules, EachRulePreservesSemanticsOnGeneratedPrograms) {
  for (const auto& info : rule_catalog()) {
    testgen::ProgramGenerator gen(100 + index_of(info.id));
    std::size_t fired = 0;
    for (int k = 0; k < 40; ++k) {
      const SourceUnit u = parse(gen.generate());
      const auto r = apply_rules(u, only_rule(info.id), static_cast<std::uint64_t>(k));
      fired += r.applied.size();
      for (RuleId a : r.applied) ASSERT_EQ(a, info.id);
      const std::string out = print(r.unit);
      ASSERT_EQ(parse(out), r.unit) << info.name << "\n" << out;
      const Verdict v = equivalent(u, r.unit, 8, static_cast<std::uint64_t>(k));
      ASSERT_TRUE(v.equivalent) << info.name << "\n" << print(u) << "\n----\n" << out;
    }
    EXPECT_GT(fired, 0u) << info.name << " never applied";
  }
}

TEST(Rules, AllRulesTogetherPreserveSemantics) {
  testgen::ProgramGenerator gen(77);
  for (int k = 0; k < 60; ++k) {
    const SourceUnit u = parse(gen.generate());
    const auto r = apply_rules(u, uniform_probabilities(0.7), static_cast<std::uint64_t>(k));
    ASSERT_EQ(parse(print(r.unit)), r.unit);
    ASSERT_TRUE(equivalent(u, r.unit, 8, 5).equivalent) << print(u) << "\n----\n" << print(r.unit);
  }
}

TEST(Rules, ProbabilityZeroLeavesTheUnitUntouched) {
  testgen::ProgramGenerator gen(5);
  const SourceUnit u = parse(gen.generate());
  const auto r = apply_rules(u, uniform_probabilities(0.0), 3);
  EXPECT_EQ(r.unit, u);
  EXPECT_TRUE(r.applied.empty());
}

TEST(Rules, ForToWhileOnMotivatingExample) {
  const std::string out = rewrite(fixtures::kF1, only_rule(RuleId::R1a));
  EXPECT_NE(out.find("while (i < n / 2)"), std::string::npos) << out;
  EXPECT_NE(out.find("while (i < n)"), std::string::npos);
  EXPECT_EQ(out.find("for"), std::string::npos);
}

TEST(Rules, LoopRewriteIsNotUndoneByItsInverse) {
  const std::string out = rewrite(kSampleProgram, both(RuleId::R1a, RuleId::R1b));
  EXPECT_EQ(count(out, "while"), 1u) << out;
  EXPECT_EQ(count(out, "for"), 0u);
  EXPECT_NE(out.find("i = 0;\n  while (i < n) {\n    s += i;\n    i++;\n  }"), std::string::npos)
      << out;
}

TEST(Rules, WhileToForUsesEmptySlots) {
  const std::string out =
      rewrite("int main(){int n=read(); while(n>0) n--; return n;}", only_rule(RuleId::R1b));
  EXPECT_NE(out.find("for (; n > 0;)"), std::string::npos) << out;
}

TEST(Rules, CompoundRewriteIsNotUndone) {
  const std::string a = rewrite("int main(){int x=read();int y=read(); x += y; emit(x);}",
                                both(RuleId::R3e, RuleId::R3n));
  EXPECT_NE(a.find("x = x + y;"), std::string::npos) << a;
  const std::string b = rewrite("int main(){int x=read();int y=read(); x = x + y; emit(x);}",
                                both(RuleId::R3e, RuleId::R3n));
  EXPECT_NE(b.find("x += y;"), std::string::npos) << b;
}

TEST(Rules, InlinedConstantIsNotHoistedAgain) {
  const auto r =
      apply_rules(parse("int main(){const int k = 3; emit(k); return 1;}"),
                  both(RuleId::R4a, RuleId::R4b), 1);
  const std::string out = print(r.unit);
  EXPECT_NE(out.find("emit(3);"), std::string::npos) << out;
  EXPECT_EQ(std::count(r.applied.begin(), r.applied.end(), RuleId::R4b), 1);
  // only the return literal is hoisted
  EXPECT_EQ(std::count(r.applied.begin(), r.applied.end(), RuleId::R4a), 1);
}

TEST(Rules, IncrementOnlyRewrittenAsStatement) {
  const std::string out = rewrite(
      "int main(){int x=read(); int y = x++; x++; ++x; x--; --x; emit(x+y);}",
      uniform_probabilities(1.0));
  EXPECT_NE(out.find("int y = x++;"), std::string::npos) << out;
  EXPECT_EQ(count(out, "x += 1;"), 2u);
  EXPECT_EQ(count(out, "x -= 1;"), 2u);
}

TEST(Rules, ContinueBlocksForToWhile) {
  const char* src =
      "int main(){int s=0;int i; for(i=0;i<5;i++){ if(i==2) continue; s+=i;} emit(s);}";
  EXPECT_EQ(rewrite(src, only_rule(RuleId::R1a)), print(parse(src)));
  // a continue belonging to an inner loop does not block the outer one
  const std::string nested = rewrite(
      "int main(){int s=0;int i; for(i=0;i<5;i++){ int j; for(j=0;j<3;j++){ if(j==1) continue; "
      "s+=j;} } emit(s);}",
      only_rule(RuleId::R1a));
  EXPECT_EQ(count(nested, "while"), 1u) << nested;
  EXPECT_EQ(count(nested, "for ("), 1u);
}

TEST(Rules, DeclaredCounterIsScopedWhenHoisted) {
  const char* src = "int main(){int s=0; for(int i=0;i<3;i++) s+=i; int i=7; emit(s+i);}";
  const SourceUnit u = parse(src);
  const auto r = apply_rules(u, only_rule(RuleId::R1a), 1);
  ASSERT_EQ(r.applied, std::vector<RuleId>{RuleId::R1a});
  EXPECT_NE(print(r.unit).find("{\n    int i = 0;\n    while (i < 3)"), std::string::npos)
      << print(r.unit);
  EXPECT_TRUE(equivalent(u, r.unit, 5, 1).equivalent);
}

TEST(Rules, BranchRewriteSkippedWhenUnsafe) {
  const char* writes_cond =
      "int main(){int x=read();int y=0; if(x>0) x=0; else if(x<-5) y=1; emit(x+y);}";
  EXPECT_EQ(rewrite(writes_cond, only_rule(RuleId::R2a)), print(parse(writes_cond)));
  const char* impure_cond =
      "int main(){int x=read();int y=0; if(read()>0) y=2; else y=1; emit(x+y);}";
  EXPECT_EQ(rewrite(impure_cond, only_rule(RuleId::R2a)), print(parse(impure_cond)));
}

TEST(Rules, BranchRewriteRoundTrips) {
  const char* src =
      "int main(){int x=read();int y=0; if(x>0) y=2; else if(x<-5) y=1; else y=3; emit(x+y);}";
  const SourceUnit u = parse(src);
  const auto a = apply_rules(u, only_rule(RuleId::R2a), 1);
  const std::string guarded = print(a.unit);
  EXPECT_NE(guarded.find("if (!(x > 0) && x < -5)"), std::string::npos) << guarded;
  EXPECT_NE(guarded.find("if (!(x > 0) && !(x < -5))"), std::string::npos);
  EXPECT_TRUE(equivalent(u, a.unit, 20, 2).equivalent);
  const auto b = apply_rules(a.unit, only_rule(RuleId::R2b), 1);
  EXPECT_EQ(b.applied, std::vector<RuleId>{RuleId::R2b});
  EXPECT_EQ(b.unit, u) << print(b.unit);
}

TEST(Rules, ConstantNamesAreFresh) {
  const SourceUnit u = parse("int main(){int v_5 = 1; int v_50 = 2; emit(5 + v_5 + v_50); return 0;}");
  const auto r = apply_rules(u, only_rule(RuleId::R4a), 1);
  EXPECT_NE(print(r.unit).find("const int v_51 = 5;"), std::string::npos) << print(r.unit);
}

TEST(Rules, ConstantNamesAvoidTheSymbolTable) {
  testgen::ProgramGenerator gen(31);
  for (int k = 0; k < 30; ++k) {
    const SourceUnit u = parse(gen.generate());
    std::set<std::string> before;
    for (const auto& s : u.symbols) before.insert(s.name);
    const auto r = apply_rules(u, only_rule(RuleId::R4a), static_cast<std::uint64_t>(k));
    std::set<std::string> after;
    for (const auto& s : r.unit.symbols) after.insert(s.name);
    for (const auto& name : after)
      if (!before.count(name)) EXPECT_EQ(name.rfind("v_", 0), 0u) << name;
    const auto added = std::count(r.applied.begin(), r.applied.end(), RuleId::R4a);
    std::size_t fresh = 0;
    for (const auto& name : after) fresh += !before.count(name);
    EXPECT_EQ(static_cast<std::size_t>(added), fresh);
  }
}

TEST(Rules, SameSeedSameRewrite) {
  testgen::ProgramGenerator gen(9);
  const SourceUnit u = parse(gen.generate());
  const auto a = apply_rules(u, uniform_probabilities(0.5), 99);
  const auto b = apply_rules(u, uniform_probabilities(0.5), 99);
  EXPECT_EQ(print(a.unit), print(b.unit));
  EXPECT_EQ(a.applied, b.applied);
}

TEST(Rules, GuidedFrequencyTracksCensus) {
  const SourceUnit u = parse(kSampleProgram);
  StructureCensus c;
  c[RuleId::R1a] = {2, 6};
  const auto probs = guided_probabilities(c);
  int hits = 0;
  const int draws = 2000;
  for (int s = 0; s < draws; ++s) {
    const auto r = apply_rules(u, probs, variant_seed(1, "t", static_cast<std::size_t>(s)));
    hits += std::count(r.applied.begin(), r.applied.end(), RuleId::R1a);
  }
  EXPECT_NEAR(static_cast<double>(hits) / draws, 0.75, 0.03);
}

// ---- EST -----------------------------------------------------------------------

namespace {

ReferenceSet references_of(const std::vector<std::string>& codes, const SnippetEmbedder& p) {
  ReferenceSet refs;
  refs.target_id = "t0";
  for (std::size_t i = 0; i < codes.size(); ++i) {
    LabeledSnippet s{"r" + std::to_string(i), codes[i], 1, Split::Train};
    refs.members.push_back({s, 0.0, p.embed(masked_tokens(codes[i]))});
  }
  return refs;
}

}  // namespace

TEST(Est, ZeroCensusReturnsTarget) {
  NgramSnippetEmbedder p;
  const SourceUnit t = parse(fixtures::kF1);
  const auto refs = references_of({fixtures::kF2}, p);
  const auto r = apply_est(t, StructureCensus{}, 8, 1, refs, p);
  EXPECT_EQ(r.unit, t);
  EXPECT_TRUE(r.applied.empty());
  EXPECT_EQ(r.variant, 0u);  // all variants tie
}

TEST(Est, WhileHeavyReferencesTurnLoopsIntoWhile) {
  NgramSnippetEmbedder p;
  const auto refs = references_of({fixtures::kF2, fixtures::kF2}, p);
  const StructureCensus c = census(refs);
  EXPECT_EQ(c[RuleId::R1a], (CensusEntry{0, 2}));
  const auto r = apply_est(parse(fixtures::kF1), c, 16, 7, refs, p);
  const std::string out = print(r.unit);
  EXPECT_NE(out.find("while (i < n / 2)"), std::string::npos) << out;
  EXPECT_NE(std::find(r.applied.begin(), r.applied.end(), RuleId::R1a), r.applied.end());
}

TEST(Est, ChoosesTheMostSimilarVariant) {
  NgramSnippetEmbedder p;
  const auto refs = references_of({fixtures::kF2}, p);
  const SourceUnit t = parse(fixtures::kF1);
  const EstOptions unguided{false, 0.5, all_rules()};
  const auto r = apply_est(t, StructureCensus{}, 12, 3, refs, p, unguided);
  const auto ref_vecs = refs.embeddings();
  for (std::size_t v = 0; v < 12; ++v) {
    const auto alt = apply_rules(t, uniform_probabilities(0.5), variant_seed(3, "t0", v));
    const double s = mean_similarity(p.embed(mask_identifiers(alt.unit)), ref_vecs);
    if (v < r.variant) EXPECT_LT(s, r.score);
    EXPECT_LE(s, r.score + 1e-12);
    if (v == r.variant) EXPECT_EQ(alt.unit, r.unit);
  }
}

TEST(Est, DeterministicForSeed) {
  NgramSnippetEmbedder p;
  const auto refs = references_of({fixtures::kF2}, p);
  const SourceUnit t = parse(fixtures::kF1);
  const EstOptions unguided{false, 0.5, all_rules()};
  const auto a = apply_est(t, StructureCensus{}, 10, 42, refs, p, unguided);
  const auto b = apply_est(t, StructureCensus{}, 10, 42, refs, p, unguided);
  EXPECT_EQ(print(a.unit), print(b.unit));
  EXPECT_EQ(a.variant, b.variant);
  EXPECT_THROW(apply_est(t, StructureCensus{}, 0, 42, refs, p), Error);
}

// ---- IRT -----------------------------------------------------------------------

namespace {

stubs::TableIdentifierEmbedder palindrome_names() {
  return stubs::TableIdentifierEmbedder(
      16, {{"a", {1, 0, 0, 0}}, {"t", {0.9, 0.1, 0, 0}}, {"n", {0, 1, 0, 0}},
           {"len", {0.1, 0.9, 0, 0}}, {"i", {0, 0, 1, 0}}, {"str", {0, 0, 0, 1}}});
}

}  // namespace

TEST(Irt, PlanPairsTargetNamesWithUnusedReferenceNames) {
  const SourceUnit cur = parse("int f(int a, int n) { return a + n; }");
  const auto emb = palindrome_names();
  const RenamePlan plan = build_rename_plan(cur, {"t", "len", "a"}, emb);
  ASSERT_EQ(plan.pairs.size(), 6u);  // V_t = {f, a, n}
  std::set<std::string> tos;
  for (const auto& p : plan.pairs) tos.insert(p.to);
  EXPECT_EQ(tos, (std::set<std::string>{"t", "len"}));
  for (std::size_t i = 1; i < plan.pairs.size(); ++i)
    EXPECT_GE(plan.pairs[i - 1].similarity, plan.pairs[i].similarity);
  // the two dominant pairs rank first
  std::set<std::pair<std::string, std::string>> top = {
      {plan.pairs[0].from, plan.pairs[0].to}, {plan.pairs[1].from, plan.pairs[1].to}};
  EXPECT_EQ(top, (std::set<std::pair<std::string, std::string>>{{"a", "t"}, {"n", "len"}}));
}

TEST(Irt, NoCandidatesGivesEmptyPlan) {
  const SourceUnit cur = parse("int f(int a, int n) { return a + n; }");
  const auto emb = palindrome_names();
  EXPECT_TRUE(build_rename_plan(cur, {"a", "n", "f", "return", "strlen"}, emb).pairs.empty());
}

TEST(Irt, TiesBreakLexicographically) {
  stubs::TableIdentifierEmbedder flat(8, {});
  const SourceUnit cur = parse("int f(int b, int a) { return a + b; }");
  const RenamePlan plan = build_rename_plan(cur, {"zz", "yy"}, flat);
  ASSERT_FALSE(plan.pairs.empty());
  for (std::size_t i = 1; i < plan.pairs.size(); ++i) {
    const auto& x = plan.pairs[i - 1];
    const auto& y = plan.pairs[i];
    if (x.similarity == y.similarity) EXPECT_LT(std::tie(x.from, x.to), std::tie(y.from, y.to));
  }
}

TEST(Irt, RenameReplacesEveryOccurrence) {
  const SourceUnit f1 = parse(fixtures::kF1);
  const auto out = apply_rename(f1, "a", "t");
  ASSERT_TRUE(out);
  const auto names = names_occurring(*out.renamed);
  EXPECT_FALSE(names.count("a"));
  EXPECT_TRUE(names.count("t"));
  std::size_t before = 0, after = 0;
  for (const auto& tok : lex(fixtures::kF1)) before += tok.kind == TokenKind::Identifier && tok.text == "a";
  for (const auto& tok : lex(print(*out.renamed)))
    after += tok.kind == TokenKind::Identifier && tok.text == "t";
  EXPECT_EQ(before, 5u);
  EXPECT_EQ(after, 5u);
}

TEST(Irt, RenameSkipReasons) {
  const SourceUnit u = parse("int f(int x, int y) { return x + y; }");
  EXPECT_EQ(apply_rename(u, "x", "y").reason, RenameSkip::Duplicate);
  EXPECT_EQ(apply_rename(u, "q", "z").reason, RenameSkip::Consumed);
  EXPECT_EQ(apply_rename(u, "x", "while").reason, RenameSkip::Invalid);
  EXPECT_EQ(apply_rename(u, "x", "printf").reason, RenameSkip::Invalid);
  EXPECT_EQ(apply_rename(u, "x", "9x").reason, RenameSkip::Invalid);
  EXPECT_FALSE(apply_rename(u, "x", "y"));
}

TEST(Irt, RenameInsideOpaqueRuns) {
  const SourceUnit u = parse("int f(int x) { switch (x) { case 1: return x; } return 0; }");
  const auto out = apply_rename(u, "x", "k");
  ASSERT_TRUE(out);
  EXPECT_FALSE(names_occurring(*out.renamed).count("x"));
  EXPECT_EQ(print(*out.renamed).find("x"), std::string::npos) << print(*out.renamed);
}

TEST(Irt, RenamePreservesBehaviour) {
  const SourceUnit u = parse(fixtures::kF1Exec);
  auto a = apply_rename(u, "a", "t");
  ASSERT_TRUE(a);
  auto b = apply_rename(*a.renamed, "n", "len");
  ASSERT_TRUE(b);
  EXPECT_TRUE(equivalent(u, *b.renamed, 30, 4).equivalent);
  EXPECT_TRUE(equivalent(u, parse(fixtures::kF3Exec), 30, 4).equivalent);
}

TEST(Irt, GeneratedRenamesPreserveBehaviour) {
  testgen::ProgramGenerator gen(808);
  CharNgramIdentifierEmbedder emb;
  for (int k = 0; k < 20; ++k) {
    const SourceUnit u = parse(gen.generate());
    RenamePlan plan = build_rename_plan(u, {"alpha", "beta", "len", "tmp", "idx"}, emb);
    SourceUnit cur = u;
    while (!plan.done()) {
      const auto& p = plan.next();
      if (auto r = apply_rename(cur, p)) {
        EXPECT_FALSE(names_occurring(*r.renamed).count(p.from));
        cur = *r.renamed;
      }
    }
    ASSERT_EQ(parse(print(cur)), cur);
    ASSERT_TRUE(equivalent(u, cur, 6, 1).equivalent) << print(cur);
  }
}
