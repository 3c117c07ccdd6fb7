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

#include <cmath>
#include <sstream>
#include <string>
#include <vector>

#include "coda/embedding.hpp"
#include "coda/http_embedding.hpp"
#include "coda/identifiers.hpp"
#include "coda/lexer.hpp"
#include "coda/parser.hpp"
#include "coda/reference.hpp"
#include "support/fixtures.hpp"
#include "support/http_server.hpp"
#include "support/program_gen.hpp"

using namespace coda;

namespace {

double naive_cosine(const std::vector<double>& a, const std::vector<double>& b) {
  double dot = 0, na = 0, nb = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    dot += a[i] * b[i];
    na += a[i] * a[i];
    nb += b[i] * b[i];
  }
  return dot / std::sqrt(na * nb);
}

}  // namespace

TEST(Cosine, MatchesDirectFormula) {
  Rng rng(5);
  for (int t = 0; t < 100; ++t) {
    std::vector<double> a(7), b(7);
    for (auto& x : a) x = rng.uniform() * 2 - 1;
    for (auto& x : b) x = rng.uniform() * 2 - 1;
    EXPECT_NEAR(cosine(EmbeddingVector(a), EmbeddingVector(b)), naive_cosine(a, b), 1e-12);
  }
}

TEST(Cosine, ZeroVectorAndMismatch) {
  EXPECT_EQ(cosine(EmbeddingVector(3), EmbeddingVector(std::vector<double>{1, 2, 3})), 0.0);
  EXPECT_THROW(cosine(EmbeddingVector(3), EmbeddingVector(4)), DimensionMismatch);
  const EmbeddingVector v(std::vector<double>{0.3, -2, 5});
  EXPECT_DOUBLE_EQ(cosine(v, v), 1.0);
}

TEST(NgramEmbedder, NormalizedAndDeterministic) {
  const NgramSnippetEmbedder e;
  EXPECT_EQ(e.dimension(), kSnippetDimension);
  const auto a = e.embed(lex(fixtures::kF1));
  EXPECT_NEAR(a.norm(), 1.0, 1e-12);
  EXPECT_EQ(a, e.embed(lex(fixtures::kF1)));
}

TEST(NgramEmbedder, IgnoresTrivia) {
  const NgramSnippetEmbedder e;
  EXPECT_EQ(e.embed(lex("int x = 1; // note\n")), e.embed(lex("int   x=1;")));
}

TEST(NgramEmbedder, CountsOracle) {
  // "a b a": unigrams a:2 b:1, bigrams (a,b) (b,a).
  const auto v = NgramSnippetEmbedder::counts(lex("a b a"), 64, 1, 2);
  std::vector<double> want(64, 0.0);
  want[fnv1a("a") % 64] += 2;
  want[fnv1a("b") % 64] += 1;
  want[fnv1a(std::string("a\x1f") + "b") % 64] += 1;
  want[fnv1a(std::string("b\x1f") + "a") % 64] += 1;
  EXPECT_EQ(v.values, want);
}

TEST(NgramEmbedder, MaskedSimilarityIgnoresNames) {
  const NgramSnippetEmbedder e;
  const auto u = parse(fixtures::kF1);
  const auto renamed = rename_identifier(rename_identifier(u, "a", "t"), "n", "len");
  EXPECT_DOUBLE_EQ(cosine(e.embed(mask_identifiers(u)), e.embed(mask_identifiers(renamed))), 1.0);
  EXPECT_LT(cosine(e.embed(mask_identifiers(u)), e.embed(mask_identifiers(parse(fixtures::kF2)))),
            1.0);
}

TEST(CharNgramEmbedder, SharedSubwordsAreCloser) {
  const CharNgramIdentifierEmbedder e;
  EXPECT_NEAR(e.embed("length").norm(), 1.0, 1e-12);
  EXPECT_GT(cosine(e.embed("length"), e.embed("len")), cosine(e.embed("length"), e.embed("qz")));
  EXPECT_DOUBLE_EQ(cosine(e.embed("count"), e.embed("count")), 1.0);
  EXPECT_THROW(embed_identifier("", e), Error);
}

TEST(PretrainedEmbedder, LoadsTableAndFallsBack) {
  std::istringstream in("2 3\nlen 1 0 0\nsize 0.5 0.5 0\n");
  const auto p = PretrainedIdentifierEmbedder::from_stream(in);
  EXPECT_EQ(p.size(), 2u);
  EXPECT_EQ(p.dimension(), 3u);
  EXPECT_EQ(p.embed("len").values, (std::vector<double>{1, 0, 0}));
  EXPECT_FALSE(p.contains("other"));
  EXPECT_EQ(p.embed("other").dimension(), 3u);
}

TEST(PretrainedEmbedder, RejectsMalformedFiles) {
  for (const char* text : {"", "x 3\n", "1 2\nfoo 1\n", "1 2\nfoo 1 abc\n", "2 2\nfoo 1 2\n"}) {
    std::istringstream in(text);
    EXPECT_THROW(PretrainedIdentifierEmbedder::from_stream(in), MalformedVectorFile) << text;
  }
  EXPECT_THROW(PretrainedIdentifierEmbedder::load("/nonexistent/vectors.txt"), MalformedVectorFile);
}

TEST(HttpEmbedding, BatchesAndCaches) {
  std::vector<std::size_t> sizes;
  stubs::LocalServer srv("/embed", [&](const httplib::Request& req, httplib::Response& res) {
    const auto body = nlohmann::json::parse(req.body);
    sizes.push_back(body.at("texts").size());
    nlohmann::json vs = nlohmann::json::array();
    for (const auto& t : body["texts"]) vs.push_back({double(t.get<std::string>().size()), 1.0});
    stubs::LocalServer::reply(res, {{"vectors", vs}});
  });
  HttpEmbeddingProvider p(srv.url(), 2, {}, 2);
  EXPECT_EQ(p.kind(), ProviderKind::ExternalService);
  const auto v = p.embed_texts({"ab", "abc", "abcd", "ab"});
  ASSERT_EQ(v.size(), 4u);
  EXPECT_EQ(v[2].values, (std::vector<double>{4, 1}));
  EXPECT_EQ(v[0], v[3]);
  // "ab" twice in one call is sent twice; the cache serves later calls
  EXPECT_EQ(sizes, (std::vector<std::size_t>{2, 2}));
  p.embed_texts({"abc"});
  EXPECT_EQ(p.requests(), 2u);
  // token streams are sent as significant tokens joined by spaces
  EXPECT_EQ(p.embed(lex("a  +b // c")).values, (std::vector<double>{5, 1}));
}

TEST(HttpEmbedding, WrongShapeIsProviderError) {
  stubs::LocalServer srv("/embed", [](const httplib::Request&, httplib::Response& res) {
    stubs::LocalServer::reply(res, {{"vectors", {{1.0, 2.0, 3.0}}}});
  });
  HttpEmbeddingProvider p(srv.url(), 2);
  EXPECT_THROW(p.embed("x"), ProviderUnavailable);
}

TEST(HttpEmbedding, ServerErrorsAreRetriedThenReported) {
  stubs::LocalServer srv("/embed", [](const httplib::Request&, httplib::Response& res) {
    stubs::LocalServer::reply(res, {{"error", "busy"}}, 503);
  });
  HttpEmbeddingProvider p(srv.url(), 2, HttpOptions{.retries = 2, .timeout_ms = 2000, .backoff_ms = 1});
  EXPECT_THROW(p.embed("x"), ProviderUnavailable);
  EXPECT_EQ(srv.hits.load(), 3);
}
