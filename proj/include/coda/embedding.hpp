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

#include <cmath>
#include <cstddef>
#include <fstream>
#include <istream>
#include <memory>
#include <sstream>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "coda/error.hpp"
#include "coda/lexer.hpp"
#include "coda/random.hpp"

namespace coda {

inline constexpr std::size_t kSnippetDimension = 512;
inline constexpr std::size_t kIdentifierDimension = 128;

struct EmbeddingVector {
  std::vector<double> values;

  EmbeddingVector() = default;
  explicit EmbeddingVector(std::vector<double> v) : values(std::move(v)) {}
  explicit EmbeddingVector(std::size_t dim) : values(dim, 0.0) {}

  std::size_t dimension() const { return values.size(); }
  double norm() const {
    double s = 0;
    for (double x : values) s += x * x;
    return std::sqrt(s);
  }
  void normalize() {
    const double n = norm();
    if (n > 0)
      for (double& x : values) x /= n;
  }
  friend bool operator==(const EmbeddingVector&, const EmbeddingVector&) = default;
};

/// Cosine similarity; 0 when either side is the zero vector.
inline double cosine(const EmbeddingVector& a, const EmbeddingVector& b) {
  if (a.dimension() != b.dimension())
    throw DimensionMismatch("cosine of dimensions " + std::to_string(a.dimension()) + " and " +
                            std::to_string(b.dimension()));
  double dot = 0, na = 0, nb = 0;
  for (std::size_t i = 0; i < a.values.size(); ++i) {
    dot += a.values[i] * b.values[i];
    na += a.values[i] * a.values[i];
    nb += b.values[i] * b.values[i];
  }
  if (na == 0 || nb == 0) return 0.0;
  const double c = dot / (std::sqrt(na) * std::sqrt(nb));
  return c > 1 ? 1.0 : (c < -1 ? -1.0 : c);
}

enum class ProviderKind { BuiltinNgram, ExternalService, PretrainedFile };

inline std::string to_string(ProviderKind k) {
  switch (k) {
    case ProviderKind::BuiltinNgram: return "builtin-ngram";
    case ProviderKind::ExternalService: return "external-service";
    case ProviderKind::PretrainedFile: return "pretrained-file";
  }
  return "?";
}

/// Embeds identifier-masked token streams.
class SnippetEmbedder {
 public:
  virtual ~SnippetEmbedder() = default;
  virtual ProviderKind kind() const = 0;
  virtual std::size_t dimension() const = 0;
  virtual EmbeddingVector embed(const TokenStream& tokens) const = 0;
  virtual std::vector<EmbeddingVector> embed_batch(const std::vector<TokenStream>& batch) const {
    std::vector<EmbeddingVector> out;
    out.reserve(batch.size());
    for (const auto& t : batch) out.push_back(embed(t));
    return out;
  }
};

/// Embeds identifier names.
class IdentifierEmbedder {
 public:
  virtual ~IdentifierEmbedder() = default;
  virtual ProviderKind kind() const = 0;
  virtual std::size_t dimension() const = 0;
  virtual EmbeddingVector embed(const std::string& name) const = 0;
};

/// Hashed term frequencies of token n-grams, L2-normalized.
class NgramSnippetEmbedder final : public SnippetEmbedder {
 public:
  explicit NgramSnippetEmbedder(std::size_t dimension = kSnippetDimension, int min_n = 1,
                                int max_n = 3)
      : dim_(dimension), min_n_(min_n), max_n_(max_n) {}

  ProviderKind kind() const override { return ProviderKind::BuiltinNgram; }
  std::size_t dimension() const override { return dim_; }

  EmbeddingVector embed(const TokenStream& tokens) const override {
    EmbeddingVector v = counts(tokens, dim_, min_n_, max_n_);
    v.normalize();
    return v;
  }

  /// Raw hashed n-gram counts of the significant tokens.
  static EmbeddingVector counts(const TokenStream& tokens, std::size_t dim, int min_n, int max_n) {
    std::vector<const std::string*> texts;
    texts.reserve(tokens.size());
    for (const auto& t : tokens)
      if (!t.trivia()) texts.push_back(&t.text);
    EmbeddingVector v(dim);
    std::string gram;
    for (int n = min_n; n <= max_n; ++n) {
      for (std::size_t i = 0; i + static_cast<std::size_t>(n) <= texts.size(); ++i) {
        gram.clear();
        for (int k = 0; k < n; ++k) {
          if (k) gram += '\x1f';
          gram += *texts[i + static_cast<std::size_t>(k)];
        }
        v.values[fnv1a(gram) % dim] += 1.0;
      }
    }
    return v;
  }

 private:
  std::size_t dim_;
  int min_n_;
  int max_n_;
};

/// Subword composition: character n-grams of `<name>` plus the whole word,
/// hashed into buckets, averaged and L2-normalized.
class CharNgramIdentifierEmbedder final : public IdentifierEmbedder {
 public:
  explicit CharNgramIdentifierEmbedder(std::size_t dimension = kIdentifierDimension,
                                       int min_n = 3, int max_n = 5)
      : dim_(dimension), min_n_(min_n), max_n_(max_n) {}

  ProviderKind kind() const override { return ProviderKind::BuiltinNgram; }
  std::size_t dimension() const override { return dim_; }

  EmbeddingVector embed(const std::string& name) const override {
    const std::string word = "<" + name + ">";
    EmbeddingVector v(dim_);
    std::size_t grams = 0;
    for (int n = min_n_; n <= max_n_; ++n) {
      for (std::size_t i = 0; i + static_cast<std::size_t>(n) <= word.size(); ++i) {
        v.values[fnv1a(std::string_view(word).substr(i, static_cast<std::size_t>(n))) % dim_] +=
            1.0;
        ++grams;
      }
    }
    // The whole word uses a separate hash family so "<ab>" the trigram and
    // "<ab>" the word do not always share a bucket.
    v.values[fnv1a(word, kWordBasis) % dim_] += 1.0;
    ++grams;
    for (double& x : v.values) x /= static_cast<double>(grams);
    v.normalize();
    return v;
  }

 private:
  static constexpr std::uint64_t kWordBasis = 0x84222325cbf29ce4ULL;
  std::size_t dim_;
  int min_n_;
  int max_n_;
};

/// Word vectors from a word2vec text file; out-of-vocabulary names use the
/// character n-gram embedder at the file's dimension.
class PretrainedIdentifierEmbedder final : public IdentifierEmbedder {
 public:
  static PretrainedIdentifierEmbedder load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw MalformedVectorFile("cannot open " + path);
    return from_stream(in);
  }

  static PretrainedIdentifierEmbedder from_stream(std::istream& in) {
    std::string line;
    if (!std::getline(in, line)) throw MalformedVectorFile("missing header");
    std::istringstream header(line);
    long long count = -1, dim = -1;
    std::string extra;
    if (!(header >> count >> dim) || (header >> extra) || count < 0 || dim <= 0)
      throw MalformedVectorFile("header must be '<count> <dim>'");
    PretrainedIdentifierEmbedder e(static_cast<std::size_t>(dim));
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
      ++lineno;
      if (!line.empty() && line.back() == '\r') line.pop_back();
      if (line.empty()) continue;
      std::istringstream row(line);
      std::string token;
      row >> token;
      std::vector<double> vals;
      vals.reserve(static_cast<std::size_t>(dim));
      std::string field;
      while (row >> field) {
        std::size_t used = 0;
        double x = 0;
        try {
          x = std::stod(field, &used);
        } catch (const std::exception&) {
          used = 0;
        }
        if (used != field.size() || !std::isfinite(x))
          throw MalformedVectorFile("line " + std::to_string(lineno) + ": bad number '" +
                                    field + "'");
        vals.push_back(x);
      }
      if (vals.size() != static_cast<std::size_t>(dim))
        throw MalformedVectorFile("line " + std::to_string(lineno) + ": expected " +
                                  std::to_string(dim) + " values, got " +
                                  std::to_string(vals.size()));
      e.table_[token] = EmbeddingVector(std::move(vals));
    }
    if (e.table_.size() != static_cast<std::size_t>(count))
      throw MalformedVectorFile("header declares " + std::to_string(count) + " rows, found " +
                                std::to_string(e.table_.size()));
    return e;
  }

  ProviderKind kind() const override { return ProviderKind::PretrainedFile; }
  std::size_t dimension() const override { return fallback_.dimension(); }

  EmbeddingVector embed(const std::string& name) const override {
    if (auto it = table_.find(name); it != table_.end()) return it->second;
    return fallback_.embed(name);
  }

  bool contains(const std::string& name) const { return table_.count(name) > 0; }
  std::size_t size() const { return table_.size(); }

 private:
  explicit PretrainedIdentifierEmbedder(std::size_t dim) : fallback_(dim) {}

  std::unordered_map<std::string, EmbeddingVector> table_;
  CharNgramIdentifierEmbedder fallback_;
};

inline EmbeddingVector embed_snippet(const TokenStream& tokens, const SnippetEmbedder& p) {
  return p.embed(tokens);
}

inline EmbeddingVector embed_identifier(const std::string& name, const IdentifierEmbedder& p) {
  if (name.empty()) throw Error("identifier name must be non-empty");
  return p.embed(name);
}

}  // namespace coda
