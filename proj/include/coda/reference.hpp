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

// Reference selection: training snippets of the runner-up class that the
// victim classifies correctly, sampled and ranked by masked similarity.

#include <algorithm>
#include <sstream>
#include <string>
#include <unordered_map>
#include <vector>

#include "coda/dataset.hpp"
#include "coda/embedding.hpp"
#include "coda/error.hpp"
#include "coda/identifiers.hpp"
#include "coda/model.hpp"
#include "coda/parser.hpp"
#include "coda/random.hpp"

namespace coda {

/// Index of the second-largest probability; ties go to the lower index.
inline std::size_t second_class(const PredictionVector& p) {
  if (p.num_classes() < 2) throw TooFewClasses("need at least two classes");
  const std::size_t first = p.argmax();
  std::size_t best = first == 0 ? 1 : 0;
  for (std::size_t i = 0; i < p.num_classes(); ++i)
    if (i != first && p[i] > p[best]) best = i;
  return best;
}

/// Classes ordered by descending probability, ties by lower index.
inline std::vector<std::size_t> classes_by_probability(const PredictionVector& p) {
  std::vector<std::size_t> order(p.num_classes());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return p[a] > p[b]; });
  return order;
}

/// Training snippets labelled `cj` whose cached prediction is also `cj`.
inline std::vector<LabeledSnippet> build_candidate_pool(const std::vector<LabeledSnippet>& train,
                                                        std::size_t cj,
                                                        const PredictionTable& predictions) {
  std::vector<LabeledSnippet> pool;
  for (const auto& s : train) {
    if (s.label != static_cast<int>(cj)) continue;
    auto it = predictions.find(s.id);
    if (it == predictions.end())
      throw Error("no cached prediction for training snippet " + s.id);
    if (it->second.argmax() == cj) pool.push_back(s);
  }
  if (pool.empty()) throw EmptyPool("no correctly predicted training snippet of class " +
                                    std::to_string(cj));
  return pool;
}

struct PoolChoice {
  std::size_t cls = 0;
  std::vector<LabeledSnippet> pool;
};

/// Pool for the runner-up class; with `fallback` set, an empty pool moves on
/// to the next most probable classes (never the predicted class itself).
inline PoolChoice choose_pool(const std::vector<LabeledSnippet>& train,
                              const PredictionVector& target_prediction,
                              const PredictionTable& predictions, bool fallback) {
  const std::size_t cj = second_class(target_prediction);
  try {
    return {cj, build_candidate_pool(train, cj, predictions)};
  } catch (const EmptyPool&) {
    if (!fallback) throw;
  }
  const auto order = classes_by_probability(target_prediction);
  for (std::size_t k = 2; k < order.size(); ++k) {
    try {
      return {order[k], build_candidate_pool(train, order[k], predictions)};
    } catch (const EmptyPool&) {
    }
  }
  throw EmptyPool("no class offers correctly predicted training snippets");
}

/// Significant tokens of `code` with user identifiers masked. Unparseable
/// text degrades to whitespace-separated words.
inline TokenStream masked_tokens(const std::string& code) {
  try {
    return mask_identifiers(parse(code));
  } catch (const ParseError&) {
    TokenStream out;
    std::istringstream in(code);
    std::string w;
    while (in >> w) out.push_back(Token{TokenKind::Identifier, kDefaultPlaceholder, {}});
    return out;
  }
}

/// Masked snippet embeddings, computed once per snippet id.
class EmbeddingIndex {
 public:
  EmbeddingIndex(const SnippetEmbedder& provider, const std::vector<LabeledSnippet>& snippets)
      : provider_(&provider) {
    std::vector<TokenStream> batch;
    batch.reserve(snippets.size());
    for (const auto& s : snippets) batch.push_back(masked_tokens(s.code));
    const auto vecs = provider.embed_batch(batch);
    for (std::size_t i = 0; i < snippets.size(); ++i) table_.emplace(snippets[i].id, vecs[i]);
  }

  const SnippetEmbedder& provider() const { return *provider_; }

  /// Embedding of a snippet; computed on the spot when not indexed.
  EmbeddingVector get(const LabeledSnippet& s) const {
    if (auto it = table_.find(s.id); it != table_.end()) return it->second;
    return provider_->embed(masked_tokens(s.code));
  }

 private:
  const SnippetEmbedder* provider_;
  std::unordered_map<std::string, EmbeddingVector> table_;
};

struct ReferenceMember {
  LabeledSnippet snippet;
  double similarity = 0;
  EmbeddingVector embedding;
};

struct ReferenceSet {
  std::string target_id;
  std::size_t second_class = 0;
  std::vector<ReferenceMember> members;

  std::vector<EmbeddingVector> embeddings() const {
    std::vector<EmbeddingVector> v;
    v.reserve(members.size());
    for (const auto& m : members) v.push_back(m.embedding);
    return v;
  }
};

namespace detail {

inline std::vector<ReferenceMember> rank_members(const EmbeddingVector& target,
                                                 const std::vector<const LabeledSnippet*>& chosen,
                                                 const EmbeddingIndex& index, std::size_t n) {
  std::vector<ReferenceMember> ranked;
  ranked.reserve(chosen.size());
  for (const auto* s : chosen) {
    EmbeddingVector e = index.get(*s);
    const double sim = cosine(target, e);
    ranked.push_back({*s, sim, std::move(e)});
  }
  std::sort(ranked.begin(), ranked.end(), [](const ReferenceMember& a, const ReferenceMember& b) {
    if (a.similarity != b.similarity) return a.similarity > b.similarity;
    return a.snippet.id < b.snippet.id;
  });
  if (ranked.size() > n) ranked.resize(n);
  return ranked;
}

}  // namespace detail

/// Samples min(U, |pool|) members uniformly without replacement, then keeps
/// the N most similar to the masked target (ties by id).
inline ReferenceSet select_references(const LabeledSnippet& target,
                                      const std::vector<LabeledSnippet>& pool, std::size_t cls,
                                      std::size_t U, std::size_t N, std::uint64_t seed,
                                      const EmbeddingIndex& index) {
  if (N < 1 || U < N) throw Error("reference selection requires U >= N >= 1");
  if (pool.empty()) throw EmptyPool("empty candidate pool");
  Rng rng(seed);
  std::vector<const LabeledSnippet*> chosen;
  for (std::size_t i : sample_indices(pool.size(), U, rng)) chosen.push_back(&pool[i]);
  const EmbeddingVector t = index.provider().embed(masked_tokens(target.code));
  return {target.id, cls, detail::rank_members(t, chosen, index, N)};
}

inline ReferenceSet select_references(const LabeledSnippet& target,
                                      const std::vector<LabeledSnippet>& pool, std::size_t cls,
                                      std::size_t U, std::size_t N, std::uint64_t seed,
                                      const SnippetEmbedder& provider) {
  const EmbeddingIndex index(provider, {});
  return select_references(target, pool, cls, U, N, seed, index);
}

/// N training snippets drawn uniformly regardless of class, ranked by
/// similarity. Stands in for the selection step in ablations.
inline ReferenceSet random_references(const LabeledSnippet& target,
                                      const std::vector<LabeledSnippet>& train, std::size_t N,
                                      std::uint64_t seed, const EmbeddingIndex& index) {
  Rng rng(seed);
  std::vector<const LabeledSnippet*> chosen;
  for (std::size_t i : sample_indices(train.size(), N, rng)) chosen.push_back(&train[i]);
  const EmbeddingVector t = index.provider().embed(masked_tokens(target.code));
  return {target.id, 0, detail::rank_members(t, chosen, index, N)};
}

}  // namespace coda
