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

// Structure transformation stage: M seeded variants of the target, each
// rewritten with census-derived rule probabilities; keep the variant whose
// masked embedding is closest on average to the references.

#include <cstdint>
#include <string>
#include <vector>

#include "coda/embedding.hpp"
#include "coda/identifiers.hpp"
#include "coda/parser.hpp"
#include "coda/printer.hpp"
#include "coda/random.hpp"
#include "coda/reference.hpp"
#include "coda/rules.hpp"

namespace coda {

/// Census over the members that parse; the rest contribute nothing.
inline StructureCensus census(const ReferenceSet& refs) {
  StructureCensus c;
  for (const auto& m : refs.members) {
    try {
      c += census(parse(m.snippet.code));
    } catch (const ParseError&) {
    }
  }
  return c;
}

inline std::uint64_t variant_seed(std::uint64_t campaign_seed, const std::string& target_id,
                                  std::size_t variant) {
  return mix_seed({campaign_seed, fnv1a(target_id), static_cast<std::uint64_t>(variant)});
}

/// Mean cosine to every reference embedding; 0 for an empty set.
inline double mean_similarity(const EmbeddingVector& v, const std::vector<EmbeddingVector>& refs) {
  if (refs.empty()) return 0.0;
  double s = 0;
  for (const auto& r : refs) s += cosine(v, r);
  return s / static_cast<double>(refs.size());
}

struct EstOptions {
  bool guided = true;               // false: every enabled rule at `unguided_probability`
  double unguided_probability = 0.5;
  RuleMask enabled = all_rules();
};

struct EstResult {
  SourceUnit unit;
  std::vector<RuleId> applied;
  std::size_t variant = 0;
  double score = 0;
};

inline RuleProbabilities est_probabilities(const StructureCensus& c, const EstOptions& opts) {
  return opts.guided ? guided_probabilities(c, opts.enabled)
                     : uniform_probabilities(opts.unguided_probability, opts.enabled);
}

/// Generates M variants (variant v seeded from campaign seed, target id and
/// v) and returns the best by mean similarity, ties to the lowest index.
inline EstResult apply_est(const SourceUnit& target, const StructureCensus& c, std::size_t M,
                           std::uint64_t seed, const ReferenceSet& refs,
                           const SnippetEmbedder& provider, const EstOptions& opts = {}) {
  if (M < 1) throw Error("M must be at least 1");
  const RuleProbabilities probs = est_probabilities(c, opts);
  std::vector<RewriteResult> variants;
  variants.reserve(M);
  std::vector<TokenStream> masked;
  masked.reserve(M);
  for (std::size_t v = 0; v < M; ++v) {
    variants.push_back(apply_rules(target, probs, variant_seed(seed, refs.target_id, v)));
    masked.push_back(mask_identifiers(variants.back().unit));
  }
  const std::vector<EmbeddingVector> vecs = provider.embed_batch(masked);
  const std::vector<EmbeddingVector> ref_vecs = refs.embeddings();
  std::size_t best = 0;
  double best_score = mean_similarity(vecs[0], ref_vecs);
  for (std::size_t v = 1; v < M; ++v) {
    const double s = mean_similarity(vecs[v], ref_vecs);
    if (s > best_score) {
      best = v;
      best_score = s;
    }
  }
  return {std::move(variants[best].unit), std::move(variants[best].applied), best, best_score};
}

inline EstResult apply_est(const SourceUnit& target, std::size_t M, std::uint64_t seed,
                           const ReferenceSet& refs, const SnippetEmbedder& provider,
                           const EstOptions& opts = {}) {
  return apply_est(target, census(refs), M, seed, refs, provider, opts);
}

}  // namespace coda
