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

// External embedding service: POST /embed {"texts": [...]} ->
// {"vectors": [[...], ...]}. Snippets are sent as their significant token
// texts joined by single spaces.

#include <algorithm>
#include <cmath>
#include <mutex>
#include <string>
#include <unordered_map>
#include <vector>

#include "coda/embedding.hpp"
#include "coda/error.hpp"
#include "coda/http.hpp"

namespace coda {

class HttpEmbeddingProvider final : public SnippetEmbedder, public IdentifierEmbedder {
 public:
  HttpEmbeddingProvider(const std::string& url, std::size_t dimension, HttpOptions opts = {},
                        std::size_t batch_size = 32)
      : endpoint_(parse_endpoint(url, "/embed")),
        dim_(dimension),
        opts_(opts),
        batch_size_(std::max<std::size_t>(1, batch_size)) {}

  ProviderKind kind() const override { return ProviderKind::ExternalService; }
  std::size_t dimension() const override { return dim_; }

  EmbeddingVector embed(const TokenStream& tokens) const override {
    return embed_texts({join(tokens)}).front();
  }

  std::vector<EmbeddingVector> embed_batch(const std::vector<TokenStream>& batch) const override {
    std::vector<std::string> texts;
    texts.reserve(batch.size());
    for (const auto& t : batch) texts.push_back(join(t));
    return embed_texts(texts);
  }

  EmbeddingVector embed(const std::string& name) const override {
    return embed_texts({name}).front();
  }

  /// Requests sent so far (one per batch).
  std::size_t requests() const {
    std::lock_guard<std::mutex> lock(mu_);
    return requests_;
  }

  std::vector<EmbeddingVector> embed_texts(const std::vector<std::string>& texts) const {
    std::vector<EmbeddingVector> out(texts.size());
    std::vector<std::size_t> missing;
    {
      std::lock_guard<std::mutex> lock(mu_);
      for (std::size_t i = 0; i < texts.size(); ++i) {
        if (auto it = cache_.find(texts[i]); it != cache_.end())
          out[i] = it->second;
        else
          missing.push_back(i);
      }
    }
    for (std::size_t start = 0; start < missing.size(); start += batch_size_) {
      const std::size_t end = std::min(missing.size(), start + batch_size_);
      nlohmann::json body;
      body["texts"] = nlohmann::json::array();
      for (std::size_t k = start; k < end; ++k) body["texts"].push_back(texts[missing[k]]);
      const nlohmann::json reply = post_json<ProviderUnavailable>(endpoint_, body, opts_);
      const std::vector<EmbeddingVector> vecs = decode(reply, end - start);
      std::lock_guard<std::mutex> lock(mu_);
      ++requests_;
      for (std::size_t k = start; k < end; ++k) {
        out[missing[k]] = vecs[k - start];
        cache_.emplace(texts[missing[k]], vecs[k - start]);
      }
    }
    return out;
  }

 private:
  Endpoint endpoint_;
  std::size_t dim_;
  HttpOptions opts_;
  std::size_t batch_size_;
  mutable std::mutex mu_;
  mutable std::unordered_map<std::string, EmbeddingVector> cache_;
  mutable std::size_t requests_ = 0;

  static std::string join(const TokenStream& tokens) {
    std::string s;
    for (const auto& t : tokens) {
      if (t.trivia()) continue;
      if (!s.empty()) s += ' ';
      s += t.text;
    }
    return s;
  }

  std::vector<EmbeddingVector> decode(const nlohmann::json& reply, std::size_t expected) const {
    if (!reply.is_object() || !reply.contains("vectors") || !reply["vectors"].is_array())
      throw ProviderUnavailable("reply lacks a \"vectors\" array");
    const auto& vs = reply["vectors"];
    if (vs.size() != expected)
      throw ProviderUnavailable("expected " + std::to_string(expected) + " vectors, got " +
                                std::to_string(vs.size()));
    std::vector<EmbeddingVector> out;
    out.reserve(expected);
    for (const auto& v : vs) {
      if (!v.is_array() || v.size() != dim_)
        throw ProviderUnavailable("vector of wrong shape, expected dimension " +
                                  std::to_string(dim_));
      std::vector<double> vals;
      vals.reserve(dim_);
      for (const auto& x : v) {
        if (!x.is_number() || !std::isfinite(x.get<double>()))
          throw ProviderUnavailable("non-numeric vector entry");
        vals.push_back(x.get<double>());
      }
      out.emplace_back(std::move(vals));
    }
    return out;
  }
};

}  // namespace coda
