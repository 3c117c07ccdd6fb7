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

#include <atomic>
#include <functional>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "coda/embedding.hpp"
#include "coda/model.hpp"
#include "coda/random.hpp"

namespace stubs {

/// Identifier vectors from a table. Unknown names map to a hashed one-hot
/// in the upper half, orthogonal to every table entry.
class TableIdentifierEmbedder final : public coda::IdentifierEmbedder {
 public:
  TableIdentifierEmbedder(std::size_t dim, std::map<std::string, std::vector<double>> table)
      : dim_(dim), table_(std::move(table)) {}

  coda::ProviderKind kind() const override { return coda::ProviderKind::PretrainedFile; }
  std::size_t dimension() const override { return dim_; }
  coda::EmbeddingVector embed(const std::string& name) const override {
    coda::EmbeddingVector v(dim_);
    if (auto it = table_.find(name); it != table_.end()) {
      for (std::size_t i = 0; i < it->second.size() && i < dim_; ++i) v.values[i] = it->second[i];
    } else {
      const std::size_t half = dim_ / 2;
      v.values[half + coda::fnv1a(name) % (dim_ - half)] = 1.0;
    }
    return v;
  }

 private:
  std::size_t dim_;
  std::map<std::string, std::vector<double>> table_;
};

/// Victim driven by a function of the code; counts raw backend calls.
class FunctionBackend final : public coda::Backend {
 public:
  using Fn = std::function<std::vector<double>(const std::string&)>;
  explicit FunctionBackend(Fn fn, std::string name = "stub") : fn_(std::move(fn)), name_(std::move(name)) {}

  std::vector<coda::PredictionVector> predict(const std::vector<std::string>& snippets) override {
    std::vector<coda::PredictionVector> out;
    for (const auto& s : snippets) {
      ++calls;
      out.push_back(coda::PredictionVector{fn_(s)});
    }
    return out;
  }
  std::string fingerprint() const override { return name_; }

  std::atomic<std::size_t> calls{0};

 private:
  Fn fn_;
  std::string name_;
};

}  // namespace stubs
