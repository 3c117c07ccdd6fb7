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

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <semaphore>
#include <sstream>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include <json.hpp>

#include "coda/dataset.hpp"
#include "coda/embedding.hpp"
#include "coda/error.hpp"
#include "coda/lexer.hpp"
#include "coda/random.hpp"

namespace coda {

inline constexpr double kProbabilityTolerance = 1e-6;

struct PredictionVector {
  std::vector<double> probs;

  std::size_t num_classes() const { return probs.size(); }
  double operator[](std::size_t i) const { return probs[i]; }

  /// Index of the largest probability; ties go to the lower index.
  std::size_t argmax() const {
    std::size_t best = 0;
    for (std::size_t i = 1; i < probs.size(); ++i)
      if (probs[i] > probs[best]) best = i;
    return best;
  }
  friend bool operator==(const PredictionVector&, const PredictionVector&) = default;
};

/// Checks the probability-vector contract; `expected` = 0 accepts any arity.
inline PredictionVector validate_prediction(std::vector<double> probs, std::size_t expected = 0) {
  if (probs.empty()) throw MalformedResponse("empty probability vector");
  if (expected && probs.size() != expected)
    throw MalformedResponse("expected " + std::to_string(expected) + " classes, got " +
                            std::to_string(probs.size()));
  double sum = 0;
  for (double p : probs) {
    if (!std::isfinite(p) || p < 0 || p > 1)
      throw MalformedResponse("probability out of [0, 1]: " + std::to_string(p));
    sum += p;
  }
  if (std::fabs(sum - 1.0) > kProbabilityTolerance)
    throw MalformedResponse("probabilities sum to " + std::to_string(sum));
  return PredictionVector{std::move(probs)};
}

/// Parses a JSON array of probability vectors, one per snippet.
inline std::vector<PredictionVector> decode_probabilities(const nlohmann::json& reply,
                                                          std::size_t expected_rows,
                                                          std::size_t expected_classes = 0) {
  if (!reply.is_object() || !reply.contains("probabilities") ||
      !reply["probabilities"].is_array())
    throw MalformedResponse("reply lacks a \"probabilities\" array");
  const auto& rows = reply["probabilities"];
  if (rows.size() != expected_rows)
    throw MalformedResponse("expected " + std::to_string(expected_rows) + " rows, got " +
                            std::to_string(rows.size()));
  std::vector<PredictionVector> out;
  out.reserve(rows.size());
  for (const auto& row : rows) {
    if (!row.is_array()) throw MalformedResponse("probability row is not an array");
    std::vector<double> probs;
    for (const auto& x : row) {
      if (!x.is_number()) throw MalformedResponse("non-numeric probability");
      probs.push_back(x.get<double>());
    }
    out.push_back(validate_prediction(std::move(probs), expected_classes));
  }
  return out;
}

/// A victim model. Implementations must tolerate concurrent calls.
class Backend {
 public:
  virtual ~Backend() = default;
  virtual std::vector<PredictionVector> predict(const std::vector<std::string>& snippets) = 0;
  /// Identifies the model for on-disk cache keys.
  virtual std::string fingerprint() const = 0;
};

// ---- builtin surrogate -----------------------------------------------------

struct SurrogateOptions {
  std::size_t dimension = 4096;
  double temperature = 4.0;
};

/// Hashed unigram and bigram counts of the raw significant tokens.
/// Unlexable text falls back to whitespace splitting.
inline EmbeddingVector surrogate_features(const std::string& code, std::size_t dimension) {
  TokenStream toks;
  try {
    toks = lex(code);
  } catch (const ParseError&) {
    std::istringstream in(code);
    std::string w;
    while (in >> w) toks.push_back(Token{TokenKind::Identifier, w, {}});
  }
  return NgramSnippetEmbedder::counts(toks, dimension, 1, 2);
}

/// Nearest-centroid classifier; probabilities are a softmax of negative
/// squared Euclidean distances divided by the temperature. Features no
/// centroid uses shift every distance equally and so leave it unchanged.
class SurrogateModel final : public Backend {
 public:
  SurrogateModel(std::vector<EmbeddingVector> centroids, SurrogateOptions opts)
      : centroids_(std::move(centroids)), opts_(opts) {}

  const std::vector<EmbeddingVector>& centroids() const { return centroids_; }
  const SurrogateOptions& options() const { return opts_; }
  std::size_t num_classes() const { return centroids_.size(); }

  PredictionVector predict_one(const std::string& code) const {
    const EmbeddingVector f = surrogate_features(code, opts_.dimension);
    std::vector<double> logits(centroids_.size());
    for (std::size_t c = 0; c < centroids_.size(); ++c) {
      double d2 = 0;
      for (std::size_t i = 0; i < f.values.size(); ++i) {
        const double d = f.values[i] - centroids_[c].values[i];
        d2 += d * d;
      }
      logits[c] = -d2 / opts_.temperature;
    }
    const double mx = *std::max_element(logits.begin(), logits.end());
    double z = 0;
    for (double& l : logits) z += (l = std::exp(l - mx));
    for (double& l : logits) l /= z;
    return PredictionVector{std::move(logits)};
  }

  std::vector<PredictionVector> predict(const std::vector<std::string>& snippets) override {
    std::vector<PredictionVector> out;
    out.reserve(snippets.size());
    for (const auto& s : snippets) out.push_back(predict_one(s));
    return out;
  }

  std::string fingerprint() const override {
    std::uint64_t h = kFnvOffsetBasis;
    char buf[32];
    for (const auto& c : centroids_)
      for (double x : c.values) {
        std::snprintf(buf, sizeof buf, "%.17g,", x);
        h = fnv1a(buf, h);
      }
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return "surrogate:" + std::string(buf) + ":" + std::to_string(opts_.temperature);
  }

 private:
  std::vector<EmbeddingVector> centroids_;
  SurrogateOptions opts_;
};

/// Centroid per class = mean feature vector of its training snippets.
inline SurrogateModel train_surrogate(const std::vector<LabeledSnippet>& train, int num_classes,
                                      SurrogateOptions opts = {}) {
  if (num_classes < 1) throw MissingClass("at least one class is required");
  std::vector<EmbeddingVector> centroids(static_cast<std::size_t>(num_classes),
                                         EmbeddingVector(opts.dimension));
  std::vector<std::size_t> counts(static_cast<std::size_t>(num_classes), 0);
  for (const auto& s : train) {
    if (s.label < 0 || s.label >= num_classes)
      throw MissingClass("label " + std::to_string(s.label) + " outside [0, " +
                         std::to_string(num_classes) + ")");
    const EmbeddingVector f = surrogate_features(s.code, opts.dimension);
    auto& c = centroids[static_cast<std::size_t>(s.label)];
    for (std::size_t i = 0; i < f.values.size(); ++i) c.values[i] += f.values[i];
    ++counts[static_cast<std::size_t>(s.label)];
  }
  for (std::size_t c = 0; c < centroids.size(); ++c) {
    if (counts[c] == 0) throw MissingClass("class " + std::to_string(c) + " has no training snippet");
    for (double& x : centroids[c].values) x /= static_cast<double>(counts[c]);
  }
  return SurrogateModel(std::move(centroids), opts);
}

// ---- prediction cache file -------------------------------------------------

using PredictionTable = std::map<std::string, PredictionVector>;

inline PredictionTable read_prediction_cache(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IOError("cannot open prediction cache " + path);
  PredictionTable t;
  std::string line;
  std::size_t n = 0;
  while (std::getline(in, line)) {
    ++n;
    if (line.empty()) continue;
    try {
      const auto j = nlohmann::json::parse(line);
      t[j.at("id").get<std::string>()] =
          validate_prediction(j.at("probs").get<std::vector<double>>());
    } catch (const std::exception& e) {
      throw IOError("prediction cache " + path + " line " + std::to_string(n) + ": " + e.what());
    }
  }
  return t;
}

inline void write_prediction_cache(const std::string& path, const PredictionTable& t) {
  const std::filesystem::path p(path);
  if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp);
    if (!out) throw IOError("cannot write prediction cache " + tmp);
    for (const auto& [id, pv] : t) {
      nlohmann::ordered_json j;
      j["id"] = id;
      j["probs"] = pv.probs;
      out << j.dump() << '\n';
    }
    if (!out) throw IOError("write failed for " + tmp);
  }
  std::filesystem::rename(tmp, path);
}

/// Cache file location for a (model, training set) pair inside `dir`.
inline std::string prediction_cache_path(const std::string& dir, const std::string& fingerprint,
                                         const std::vector<LabeledSnippet>& train) {
  std::uint64_t h = fnv1a(fingerprint);
  for (const auto& s : train) {
    h = fnv1a(s.id, h);
    h = fnv1a(std::string_view("\0", 1), h);
    h = fnv1a(s.code, h);
    h = fnv1a(std::string_view("\0", 1), h);
  }
  char buf[24];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return (std::filesystem::path(dir) / ("predictions-" + std::string(buf) + ".jsonl")).string();
}

// ---- client ----------------------------------------------------------------

struct ClientOptions {
  std::size_t batch_size = 32;
  std::ptrdiff_t max_in_flight = 8;
  bool cache = true;
};

struct InvocationCounter {
  std::map<std::string, std::size_t> per_target;
  std::size_t setup = 0;  // training-set predictions held in the setup cache

  std::size_t campaign_total() const {
    std::size_t t = setup;
    for (const auto& [_, n] : per_target) t += n;
    return t;
  }
};

/// Counts and caches victim invocations. Training-set predictions live in a
/// campaign-wide setup cache built once before any attack; per-target
/// predictions go through a Session whose cache is private to that target,
/// so invocation counts do not depend on how targets are scheduled.
class ModelClient {
 public:
  explicit ModelClient(std::shared_ptr<Backend> backend, ClientOptions opts = {})
      : backend_(std::move(backend)), opts_(opts), in_flight_(std::max<std::ptrdiff_t>(1, opts.max_in_flight)) {}

  Backend& backend() { return *backend_; }

  /// Predicts every training snippet once, reusing `cache_file` when it
  /// exists and rewriting it afterwards. Empty path disables the disk cache.
  void prepare_setup(const std::vector<LabeledSnippet>& train, const std::string& cache_file = "") {
    PredictionTable disk;
    if (!cache_file.empty() && std::filesystem::exists(cache_file)) {
      try {
        disk = read_prediction_cache(cache_file);
      } catch (const IOError&) {
        disk.clear();  // unreadable cache is rebuilt
      }
    }
    std::vector<const LabeledSnippet*> missing;
    for (const auto& s : train)
      if (!disk.count(s.id)) missing.push_back(&s);
    std::vector<std::string> codes;
    codes.reserve(missing.size());
    for (const auto* s : missing) codes.push_back(s->code);
    const std::vector<PredictionVector> fresh = call_backend(codes);
    for (std::size_t i = 0; i < missing.size(); ++i) disk[missing[i]->id] = fresh[i];

    std::lock_guard<std::mutex> lock(mu_);
    setup_invocations_ += missing.size();
    for (const auto& s : train) {
      const PredictionVector& pv = disk.at(s.id);
      setup_by_id_[s.id] = pv;
      setup_by_code_.emplace(s.code, pv);
    }
    if (!cache_file.empty() && !missing.empty()) {
      PredictionTable keep;
      for (const auto& s : train) keep[s.id] = disk.at(s.id);
      write_prediction_cache(cache_file, keep);
    }
  }

  /// Setup prediction of a training snippet; nullptr when not prepared.
  const PredictionVector* setup_prediction(const std::string& id) const {
    std::lock_guard<std::mutex> lock(mu_);
    auto it = setup_by_id_.find(id);
    return it == setup_by_id_.end() ? nullptr : &it->second;
  }

  /// Setup predictions keyed by snippet id. Stable once prepare_setup returns.
  const PredictionTable& setup_table() const { return setup_by_id_; }

  /// Backend calls made while preparing the setup cache (0 on a disk hit).
  std::size_t setup_invocations() const {
    std::lock_guard<std::mutex> lock(mu_);
    return setup_invocations_;
  }

  class Session {
   public:
    /// One fault check. Served from this target's cache or the setup cache
    /// when the exact code string was predicted before.
    PredictionVector predict(const std::string& code) {
      ++checks_;
      if (client_->opts_.cache) {
        if (auto it = cache_.find(code); it != cache_.end()) {
          ++hits_;
          return it->second;
        }
        if (auto pv = client_->setup_by_code(code)) {
          ++hits_;
          cache_.emplace(code, *pv);
          return *pv;
        }
      }
      PredictionVector pv = client_->call_backend({code}).front();
      ++invocations_;
      client_->record(target_, 1);
      if (client_->opts_.cache) cache_.emplace(code, pv);
      return pv;
    }

    std::size_t invocations() const { return invocations_; }
    std::size_t cache_hits() const { return hits_; }
    std::size_t checks() const { return checks_; }
    const std::string& target() const { return target_; }

   private:
    friend class ModelClient;
    Session(ModelClient* c, std::string target) : client_(c), target_(std::move(target)) {
      client_->record(target_, 0);
    }
    ModelClient* client_;
    std::string target_;
    std::unordered_map<std::string, PredictionVector> cache_;
    std::size_t invocations_ = 0;
    std::size_t hits_ = 0;
    std::size_t checks_ = 0;
  };

  Session session(const std::string& target_id) { return Session(this, target_id); }

  InvocationCounter counter() const {
    std::lock_guard<std::mutex> lock(mu_);
    InvocationCounter c;
    c.per_target = per_target_;
    c.setup = setup_by_id_.size();
    return c;
  }

  /// Batched, throttled backend call with arity and class-count checks.
  std::vector<PredictionVector> call_backend(const std::vector<std::string>& codes) {
    std::vector<PredictionVector> out;
    out.reserve(codes.size());
    const std::size_t bs = std::max<std::size_t>(1, opts_.batch_size);
    for (std::size_t start = 0; start < codes.size(); start += bs) {
      const std::vector<std::string> batch(
          codes.begin() + static_cast<std::ptrdiff_t>(start),
          codes.begin() + static_cast<std::ptrdiff_t>(std::min(codes.size(), start + bs)));
      in_flight_.acquire();
      std::vector<PredictionVector> got;
      try {
        got = backend_->predict(batch);
      } catch (...) {
        in_flight_.release();
        throw;
      }
      in_flight_.release();
      if (got.size() != batch.size())
        throw MalformedResponse("backend returned " + std::to_string(got.size()) +
                                " predictions for " + std::to_string(batch.size()) + " snippets");
      for (auto& pv : got) {
        validate_prediction(pv.probs, classes_seen(pv.num_classes()));
        out.push_back(std::move(pv));
      }
    }
    return out;
  }

 private:
  std::shared_ptr<Backend> backend_;
  ClientOptions opts_;
  std::counting_semaphore<> in_flight_;
  mutable std::mutex mu_;
  std::size_t num_classes_ = 0;
  std::size_t setup_invocations_ = 0;
  std::map<std::string, std::size_t> per_target_;
  PredictionTable setup_by_id_;
  std::unordered_map<std::string, PredictionVector> setup_by_code_;

  std::size_t classes_seen(std::size_t n) {
    std::lock_guard<std::mutex> lock(mu_);
    if (num_classes_ == 0) num_classes_ = n;
    return num_classes_;
  }

  void record(const std::string& target, std::size_t n) {
    std::lock_guard<std::mutex> lock(mu_);
    per_target_[target] += n;
  }

  std::optional<PredictionVector> setup_by_code(const std::string& code) const {
    std::lock_guard<std::mutex> lock(mu_);
    auto it = setup_by_code_.find(code);
    if (it == setup_by_code_.end()) return std::nullopt;
    return it->second;
  }
};

}  // namespace coda
