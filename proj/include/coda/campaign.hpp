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

// Per-target attack pipeline (reference selection, structure rewriting,
// renaming) and campaign-wide aggregation.

#include <atomic>
#include <chrono>
#include <cstdint>
#include <cstdlib>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <thread>
#include <unordered_map>
#include <utility>
#include <vector>

#include "coda/dataset.hpp"
#include "coda/embedding.hpp"
#include "coda/error.hpp"
#include "coda/est.hpp"
#include "coda/identifiers.hpp"
#include "coda/irt.hpp"
#include "coda/model.hpp"
#include "coda/model_remote.hpp"
#include "coda/parser.hpp"
#include "coda/printer.hpp"
#include "coda/random.hpp"
#include "coda/reference.hpp"
#include "coda/rules.hpp"

namespace coda {

enum class Strategy { Coda, NoRis, NoEst, NoCdg, NoIrt, RandomBaseline };

inline const std::vector<Strategy>& all_strategies() {
  static const std::vector<Strategy> s = {Strategy::Coda,  Strategy::NoRis, Strategy::NoEst,
                                          Strategy::NoCdg, Strategy::NoIrt, Strategy::RandomBaseline};
  return s;
}

inline std::string to_string(Strategy s) {
  switch (s) {
    case Strategy::Coda: return "coda";
    case Strategy::NoRis: return "no-ris";
    case Strategy::NoEst: return "no-est";
    case Strategy::NoCdg: return "no-cdg";
    case Strategy::NoIrt: return "no-irt";
    case Strategy::RandomBaseline: return "random-baseline";
  }
  return "?";
}

inline Strategy strategy_from_string(const std::string& s) {
  for (Strategy x : all_strategies())
    if (to_string(x) == s) return x;
  throw Error("unknown strategy '" + s + "'");
}

enum class AttackStatus { FaultRevealed, Exhausted, SkippedMispredicted, NoReferences, Failed };

inline std::string to_string(AttackStatus s) {
  switch (s) {
    case AttackStatus::FaultRevealed: return "fault-revealed";
    case AttackStatus::Exhausted: return "exhausted";
    case AttackStatus::SkippedMispredicted: return "skipped-mispredicted";
    case AttackStatus::NoReferences: return "no-references";
    case AttackStatus::Failed: return "error";
  }
  return "?";
}

inline AttackStatus status_from_string(const std::string& s) {
  for (AttackStatus x : {AttackStatus::FaultRevealed, AttackStatus::Exhausted,
                         AttackStatus::SkippedMispredicted, AttackStatus::NoReferences,
                         AttackStatus::Failed})
    if (to_string(x) == s) return x;
  throw Error("unknown status '" + s + "'");
}

/// Targets that count towards the revealed-fault rate: correctly predicted
/// initially and attacked to completion.
inline bool counts_as_attacked(AttackStatus s) {
  return s == AttackStatus::FaultRevealed || s == AttackStatus::Exhausted ||
         s == AttackStatus::NoReferences;
}

struct BackendConfig {
  enum class Kind { Surrogate, Http, Stdio };
  Kind kind = Kind::Surrogate;
  std::string target;  // URL or command line
  int retries = 2;
  std::size_t batch_size = 32;
};

inline std::string describe(const BackendConfig& b) {
  switch (b.kind) {
    case BackendConfig::Kind::Surrogate: return "surrogate";
    case BackendConfig::Kind::Http: return "http " + b.target;
    case BackendConfig::Kind::Stdio: return "stdio " + b.target;
  }
  return "?";
}

inline constexpr const char* kCacheDirEnv = "CODA_CACHE_DIR";
inline constexpr const char* kDefaultCacheDir = ".coda-cache";

struct CampaignConfig {
  std::size_t U = 256;
  std::size_t N = 64;
  std::size_t M = 64;
  std::uint64_t seed = 0;
  Strategy strategy = Strategy::Coda;
  BackendConfig backend;
  std::string dataset_path;
  std::string out_path;
  // nullopt: CODA_CACHE_DIR, else .coda-cache. Empty string disables it.
  std::optional<std::string> cache_dir;
  std::size_t parallelism = 1;
  bool irt_revert = false;
  bool pool_fallback = false;
  RuleMask rules = all_rules();

  void validate() const {
    if (N < 1 || U < N) throw Error("configuration requires U >= N >= 1");
    if (M < 1) throw Error("configuration requires M >= 1");
  }

  std::string resolved_cache_dir() const {
    if (cache_dir) return *cache_dir;
    if (const char* env = std::getenv(kCacheDirEnv); env && *env) return env;
    return kDefaultCacheDir;
  }
};

struct AppliedRename {
  std::string from;
  std::string to;
  friend bool operator==(const AppliedRename&, const AppliedRename&) = default;
};

struct AttackResult {
  std::string target_id;
  int label = 0;
  AttackStatus status = AttackStatus::Exhausted;
  std::optional<std::string> adversarial_code;
  // Checked variant with the lowest ground-truth confidence.
  std::optional<std::string> best_variant_code;
  double pcd = 0;
  double initial_confidence = 0;
  std::size_t invocations = 0;
  std::size_t checks = 0;
  std::size_t cache_hits = 0;
  std::vector<RuleId> applied_rules;
  std::vector<AppliedRename> applied_renames;
  std::string error;
};

// ---- shared per-campaign state -----------------------------------------------

struct TrainFacts {
  StructureCensus census;
  std::vector<std::string> identifiers;
};

/// Read-only state shared by every attack of a campaign.
class AttackContext {
 public:
  AttackContext(std::vector<LabeledSnippet> train, ModelClient& client,
                const SnippetEmbedder& snippets, const IdentifierEmbedder& identifiers)
      : train_(std::move(train)),
        client_(&client),
        snippets_(&snippets),
        identifiers_(&identifiers),
        index_(snippets, train_) {
    std::set<std::string> names;
    for (const auto& s : train_) {
      TrainFacts f;
      try {
        const SourceUnit u = parse(s.code);
        f.census = census(u);
        f.identifiers = collect_identifiers(u);
      } catch (const ParseError&) {
      }
      names.insert(f.identifiers.begin(), f.identifiers.end());
      facts_.emplace(s.id, std::move(f));
    }
    train_names_.assign(names.begin(), names.end());
  }

  const std::vector<LabeledSnippet>& train() const { return train_; }
  ModelClient& client() const { return *client_; }
  const SnippetEmbedder& snippet_embedder() const { return *snippets_; }
  const IdentifierEmbedder& identifier_embedder() const { return *identifiers_; }
  const EmbeddingIndex& index() const { return index_; }
  /// Every identifier declared anywhere in the training split, sorted.
  const std::vector<std::string>& train_names() const { return train_names_; }

  StructureCensus census_of(const ReferenceSet& refs) const {
    StructureCensus c;
    for (const auto& m : refs.members) c += facts_.at(m.snippet.id).census;
    return c;
  }

  std::vector<std::string> identifiers_of(const ReferenceSet& refs) const {
    std::vector<std::string> out;
    std::set<std::string> seen;
    for (const auto& m : refs.members)
      for (const auto& n : facts_.at(m.snippet.id).identifiers)
        if (seen.insert(n).second) out.push_back(n);
    return out;
  }

 private:
  std::vector<LabeledSnippet> train_;
  ModelClient* client_;
  const SnippetEmbedder* snippets_;
  const IdentifierEmbedder* identifiers_;
  EmbeddingIndex index_;
  std::unordered_map<std::string, TrainFacts> facts_;
  std::vector<std::string> train_names_;
};

namespace detail {

inline constexpr std::uint64_t kRisStream = 0x524953;
inline constexpr std::uint64_t kRandomStream = 0x524e44;

/// Fault checks for one target, tracking the lowest ground-truth confidence.
class Checker {
 public:
  Checker(ModelClient::Session& s, int label, double initial)
      : session_(s), label_(static_cast<std::size_t>(label)), initial_(initial) {}

  struct Outcome {
    bool fault;
    double confidence;
  };

  Outcome check(const std::string& code) {
    const PredictionVector pv = session_.predict(code);
    const double conf = pv[label_];
    if (!best_ || conf < min_) {
      min_ = conf;
      best_ = code;
    }
    return {pv.argmax() != label_, conf};
  }

  double pcd() const { return best_ ? std::max(0.0, initial_ - min_) : 0.0; }
  const std::optional<std::string>& best() const { return best_; }

 private:
  ModelClient::Session& session_;
  std::size_t label_;
  double initial_;
  double min_ = 0;
  std::optional<std::string> best_;
};

}  // namespace detail

/// Runs the configured strategy on one target. Backend failures end the
/// target with status "error"; everything else is recorded in the result.
inline AttackResult attack_target(const LabeledSnippet& target, const CampaignConfig& config,
                                  const AttackContext& ctx) {
  AttackResult res;
  res.target_id = target.id;
  res.label = target.label;
  ModelClient::Session session = ctx.client().session(target.id);
  auto finish = [&](AttackStatus st, const detail::Checker* checker) {
    res.status = st;
    res.invocations = session.invocations();
    res.checks = session.checks();
    res.cache_hits = session.cache_hits();
    if (checker) {
      res.pcd = checker->pcd();
      res.best_variant_code = checker->best();
    }
    return res;
  };

  try {
    const PredictionVector initial = session.predict(target.code);
    if (target.label < 0 || static_cast<std::size_t>(target.label) >= initial.num_classes())
      throw MalformedResponse("label outside the victim's classes");
    res.initial_confidence = initial[static_cast<std::size_t>(target.label)];
    if (initial.argmax() != static_cast<std::size_t>(target.label))
      return finish(AttackStatus::SkippedMispredicted, nullptr);

    detail::Checker checker(session, target.label, res.initial_confidence);
    SourceUnit current;
    try {
      current = parse(target.code);
    } catch (const ParseError& e) {
      res.error = std::string("target does not parse: ") + e.what();
      return finish(AttackStatus::Failed, nullptr);
    }

    auto reveal = [&](const std::string& code) {
      res.adversarial_code = code;
      return finish(AttackStatus::FaultRevealed, &checker);
    };

    if (config.strategy == Strategy::RandomBaseline) {
      Rng rng(mix_seed({config.seed, fnv1a(target.id), detail::kRandomStream}));
      std::vector<std::string> from = collect_identifiers(current);
      rng.shuffle(from);
      const auto& pool = ctx.train_names();
      for (const auto& f : from) {
        if (pool.empty()) break;
        const std::string& to = rng.pick(pool);
        auto r = apply_rename(current, f, to);
        if (!r) continue;
        const std::string code = print(*r.renamed);
        const auto out = checker.check(code);
        current = std::move(*r.renamed);
        res.applied_renames.push_back({f, to});
        if (out.fault) return reveal(code);
      }
      return finish(AttackStatus::Exhausted, &checker);
    }

    ReferenceSet refs;
    try {
      const std::uint64_t ris_seed = mix_seed({config.seed, fnv1a(target.id), detail::kRisStream});
      if (config.strategy == Strategy::NoRis) {
        if (ctx.train().empty()) throw EmptyPool("empty training split");
        refs = random_references(target, ctx.train(), config.N, ris_seed, ctx.index());
      } else {
        PoolChoice pc =
            choose_pool(ctx.train(), initial, ctx.client().setup_table(), config.pool_fallback);
        refs = select_references(target, pc.pool, pc.cls, config.U, config.N, ris_seed,
                                 ctx.index());
      }
    } catch (const EmptyPool&) {
      return finish(AttackStatus::NoReferences, &checker);
    }

    if (config.strategy != Strategy::NoEst) {
      EstOptions opts;
      opts.enabled = config.rules;
      // Without guidance each rule fires with a fixed probability; variant
      // generation and selection stay as they are.
      opts.guided = config.strategy != Strategy::NoCdg;
      EstResult est = apply_est(current, ctx.census_of(refs), config.M, config.seed, refs,
                                ctx.snippet_embedder(), opts);
      current = std::move(est.unit);
      res.applied_rules = std::move(est.applied);
      const std::string code = print(current);
      if (checker.check(code).fault) return reveal(code);
    }
    if (config.strategy == Strategy::NoIrt) return finish(AttackStatus::Exhausted, &checker);

    RenamePlan plan = build_rename_plan(current, ctx.identifiers_of(refs), ctx.identifier_embedder());
    double current_conf = res.initial_confidence;
    while (!plan.done()) {
      const RenamePair& p = plan.next();
      auto r = apply_rename(current, p);
      if (!r) continue;
      const std::string code = print(*r.renamed);
      const auto out = checker.check(code);
      if (out.fault) {
        res.applied_renames.push_back({p.from, p.to});
        return reveal(code);
      }
      if (config.irt_revert && out.confidence >= current_conf) continue;
      current = std::move(*r.renamed);
      current_conf = out.confidence;
      res.applied_renames.push_back({p.from, p.to});
    }
    return finish(AttackStatus::Exhausted, &checker);
  } catch (const ModelUnavailable& e) {
    res.error = e.what();
  } catch (const MalformedResponse& e) {
    res.error = e.what();
  }
  return finish(AttackStatus::Failed, nullptr);
}

// ---- aggregation ---------------------------------------------------------------

struct CampaignReport {
  std::string strategy;
  std::uint64_t seed = 0;
  std::size_t U = 0, N = 0, M = 0;
  bool irt_revert = false;
  std::string backend;
  std::size_t targets = 0;
  std::size_t attacked = 0;
  std::size_t fault_revealed = 0;
  std::optional<double> rfr;
  std::optional<double> mean_pcd;
  std::optional<double> mean_invocations;
  std::size_t setup_predictions = 0;
  std::size_t campaign_invocations = 0;
  std::vector<AttackResult> per_target;
  double wall_clock = 0;
};

/// Fills the aggregate fields from per_target. Means run over the targets
/// in the rate's denominator.
inline void summarize(CampaignReport& r) {
  r.targets = r.per_target.size();
  r.attacked = 0;
  r.fault_revealed = 0;
  double pcd = 0, inv = 0;
  for (const auto& t : r.per_target) {
    if (!counts_as_attacked(t.status)) continue;
    ++r.attacked;
    r.fault_revealed += t.status == AttackStatus::FaultRevealed;
    pcd += t.pcd;
    inv += static_cast<double>(t.invocations);
  }
  if (r.attacked == 0) {
    r.rfr = r.mean_pcd = r.mean_invocations = std::nullopt;
    return;
  }
  const double n = static_cast<double>(r.attacked);
  r.rfr = static_cast<double>(r.fault_revealed) / n;
  r.mean_pcd = pcd / n;
  r.mean_invocations = inv / n;
}

/// Attacks every target with up to `config.parallelism` workers. Results are
/// in target order and independent of scheduling.
inline std::vector<AttackResult> attack_all(const std::vector<LabeledSnippet>& targets,
                                            const CampaignConfig& config,
                                            const AttackContext& ctx) {
  std::vector<AttackResult> out(targets.size());
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t i = next++; i < targets.size(); i = next++)
      out[i] = attack_target(targets[i], config, ctx);
  };
  const std::size_t workers = std::max<std::size_t>(1, std::min(config.parallelism, targets.size()));
  if (workers == 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(work);
    for (auto& t : pool) t.join();
  }
  return out;
}

struct Providers {
  std::shared_ptr<const SnippetEmbedder> snippets = std::make_shared<NgramSnippetEmbedder>();
  std::shared_ptr<const IdentifierEmbedder> identifiers =
      std::make_shared<CharNgramIdentifierEmbedder>();
};

/// Builds the backend described by the config. The surrogate is trained on
/// the dataset's training split.
inline std::shared_ptr<Backend> make_backend(const BackendConfig& b, const Dataset& data) {
  switch (b.kind) {
    case BackendConfig::Kind::Surrogate:
      return std::make_shared<SurrogateModel>(train_surrogate(data.train(), data.num_classes()));
    case BackendConfig::Kind::Http:
      return std::make_shared<HttpBackend>(b.target, HttpOptions{.retries = b.retries});
    case BackendConfig::Kind::Stdio:
      return std::make_shared<StdioBackend>(b.target, b.retries);
  }
  throw Error("unknown backend");
}

/// Full campaign over the test split of `data` against an existing client.
inline CampaignReport run_campaign(const CampaignConfig& config, const Dataset& data,
                                   ModelClient& client, const Providers& providers = {}) {
  config.validate();
  const auto start = std::chrono::steady_clock::now();
  const auto train = data.train();
  const std::string dir = config.resolved_cache_dir();
  client.prepare_setup(train, dir.empty() ? std::string()
                                          : prediction_cache_path(dir, client.backend().fingerprint(), train));
  const AttackContext ctx(train, client, *providers.snippets, *providers.identifiers);

  CampaignReport r;
  r.strategy = to_string(config.strategy);
  r.seed = config.seed;
  r.U = config.U;
  r.N = config.N;
  r.M = config.M;
  r.irt_revert = config.irt_revert;
  r.backend = describe(config.backend);
  r.per_target = attack_all(data.test(), config, ctx);
  summarize(r);
  const InvocationCounter c = client.counter();
  r.setup_predictions = c.setup;
  r.campaign_invocations = c.campaign_total();
  r.wall_clock =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return r;
}

inline CampaignReport run_campaign(const CampaignConfig& config, const Dataset& data,
                                   const Providers& providers = {}) {
  ModelClient client(make_backend(config.backend, data), ClientOptions{config.backend.batch_size});
  return run_campaign(config, data, client, providers);
}

inline CampaignReport run_campaign(const CampaignConfig& config) {
  return run_campaign(config, load_dataset(config.dataset_path));
}

}  // namespace coda
