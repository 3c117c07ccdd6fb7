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

// coda: command-line front end.
//   coda attack --dataset D --out report.json [--strategy S] [--seed K]
//               [--backend surrogate | --backend http URL | --backend stdio CMD]
//   coda export-augmented --report R --dataset D --out aug.jsonl
//   coda rules --dump
//   coda bench --generate DIR

#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "coda.hpp"

namespace {

struct AttackArgs {
  std::string dataset, out, strategy = "coda", rules_file, cache_dir, embed_url, vectors;
  std::vector<std::string> backend = {"surrogate"};
  std::uint64_t seed = 0;
  std::size_t U = 256, N = 64, M = 64, parallelism = 1, embed_dim = 0;
  int retries = 2;
  bool irt_revert = false, pool_fallback = false, no_cache = false;
};

coda::BackendConfig parse_backend(const std::vector<std::string>& v, int retries) {
  coda::BackendConfig b;
  b.retries = retries;
  const std::string& kind = v.at(0);
  if (kind == "surrogate") {
    if (v.size() != 1) throw CLI::ValidationError("--backend", "surrogate takes no argument");
    return b;
  }
  if (v.size() != 2) throw CLI::ValidationError("--backend", kind + " needs a URL or command");
  if (kind == "http")
    b.kind = coda::BackendConfig::Kind::Http;
  else if (kind == "stdio")
    b.kind = coda::BackendConfig::Kind::Stdio;
  else
    throw CLI::ValidationError("--backend", "unknown backend '" + kind + "'");
  b.target = v[1];
  return b;
}

int run_attack(const AttackArgs& a) {
  coda::CampaignConfig c;
  c.U = a.U;
  c.N = a.N;
  c.M = a.M;
  c.seed = a.seed;
  c.strategy = coda::strategy_from_string(a.strategy);
  c.backend = parse_backend(a.backend, a.retries);
  c.dataset_path = a.dataset;
  c.out_path = a.out;
  c.parallelism = a.parallelism;
  c.irt_revert = a.irt_revert;
  c.pool_fallback = a.pool_fallback;
  if (a.no_cache)
    c.cache_dir = "";
  else if (!a.cache_dir.empty())
    c.cache_dir = a.cache_dir;
  if (!a.rules_file.empty()) {
    std::ifstream in(a.rules_file);
    if (!in) throw coda::IOError("cannot open " + a.rules_file);
    c.rules = coda::rule_mask_from_json(nlohmann::json::parse(in));
  }
  c.validate();

  coda::Providers providers;
  if (!a.embed_url.empty()) {
    if (a.embed_dim == 0) throw CLI::ValidationError("--embed-dim", "required with --embed");
    auto p = std::make_shared<coda::HttpEmbeddingProvider>(a.embed_url, a.embed_dim);
    providers.snippets = p;
    providers.identifiers = p;
  }
  if (!a.vectors.empty())
    providers.identifiers = std::make_shared<coda::PretrainedIdentifierEmbedder>(
        coda::PretrainedIdentifierEmbedder::load(a.vectors));

  const coda::Dataset data = coda::load_dataset(a.dataset);
  coda::ModelClient client(coda::make_backend(c.backend, data),
                           coda::ClientOptions{c.backend.batch_size});
  const coda::CampaignReport r = coda::run_campaign(c, data, client, providers);
  coda::write_report(a.out, r);

  std::cout << "strategy=" << r.strategy << " targets=" << r.targets << " attacked=" << r.attacked
            << " faultRevealed=" << r.fault_revealed;
  if (r.rfr) std::cout << " rfr=" << *r.rfr << " meanPcd=" << *r.mean_pcd;
  std::cout << " invocations=" << r.campaign_invocations << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Structure- and identifier-level robustness testing of code classifiers"};
  app.require_subcommand(1);

  AttackArgs a;
  auto* attack = app.add_subcommand("attack", "attack every test snippet of a dataset");
  attack->add_option("--dataset", a.dataset, "dataset JSONL")->required()->check(CLI::ExistingFile);
  attack->add_option("--out", a.out, "report JSON (a .csv is written beside it)")->required();
  attack->add_option("--strategy", a.strategy, "coda, no-ris, no-est, no-cdg, no-irt or random-baseline");
  attack->add_option("--seed", a.seed);
  attack->add_option("--backend", a.backend, "surrogate | http URL | stdio CMD")->expected(1, 2);
  attack->add_option("--u", a.U, "candidate sample size");
  attack->add_option("--n", a.N, "reference set size");
  attack->add_option("--m", a.M, "rewritten variants per target");
  attack->add_flag("--irt-revert", a.irt_revert, "keep only renames that lower the confidence");
  attack->add_flag("--pool-fallback", a.pool_fallback,
                   "use the next class when the runner-up has no usable references");
  attack->add_option("--parallelism", a.parallelism, "concurrent targets");
  attack->add_option("--retries", a.retries, "retries per victim request");
  attack->add_option("--rules", a.rules_file, "rule catalog JSON with enabled flags");
  attack->add_option("--cache-dir", a.cache_dir, "prediction cache directory");
  attack->add_flag("--no-cache", a.no_cache, "do not read or write the prediction cache");
  attack->add_option("--embed", a.embed_url, "embedding service URL");
  attack->add_option("--embed-dim", a.embed_dim, "embedding service dimension");
  attack->add_option("--vectors", a.vectors, "word2vec text file for identifier embeddings");

  std::string report, aug_dataset, aug_out;
  auto* exp = app.add_subcommand("export-augmented", "training set plus adversarial examples");
  exp->add_option("--report", report)->required()->check(CLI::ExistingFile);
  exp->add_option("--dataset", aug_dataset)->required()->check(CLI::ExistingFile);
  exp->add_option("--out", aug_out)->required();

  bool dump = false;
  auto* rules = app.add_subcommand("rules", "rewrite rule catalog");
  rules->add_flag("--dump", dump, "print the catalog as JSON")->required();

  std::string bench_dir;
  std::uint64_t bench_seed = 1;
  auto* bench = app.add_subcommand("bench", "synthetic benchmark");
  bench->add_option("--generate", bench_dir, "output directory")->required();
  bench->add_option("--seed", bench_seed);

  CLI11_PARSE(app, argc, argv);

  try {
    if (*attack) return run_attack(a);
    if (*exp) {
      const coda::CampaignReport r = coda::read_report(report);
      const coda::Dataset d = coda::load_dataset(aug_dataset);
      const std::size_t n = coda::export_augmented(r, d.train(), aug_out);
      std::cout << "wrote " << n << " examples to " << aug_out << "\n";
      return 0;
    }
    if (*rules) {
      std::cout << coda::rule_catalog_json().dump(2) << "\n";
      return 0;
    }
    if (*bench) {
      std::filesystem::create_directories(bench_dir);
      const auto path = (std::filesystem::path(bench_dir) / "synthetic.jsonl").string();
      const coda::Dataset d = coda::bench::generate_synthetic(bench_seed);
      coda::save_dataset(path, d.items);
      std::cout << "wrote " << d.items.size() << " snippets to " << path << "\n";
      return 0;
    }
  } catch (const CLI::Error& e) {
    return app.exit(e);
  } catch (const std::exception& e) {
    std::cerr << "coda: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
