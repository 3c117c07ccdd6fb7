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

// Campaign report files (JSON and a CSV summary) and the augmented
// training-set export.

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "coda/campaign.hpp"
#include "coda/dataset.hpp"
#include "coda/error.hpp"

namespace coda {

namespace detail {

template <typename T>
nlohmann::ordered_json optional_json(const std::optional<T>& v) {
  return v ? nlohmann::ordered_json(*v) : nlohmann::ordered_json(nullptr);
}

template <typename T>
std::optional<T> optional_from(const nlohmann::json& j, const char* key) {
  if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
  return j.at(key).get<T>();
}

}  // namespace detail

inline nlohmann::ordered_json to_json(const AttackResult& r) {
  nlohmann::ordered_json j;
  j["targetId"] = r.target_id;
  j["label"] = r.label;
  j["status"] = to_string(r.status);
  j["adversarialCode"] = detail::optional_json(r.adversarial_code);
  j["pcd"] = r.pcd;
  j["initialConfidence"] = r.initial_confidence;
  j["invocations"] = r.invocations;
  j["checks"] = r.checks;
  j["cacheHits"] = r.cache_hits;
  auto rules = nlohmann::ordered_json::array();
  for (RuleId id : r.applied_rules) rules.push_back(rule_name(id));
  j["appliedRules"] = std::move(rules);
  auto renames = nlohmann::ordered_json::array();
  for (const auto& p : r.applied_renames) renames.push_back({{"from", p.from}, {"to", p.to}});
  j["appliedRenames"] = std::move(renames);
  j["bestVariantCode"] = detail::optional_json(r.best_variant_code);
  j["error"] = r.error.empty() ? nlohmann::ordered_json(nullptr) : nlohmann::ordered_json(r.error);
  return j;
}

inline AttackResult attack_result_from_json(const nlohmann::json& j) {
  AttackResult r;
  r.target_id = j.at("targetId").get<std::string>();
  r.label = j.at("label").get<int>();
  r.status = status_from_string(j.at("status").get<std::string>());
  r.adversarial_code = detail::optional_from<std::string>(j, "adversarialCode");
  r.pcd = j.at("pcd").get<double>();
  r.initial_confidence = j.value("initialConfidence", 0.0);
  r.invocations = j.at("invocations").get<std::size_t>();
  r.checks = j.value("checks", std::size_t{0});
  r.cache_hits = j.value("cacheHits", std::size_t{0});
  for (const auto& n : j.at("appliedRules")) {
    const auto id = rule_from_name(n.get<std::string>());
    if (!id) throw Error("unknown rule in report: " + n.get<std::string>());
    r.applied_rules.push_back(*id);
  }
  for (const auto& p : j.at("appliedRenames"))
    r.applied_renames.push_back({p.at("from").get<std::string>(), p.at("to").get<std::string>()});
  r.best_variant_code = detail::optional_from<std::string>(j, "bestVariantCode");
  r.error = detail::optional_from<std::string>(j, "error").value_or("");
  return r;
}

inline nlohmann::ordered_json to_json(const CampaignReport& r, bool with_wall_clock = true) {
  nlohmann::ordered_json j;
  j["strategy"] = r.strategy;
  j["seed"] = r.seed;
  j["config"] = {{"U", r.U}, {"N", r.N}, {"M", r.M}, {"irtRevert", r.irt_revert},
                 {"backend", r.backend}};
  j["targets"] = r.targets;
  j["attacked"] = r.attacked;
  j["faultRevealed"] = r.fault_revealed;
  j["rfr"] = detail::optional_json(r.rfr);
  j["meanPcd"] = detail::optional_json(r.mean_pcd);
  j["meanInvocations"] = detail::optional_json(r.mean_invocations);
  j["setupPredictions"] = r.setup_predictions;
  j["campaignInvocations"] = r.campaign_invocations;
  auto per = nlohmann::ordered_json::array();
  for (const auto& t : r.per_target) per.push_back(to_json(t));
  j["perTarget"] = std::move(per);
  if (with_wall_clock) j["wallClock"] = r.wall_clock;
  return j;
}

inline CampaignReport report_from_json(const nlohmann::json& j) {
  CampaignReport r;
  r.strategy = j.at("strategy").get<std::string>();
  r.seed = j.at("seed").get<std::uint64_t>();
  const auto& c = j.at("config");
  r.U = c.at("U").get<std::size_t>();
  r.N = c.at("N").get<std::size_t>();
  r.M = c.at("M").get<std::size_t>();
  r.irt_revert = c.at("irtRevert").get<bool>();
  r.backend = c.at("backend").get<std::string>();
  r.targets = j.at("targets").get<std::size_t>();
  r.attacked = j.at("attacked").get<std::size_t>();
  r.fault_revealed = j.at("faultRevealed").get<std::size_t>();
  r.rfr = detail::optional_from<double>(j, "rfr");
  r.mean_pcd = detail::optional_from<double>(j, "meanPcd");
  r.mean_invocations = detail::optional_from<double>(j, "meanInvocations");
  r.setup_predictions = j.value("setupPredictions", std::size_t{0});
  r.campaign_invocations = j.value("campaignInvocations", std::size_t{0});
  for (const auto& t : j.at("perTarget")) r.per_target.push_back(attack_result_from_json(t));
  r.wall_clock = j.value("wallClock", 0.0);
  return r;
}

/// Canonical text of a report; identical for identical runs when the wall
/// clock is left out.
inline std::string report_text(const CampaignReport& r, bool with_wall_clock = true) {
  return to_json(r, with_wall_clock).dump(2) + "\n";
}

inline CampaignReport read_report(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IOError("cannot open report " + path);
  try {
    return report_from_json(nlohmann::json::parse(in));
  } catch (const nlohmann::json::exception& e) {
    throw Error("malformed report " + path + ": " + e.what());
  }
}

namespace detail {

inline std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

inline void write_text(const std::string& path, const std::string& text) {
  const std::filesystem::path p(path);
  std::error_code ec;
  if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path(), ec);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IOError("cannot write " + path);
  out << text;
  if (!out) throw IOError("write failed for " + path);
}

}  // namespace detail

/// One row per target plus a trailing summary row.
inline std::string report_csv(const CampaignReport& r) {
  std::ostringstream o;
  o << "targetId,label,status,pcd,invocations,appliedRules,appliedRenames\n";
  for (const auto& t : r.per_target) {
    std::string rules, renames;
    for (RuleId id : t.applied_rules) rules += (rules.empty() ? "" : " ") + rule_name(id);
    for (const auto& p : t.applied_renames)
      renames += (renames.empty() ? "" : " ") + p.from + "->" + p.to;
    o << detail::csv_field(t.target_id) << ',' << t.label << ',' << to_string(t.status) << ','
      << t.pcd << ',' << t.invocations << ',' << detail::csv_field(rules) << ','
      << detail::csv_field(renames) << '\n';
  }
  auto opt = [](const std::optional<double>& v) {
    std::ostringstream s;
    if (v) s << *v;
    return s.str();
  };
  o << "# summary,strategy=" << r.strategy << ",rfr=" << opt(r.rfr) << ",meanPcd=" << opt(r.mean_pcd)
    << ",meanInvocations=" << opt(r.mean_invocations) << '\n';
  return o.str();
}

inline std::string csv_path_for(const std::string& json_path) {
  std::filesystem::path p(json_path);
  p.replace_extension(".csv");
  return p.string();
}

/// Writes the JSON report to `path` and the CSV summary beside it.
inline void write_report(const std::string& path, const CampaignReport& r) {
  detail::write_text(path, report_text(r));
  detail::write_text(csv_path_for(path), report_csv(r));
}

/// Per target: its fault-revealing example, otherwise the checked variant
/// with the largest confidence decrement. Labels are the targets' own.
inline std::vector<LabeledSnippet> augmented_examples(const CampaignReport& r) {
  std::vector<LabeledSnippet> out;
  for (const auto& t : r.per_target) {
    const auto& code = t.adversarial_code ? t.adversarial_code : t.best_variant_code;
    if (!code) continue;
    out.push_back({t.target_id + "#aug", *code, t.label, Split::Train});
  }
  return out;
}

/// Writes train plus augmented_examples(r) as dataset JSONL. Returns the
/// number of lines written.
inline std::size_t export_augmented(const CampaignReport& r, const std::vector<LabeledSnippet>& train,
                                    const std::string& out) {
  std::vector<LabeledSnippet> all = train;
  for (auto& s : all) s.split = Split::Train;
  for (auto& s : augmented_examples(r)) all.push_back(std::move(s));
  std::ostringstream text;
  write_dataset(text, all);
  detail::write_text(out, text.str());
  return all.size();
}

}  // namespace coda
