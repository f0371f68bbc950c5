/*
 * SPDX-License-Identifier: Apache-2.0
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 * http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "edmm/compat.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <array>
#include <unordered_set>

#include "embedded_data.hpp"
#include "yaml/yaml_tree.hpp"

namespace edmm {

namespace {

constexpr std::array<std::pair<Feature, std::string_view>, 6> kFeatureNames{{
    {Feature::multi_provider, "multi_provider"},
    {Feature::xaas, "xaas"},
    {Feature::structuring, "structuring"},
    {Feature::custom_entities, "custom_entities"},
    {Feature::desired_state, "desired_state"},
    {Feature::lifecycle_hooks, "lifecycle_hooks"},
}};

const std::set<std::string_view> kProviders{"aws", "azure", "openstack"};

[[noreturn]] void bad_data(const std::string& message) {
  throw Error(Errc::invalid_data, fmt::format("technology table: {}", message));
}

std::string text_field(const yaml::Json& entry, const char* key, bool required = true) {
  auto it = entry.find(key);
  if (it == entry.end() || it->is_null()) {
    if (required) bad_data(fmt::format("entry is missing '{}'", key));
    return {};
  }
  if (!it->is_string()) bad_data(fmt::format("'{}' must be a string", key));
  return it->get<std::string>();
}

Technology parse_entry(const yaml::Json& entry) {
  if (!entry.is_object()) bad_data("entries must be maps");
  static const std::set<std::string> known{"name",     "display_name",       "category",
                                           "provider_scope", "features", "bundle_requirement",
                                           "infrastructure", "note"};
  for (const auto& [key, _] : entry.items()) {
    if (!known.contains(key)) bad_data(fmt::format("unknown key '{}'", key));
  }
  Technology t;
  t.name = text_field(entry, "name");
  t.display_name = text_field(entry, "display_name");
  t.note = text_field(entry, "note", false);

  auto category = text_field(entry, "category");
  if (category == "GP") t.category = Category::gp;
  else if (category == "ProvS") t.category = Category::provs;
  else if (category == "PlatS") t.category = Category::plats;
  else bad_data(fmt::format("{}: unknown category '{}'", t.name, category));

  t.provider_scope = text_field(entry, "provider_scope");
  if (t.provider_scope != "all" && !kProviders.contains(t.provider_scope)) {
    bad_data(fmt::format("{}: unknown provider scope '{}'", t.name, t.provider_scope));
  }

  auto features = entry.find("features");
  if (features == entry.end() || !features->is_array()) {
    bad_data(fmt::format("{}: 'features' must be a list", t.name));
  }
  for (const auto& f : *features) {
    auto found = std::find_if(kFeatureNames.begin(), kFeatureNames.end(),
                              [&](const auto& p) { return f.is_string() && p.second == f.get<std::string>(); });
    if (found == kFeatureNames.end()) bad_data(fmt::format("{}: unknown feature {}", t.name, f.dump()));
    if (!t.features.insert(found->first).second) {
      bad_data(fmt::format("{}: feature {} listed twice", t.name, f.dump()));
    }
  }

  auto bundle = text_field(entry, "bundle_requirement");
  if (bundle == "none") t.bundle_requirement = BundleRequirement::none;
  else if (bundle == "container-image") t.bundle_requirement = BundleRequirement::container_image;
  else bad_data(fmt::format("{}: unknown bundle requirement '{}'", t.name, bundle));

  auto infrastructure = text_field(entry, "infrastructure");
  if (infrastructure == "provisions") t.infrastructure = Infrastructure::provisions;
  else if (infrastructure == "existing") t.infrastructure = Infrastructure::existing;
  else bad_data(fmt::format("{}: unknown infrastructure '{}'", t.name, infrastructure));
  return t;
}

void check_invariants(const Technology& t) {
  switch (t.category) {
    case Category::gp:
      if (t.features != all_features()) bad_data(fmt::format("{}: GP requires every feature", t.name));
      if (t.provider_scope != "all") bad_data(fmt::format("{}: GP must span all providers", t.name));
      if (t.bundle_requirement != BundleRequirement::none ||
          t.infrastructure != Infrastructure::provisions) {
        bad_data(fmt::format("{}: GP cannot be restricted", t.name));
      }
      break;
    case Category::provs:
      if (t.has(Feature::multi_provider)) {
        bad_data(fmt::format("{}: ProvS cannot be multi-provider", t.name));
      }
      if (!kProviders.contains(t.provider_scope)) {
        bad_data(fmt::format("{}: ProvS needs a single provider scope", t.name));
      }
      if (t.bundle_requirement != BundleRequirement::none) {
        bad_data(fmt::format("{}: ProvS cannot require bundles", t.name));
      }
      break;
    case Category::plats:
      if (t.has(Feature::xaas)) bad_data(fmt::format("{}: PlatS is restricted in XaaS", t.name));
      break;
  }
}

}  // namespace

std::string_view to_string(Category category) noexcept {
  switch (category) {
    case Category::gp: return "GP";
    case Category::provs: return "ProvS";
    case Category::plats: return "PlatS";
  }
  return "?";
}

std::string_view to_string(Feature feature) noexcept {
  for (const auto& [f, name] : kFeatureNames) {
    if (f == feature) return name;
  }
  return "?";
}

const std::set<Feature>& all_features() {
  static const std::set<Feature> features = [] {
    std::set<Feature> out;
    for (const auto& [f, _] : kFeatureNames) out.insert(f);
    return out;
  }();
  return features;
}

std::string_view to_string(Verdict verdict) noexcept {
  return verdict == Verdict::compatible ? "compatible" : "incompatible";
}

std::string_view technologies_source() noexcept { return embedded::technologies; }

std::vector<Technology> load_technologies(std::string_view yaml_text) {
  std::vector<yaml::Json> docs;
  try {
    docs = yaml::load_all_json(yaml_text);
  } catch (const yaml::LoadError& e) {
    bad_data(e.what());
  }
  if (docs.size() != 1 || !docs.front().is_object()) bad_data("expected one map document");
  const auto& doc = docs.front();
  if (doc.size() != 1 || !doc.contains("technologies") || !doc["technologies"].is_array()) {
    bad_data("expected a single 'technologies' list");
  }
  std::vector<Technology> out;
  std::unordered_set<std::string> names;
  for (const auto& entry : doc["technologies"]) {
    Technology t = parse_entry(entry);
    check_invariants(t);
    if (!names.insert(t.name).second) bad_data(fmt::format("'{}' listed twice", t.name));
    out.push_back(std::move(t));
  }
  return out;
}

const std::vector<Technology>& registry() {
  static const std::vector<Technology> technologies = load_technologies(technologies_source());
  return technologies;
}

const Technology* find_technology(std::string_view name) noexcept {
  try {
    for (const auto& t : registry()) {
      if (t.name == name) return &t;
    }
  } catch (...) {
  }
  return nullptr;
}

const Technology& technology(std::string_view name) {
  if (const auto* t = find_technology(name)) return *t;
  throw Error(Errc::unknown_technology, fmt::format("unknown technology '{}'", name),
              {std::string(name)});
}

TargetReport check(const ValidatedModel& validated, const Technology& tech) {
  const DeploymentModel& model = validated.model();
  TargetReport report;
  report.technology = tech.name;
  auto& blockers = report.blockers;

  if (tech.category == Category::provs) {
    for (const auto& c : model.components) {
      if (!component_is_a(model, c.type, "platform_service")) continue;
      auto meta = effective_metadata(model, c.type);
      auto provider = meta.find("provider");
      if (provider == meta.end()) {
        blockers.push_back({c.name, std::string(blocker_codes::provider_mismatch),
                            fmt::format("'{}' has no provider; {} only deploys {} services",
                                        c.name, tech.display_name, tech.provider_scope)});
      } else if (provider->second != tech.provider_scope) {
        blockers.push_back({c.name, std::string(blocker_codes::provider_mismatch),
                            fmt::format("'{}' is provided by {}; {} only deploys {} services",
                                        c.name, provider->second, tech.display_name,
                                        tech.provider_scope)});
      }
    }
  }

  if (tech.bundle_requirement == BundleRequirement::container_image) {
    for (const auto* top : stack_tops(model)) {
      if (hosting_stack(model, *top).size() < 2) continue;
      if (!component_is_a(model, top->type, "software_component")) continue;
      bool has_image = std::any_of(top->artifacts.begin(), top->artifacts.end(), [](const Artifact& a) {
        return a.kind == ArtifactKind::container_image;
      });
      if (!has_image) {
        blockers.push_back({top->name, std::string(blocker_codes::missing_platform_bundle),
                            fmt::format("stack topped by '{}' has no container-image artifact; {} "
                                        "only deploys container images",
                                        top->name, tech.display_name)});
      }
    }
  }

  if (tech.infrastructure == Infrastructure::existing) {
    for (const auto& c : model.components) {
      if (host_relation(model, c) != nullptr) continue;
      bool compute = component_is_a(model, c.type, "compute");
      bool iaas_service = component_is_a(model, c.type, "platform_service") &&
                          effective_metadata(model, c.type)["delivery_model"] == "iaas";
      if (compute || iaas_service) {
        blockers.push_back({c.name, std::string(blocker_codes::requires_existing_infrastructure),
                            fmt::format("'{}' would have to be provisioned; {} assumes running "
                                        "infrastructure",
                                        c.name, tech.display_name)});
      }
    }
  }

  std::sort(blockers.begin(), blockers.end());
  report.verdict = blockers.empty() ? Verdict::compatible : Verdict::incompatible;
  return report;
}

TargetReport check(const ValidatedModel& model, std::string_view technology_name) {
  return check(model, technology(technology_name));
}

std::string render_text(const TargetReport& report) {
  std::string out = fmt::format("{}: {} ({} blocker{})\n", report.technology,
                                to_string(report.verdict), report.blockers.size(),
                                report.blockers.size() == 1 ? "" : "s");
  if (report.blockers.empty()) return out;
  std::size_t subject_width = 7;
  std::size_t reason_width = 6;
  for (const auto& b : report.blockers) {
    subject_width = std::max(subject_width, b.subject.size());
    reason_width = std::max(reason_width, b.reason.size());
  }
  out += fmt::format("  {:<{}}  {:<{}}  {}\n", "SUBJECT", subject_width, "REASON", reason_width,
                     "MESSAGE");
  for (const auto& b : report.blockers) {
    out += fmt::format("  {:<{}}  {:<{}}  {}\n", b.subject, subject_width, b.reason, reason_width,
                       b.message);
  }
  return out;
}

std::string render_machine(const TargetReport& report) {
  std::string out = fmt::format("verdict\t{}\t{}\t{}\n", report.technology,
                                to_string(report.verdict), report.blockers.size());
  for (const auto& b : report.blockers) {
    out += fmt::format("blocker\t{}\t{}\t{}\t{}\n", report.technology, escape_field(b.subject),
                       b.reason, escape_field(b.message));
  }
  return out;
}

}  // namespace edmm
