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

#pragma once

#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "edmm/validation.hpp"

namespace edmm {

enum class Category { gp, provs, plats };

/// "GP", "ProvS", "PlatS"
std::string_view to_string(Category category) noexcept;

enum class Feature {
  multi_provider,
  xaas,
  structuring,
  custom_entities,
  desired_state,
  lifecycle_hooks,
};

std::string_view to_string(Feature feature) noexcept;
const std::set<Feature>& all_features();

enum class BundleRequirement { none, container_image };
enum class Infrastructure { provisions, existing };

struct Technology {
  std::string name;
  std::string display_name;
  Category category = Category::gp;
  std::string provider_scope = "all";
  std::set<Feature> features;
  BundleRequirement bundle_requirement = BundleRequirement::none;
  Infrastructure infrastructure = Infrastructure::provisions;
  std::string note;

  bool has(Feature feature) const { return features.contains(feature); }
  bool operator==(const Technology&) const = default;
};

/// Text of the shipped technology table.
std::string_view technologies_source() noexcept;

/// Parses a technology table and checks the per-category invariants.
/// Throws Error{invalid_data}.
std::vector<Technology> load_technologies(std::string_view yaml_text);

/// The shipped table, in file order.
const std::vector<Technology>& registry();

const Technology* find_technology(std::string_view name) noexcept;

/// Throws Error{unknown_technology}.
const Technology& technology(std::string_view name);

namespace blocker_codes {
inline constexpr std::string_view provider_mismatch = "PROVIDER_MISMATCH";
inline constexpr std::string_view missing_platform_bundle = "MISSING_PLATFORM_BUNDLE";
inline constexpr std::string_view requires_existing_infrastructure =
    "REQUIRES_EXISTING_INFRASTRUCTURE";
}  // namespace blocker_codes

struct Blocker {
  std::string subject;
  std::string reason;
  std::string message;

  bool operator==(const Blocker&) const = default;
  auto operator<=>(const Blocker&) const = default;
};

enum class Verdict { compatible, incompatible };

std::string_view to_string(Verdict verdict) noexcept;

struct TargetReport {
  std::string technology;
  Verdict verdict = Verdict::compatible;
  std::vector<Blocker> blockers;  // sorted

  bool compatible() const noexcept { return verdict == Verdict::compatible; }
};

TargetReport check(const ValidatedModel& model, const Technology& technology);

/// Throws Error{unknown_technology}.
TargetReport check(const ValidatedModel& model, std::string_view technology_name);

std::string render_text(const TargetReport& report);

/// `verdict<TAB>technology<TAB>verdict<TAB>count` then
/// `blocker<TAB>technology<TAB>subject<TAB>reason<TAB>message` per blocker.
std::string render_machine(const TargetReport& report);

}  // namespace edmm
