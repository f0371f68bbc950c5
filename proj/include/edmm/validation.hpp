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

#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "edmm/catalog.hpp"
#include "edmm/error.hpp"
#include "edmm/model.hpp"

namespace edmm {

namespace diagnostic_codes {
inline constexpr std::string_view unknown_type = "E001_UNKNOWN_TYPE";
inline constexpr std::string_view dangling_relation = "E002_DANGLING_RELATION";
inline constexpr std::string_view hosting_cycle = "E003_HOSTING_CYCLE";
inline constexpr std::string_view multiple_hosts = "E004_MULTIPLE_HOSTS";
inline constexpr std::string_view kind_mismatch = "E005_KIND_MISMATCH";
inline constexpr std::string_view missing_required_property = "E006_MISSING_REQUIRED_PROPERTY";
inline constexpr std::string_view self_loop = "E007_SELF_LOOP";
inline constexpr std::string_view cyclic_type_chain = "E008_CYCLIC_TYPE_CHAIN";
inline constexpr std::string_view dependency_cycle = "E009_DEPENDENCY_CYCLE";
inline constexpr std::string_view unresolved_reference = "E010_UNRESOLVED_REFERENCE";
inline constexpr std::string_view reference_cycle = "E011_REFERENCE_CYCLE";
inline constexpr std::string_view type_collision = "E012_TYPE_COLLISION";
inline constexpr std::string_view invalid_artifact = "E013_INVALID_ARTIFACT";
inline constexpr std::string_view relation_type_root = "E014_RELATION_TYPE_ROOT";
inline constexpr std::string_view duplicate_name = "E015_DUPLICATE_NAME";
inline constexpr std::string_view invalid_name = "E016_INVALID_NAME";
inline constexpr std::string_view adhoc_property = "W001_ADHOC_PROPERTY";
inline constexpr std::string_view unreachable_component = "W002_UNREACHABLE_COMPONENT";
}  // namespace diagnostic_codes

struct Diagnostic {
  Severity severity = Severity::error;
  std::string code;
  std::string subject;
  std::string message;

  bool operator==(const Diagnostic&) const = default;
};

/// Subject string used for a relation in diagnostics and blockers.
std::string relation_subject(const Relation& relation);

/**
 * Checks `model` against `catalog` plus the model's own local types.
 * Pure; result is sorted by (severity, code, subject, message).
 */
std::vector<Diagnostic> validate(const DeploymentModel& model,
                                 const Catalog& catalog = builtin_catalog());

std::size_t count(const std::vector<Diagnostic>& diagnostics, Severity severity) noexcept;

class ValidationFailed : public Error {
 public:
  explicit ValidationFailed(std::vector<Diagnostic> diagnostics);

  const std::vector<Diagnostic>& diagnostics() const noexcept { return diagnostics_; }

 private:
  std::vector<Diagnostic> diagnostics_;
};

/**
 * Certificate that a model passed validation. Holds the model with
 * intrinsic references substituted and the catalog types installed.
 * Only assert_valid creates one.
 */
class ValidatedModel {
 public:
  const DeploymentModel& model() const noexcept { return *model_; }
  const std::vector<Diagnostic>& warnings() const noexcept { return warnings_; }

 private:
  friend ValidatedModel assert_valid(const DeploymentModel&, const Catalog&);
  ValidatedModel(std::shared_ptr<const DeploymentModel> model, std::vector<Diagnostic> warnings)
      : model_(std::move(model)), warnings_(std::move(warnings)) {}

  std::shared_ptr<const DeploymentModel> model_;
  std::vector<Diagnostic> warnings_;
};

/// Throws ValidationFailed when validate reports any error.
ValidatedModel assert_valid(const DeploymentModel& model,
                            const Catalog& catalog = builtin_catalog());

/// `severity code [subject]: message`, one per line.
std::string render_text(const std::vector<Diagnostic>& diagnostics);

/// `diagnostic<TAB>severity<TAB>code<TAB>subject<TAB>message`, one per line.
std::string render_machine(const std::vector<Diagnostic>& diagnostics);

/// `N errors, M warnings`
std::string summary_line(const std::vector<Diagnostic>& diagnostics);

/// Escapes backslash, tab, newline and carriage return for tab-separated records.
std::string escape_field(std::string_view text);

}  // namespace edmm
