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

/**
 * @file dsl.hpp
 * @brief Textual `.edmm.yaml` syntax: multi-source parsing, canonical
 * serialization and intrinsic reference substitution.
 *
 * The grammar is documented in docs/dsl-reference.md.
 */

#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "edmm/catalog.hpp"
#include "edmm/model.hpp"

namespace edmm::dsl {

struct Source {
  std::string name;
  std::string text;
};

/// Ordered; names must be unique.
using SourceSet = std::vector<Source>;

/// Stable parse diagnostic codes.
namespace codes {
inline constexpr std::string_view syntax = "P001_SYNTAX";
inline constexpr std::string_view unknown_key = "P002_UNKNOWN_KEY";
inline constexpr std::string_view duplicate_component = "P003_DUPLICATE_COMPONENT";
inline constexpr std::string_view duplicate_type = "P004_DUPLICATE_TYPE";
inline constexpr std::string_view duplicate_key = "P005_DUPLICATE_KEY";
inline constexpr std::string_view invalid_value = "P006_INVALID_VALUE";
inline constexpr std::string_view unsupported_feature = "P007_UNSUPPORTED_FEATURE";
inline constexpr std::string_view version = "P008_VERSION";
inline constexpr std::string_view model_name = "P009_MODEL_NAME";
inline constexpr std::string_view duplicate_relation = "P010_DUPLICATE_RELATION";
inline constexpr std::string_view sources = "P011_SOURCES";
inline constexpr std::string_view invalid_reference = "P012_INVALID_REFERENCE";
inline constexpr std::string_view invalid_identifier = "P013_INVALID_IDENTIFIER";
}  // namespace codes

struct ParseDiagnostic {
  Severity severity = Severity::error;
  std::string source;
  int line = 1;
  int column = 1;
  std::string message;
  std::string code;
};

/// `source:line:column: severity code: message`
std::string format(const ParseDiagnostic& diagnostic);

struct ParseResult {
  std::optional<DeploymentModel> model;
  std::vector<ParseDiagnostic> diagnostics;

  bool ok() const noexcept { return model.has_value(); }
};

/**
 * Parses and merges `sources` in order into one model whose type maps hold
 * the `base` catalog plus model-local types. Referential checks (dangling
 * relations, unknown types) are left to validation. Never throws.
 */
ParseResult parse(const SourceSet& sources, const Catalog& base = builtin_catalog());

struct CatalogParseResult {
  std::optional<Catalog> catalog;
  std::vector<ParseDiagnostic> diagnostics;

  bool ok() const noexcept { return catalog.has_value(); }
};

/// Parses type-definition files (no components). Never throws.
CatalogParseResult parse_catalog(const SourceSet& sources, TypeOrigin origin = TypeOrigin::user);

/// Canonical text: fixed section order, sorted keys, components in
/// insertion order. Only model-local types are written.
std::string serialize(const DeploymentModel& model);

/// Copy of `model` with every intrinsic reference replaced by its literal.
/// Throws Error{unresolved_reference | reference_cycle}.
DeploymentModel resolve_intrinsics(const DeploymentModel& model);

/// Name given to an inline relation declared without an explicit name.
std::string default_relation_name(std::string_view type, std::string_view target);

/// Lexical checks shared with validation.
bool is_identifier(std::string_view text) noexcept;
bool is_component_name(std::string_view text) noexcept;

}  // namespace edmm::dsl
