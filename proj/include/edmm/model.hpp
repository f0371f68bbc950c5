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
 * @file model.hpp
 * @brief In-memory deployment model: a typed, directed graph of components
 * and relations, plus the read-only queries every later stage relies on.
 *
 * @par Thread Safety
 * A model is mutated only while it is being built. Every free function in
 * this header is a pure read and may be called concurrently on a shared
 * const model.
 */

#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "edmm/error.hpp"

namespace edmm {

enum class PropertyKind { string, integer, boolean, string_list };

std::string_view to_string(PropertyKind kind) noexcept;
std::optional<PropertyKind> property_kind_from_string(std::string_view text) noexcept;

/// Intrinsic reference to a model property (empty component) or to another
/// component's effective property.
struct Reference {
  std::string component;
  std::string property;

  bool targets_model() const noexcept { return component.empty(); }
  bool operator==(const Reference&) const = default;
  auto operator<=>(const Reference&) const = default;
};

using StringList = std::vector<std::string>;

/**
 * @brief A property value: one of the four literal kinds, or an unresolved
 * intrinsic reference.
 */
class PropertyValue {
 public:
  using Storage = std::variant<std::string, std::int64_t, bool, StringList, Reference>;

  PropertyValue() : value_(std::string{}) {}
  PropertyValue(std::string v) : value_(std::move(v)) {}
  PropertyValue(const char* v) : value_(std::string(v)) {}
  PropertyValue(std::int64_t v) : value_(v) {}
  PropertyValue(int v) : value_(static_cast<std::int64_t>(v)) {}
  PropertyValue(bool v) : value_(v) {}
  PropertyValue(StringList v) : value_(std::move(v)) {}
  PropertyValue(Reference v) : value_(std::move(v)) {}

  bool is_reference() const noexcept { return std::holds_alternative<Reference>(value_); }
  /// Kind of a literal value; empty for references.
  std::optional<PropertyKind> kind() const noexcept;

  const Storage& storage() const noexcept { return value_; }
  const std::string& as_string() const { return std::get<std::string>(value_); }
  std::int64_t as_integer() const { return std::get<std::int64_t>(value_); }
  bool as_boolean() const { return std::get<bool>(value_); }
  const StringList& as_list() const { return std::get<StringList>(value_); }
  const Reference& as_reference() const { return std::get<Reference>(value_); }

  /// Flat textual rendering used by emitters: lists are comma-joined,
  /// booleans are `true`/`false`, references render in `${...}` form.
  std::string to_text() const;

  bool operator==(const PropertyValue&) const = default;

 private:
  Storage value_;
};

using PropertyMap = std::map<std::string, PropertyValue>;

struct PropertyDeclaration {
  PropertyKind kind = PropertyKind::string;
  bool required = false;
  std::optional<PropertyValue> default_value;

  bool operator==(const PropertyDeclaration&) const = default;
};

enum class ArtifactKind { script, archive, container_image, binary, other };

std::string_view to_string(ArtifactKind kind) noexcept;
std::optional<ArtifactKind> artifact_kind_from_string(std::string_view text) noexcept;

struct Artifact {
  std::string name;
  std::string path;  // relative path or URI; never dereferenced by the model
  ArtifactKind kind = ArtifactKind::other;

  bool operator==(const Artifact&) const = default;
};

struct Operation {
  std::string name;
  Artifact artifact;

  bool operator==(const Operation&) const = default;
};

using OperationMap = std::map<std::string, Operation>;

/// Where a type definition came from.
enum class TypeOrigin { builtin, user, model };

std::string_view to_string(TypeOrigin origin) noexcept;

struct ComponentType {
  std::string name;
  std::optional<std::string> extends;
  std::map<std::string, PropertyDeclaration> properties;
  OperationMap operations;
  std::map<std::string, std::string> metadata;
  TypeOrigin origin = TypeOrigin::model;

  bool operator==(const ComponentType&) const = default;
};

struct RelationType {
  std::string name;
  std::optional<std::string> extends;
  std::map<std::string, PropertyDeclaration> properties;
  TypeOrigin origin = TypeOrigin::model;

  bool operator==(const RelationType&) const = default;
};

struct Component {
  std::string name;
  std::string type;
  PropertyMap properties;
  OperationMap operations;
  std::vector<Artifact> artifacts;

  bool operator==(const Component&) const = default;
};

struct Relation {
  std::string name;
  std::string type;
  std::string source;
  std::string target;
  PropertyMap properties;
  OperationMap operations;

  bool operator==(const Relation&) const = default;
};

using ComponentTypeMap = std::map<std::string, ComponentType>;
using RelationTypeMap = std::map<std::string, RelationType>;

/**
 * @brief The root aggregate. Type maps hold every type visible to the model
 * (catalog types plus model-local definitions, distinguished by origin).
 */
struct DeploymentModel {
  std::string name;
  std::vector<Component> components;
  std::vector<Relation> relations;
  ComponentTypeMap component_types;
  RelationTypeMap relation_types;
  PropertyMap properties;

  const Component* find_component(std::string_view component_name) const noexcept;
  Component* find_component(std::string_view component_name) noexcept;

  bool operator==(const DeploymentModel&) const = default;
};

/// Names of the builtin relation roots every ordering and mapping keys off.
namespace relation_names {
inline constexpr std::string_view depends_on = "depends_on";
inline constexpr std::string_view hosted_on = "hosted_on";
inline constexpr std::string_view connects_to = "connects_to";
}  // namespace relation_names

// ---------------------------------------------------------------------------
// Queries

/// Type chain for `type_name`, most-derived first.
/// Throws Error{unknown_type} or Error{cyclic_type_chain}.
std::vector<const ComponentType*> resolve_component_type(const DeploymentModel& model,
                                                         std::string_view type_name);

std::vector<const RelationType*> resolve_relation_type(const DeploymentModel& model,
                                                       std::string_view type_name);

/// True when `ancestor` is `type_name` or appears on its chain.
bool component_is_a(const DeploymentModel& model, std::string_view type_name,
                    std::string_view ancestor);
bool relation_is_a(const DeploymentModel& model, std::string_view type_name,
                   std::string_view ancestor);

/// Declarations visible on a type chain; the most-derived declaration wins.
std::map<std::string, PropertyDeclaration> declared_properties(const DeploymentModel& model,
                                                               std::string_view type_name);

/// Type metadata along the chain; nearest definition wins.
std::map<std::string, std::string> effective_metadata(const DeploymentModel& model,
                                                      std::string_view type_name);

/// Type-level operations overlaid with the component's own.
OperationMap effective_operations(const DeploymentModel& model, const Component& component);

/**
 * @brief Resolved property map of a component.
 *
 * Contains each declared property (override, else nearest default) plus
 * any ad-hoc overrides, with intrinsic references substituted.
 * Throws Error{unresolved_reference | reference_cycle | kind_mismatch}.
 */
PropertyMap effective_properties(const DeploymentModel& model, const Component& component);

/// Relation properties with intrinsics substituted and kinds checked.
PropertyMap effective_properties(const DeploymentModel& model, const Relation& relation);

/// Resolves a single value; literals pass through unchanged.
PropertyValue resolve_value(const DeploymentModel& model, const PropertyValue& value);

/// Component followed by its hosts down to the hosting leaf.
/// Throws Error{hosting_cycle | multiple_hosts | unknown_component}.
std::vector<const Component*> hosting_stack(const DeploymentModel& model,
                                            const Component& component);

/// Outgoing hosted_on relation of `component`, if any.
const Relation* host_relation(const DeploymentModel& model, const Component& component);

/**
 * @brief Deterministic topological order over the dependency graph:
 * relation targets precede sources, ties go to the lexicographically
 * smallest component name.
 *
 * Throws Error{dependency_cycle} with the cycle members as subjects.
 */
std::vector<std::string> deployment_order(const DeploymentModel& model);

/// Nearest builtin relation root on the chain of `relation.type`
/// (hosted_on, connects_to or depends_on).
std::string_view builtin_relation_kind(const DeploymentModel& model, const Relation& relation);

/// Components that nothing is hosted on.
std::vector<const Component*> stack_tops(const DeploymentModel& model);

}  // namespace edmm
