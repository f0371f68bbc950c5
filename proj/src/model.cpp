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

#include "edmm/model.hpp"

#include <algorithm>
#include <functional>
#include <set>
#include <unordered_map>
#include <unordered_set>

#include <fmt/format.h>

namespace edmm {

std::string_view to_string(Errc code) noexcept {
  switch (code) {
    case Errc::unknown_type: return "UnknownType";
    case Errc::cyclic_type_chain: return "CyclicTypeChain";
    case Errc::unknown_component: return "UnknownComponent";
    case Errc::unresolved_reference: return "UnresolvedReference";
    case Errc::reference_cycle: return "ReferenceCycle";
    case Errc::kind_mismatch: return "KindMismatch";
    case Errc::hosting_cycle: return "HostingCycle";
    case Errc::multiple_hosts: return "MultipleHosts";
    case Errc::dependency_cycle: return "DependencyCycle";
    case Errc::name_collision: return "NameCollision";
    case Errc::unknown_parent: return "UnknownParent";
    case Errc::validation_failed: return "ValidationFailed";
    case Errc::unknown_technology: return "UnknownTechnology";
    case Errc::incompatible_model: return "IncompatibleModel";
    case Errc::unmappable_element: return "UnmappableElement";
    case Errc::missing_artifact_file: return "MissingArtifactFile";
    case Errc::invalid_data: return "InvalidData";
  }
  return "Unknown";
}

std::string_view to_string(Severity severity) noexcept {
  return severity == Severity::error ? "error" : "warning";
}

std::string_view to_string(PropertyKind kind) noexcept {
  switch (kind) {
    case PropertyKind::string: return "string";
    case PropertyKind::integer: return "integer";
    case PropertyKind::boolean: return "boolean";
    case PropertyKind::string_list: return "list";
  }
  return "string";
}

std::optional<PropertyKind> property_kind_from_string(std::string_view text) noexcept {
  if (text == "string") return PropertyKind::string;
  if (text == "integer") return PropertyKind::integer;
  if (text == "boolean") return PropertyKind::boolean;
  if (text == "list") return PropertyKind::string_list;
  return std::nullopt;
}

std::string_view to_string(ArtifactKind kind) noexcept {
  switch (kind) {
    case ArtifactKind::script: return "script";
    case ArtifactKind::archive: return "archive";
    case ArtifactKind::container_image: return "container-image";
    case ArtifactKind::binary: return "binary";
    case ArtifactKind::other: return "other";
  }
  return "other";
}

std::optional<ArtifactKind> artifact_kind_from_string(std::string_view text) noexcept {
  if (text == "script") return ArtifactKind::script;
  if (text == "archive") return ArtifactKind::archive;
  if (text == "container-image") return ArtifactKind::container_image;
  if (text == "binary") return ArtifactKind::binary;
  if (text == "other") return ArtifactKind::other;
  return std::nullopt;
}

std::string_view to_string(TypeOrigin origin) noexcept {
  switch (origin) {
    case TypeOrigin::builtin: return "builtin";
    case TypeOrigin::user: return "user";
    case TypeOrigin::model: return "model";
  }
  return "model";
}

std::optional<PropertyKind> PropertyValue::kind() const noexcept {
  switch (value_.index()) {
    case 0: return PropertyKind::string;
    case 1: return PropertyKind::integer;
    case 2: return PropertyKind::boolean;
    case 3: return PropertyKind::string_list;
    default: return std::nullopt;
  }
}

std::string PropertyValue::to_text() const {
  return std::visit(
      [](const auto& v) -> std::string {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, std::string>) {
          return v;
        } else if constexpr (std::is_same_v<T, std::int64_t>) {
          return std::to_string(v);
        } else if constexpr (std::is_same_v<T, bool>) {
          return v ? "true" : "false";
        } else if constexpr (std::is_same_v<T, StringList>) {
          return fmt::format("{}", fmt::join(v, ","));
        } else {
          return v.targets_model() ? fmt::format("${{{}}}", v.property)
                                   : fmt::format("${{{}::{}}}", v.component, v.property);
        }
      },
      value_);
}

const Component* DeploymentModel::find_component(std::string_view component_name) const noexcept {
  auto it = std::find_if(components.begin(), components.end(),
                         [&](const Component& c) { return c.name == component_name; });
  return it == components.end() ? nullptr : &*it;
}

Component* DeploymentModel::find_component(std::string_view component_name) noexcept {
  auto it = std::find_if(components.begin(), components.end(),
                         [&](const Component& c) { return c.name == component_name; });
  return it == components.end() ? nullptr : &*it;
}

namespace {

template <typename TypeMap>
std::vector<const typename TypeMap::mapped_type*> resolve_chain(const TypeMap& types,
                                                                std::string_view type_name) {
  std::vector<const typename TypeMap::mapped_type*> chain;
  std::set<std::string, std::less<>> seen;
  std::string current(type_name);
  while (true) {
    auto it = types.find(current);
    if (it == types.end()) {
      if (chain.empty()) {
        throw Error(Errc::unknown_type, fmt::format("unknown type '{}'", current), {current});
      }
      throw Error(Errc::unknown_type,
                  fmt::format("type '{}' extends unknown type '{}'", chain.back()->name, current),
                  {chain.back()->name, current});
    }
    if (!seen.insert(current).second) {
      std::vector<std::string> members;
      for (const auto* t : chain) members.push_back(t->name);
      throw Error(Errc::cyclic_type_chain,
                  fmt::format("type '{}' is its own ancestor", current), members);
    }
    chain.push_back(&it->second);
    if (!it->second.extends) break;
    current = *it->second.extends;
  }
  return chain;
}

const PropertyValue* raw_component_value(const DeploymentModel& model, const Component& component,
                                         const std::string& property) {
  if (auto it = component.properties.find(property); it != component.properties.end()) {
    return &it->second;
  }
  for (const auto* type : resolve_component_type(model, component.type)) {
    if (auto it = type->properties.find(property); it != type->properties.end()) {
      return it->second.default_value ? &*it->second.default_value : nullptr;
    }
  }
  return nullptr;
}

class ReferenceResolver {
 public:
  explicit ReferenceResolver(const DeploymentModel& model) : model_(model) {}

  PropertyValue resolve(const PropertyValue& value) {
    if (!value.is_reference()) return value;
    const Reference& ref = value.as_reference();
    auto in_progress = std::find(stack_.begin(), stack_.end(), ref);
    if (in_progress != stack_.end()) {
      std::vector<std::string> members;
      for (auto it = in_progress; it != stack_.end(); ++it) {
        members.push_back(PropertyValue(*it).to_text());
      }
      throw Error(Errc::reference_cycle,
                  fmt::format("reference cycle through {}", PropertyValue(ref).to_text()), members);
    }

    const PropertyValue* target = nullptr;
    if (ref.targets_model()) {
      if (auto it = model_.properties.find(ref.property); it != model_.properties.end()) {
        target = &it->second;
      }
    } else if (const Component* c = model_.find_component(ref.component)) {
      target = raw_component_value(model_, *c, ref.property);
    }
    if (target == nullptr) {
      throw Error(Errc::unresolved_reference,
                  fmt::format("reference {} does not name an existing property",
                              PropertyValue(ref).to_text()),
                  {PropertyValue(ref).to_text()});
    }

    stack_.push_back(ref);
    PropertyValue resolved = resolve(*target);
    stack_.pop_back();
    return resolved;
  }

 private:
  const DeploymentModel& model_;
  std::vector<Reference> stack_;
};

PropertyMap resolve_against(const DeploymentModel& model, const std::string& subject,
                            const std::map<std::string, PropertyDeclaration>& declarations,
                            const PropertyMap& overrides) {
  PropertyMap result;
  ReferenceResolver resolver(model);
  auto check_kind = [&](const std::string& property, const PropertyValue& value) {
    auto decl = declarations.find(property);
    if (decl != declarations.end() && value.kind() != decl->second.kind) {
      throw Error(Errc::kind_mismatch,
                  fmt::format("property '{}' of '{}' is declared {} but holds a {}", property,
                              subject, to_string(decl->second.kind),
                              to_string(value.kind().value_or(PropertyKind::string))),
                  {subject, property});
    }
  };
  for (const auto& [property, decl] : declarations) {
    if (auto it = overrides.find(property); it != overrides.end()) {
      result.emplace(property, resolver.resolve(it->second));
    } else if (decl.default_value) {
      result.emplace(property, resolver.resolve(*decl.default_value));
    }
  }
  for (const auto& [property, value] : overrides) {
    if (!result.contains(property)) result.emplace(property, resolver.resolve(value));
  }
  for (const auto& [property, value] : result) check_kind(property, value);
  return result;
}

bool is_hosting(const DeploymentModel& model, const Relation& relation) {
  return relation_is_a(model, relation.type, relation_names::hosted_on);
}

}  // namespace

std::vector<const ComponentType*> resolve_component_type(const DeploymentModel& model,
                                                         std::string_view type_name) {
  return resolve_chain(model.component_types, type_name);
}

std::vector<const RelationType*> resolve_relation_type(const DeploymentModel& model,
                                                       std::string_view type_name) {
  return resolve_chain(model.relation_types, type_name);
}

bool component_is_a(const DeploymentModel& model, std::string_view type_name,
                    std::string_view ancestor) {
  for (const auto* t : resolve_component_type(model, type_name)) {
    if (t->name == ancestor) return true;
  }
  return false;
}

bool relation_is_a(const DeploymentModel& model, std::string_view type_name,
                   std::string_view ancestor) {
  for (const auto* t : resolve_relation_type(model, type_name)) {
    if (t->name == ancestor) return true;
  }
  return false;
}

std::map<std::string, PropertyDeclaration> declared_properties(const DeploymentModel& model,
                                                               std::string_view type_name) {
  std::map<std::string, PropertyDeclaration> result;
  for (const auto* t : resolve_component_type(model, type_name)) {
    for (const auto& [name, decl] : t->properties) result.emplace(name, decl);
  }
  return result;
}

std::map<std::string, std::string> effective_metadata(const DeploymentModel& model,
                                                      std::string_view type_name) {
  std::map<std::string, std::string> result;
  for (const auto* t : resolve_component_type(model, type_name)) {
    for (const auto& [key, value] : t->metadata) result.emplace(key, value);
  }
  return result;
}

OperationMap effective_operations(const DeploymentModel& model, const Component& component) {
  OperationMap result = component.operations;
  for (const auto* t : resolve_component_type(model, component.type)) {
    for (const auto& [name, op] : t->operations) result.emplace(name, op);
  }
  return result;
}

PropertyMap effective_properties(const DeploymentModel& model, const Component& component) {
  return resolve_against(model, component.name, declared_properties(model, component.type),
                         component.properties);
}

PropertyMap effective_properties(const DeploymentModel& model, const Relation& relation) {
  std::map<std::string, PropertyDeclaration> declarations;
  for (const auto* t : resolve_relation_type(model, relation.type)) {
    for (const auto& [name, decl] : t->properties) declarations.emplace(name, decl);
  }
  return resolve_against(model, relation.source + ":" + relation.name, declarations,
                         relation.properties);
}

PropertyValue resolve_value(const DeploymentModel& model, const PropertyValue& value) {
  ReferenceResolver resolver(model);
  return resolver.resolve(value);
}

const Relation* host_relation(const DeploymentModel& model, const Component& component) {
  const Relation* host = nullptr;
  for (const auto& r : model.relations) {
    if (r.source != component.name || !is_hosting(model, r)) continue;
    if (host != nullptr) {
      throw Error(Errc::multiple_hosts,
                  fmt::format("component '{}' is hosted on both '{}' and '{}'", component.name,
                              host->target, r.target),
                  {component.name});
    }
    host = &r;
  }
  return host;
}

std::vector<const Component*> hosting_stack(const DeploymentModel& model,
                                            const Component& component) {
  std::vector<const Component*> stack{&component};
  std::unordered_set<std::string> seen{component.name};
  const Component* current = &component;
  while (const Relation* host = host_relation(model, *current)) {
    const Component* next = model.find_component(host->target);
    if (next == nullptr) {
      throw Error(Errc::unknown_component,
                  fmt::format("'{}' is hosted on unknown component '{}'", current->name,
                              host->target),
                  {host->target});
    }
    if (!seen.insert(next->name).second) {
      std::vector<std::string> members;
      for (const auto* c : stack) members.push_back(c->name);
      throw Error(Errc::hosting_cycle,
                  fmt::format("hosting cycle through '{}'", next->name), members);
    }
    stack.push_back(next);
    current = next;
  }
  return stack;
}

std::vector<std::string> deployment_order(const DeploymentModel& model) {
  std::map<std::string, std::size_t> pending;  // name -> unmet dependencies
  std::unordered_map<std::string, std::vector<std::string>> dependents;
  for (const auto& c : model.components) pending.emplace(c.name, 0);

  for (const auto& r : model.relations) {
    if (!relation_is_a(model, r.type, relation_names::depends_on)) continue;
    for (const auto* endpoint : {&r.source, &r.target}) {
      if (!pending.contains(*endpoint)) {
        throw Error(Errc::unknown_component,
                    fmt::format("relation '{}' references unknown component '{}'", r.name,
                                *endpoint),
                    {*endpoint});
      }
    }
    ++pending[r.source];
    dependents[r.target].push_back(r.source);
  }

  std::set<std::string> ready;
  for (const auto& [name, count] : pending) {
    if (count == 0) ready.insert(name);
  }
  std::vector<std::string> order;
  order.reserve(pending.size());
  while (!ready.empty()) {
    std::string next = *ready.begin();
    ready.erase(ready.begin());
    for (const auto& dependent : dependents[next]) {
      if (--pending[dependent] == 0) ready.insert(dependent);
    }
    order.push_back(std::move(next));
  }
  if (order.size() == pending.size()) return order;

  // Walk dependencies from any blocked node until a node repeats.
  std::unordered_map<std::string, std::vector<std::string>> depends;
  for (const auto& r : model.relations) {
    if (pending[r.source] > 0 && pending[r.target] > 0 &&
        relation_is_a(model, r.type, relation_names::depends_on)) {
      depends[r.source].push_back(r.target);
    }
  }
  for (auto& [_, targets] : depends) std::sort(targets.begin(), targets.end());
  std::string start;
  for (const auto& [name, count] : pending) {
    if (count > 0) {
      start = name;
      break;
    }
  }
  std::vector<std::string> path;
  std::unordered_map<std::string, std::size_t> position;
  std::string current = start;
  while (!position.contains(current)) {
    position.emplace(current, path.size());
    path.push_back(current);
    current = depends[current].front();
  }
  std::vector<std::string> cycle(path.begin() + static_cast<std::ptrdiff_t>(position[current]),
                                 path.end());
  throw Error(Errc::dependency_cycle,
              fmt::format("dependency cycle: {} -> {}", fmt::join(cycle, " -> "), cycle.front()),
              cycle);
}

std::string_view builtin_relation_kind(const DeploymentModel& model, const Relation& relation) {
  for (const auto* t : resolve_relation_type(model, relation.type)) {
    if (t->name == relation_names::hosted_on) return relation_names::hosted_on;
    if (t->name == relation_names::connects_to) return relation_names::connects_to;
    if (t->name == relation_names::depends_on) return relation_names::depends_on;
  }
  return {};
}

std::vector<const Component*> stack_tops(const DeploymentModel& model) {
  std::unordered_set<std::string> hosts;
  for (const auto& r : model.relations) {
    if (is_hosting(model, r)) hosts.insert(r.target);
  }
  std::vector<const Component*> tops;
  for (const auto& c : model.components) {
    if (!hosts.contains(c.name)) tops.push_back(&c);
  }
  return tops;
}

}  // namespace edmm
