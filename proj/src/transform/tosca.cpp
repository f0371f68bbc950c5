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

// Service template in TOSCA Simple Profile YAML 1.3.

#include <fmt/format.h>

#include <set>

#include "transform/plugins.hpp"

namespace edmm::plugins {

namespace {

constexpr std::string_view kInterfaceType = "edmm.interfaces.Lifecycle";
constexpr std::string_view kInterface = "Lifecycle";

std::string node_type_name(std::string_view type) { return fmt::format("edmm.nodes.{}", type); }
std::string relationship_type_name(std::string_view type) {
  return fmt::format("edmm.relationships.{}", type);
}

std::string normative_relationship(std::string_view kind) {
  if (kind == relation_names::hosted_on) return "tosca.relationships.HostedOn";
  if (kind == relation_names::connects_to) return "tosca.relationships.ConnectsTo";
  return "tosca.relationships.DependsOn";
}

std::string requirement_name(std::string_view kind) {
  if (kind == relation_names::hosted_on) return "host";
  if (kind == relation_names::connects_to) return "connection";
  return "dependency";
}

std::string tosca_kind(PropertyKind kind) {
  switch (kind) {
    case PropertyKind::integer: return "integer";
    case PropertyKind::boolean: return "boolean";
    case PropertyKind::string_list: return "list";
    case PropertyKind::string: break;
  }
  return "string";
}

std::string artifact_type(ArtifactKind kind) {
  switch (kind) {
    case ArtifactKind::container_image: return "tosca.artifacts.Deployment.Image";
    case ArtifactKind::script: return "tosca.artifacts.Implementation.Bash";
    case ArtifactKind::archive: return "tosca.artifacts.Deployment";
    case ArtifactKind::binary: return "tosca.artifacts.Deployment";
    case ArtifactKind::other: break;
  }
  return "tosca.artifacts.File";
}

Json property_definitions(const std::map<std::string, PropertyDeclaration>& declarations) {
  Json out = Json::object();
  for (const auto& [name, decl] : declarations) {
    Json def = Json::object();
    def["type"] = tosca_kind(decl.kind);
    if (decl.kind == PropertyKind::string_list) def["entry_schema"] = Json{{"type", "string"}};
    def["required"] = decl.required;
    if (decl.default_value && !decl.default_value->is_reference()) {
      def["default"] = json_value(*decl.default_value);
    }
    out[name] = std::move(def);
  }
  return out;
}

Json operations_json(const OperationMap& operations) {
  Json out = Json::object();
  for (const auto& [name, op] : operations) {
    out[name] = Json{{"implementation", Json{{"primary", op.artifact.path}}}};
  }
  return out;
}

class Tosca final : public TransformerPlugin {
 public:
  std::string_view target() const override { return "tosca"; }

  Capabilities capabilities() const override {
    return {{ElementKind::component, ElementKind::relation, ElementKind::component_property,
             ElementKind::relation_property, ElementKind::component_operation,
             ElementKind::relation_operation, ElementKind::artifact,
             ElementKind::custom_relation_type}};
  }

  void emit(EmitContext& ctx) const override {
    const auto& model = ctx.model();

    std::set<std::string> operation_names;
    std::set<std::string> node_types;
    for (const auto& c : model.components) {
      for (const auto* t : resolve_component_type(model, c.type)) {
        node_types.insert(t->name);
        for (const auto& [name, _] : t->operations) operation_names.insert(name);
      }
      for (const auto& [name, _] : c.operations) operation_names.insert(name);
    }
    std::set<std::string> relationship_types;
    for (const auto& r : model.relations) {
      for (const auto* t : resolve_relation_type(model, r.type)) {
        if (t->origin != TypeOrigin::builtin) relationship_types.insert(t->name);
      }
      for (const auto& [name, _] : r.operations) operation_names.insert(name);
    }

    Json doc = Json::object();
    doc["tosca_definitions_version"] = "tosca_simple_yaml_1_3";
    doc["metadata"] = Json{{"template_name", model.name}, {"template_version", "1.0"}};

    Json interface_ops = Json::object();
    for (const auto& name : operation_names) {
      interface_ops[name] = Json{{"description", fmt::format("{} operation", name)}};
    }
    Json interface_type = Json::object();
    interface_type["derived_from"] = "tosca.interfaces.Root";
    interface_type["operations"] = std::move(interface_ops);
    doc["interface_types"] = Json{{std::string(kInterfaceType), std::move(interface_type)}};

    Json node_types_json = Json::object();
    for (const auto& name : node_types) {
      const auto& t = model.component_types.at(name);
      Json def = Json::object();
      def["derived_from"] = t.extends ? node_type_name(*t.extends) : "tosca.nodes.Root";
      if (!t.metadata.empty()) {
        Json meta = Json::object();
        for (const auto& [k, v] : t.metadata) meta[k] = v;
        def["metadata"] = std::move(meta);
      }
      if (!t.properties.empty()) def["properties"] = property_definitions(t.properties);
      if (!t.extends) {
        def["requirements"] = Json::array({
            Json{{"host", Json{{"capability", "tosca.capabilities.Node"},
                               {"relationship", "tosca.relationships.HostedOn"},
                               {"occurrences", Json::array({0, 1})}}}},
            Json{{"connection", Json{{"capability", "tosca.capabilities.Node"},
                                     {"relationship", "tosca.relationships.ConnectsTo"},
                                     {"occurrences", Json::array({0, "UNBOUNDED"})}}}},
        });
        def["interfaces"] = Json{{std::string(kInterface), Json{{"type", kInterfaceType}}}};
      }
      if (!t.operations.empty()) {
        def["interfaces"] = Json{{std::string(kInterface),
                                  Json{{"type", kInterfaceType},
                                       {"operations", operations_json(t.operations)}}}};
      }
      node_types_json[node_type_name(name)] = std::move(def);
    }
    doc["node_types"] = std::move(node_types_json);

    if (!relationship_types.empty()) {
      Json rel_types = Json::object();
      for (const auto& name : relationship_types) {
        const auto& t = model.relation_types.at(name);
        Json def = Json::object();
        const auto& parent = model.relation_types.at(*t.extends);
        def["derived_from"] = parent.origin == TypeOrigin::builtin
                                  ? normative_relationship(parent.name)
                                  : relationship_type_name(parent.name);
        if (!t.properties.empty()) def["properties"] = property_definitions(t.properties);
        def["interfaces"] = Json{{std::string(kInterface), Json{{"type", kInterfaceType}}}};
        rel_types[relationship_type_name(name)] = std::move(def);
      }
      doc["relationship_types"] = std::move(rel_types);
    }

    IdAllocator nodes(IdAllocator::Style::snake);
    for (const auto& c : model.components) nodes.id(c.name);
    IdAllocator relationships(IdAllocator::Style::snake);

    Json topology = Json::object();
    if (!model.properties.empty()) {
      Json inputs = Json::object();
      for (const auto& [name, value] : model.properties) {
        auto kind = value.kind().value_or(PropertyKind::string);
        inputs[name] = Json{{"type", tosca_kind(kind)}, {"default", json_value(value)}};
      }
      topology["inputs"] = std::move(inputs);
    }

    Json node_templates = Json::object();
    Json relationship_templates = Json::object();
    for (const auto& c : model.components) {
      Json node = Json::object();
      node["type"] = node_type_name(c.type);
      node["metadata"] = Json{{"edmm.component", c.name}};
      Json props = Json::object();
      for (const auto& [name, value] : ctx.properties(c)) props[name] = json_value(value);
      if (!props.empty()) node["properties"] = std::move(props);
      if (!c.artifacts.empty()) {
        Json artifacts = Json::object();
        for (const auto& a : c.artifacts) {
          artifacts[a.name] = Json{{"type", artifact_type(a.kind)}, {"file", a.path}};
        }
        node["artifacts"] = std::move(artifacts);
      }
      if (!c.operations.empty()) {
        node["interfaces"] = Json{{std::string(kInterface),
                                   Json{{"operations", operations_json(c.operations)}}}};
      }
      Json requirements = Json::array();
      for (const auto* r : ctx.edges()) {
        if (r->source != c.name) continue;
        const std::string& rel_id = relationships.id(relation_subject(*r));
        auto kind = ctx.relation_kind(*r);
        Json rel = Json::object();
        auto type = model.relation_types.at(r->type);
        rel["type"] = type.origin == TypeOrigin::builtin ? normative_relationship(r->type)
                                                         : relationship_type_name(r->type);
        rel["metadata"] = Json{{"edmm.relation", r->name}};
        Json rel_props = Json::object();
        for (const auto& [name, value] : effective_properties(model, *r)) {
          rel_props[name] = json_value(value);
        }
        if (!rel_props.empty()) rel["properties"] = std::move(rel_props);
        if (!r->operations.empty()) {
          rel["interfaces"] = Json{{std::string(kInterface),
                                    Json{{"operations", operations_json(r->operations)}}}};
        }
        relationship_templates[rel_id] = std::move(rel);
        requirements.push_back(Json{
            {requirement_name(kind), Json{{"node", nodes.id(r->target)}, {"relationship", rel_id}}}});
        ctx.edge(*r, "requirement");
      }
      if (!requirements.empty()) node["requirements"] = std::move(requirements);
      node_templates[nodes.id(c.name)] = std::move(node);
      ctx.emitted(c, nodes.id(c.name));
    }
    topology["node_templates"] = std::move(node_templates);
    if (!relationship_templates.empty()) {
      topology["relationship_templates"] = std::move(relationship_templates);
    }
    doc["topology_template"] = std::move(topology);

    ctx.files().add("service-template.yaml", yaml::emit(doc));
  }
};

}  // namespace

std::unique_ptr<TransformerPlugin> make_tosca() { return std::make_unique<Tosca>(); }

}  // namespace edmm::plugins
