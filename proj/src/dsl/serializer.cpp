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

#include <set>

#include "dsl/literal_codec.hpp"
#include "edmm/dsl.hpp"
#include "yaml/yaml_tree.hpp"

namespace edmm::dsl {

using yaml::Json;

namespace {

Json value_json(const PropertyValue& value) {
  return std::visit(
      [](const auto& v) -> Json {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, std::string>) {
          return encode_literal(v);
        } else if constexpr (std::is_same_v<T, StringList>) {
          Json items = Json::array();
          for (const auto& s : v) items.push_back(encode_literal(s));
          return items;
        } else if constexpr (std::is_same_v<T, Reference>) {
          return encode_reference(v);
        } else {
          return v;
        }
      },
      value.storage());
}

Json properties_json(const PropertyMap& properties) {
  Json out = Json::object();
  for (const auto& [name, value] : properties) out[name] = value_json(value);
  return out;
}

Json declarations_json(const std::map<std::string, PropertyDeclaration>& declarations) {
  Json out = Json::object();
  for (const auto& [name, decl] : declarations) {
    Json d = Json::object();
    if (decl.default_value) d["default"] = value_json(*decl.default_value);
    d["kind"] = std::string(to_string(decl.kind));
    if (decl.required) d["required"] = true;
    out[name] = std::move(d);
  }
  return out;
}

Json artifact_json(const Artifact& artifact, const std::string* implied_name) {
  Json out = Json::object();
  out["kind"] = std::string(to_string(artifact.kind));
  if (implied_name == nullptr || artifact.name != *implied_name) out["name"] = artifact.name;
  out["path"] = artifact.path;
  return out;
}

Json operations_json(const OperationMap& operations) {
  Json out = Json::object();
  for (const auto& [name, op] : operations) {
    if (op.artifact.name == name && op.artifact.kind == ArtifactKind::script) {
      out[name] = op.artifact.path;
    } else {
      out[name] = artifact_json(op.artifact, &name);
    }
  }
  return out;
}

Json relation_json(const Relation& r) {
  static const std::set<std::string> long_form_keys{"name", "operations", "properties", "target",
                                                    "type"};
  bool short_form = r.name == default_relation_name(r.type, r.target) && r.properties.empty() &&
                    r.operations.empty() && !long_form_keys.contains(r.type);
  Json out = Json::object();
  if (short_form) {
    out[r.type] = r.target;
    return out;
  }
  out["name"] = r.name;
  if (!r.operations.empty()) out["operations"] = operations_json(r.operations);
  if (!r.properties.empty()) out["properties"] = properties_json(r.properties);
  out["target"] = r.target;
  out["type"] = r.type;
  return out;
}

}  // namespace

std::string serialize(const DeploymentModel& model) {
  Json doc = Json::object();
  doc["edmm_version"] = 1;
  doc["name"] = model.name;
  doc["properties"] = properties_json(model.properties);

  Json component_types = Json::object();
  for (const auto& [name, t] : model.component_types) {
    if (t.origin != TypeOrigin::model) continue;
    Json body = Json::object();
    if (t.extends) body["extends"] = *t.extends;
    if (!t.metadata.empty()) {
      Json meta = Json::object();
      for (const auto& [k, v] : t.metadata) meta[k] = v;
      body["metadata"] = std::move(meta);
    }
    if (!t.operations.empty()) body["operations"] = operations_json(t.operations);
    if (!t.properties.empty()) body["properties"] = declarations_json(t.properties);
    component_types[name] = std::move(body);
  }
  doc["component_types"] = std::move(component_types);

  Json relation_types = Json::object();
  for (const auto& [name, t] : model.relation_types) {
    if (t.origin != TypeOrigin::model) continue;
    Json body = Json::object();
    if (t.extends) body["extends"] = *t.extends;
    if (!t.properties.empty()) body["properties"] = declarations_json(t.properties);
    relation_types[name] = std::move(body);
  }
  doc["relation_types"] = std::move(relation_types);

  Json components = Json::object();
  for (const auto& c : model.components) {
    Json body = Json::object();
    if (!c.artifacts.empty()) {
      Json artifacts = Json::array();
      for (const auto& a : c.artifacts) artifacts.push_back(artifact_json(a, nullptr));
      body["artifacts"] = std::move(artifacts);
    }
    if (!c.operations.empty()) body["operations"] = operations_json(c.operations);
    if (!c.properties.empty()) body["properties"] = properties_json(c.properties);
    Json relations = Json::array();
    for (const auto& r : model.relations) {
      if (r.source == c.name) relations.push_back(relation_json(r));
    }
    if (!relations.empty()) body["relations"] = std::move(relations);
    body["type"] = c.type;
    components[c.name] = std::move(body);
  }
  doc["components"] = std::move(components);
  return yaml::emit(doc);
}

DeploymentModel resolve_intrinsics(const DeploymentModel& model) {
  DeploymentModel out = model;
  for (auto& [_, value] : out.properties) value = resolve_value(model, value);
  for (auto& c : out.components) {
    for (auto& [_, value] : c.properties) value = resolve_value(model, value);
  }
  for (auto& r : out.relations) {
    for (auto& [_, value] : r.properties) value = resolve_value(model, value);
  }
  return out;
}

}  // namespace edmm::dsl
