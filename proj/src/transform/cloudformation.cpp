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

#include <fmt/format.h>

#include <algorithm>
#include <optional>
#include <set>

#include "transform/plugins.hpp"

namespace edmm::plugins {

namespace {

constexpr std::string_view kResourceType = "cloudformation.resource_type";

class CloudFormation final : public TransformerPlugin {
 public:
  std::string_view target() const override { return "aws-cloudformation"; }

  Capabilities capabilities() const override {
    return {{ElementKind::component, ElementKind::relation, ElementKind::component_property,
             ElementKind::component_operation, ElementKind::artifact}};
  }

  void emit(EmitContext& ctx) const override {
    const auto& model = ctx.model();

    // Each component maps to itself when typed, else to the nearest typed host.
    std::map<std::string, const Component*> unit_of;
    for (const auto& c : model.components) {
      const Component* unit = nullptr;
      for (const auto* member : hosting_stack(model, c)) {
        if (ctx.metadata(*member, kResourceType)) {
          unit = member;
          break;
        }
      }
      if (unit == nullptr) {
        throw Error(Errc::unmappable_element,
                    fmt::format("aws-cloudformation has no resource type for '{}' or its hosts",
                                c.name),
                    {c.name});
      }
      unit_of[c.name] = unit;
    }

    IdAllocator ids(IdAllocator::Style::pascal);
    for (const auto& c : model.components) {
      if (unit_of[c.name] == &c) ids.id(c.name);
    }

    Json resources = Json::object();
    for (const auto& c : model.components) {
      if (unit_of[c.name] != &c) continue;
      const std::string& id = ids.id(c.name);

      std::vector<const Component*> members;
      for (const auto& m : model.components) {
        if (unit_of[m.name] == &c) members.push_back(&m);
      }
      std::stable_sort(members.begin(), members.end(), [&](const Component* a, const Component* b) {
        return ctx.order_index(a->name) < ctx.order_index(b->name);
      });

      Json resource = Json::object();
      resource["Type"] = *ctx.metadata(c, kResourceType);

      Json properties = Json::object();
      std::optional<Json> region;
      for (const auto& [name, value] : ctx.properties(c)) {
        if (name == "region") {
          region = json_value(value);
          continue;
        }
        properties[base_identifier(name, IdAllocator::Style::pascal)] = json_value(value);
      }
      std::string user_data;
      for (const auto* m : members) {
        for (const auto& [name, op] : ctx.lifecycle(*m)) {
          if (ctx.metadata(c, "delivery_model") != std::optional<std::string>("iaas")) {
            throw Error(Errc::unmappable_element,
                        fmt::format("aws-cloudformation cannot run operation '{}' of '{}' on "
                                    "non-compute resource '{}'",
                                    name, m->name, c.name),
                        {m->name});
          }
          std::string script = ctx.read_artifact(*m, op.artifact);
          if (!script.empty() && script.back() != '\n') script += '\n';
          user_data += fmt::format("# {} {}\n{}", m->name, name, script);
        }
      }
      if (!user_data.empty()) {
        properties["UserData"] = Json{{"Fn::Base64", "#!/bin/sh\n" + user_data}};
      }
      if (!properties.empty()) resource["Properties"] = std::move(properties);

      std::set<std::string> depends;
      for (const auto* r : ctx.edges()) {
        const Component* source_unit = unit_of[r->source];
        const Component* target_unit = unit_of[r->target];
        if (source_unit == &c && target_unit != &c) depends.insert(ids.id(target_unit->name));
      }
      if (!depends.empty()) resource["DependsOn"] = Json(depends);

      Json metadata = Json::object();
      metadata["EDMM::Component"] = c.name;
      if (region) metadata["EDMM::Region"] = *region;
      Json absorbed = Json::object();
      for (const auto* m : members) {
        if (m == &c) continue;
        Json props = Json::object();
        for (const auto& [name, value] : ctx.properties(*m)) props[name] = json_value(value);
        absorbed[m->name] = std::move(props);
        ctx.absorbed(*m, c);
      }
      if (!absorbed.empty()) metadata["EDMM::Absorbed"] = std::move(absorbed);
      resource["Metadata"] = std::move(metadata);

      resources[id] = std::move(resource);
      ctx.emitted(c, id);
    }
    for (const auto* r : ctx.edges()) {
      ctx.edge(*r, unit_of[r->source] == unit_of[r->target] ? "internal" : "DependsOn");
    }

    Json doc = Json::object();
    doc["AWSTemplateFormatVersion"] = "2010-09-09";
    doc["Description"] = model.name;
    doc["Resources"] = std::move(resources);
    ctx.files().add("template.json", doc.dump(2) + "\n");
  }
};

}  // namespace

std::unique_ptr<TransformerPlugin> make_cloudformation() {
  return std::make_unique<CloudFormation>();
}

}  // namespace edmm::plugins
