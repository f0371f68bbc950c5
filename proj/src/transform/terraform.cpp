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

// JSON-syntax configuration: one resource per component.

#include <fmt/format.h>
#include <fmt/ranges.h>

#include <set>

#include "transform/plugins.hpp"

namespace edmm::plugins {

namespace {

constexpr std::string_view kNullResource = "null_resource";

const std::map<std::string, std::string>& provider_blocks() {
  static const std::map<std::string, std::string> names{
      {"aws", "aws"}, {"azure", "azurerm"}, {"openstack", "openstack"}};
  return names;
}

/// Escapes template sequences so user text stays literal.
std::string literal(const std::string& text) {
  std::string out;
  for (std::size_t i = 0; i < text.size(); ++i) {
    if ((text[i] == '$' || text[i] == '%') && i + 1 < text.size() && text[i + 1] == '{') out += text[i];
    out += text[i];
  }
  return out;
}

Json literal(Json value) {
  if (value.is_string()) return literal(value.get<std::string>());
  if (value.is_array()) {
    for (auto& item : value) item = literal(std::move(item));
  }
  return value;
}

class Terraform final : public TransformerPlugin {
 public:
  std::string_view target() const override { return "terraform"; }

  Capabilities capabilities() const override {
    return {{ElementKind::component, ElementKind::relation, ElementKind::component_property,
             ElementKind::component_operation, ElementKind::artifact}};
  }

  void emit(EmitContext& ctx) const override {
    const auto& model = ctx.model();
    IdAllocator ids(IdAllocator::Style::snake);
    std::map<std::string, std::string> address;  // component -> type.name
    for (const auto& c : model.components) {
      address[c.name] = fmt::format("{}.{}", resource_type(ctx, c), ids.id(c.name));
    }

    auto host_expression = [&](const Component& c) -> std::optional<std::string> {
      for (const auto* member : hosting_stack(model, c)) {
        if (auto attr = ctx.metadata(*member, "terraform.host_attribute")) {
          if (member == &c) return fmt::format("${{self.{}}}", *attr);
          return fmt::format("${{{}.{}}}", address[member->name], *attr);
        }
      }
      return std::nullopt;
    };
    auto endpoint_expression = [&](const Component& target) {
      for (const auto* member : hosting_stack(model, target)) {
        auto attr = ctx.metadata(*member, "terraform.endpoint_attribute");
        if (!attr) attr = ctx.metadata(*member, "terraform.host_attribute");
        if (attr) return fmt::format("${{{}.{}}}", address[member->name], *attr);
      }
      auto props = ctx.properties(target);
      if (auto it = props.find("address"); it != props.end()) return literal(text_value(it->second));
      return fmt::format("${{{}.id}}", address[target.name]);
    };

    Json resources = Json::object();
    Json locals = Json::object();
    std::map<std::string, Json> providers;

    for (const auto& c : model.components) {
      const std::string type = resource_type(ctx, c);
      const std::string& id = ids.id(c.name);
      Json body = Json::object();

      auto props = ctx.properties(c);
      if (type == kNullResource) {
        Json triggers = Json::object();
        for (const auto& [name, value] : props) triggers[name] = literal(text_value(value));
        body["triggers"] = std::move(triggers);
      } else {
        for (const auto& [name, value] : props) body[name] = literal(json_value(value));
      }

      std::set<std::string> depends;
      for (const auto* r : ctx.edges()) {
        if (r->source != c.name) continue;
        depends.insert(address[r->target]);
        if (ctx.relation_kind(*r) == relation_names::connects_to) {
          const std::string local = fmt::format("{}__{}__address", id, ids.id(r->target));
          locals[local] = endpoint_expression(*model.find_component(r->target));
          if (type == kNullResource) {
            body["triggers"][env_name(r->target) + "_ADDRESS"] = fmt::format("${{local.{}}}", local);
          }
        }
      }
      body["depends_on"] = Json(depends);

      auto ops = ctx.lifecycle(c);
      if (!ops.empty()) {
        Json provisioners = Json::array();
        if (auto host = host_expression(c)) {
          Json scripts = Json::array();
          for (const auto& [_, op] : ops) scripts.push_back(literal(op.artifact.path));
          provisioners.push_back(Json{{"remote-exec", Json{{"scripts", std::move(scripts)}}}});
          body["connection"] = Json{{"type", "ssh"}, {"host", *host}};
        } else {
          for (const auto& [_, op] : ops) {
            provisioners.push_back(
                Json{{"local-exec", Json{{"command", literal(fmt::format("sh '{}'", op.artifact.path))}}}});
          }
        }
        body["provisioner"] = std::move(provisioners);
      }

      if (auto provider = ctx.metadata(c, "provider")) {
        if (auto block = provider_blocks().find(*provider); block != provider_blocks().end()) {
          Json& config = providers[block->second];
          if (config.is_null()) config = Json::object();
          if (block->second == "azurerm") config["features"] = Json::object();
          if (block->second == "aws" && !config.contains("region")) {
            if (auto it = props.find("region"); it != props.end()) config["region"] = literal(text_value(it->second));
          }
        }
      }

      if (!resources.contains(type)) resources[type] = Json::object();
      resources[type][id] = std::move(body);
      ctx.emitted(c, address[c.name]);
    }
    for (const auto* r : ctx.edges()) ctx.edge(*r, "depends_on");

    Json doc = Json::object();
    if (!providers.empty()) {
      Json provider = Json::object();
      for (auto& [name, config] : providers) provider[name] = std::move(config);
      doc["provider"] = std::move(provider);
    }
    if (!locals.empty()) doc["locals"] = std::move(locals);
    doc["resource"] = std::move(resources);
    ctx.files().add("main.tf.json", doc.dump(2) + "\n");
  }

 private:
  static std::string resource_type(const EmitContext& ctx, const Component& c) {
    return ctx.metadata(c, "terraform.resource_type").value_or(std::string(kNullResource));
  }
};

}  // namespace

std::unique_ptr<TransformerPlugin> make_terraform() { return std::make_unique<Terraform>(); }

}  // namespace edmm::plugins
