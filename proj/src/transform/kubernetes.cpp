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
#include <fmt/ranges.h>

#include <set>

#include "transform/plugins.hpp"

namespace edmm::plugins {

namespace {

constexpr std::string_view kNameLabel = "app.kubernetes.io/name";
constexpr std::string_view kComponentAnnotation = "edmm/component";
constexpr std::string_view kDependsAnnotation = "edmm/depends-on";
constexpr std::int64_t kDefaultPort = 80;

/// Env values expand `$(VAR)`; `$$(` keeps it literal.
std::string literal(const std::string& text) {
  std::string out;
  for (std::size_t i = 0; i < text.size(); ++i) {
    if (text[i] == '$' && i + 1 < text.size() && text[i + 1] == '(') out += '$';
    out += text[i];
  }
  return out;
}

class Kubernetes final : public TransformerPlugin {
 public:
  std::string_view target() const override { return "kubernetes"; }

  Capabilities capabilities() const override {
    return {{ElementKind::component, ElementKind::relation, ElementKind::component_property,
             ElementKind::component_operation, ElementKind::artifact}};
  }

  void emit(EmitContext& ctx) const override {
    const auto& model = ctx.model();
    StackUnits stacks(model);
    IdAllocator ids(IdAllocator::Style::dns);
    for (const auto* top : stacks.tops) ids.id(top->name);

    for (const auto* top : stacks.tops) {
      const Artifact* image = container_image(*top);
      if (image == nullptr) {
        throw Error(Errc::unmappable_element,
                    fmt::format("kubernetes needs a container image for '{}'", top->name),
                    {top->name});
      }
      const std::string& id = ids.id(top->name);

      std::map<std::string, std::string> env;
      for (const auto& [name, value] : ctx.properties(*top)) env[env_name(name)] = literal(text_value(value));
      std::set<std::string> depends;
      for (const auto* r : ctx.edges()) {
        if (!stacks.contains(*top, r->source) || stacks.contains(*top, r->target)) continue;
        const auto& target_units = stacks.units_of.at(r->target);
        for (const auto* unit : target_units) depends.insert(ids.id(unit->name));
        if (ctx.relation_kind(*r) == relation_names::connects_to) {
          env[env_name(r->target) + "_SERVICE"] = ids.id(target_units.front()->name);
        }
      }

      std::int64_t port = kDefaultPort;
      for (const auto* member : hosting_stack(model, *top)) {
        auto props = ctx.properties(*member);
        if (auto it = props.find("port"); it != props.end() && it->second.kind() == PropertyKind::integer) {
          port = it->second.as_integer();
          break;
        }
      }

      Json labels = Json::object();
      labels[std::string(kNameLabel)] = id;

      Json annotations = Json::object();
      annotations[std::string(kComponentAnnotation)] = top->name;
      if (!depends.empty()) {
        annotations[std::string(kDependsAnnotation)] = fmt::format("{}", fmt::join(depends, ","));
      }

      Json container = Json::object();
      container["name"] = id;
      container["image"] = image->path;
      if (!env.empty()) {
        Json env_list = Json::array();
        for (const auto& [name, value] : env) env_list.push_back(Json{{"name", name}, {"value", value}});
        container["env"] = std::move(env_list);
      }
      container["ports"] = Json::array({Json{{"containerPort", port}}});

      Json deployment = Json::object();
      deployment["apiVersion"] = "apps/v1";
      deployment["kind"] = "Deployment";
      deployment["metadata"] = Json{{"name", id}, {"labels", labels}, {"annotations", annotations}};
      Json pod_template = Json::object();
      pod_template["metadata"] = Json{{"labels", labels}};
      pod_template["spec"] = Json{{"containers", Json::array({container})}};
      Json spec = Json::object();
      spec["replicas"] = 1;
      spec["selector"] = Json{{"matchLabels", labels}};
      spec["template"] = std::move(pod_template);
      deployment["spec"] = std::move(spec);

      Json service = Json::object();
      service["apiVersion"] = "v1";
      service["kind"] = "Service";
      service["metadata"] = Json{{"name", id}, {"labels", labels}};
      Json ports = Json::array({Json{{"name", "main"}, {"port", port}, {"targetPort", port}}});
      service["spec"] = Json{{"selector", labels}, {"ports", std::move(ports)}};

      ctx.files().add(fmt::format("deployment-{}.yaml", id), yaml::emit(deployment));
      ctx.files().add(fmt::format("service-{}.yaml", id), yaml::emit(service));
      ctx.emitted(*top, id);
    }

    for (const auto& c : model.components) {
      if (ctx.manifest().emitted.contains(c.name)) continue;
      for (const auto* unit : stacks.units_of.at(c.name)) ctx.absorbed(c, *unit);
    }
    for (const auto* r : ctx.edges()) {
      bool internal = true;
      for (const auto* unit : stacks.units_of.at(r->source)) {
        internal = internal && stacks.contains(*unit, r->target);
      }
      ctx.edge(*r, internal ? "internal" : std::string(kDependsAnnotation));
    }
  }
};

}  // namespace

std::unique_ptr<TransformerPlugin> make_kubernetes() { return std::make_unique<Kubernetes>(); }

}  // namespace edmm::plugins
