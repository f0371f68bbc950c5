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

// One service per stack top; everything below the top lives in its image.

#include <fmt/format.h>

#include <set>

#include "transform/plugins.hpp"

namespace edmm::plugins {

namespace {

/// Compose interpolates `$`; `$$` is a literal dollar.
std::string literal(const std::string& text) {
  std::string out;
  for (char ch : text) {
    if (ch == '$') out += '$';
    out += ch;
  }
  return out;
}

class DockerCompose final : public TransformerPlugin {
 public:
  std::string_view target() const override { return "docker-compose"; }

  Capabilities capabilities() const override {
    return {{ElementKind::component, ElementKind::relation, ElementKind::component_property,
             ElementKind::component_operation, ElementKind::artifact}};
  }

  void emit(EmitContext& ctx) const override {
    const auto& model = ctx.model();
    StackUnits stacks(model);
    IdAllocator ids(IdAllocator::Style::snake);
    for (const auto* top : stacks.tops) ids.id(top->name);

    Json services = Json::object();
    for (const auto* top : stacks.tops) {
      const Artifact* image = container_image(*top);
      if (image == nullptr) {
        throw Error(Errc::unmappable_element,
                    fmt::format("docker-compose needs a container image for service '{}'",
                                top->name),
                    {top->name});
      }
      Json service = Json::object();
      service["image"] = literal(image->path);

      Json environment = Json::object();
      for (const auto& [name, value] : ctx.properties(*top)) {
        environment[env_name(name)] = literal(text_value(value));
      }
      if (!environment.empty()) service["environment"] = std::move(environment);

      std::set<std::string> depends;
      for (const auto* r : ctx.edges()) {
        if (!stacks.contains(*top, r->source)) continue;
        for (const auto* unit : stacks.units_of.at(r->target)) {
          if (unit != top) depends.insert(ids.id(unit->name));
        }
      }
      if (!depends.empty()) service["depends_on"] = Json(depends);
      service["labels"] = Json{{"edmm.component", top->name}};

      services[ids.id(top->name)] = std::move(service);
      ctx.emitted(*top, ids.id(top->name));
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
      ctx.edge(*r, internal ? "internal" : "depends_on");
    }

    Json doc = Json::object();
    doc["services"] = std::move(services);
    ctx.files().add("docker-compose.yml", yaml::emit(doc));
  }
};

}  // namespace

std::unique_ptr<TransformerPlugin> make_docker_compose() {
  return std::make_unique<DockerCompose>();
}

}  // namespace edmm::plugins
