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

// One role per component, one play per hosting stack.

#include <fmt/format.h>

#include <algorithm>
#include <set>

#include "transform/plugins.hpp"

namespace edmm::plugins {

namespace {

/// Rewrites each `{` that would open a template block as `{{ '{' }}`.
Json literal(Json value) {
  if (value.is_array()) {
    for (auto& item : value) item = literal(std::move(item));
  }
  if (!value.is_string()) return value;
  const auto& text = value.get_ref<const std::string&>();
  std::string out;
  for (std::size_t i = 0; i < text.size(); ++i) {
    char next = i + 1 < text.size() ? text[i + 1] : '\0';
    if (text[i] == '{' && (next == '{' || next == '%' || next == '#')) {
      out += "{{ '{' }}";
    } else {
      out += text[i];
    }
  }
  return out;
}

class Ansible final : public TransformerPlugin {
 public:
  std::string_view target() const override { return "ansible"; }

  Capabilities capabilities() const override {
    return {{ElementKind::component, ElementKind::relation, ElementKind::component_property,
             ElementKind::component_operation, ElementKind::artifact}};
  }

  void emit(EmitContext& ctx) const override {
    const auto& model = ctx.model();
    IdAllocator roles(IdAllocator::Style::snake);
    for (const auto& c : model.components) roles.id(c.name);

    for (const auto& c : model.components) {
      const std::string& role = roles.id(c.name);
      ctx.files().add(fmt::format("roles/{}/tasks/main.yml", role), yaml::emit(tasks(ctx, c)));

      std::set<std::string> dependencies;
      for (const auto* r : ctx.edges()) {
        if (r->source == c.name) dependencies.insert(roles.id(r->target));
      }
      Json deps = Json::array();
      for (const auto& d : dependencies) deps.push_back(Json{{"role", d}});
      Json meta = Json::object();
      meta["dependencies"] = std::move(deps);
      ctx.files().add(fmt::format("roles/{}/meta/main.yml", role), yaml::emit(meta));
      ctx.emitted(c, role);
    }
    for (const auto* r : ctx.edges()) ctx.edge(*r, "role-dependency");

    auto tops = stack_tops(model);
    std::stable_sort(tops.begin(), tops.end(), [&](const Component* a, const Component* b) {
      return ctx.order_index(a->name) < ctx.order_index(b->name);
    });
    IdAllocator groups(IdAllocator::Style::snake);
    Json playbook = Json::array();
    std::string inventory;
    for (const auto* top : tops) {
      auto stack = hosting_stack(model, *top);
      const std::string& group = groups.id(top->name);

      Json vars = Json::object();
      Json role_list = Json::array();
      for (auto it = stack.rbegin(); it != stack.rend(); ++it) {
        const std::string& role = roles.id((*it)->name);
        role_list.push_back(role);
        for (const auto& [name, value] : ctx.properties(**it)) {
          vars[fmt::format("{}_{}", role, name)] = literal(json_value(value));
        }
      }
      Json play = Json::object();
      play["name"] = top->name;
      play["hosts"] = group;
      if (!vars.empty()) play["vars"] = std::move(vars);
      play["roles"] = std::move(role_list);
      playbook.push_back(std::move(play));

      const Component& leaf = *stack.back();
      bool managed_host = component_is_a(model, leaf.type, "compute") ||
                          ctx.metadata(leaf, "delivery_model") == std::optional<std::string>("iaas");
      inventory += fmt::format("[{}]\n{}{}\n\n", group, roles.id(leaf.name),
                               managed_host ? "" : " ansible_connection=local");
    }
    ctx.files().add("playbook.yml", yaml::emit(playbook));
    ctx.files().add("inventory.ini", inventory);
  }

 private:
  static Json tasks(const EmitContext& ctx, const Component& c) {
    Json out = Json::array();
    if (auto module = ctx.metadata(c, "ansible.module")) {
      Json args = Json::object();
      for (const auto& [name, value] : ctx.properties(c)) args[name] = literal(json_value(value));
      Json task = Json::object();
      task["name"] = fmt::format("provision {}", c.name);
      task[*module] = std::move(args);
      out.push_back(std::move(task));
    }
    for (const auto& [name, op] : ctx.lifecycle(c)) {
      Json task = Json::object();
      task["name"] = fmt::format("{} {}", name, c.name);
      task["ansible.builtin.script"] = literal(Json(op.artifact.path));
      out.push_back(std::move(task));
    }
    if (out.empty()) {
      Json task = Json::object();
      task["name"] = c.name;
      task["ansible.builtin.meta"] = "noop";
      out.push_back(std::move(task));
    }
    return out;
  }
};

}  // namespace

std::unique_ptr<TransformerPlugin> make_ansible() { return std::make_unique<Ansible>(); }

}  // namespace edmm::plugins
