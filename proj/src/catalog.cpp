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

#include "edmm/catalog.hpp"

#include <fmt/format.h>

#include "edmm/dsl.hpp"
#include "embedded_data.hpp"

namespace edmm {

std::string_view builtin_catalog_source() noexcept { return embedded::builtin_catalog; }

const Catalog& builtin_catalog() {
  static const Catalog catalog = [] {
    auto result = dsl::parse_catalog({{"builtin.edmm.yaml", std::string(builtin_catalog_source())}},
                                     TypeOrigin::builtin);
    if (!result.ok()) {
      throw Error(Errc::invalid_data,
                  fmt::format("shipped catalog is invalid: {}",
                              dsl::format(result.diagnostics.front())));
    }
    return std::move(*result.catalog);
  }();
  return catalog;
}

namespace {

template <typename TypeMap>
void merge_types(TypeMap& into, const TypeMap& base, const TypeMap& user, std::string_view what) {
  into = base;
  for (const auto& [name, t] : user) {
    if (base.contains(name)) {
      throw Error(Errc::name_collision,
                  fmt::format("{} type '{}' is already defined by the base catalog", what, name),
                  {name});
    }
    into.emplace(name, t);
  }
  for (const auto& [name, t] : user) {
    if (t.extends && !into.contains(*t.extends)) {
      throw Error(Errc::unknown_parent,
                  fmt::format("{} type '{}' extends unknown type '{}'", what, name, *t.extends),
                  {name, *t.extends});
    }
  }
}

}  // namespace

Catalog merge(const Catalog& base, const Catalog& user) {
  Catalog out;
  out.origin = base.origin;
  out.version = base.version;
  merge_types(out.component_types, base.component_types, user.component_types, "component");
  merge_types(out.relation_types, base.relation_types, user.relation_types, "relation");
  return out;
}

void install_catalog(DeploymentModel& model, const Catalog& catalog) {
  for (const auto& [name, t] : catalog.component_types) model.component_types.emplace(name, t);
  for (const auto& [name, t] : catalog.relation_types) model.relation_types.emplace(name, t);
}

}  // namespace edmm
