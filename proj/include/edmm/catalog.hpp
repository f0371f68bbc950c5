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

#pragma once

#include <string_view>

#include "edmm/model.hpp"

namespace edmm {

/// A closed set of component and relation types. Immutable once built.
struct Catalog {
  ComponentTypeMap component_types;
  RelationTypeMap relation_types;
  TypeOrigin origin = TypeOrigin::user;
  int version = 1;

  bool operator==(const Catalog&) const = default;
};

/// Text of the shipped catalog file, as embedded at build time.
std::string_view builtin_catalog_source() noexcept;

/// The shipped catalog, parsed once on first use.
const Catalog& builtin_catalog();

/**
 * Union of `base` and `user`. User types may extend base types but not
 * redefine them; every extends link in the result must resolve.
 *
 * Throws Error{name_collision} or Error{unknown_parent}.
 */
Catalog merge(const Catalog& base, const Catalog& user);

/// Copies the catalog's types into a model, keeping the model's own.
void install_catalog(DeploymentModel& model, const Catalog& catalog);

}  // namespace edmm
