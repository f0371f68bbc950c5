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

#include <algorithm>

#include "transform/plugins.hpp"

namespace edmm::plugins {

std::string text_value(const PropertyValue& value) { return value.to_text(); }

Json json_value(const PropertyValue& value) {
  switch (value.kind().value_or(PropertyKind::string)) {
    case PropertyKind::integer: return value.as_integer();
    case PropertyKind::boolean: return value.as_boolean();
    case PropertyKind::string_list: {
      Json items = Json::array();
      for (const auto& s : value.as_list()) items.push_back(s);
      return items;
    }
    case PropertyKind::string: break;
  }
  return value.to_text();
}

StackUnits::StackUnits(const DeploymentModel& model) : tops(stack_tops(model)) {
  for (const auto* top : tops) {
    for (const auto* member : hosting_stack(model, *top)) units_of[member->name].push_back(top);
  }
}

bool StackUnits::contains(const Component& top, const std::string& target) const {
  auto it = units_of.find(target);
  if (it == units_of.end()) return false;
  return std::find(it->second.begin(), it->second.end(), &top) != it->second.end();
}

const Artifact* container_image(const Component& component) {
  for (const auto& a : component.artifacts) {
    if (a.kind == ArtifactKind::container_image) return &a;
  }
  return nullptr;
}

}  // namespace edmm::plugins
