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

#include <map>
#include <memory>
#include <string>
#include <vector>

#include "edmm/transform.hpp"
#include "yaml/yaml_tree.hpp"

namespace edmm::plugins {

std::unique_ptr<TransformerPlugin> make_docker_compose();
std::unique_ptr<TransformerPlugin> make_kubernetes();
std::unique_ptr<TransformerPlugin> make_terraform();
std::unique_ptr<TransformerPlugin> make_ansible();
std::unique_ptr<TransformerPlugin> make_cloudformation();
std::unique_ptr<TransformerPlugin> make_tosca();

using yaml::Json;

/// Scalar text of a value; lists are comma-joined.
std::string text_value(const PropertyValue& value);

/// Native JSON value: string, integer, boolean or string array.
Json json_value(const PropertyValue& value);

/// For stack-collapsing targets: the stack tops whose image contains each component.
struct StackUnits {
  std::vector<const Component*> tops;  // model order
  std::map<std::string, std::vector<const Component*>> units_of;

  explicit StackUnits(const DeploymentModel& model);

  /// True when `target` lives inside `top`'s stack.
  bool contains(const Component& top, const std::string& target) const;
};

/// Container image of a component, if it has one.
const Artifact* container_image(const Component& component);

}  // namespace edmm::plugins
