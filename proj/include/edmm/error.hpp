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

#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace edmm {

enum class Errc {
  unknown_type,
  cyclic_type_chain,
  unknown_component,
  unresolved_reference,
  reference_cycle,
  kind_mismatch,
  hosting_cycle,
  multiple_hosts,
  dependency_cycle,
  name_collision,
  unknown_parent,
  validation_failed,
  unknown_technology,
  incompatible_model,
  unmappable_element,
  missing_artifact_file,
  invalid_data,
};

std::string_view to_string(Errc code) noexcept;

enum class Severity { error, warning };

std::string_view to_string(Severity severity) noexcept;

/**
 * @brief Base exception for every failure raised by the model, catalog,
 * compat and transform layers.
 *
 * `subjects()` carries the element names the failure is about, e.g. the
 * members of a detected cycle in traversal order.
 */
class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& message, std::vector<std::string> subjects = {})
      : std::runtime_error(message), code_(code), subjects_(std::move(subjects)) {}

  Errc code() const noexcept { return code_; }
  const std::vector<std::string>& subjects() const noexcept { return subjects_; }

 private:
  Errc code_;
  std::vector<std::string> subjects_;
};

}  // namespace edmm
