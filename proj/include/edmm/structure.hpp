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

// Shape checks for generated files: keys, nesting and reference integrity
// in each target's own document grammar. No provider semantics.

#pragma once

#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "edmm/model.hpp"
#include "edmm/transform.hpp"

namespace edmm::structure {

struct Structure {
  /// Native deployment units (services, resources, roles, node templates).
  std::set<std::string> units;
  /// Native dependency constructs between units.
  std::set<std::pair<std::string, std::string>> dependencies;
  /// Grammar or reference violations; empty when well-formed.
  std::vector<std::string> problems;
};

/// Re-parses the files of `target`; unknown targets yield a problem.
Structure parse(std::string_view target, const FileSet& files);

/**
 * Full soundness check: the files re-parse, the manifest lists every file,
 * every component is emitted once or absorbed into an emitted unit, and
 * every dependency edge is either internal to a unit or present as a
 * native construct. Returns the problems found.
 */
std::vector<std::string> verify(const DeploymentModel& model, const FileSet& files);

}  // namespace edmm::structure
