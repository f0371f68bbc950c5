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

// Shared helpers for the unit and acceptance tests: fixture access, a
// random generator of valid models, a mutation fuzzer and an independent
// topological-order oracle.

#pragma once

#include <cstdint>
#include <filesystem>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "edmm/model.hpp"
#include "edmm/transform.hpp"
#include "edmm/validation.hpp"

namespace edmm::testing {

std::filesystem::path source_dir();
std::filesystem::path fixture_path(const std::string& relative);
std::string read_text(const std::filesystem::path& path);

/// Parses one fixture file; fails loudly on diagnostics.
DeploymentModel load_model(const std::filesystem::path& path);
DeploymentModel reference_model();
DeploymentModel chain_model();

/// Parses DSL text from a string; fails loudly on diagnostics.
DeploymentModel parse_text(const std::string& text, const std::string& source = "inline.edmm.yaml");

/// Scratch directory removed on destruction.
class TempDir {
 public:
  TempDir();
  ~TempDir();
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;
  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
};

struct GeneratorOptions {
  int min_components = 1;
  int max_components = 10;
  /// Names with spaces, punctuation and non-ASCII text.
  bool exotic_names = true;
  bool references = true;
  bool local_types = true;
  /// Relation properties and operations (only tosca consumes them).
  bool relation_extras = true;
  /// Platform services limited to this provider when set.
  std::string provider;
  /// Every component carries a container-image artifact.
  bool container_images = false;
  /// When set, the first component has this type, every other component is
  /// hosted on an earlier one and platform-service types are not used.
  std::string anchor_type;
};

/// A random model that validates without errors. Covers every entity kind:
/// model properties, local component and relation types, components,
/// relations, properties of all kinds, references, operations, artifacts.
DeploymentModel random_model(std::mt19937_64& rng, const GeneratorOptions& options = {});

/// Writes a file for every operation artifact path of the model under `root`.
void materialize_artifacts(const DeploymentModel& model, const std::filesystem::path& root);

/// Applies one random mutation; returns a short label of what changed.
std::string mutate(DeploymentModel& model, std::mt19937_64& rng);

struct QueryOutcome {
  bool ok = true;
  std::string failure;
};

/**
 * Calls every model query, compat check and bundled transform on a model
 * that validated clean. Queries must not throw; transforms may only fail
 * with incompatible_model, unmappable_element or missing_artifact_file.
 */
QueryOutcome exercise_queries(const DeploymentModel& model, const std::filesystem::path& artifact_root);

using Edge = std::pair<std::string, std::string>;  // (source, target): source depends on target

/// Dependency edges, computed by walking relation type parents directly.
std::vector<Edge> dependency_edges(const DeploymentModel& model);

bool is_topological(const std::vector<std::string>& order, const std::vector<std::string>& names,
                    const std::vector<Edge>& edges);

struct OrderEnumeration {
  std::uint64_t count = 0;
  bool contains = false;
  std::vector<std::string> smallest;  // lexicographically smallest valid order
};

/// Enumerates every valid order by backtracking. At most 12 names.
OrderEnumeration enumerate_orders(const std::vector<std::string>& names,
                                  const std::vector<Edge>& edges,
                                  const std::vector<std::string>& candidate);

/// Filters all permutations of `names`. At most 8 names.
OrderEnumeration permutation_orders(std::vector<std::string> names, const std::vector<Edge>& edges,
                                    const std::vector<std::string>& candidate);

/// A random DAG over `n` nodes named n0..; every edge points to a lower index.
DeploymentModel random_dag_model(std::mt19937_64& rng, int n, double edge_probability);

}  // namespace edmm::testing
