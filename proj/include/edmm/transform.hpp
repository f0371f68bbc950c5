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

/**
 * @file transform.hpp
 * @brief Plugin framework compiling a validated model into the native
 * files of one deployment technology.
 *
 * See docs/plugin-guide.md for the plugin contract.
 */

#pragma once

#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "edmm/compat.hpp"
#include "edmm/validation.hpp"

namespace edmm {

struct FileEntry {
  std::string path;
  std::string content;

  bool operator==(const FileEntry&) const = default;
};

/**
 * @brief Relative files produced by one transform, ordered by path.
 */
class FileSet {
 public:
  /// Throws Error{invalid_data} for absolute paths, `.`/`..` segments,
  /// empty segments or a path added twice.
  void add(std::string path, std::string content);

  const std::vector<FileEntry>& entries() const noexcept { return entries_; }
  const FileEntry* find(std::string_view path) const noexcept;
  std::size_t size() const noexcept { return entries_.size(); }

  /// Files per extension ("" for none), e.g. {"yaml": 3}.
  std::map<std::string, std::size_t> summary() const;

  bool operator==(const FileSet&) const = default;

 private:
  std::vector<FileEntry> entries_;
};

/// True when `path` is relative and free of traversal or empty segments.
bool is_safe_relative_path(std::string_view path) noexcept;

/// Element kinds a plugin may consume.
enum class ElementKind {
  component,
  relation,
  component_property,
  relation_property,
  component_operation,
  relation_operation,
  artifact,
  custom_relation_type,
};

std::string_view to_string(ElementKind kind) noexcept;

struct Capabilities {
  std::set<ElementKind> consumes;

  bool has(ElementKind kind) const { return consumes.contains(kind); }
};

/// Record of how model elements were mapped; written as the `manifest` file.
struct Manifest {
  struct Absorbed {
    std::string component;
    std::string into;  // component name of the unit
    bool operator==(const Absorbed&) const = default;
    auto operator<=>(const Absorbed&) const = default;
  };
  struct Edge {
    std::string source;
    std::string target;
    std::string kind;       // hosted_on | connects_to | depends_on
    std::string construct;  // target-native construct, or "internal"
    bool operator==(const Edge&) const = default;
    auto operator<=>(const Edge&) const = default;
  };
  struct Degraded {
    std::string relation;  // relation subject
    std::string from_type;
    std::string to_type;
    bool operator==(const Degraded&) const = default;
    auto operator<=>(const Degraded&) const = default;
  };

  std::string target;
  std::map<std::string, std::string> emitted;  // component -> native unit id
  std::vector<Absorbed> absorbed;
  std::vector<Edge> edges;
  std::vector<Degraded> degraded;
  std::vector<std::string> files;
  std::map<std::string, std::size_t> counts;

  bool operator==(const Manifest&) const = default;
};

/// Tab-separated records, one per line, in a fixed order.
std::string render_manifest(const Manifest& manifest);

/// Throws Error{invalid_data}.
Manifest parse_manifest(std::string_view text);

inline constexpr std::string_view manifest_file = "manifest";

struct TransformOptions {
  /// Directory against which artifact paths are resolved when a plugin
  /// has to embed file contents.
  std::filesystem::path artifact_root = ".";
};

/// Lifecycle operations emitted, in order; others are ignored.
const std::vector<std::string>& lifecycle_operations();

/**
 * @brief Everything a plugin sees while emitting.
 */
class EmitContext {
 public:
  EmitContext(const ValidatedModel& validated, const Technology& technology,
              const TransformOptions& options, const Capabilities& capabilities);

  const DeploymentModel& model() const noexcept { return model_; }
  const Technology& technology() const noexcept { return technology_; }
  const TransformOptions& options() const noexcept { return options_; }

  FileSet& files() noexcept { return files_; }
  Manifest& manifest() noexcept { return manifest_; }

  /// hosted_on, connects_to or depends_on; custom types are mapped to their
  /// nearest builtin ancestor unless the plugin consumes custom types.
  std::string_view relation_kind(const Relation& relation) const;

  /// Lifecycle operations of `component` in emission order.
  std::vector<std::pair<std::string, Operation>> lifecycle(const Component& component) const;

  /// Effective properties with references resolved.
  PropertyMap properties(const Component& component) const;

  /// Nearest-wins metadata value, if any.
  std::optional<std::string> metadata(const Component& component, std::string_view key) const;

  /// Reads an artifact file below the artifact root.
  /// Throws Error{missing_artifact_file}.
  std::string read_artifact(const Component& component, const Artifact& artifact) const;

  /// Index of each component in deployment order.
  std::size_t order_index(std::string_view component) const;
  const std::vector<std::string>& order() const noexcept { return order_; }

  /// Relations whose type derives from depends_on, in model order.
  const std::vector<const Relation*>& edges() const noexcept { return edges_; }

  void emitted(const Component& component, std::string unit);
  void absorbed(const Component& component, const Component& into);
  void edge(const Relation& relation, std::string construct);

 private:
  const DeploymentModel& model_;
  const Technology& technology_;
  const TransformOptions& options_;
  const Capabilities& capabilities_;
  FileSet files_;
  Manifest manifest_;
  std::vector<std::string> order_;
  std::map<std::string, std::size_t, std::less<>> order_index_;
  std::vector<const Relation*> edges_;
};

class TransformerPlugin {
 public:
  virtual ~TransformerPlugin() = default;

  /// Technology name, e.g. "terraform".
  virtual std::string_view target() const = 0;
  virtual Capabilities capabilities() const = 0;

  /// Adds files and manifest records. Must be deterministic.
  virtual void emit(EmitContext& context) const = 0;
};

class PluginRegistry {
 public:
  /// Registry holding the six bundled plugins.
  static PluginRegistry with_bundled();

  /// Throws Error{name_collision} when the target is already registered.
  void add(std::unique_ptr<TransformerPlugin> plugin);

  const TransformerPlugin* find(std::string_view target) const noexcept;
  std::vector<std::string> targets() const;

 private:
  std::vector<std::shared_ptr<const TransformerPlugin>> plugins_;
};

const PluginRegistry& bundled_plugins();

/// GP pseudo-technology for the standards-based service template emitter.
const Technology& tosca_technology();

/// A registry technology or tosca. Throws Error{unknown_technology}.
const Technology& target_technology(std::string_view name);

class IncompatibleModel : public Error {
 public:
  explicit IncompatibleModel(TargetReport report);
  const TargetReport& report() const noexcept { return report_; }

 private:
  TargetReport report_;
};

/**
 * Runs compat, the capability check and the plugin, then appends the
 * manifest. Throws IncompatibleModel, Error{unmappable_element},
 * Error{missing_artifact_file} or Error{unknown_technology}.
 */
FileSet transform(const ValidatedModel& model, const Technology& technology,
                  const TransformOptions& options = {},
                  const PluginRegistry& plugins = bundled_plugins());

FileSet transform(const ValidatedModel& model, std::string_view target,
                  const TransformOptions& options = {},
                  const PluginRegistry& plugins = bundled_plugins());

enum class PluginStatus { bundled, documented };

/// "bundled" | "mapping-documented-only"
std::string_view to_string(PluginStatus status) noexcept;

struct TargetListing {
  std::string name;
  std::string display_name;
  std::string category;
  PluginStatus status = PluginStatus::documented;
};

/// Registry technologies in table order, then tosca.
std::vector<TargetListing> list_targets(const PluginRegistry& plugins = bundled_plugins());

/// Unique identifiers derived from component names in one naming style.
class IdAllocator {
 public:
  enum class Style {
    snake,   // order_app
    dns,     // order-app (DNS-1123 label)
    pascal,  // OrderApp
  };

  explicit IdAllocator(Style style) : style_(style) {}

  /// Same name -> same id; distinct names never share an id.
  const std::string& id(std::string_view name);

 private:
  Style style_;
  std::map<std::string, std::string, std::less<>> ids_;
  std::set<std::string> taken_;
};

std::string base_identifier(std::string_view name, IdAllocator::Style style);

/// `ORDER_APP`
std::string env_name(std::string_view name);

}  // namespace edmm
