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

#include <fmt/format.h>
#include <fmt/ranges.h>

#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>

#include "edmm/transform.hpp"
#include "transform/plugins.hpp"

namespace edmm {

// ---------------------------------------------------------------------------
// FileSet

bool is_safe_relative_path(std::string_view path) noexcept {
  if (path.empty() || path.front() == '/') return false;
  for (char c : path) {
    if (c == '\\' || static_cast<unsigned char>(c) < 0x20 || c == 0x7f) return false;
  }
  std::size_t start = 0;
  while (start <= path.size()) {
    auto end = path.find('/', start);
    if (end == std::string_view::npos) end = path.size();
    auto segment = path.substr(start, end - start);
    if (segment.empty() || segment == "." || segment == "..") return false;
    start = end + 1;
  }
  return true;
}

void FileSet::add(std::string path, std::string content) {
  if (!is_safe_relative_path(path)) {
    throw Error(Errc::invalid_data, fmt::format("unsafe output path '{}'", path), {path});
  }
  auto pos = std::lower_bound(entries_.begin(), entries_.end(), path,
                              [](const FileEntry& e, const std::string& p) { return e.path < p; });
  if (pos != entries_.end() && pos->path == path) {
    throw Error(Errc::invalid_data, fmt::format("output path '{}' written twice", path), {path});
  }
  entries_.insert(pos, FileEntry{std::move(path), std::move(content)});
}

const FileEntry* FileSet::find(std::string_view path) const noexcept {
  for (const auto& e : entries_) {
    if (e.path == path) return &e;
  }
  return nullptr;
}

std::map<std::string, std::size_t> FileSet::summary() const {
  std::map<std::string, std::size_t> out;
  for (const auto& e : entries_) {
    std::string_view name = e.path;
    if (auto slash = name.rfind('/'); slash != std::string_view::npos) name = name.substr(slash + 1);
    auto dot = name.rfind('.');
    ++out[dot == std::string_view::npos ? std::string() : std::string(name.substr(dot + 1))];
  }
  return out;
}

// ---------------------------------------------------------------------------
// Manifest

std::string_view to_string(ElementKind kind) noexcept {
  switch (kind) {
    case ElementKind::component: return "component";
    case ElementKind::relation: return "relation";
    case ElementKind::component_property: return "component property";
    case ElementKind::relation_property: return "relation property";
    case ElementKind::component_operation: return "component operation";
    case ElementKind::relation_operation: return "relation operation";
    case ElementKind::artifact: return "artifact";
    case ElementKind::custom_relation_type: return "custom relation type";
  }
  return "?";
}

namespace {

std::string join_record(std::initializer_list<std::string_view> fields) {
  std::string out;
  bool first = true;
  for (auto f : fields) {
    if (!first) out += '\t';
    out += escape_field(f);
    first = false;
  }
  out += '\n';
  return out;
}

std::string unescape_field(std::string_view text) {
  std::string out;
  for (std::size_t i = 0; i < text.size(); ++i) {
    if (text[i] != '\\' || i + 1 == text.size()) {
      out += text[i];
      continue;
    }
    char next = text[++i];
    switch (next) {
      case 't': out += '\t'; break;
      case 'n': out += '\n'; break;
      case 'r': out += '\r'; break;
      default: out += next;
    }
  }
  return out;
}

std::vector<std::string> split_record(std::string_view line) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    auto tab = line.find('\t', start);
    out.push_back(unescape_field(line.substr(start, tab - start)));
    if (tab == std::string_view::npos) break;
    start = tab + 1;
  }
  return out;
}

}  // namespace

std::string render_manifest(const Manifest& m) {
  std::string out = join_record({"target", m.target});
  for (const auto& [component, unit] : m.emitted) out += join_record({"emitted", component, unit});
  auto absorbed = m.absorbed;
  std::sort(absorbed.begin(), absorbed.end());
  for (const auto& a : absorbed) out += join_record({"absorbed", a.component, a.into});
  auto edges = m.edges;
  std::sort(edges.begin(), edges.end());
  for (const auto& e : edges) {
    out += join_record({"edge", e.source, e.target, e.kind, e.construct});
  }
  auto degraded = m.degraded;
  std::sort(degraded.begin(), degraded.end());
  for (const auto& d : degraded) out += join_record({"degraded", d.relation, d.from_type, d.to_type});
  auto files = m.files;
  std::sort(files.begin(), files.end());
  for (const auto& f : files) out += join_record({"file", f});
  for (const auto& [ext, n] : m.counts) {
    out += join_record({"count", ext.empty() ? std::string("-") : ext, std::to_string(n)});
  }
  return out;
}

Manifest parse_manifest(std::string_view text) {
  Manifest m;
  std::size_t line_no = 0;
  std::istringstream in{std::string(text)};
  std::string line;
  auto bad = [&](std::string_view why) {
    throw Error(Errc::invalid_data, fmt::format("manifest line {}: {}", line_no, why));
  };
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    auto f = split_record(line);
    auto need = [&](std::size_t n) {
      if (f.size() != n) bad(fmt::format("'{}' record needs {} fields", f[0], n));
    };
    if (f[0] == "target") {
      need(2);
      m.target = f[1];
    } else if (f[0] == "emitted") {
      need(3);
      if (!m.emitted.emplace(f[1], f[2]).second) bad("component emitted twice");
    } else if (f[0] == "absorbed") {
      need(3);
      m.absorbed.push_back({f[1], f[2]});
    } else if (f[0] == "edge") {
      need(5);
      m.edges.push_back({f[1], f[2], f[3], f[4]});
    } else if (f[0] == "degraded") {
      need(4);
      m.degraded.push_back({f[1], f[2], f[3]});
    } else if (f[0] == "file") {
      need(2);
      m.files.push_back(f[1]);
    } else if (f[0] == "count") {
      need(3);
      std::size_t n = 0;
      try {
        n = static_cast<std::size_t>(std::stoull(f[2]));
      } catch (const std::exception&) {
        bad("count is not a number");
      }
      m.counts[f[1] == "-" ? std::string() : f[1]] = n;
    } else {
      bad(fmt::format("unknown record '{}'", f[0]));
    }
  }
  return m;
}

// ---------------------------------------------------------------------------
// EmitContext

const std::vector<std::string>& lifecycle_operations() {
  static const std::vector<std::string> ops{"create", "install", "configure", "start"};
  return ops;
}

EmitContext::EmitContext(const ValidatedModel& validated, const Technology& technology,
                         const TransformOptions& options, const Capabilities& capabilities)
    : model_(validated.model()),
      technology_(technology),
      options_(options),
      capabilities_(capabilities),
      order_(deployment_order(validated.model())) {
  for (std::size_t i = 0; i < order_.size(); ++i) order_index_.emplace(order_[i], i);
  for (const auto& r : model_.relations) {
    if (relation_is_a(model_, r.type, relation_names::depends_on)) edges_.push_back(&r);
  }
}

std::string_view EmitContext::relation_kind(const Relation& relation) const {
  return builtin_relation_kind(model_, relation);
}

std::vector<std::pair<std::string, Operation>> EmitContext::lifecycle(
    const Component& component) const {
  auto ops = effective_operations(model_, component);
  std::vector<std::pair<std::string, Operation>> out;
  for (const auto& name : lifecycle_operations()) {
    if (auto it = ops.find(name); it != ops.end()) out.emplace_back(name, it->second);
  }
  return out;
}

PropertyMap EmitContext::properties(const Component& component) const {
  return effective_properties(model_, component);
}

std::optional<std::string> EmitContext::metadata(const Component& component,
                                                 std::string_view key) const {
  auto meta = effective_metadata(model_, component.type);
  if (auto it = meta.find(std::string(key)); it != meta.end()) return it->second;
  return std::nullopt;
}

std::string EmitContext::read_artifact(const Component& component,
                                       const Artifact& artifact) const {
  std::filesystem::path path(artifact.path);
  if (path.is_relative()) path = options_.artifact_root / path;
  std::ifstream in(path, std::ios::binary);
  if (!in || std::filesystem::is_directory(path)) {
    throw Error(Errc::missing_artifact_file,
                fmt::format("artifact '{}' of '{}' not found at {}", artifact.name, component.name,
                            path.string()),
                {component.name});
  }
  std::ostringstream content;
  content << in.rdbuf();
  return content.str();
}

std::size_t EmitContext::order_index(std::string_view component) const {
  auto it = order_index_.find(component);
  return it == order_index_.end() ? order_.size() : it->second;
}

void EmitContext::emitted(const Component& component, std::string unit) {
  if (!manifest_.emitted.emplace(component.name, std::move(unit)).second) {
    throw Error(Errc::invalid_data,
                fmt::format("plugin '{}' emitted '{}' twice", technology_.name, component.name),
                {component.name});
  }
}

void EmitContext::absorbed(const Component& component, const Component& into) {
  manifest_.absorbed.push_back({component.name, into.name});
}

void EmitContext::edge(const Relation& relation, std::string construct) {
  manifest_.edges.push_back({relation.source, relation.target,
                             std::string(relation_kind(relation)), std::move(construct)});
}

// ---------------------------------------------------------------------------
// Registry

PluginRegistry PluginRegistry::with_bundled() {
  PluginRegistry r;
  r.add(plugins::make_docker_compose());
  r.add(plugins::make_kubernetes());
  r.add(plugins::make_terraform());
  r.add(plugins::make_ansible());
  r.add(plugins::make_cloudformation());
  r.add(plugins::make_tosca());
  return r;
}

void PluginRegistry::add(std::unique_ptr<TransformerPlugin> plugin) {
  if (find(plugin->target()) != nullptr) {
    throw Error(Errc::name_collision,
                fmt::format("a plugin for '{}' is already registered", plugin->target()),
                {std::string(plugin->target())});
  }
  plugins_.push_back(std::move(plugin));
}

const TransformerPlugin* PluginRegistry::find(std::string_view target) const noexcept {
  for (const auto& p : plugins_) {
    if (p->target() == target) return p.get();
  }
  return nullptr;
}

std::vector<std::string> PluginRegistry::targets() const {
  std::vector<std::string> out;
  for (const auto& p : plugins_) out.emplace_back(p->target());
  return out;
}

const PluginRegistry& bundled_plugins() {
  static const PluginRegistry registry = PluginRegistry::with_bundled();
  return registry;
}

const Technology& tosca_technology() {
  static const Technology tosca = [] {
    Technology t;
    t.name = "tosca";
    t.display_name = "TOSCA";
    t.category = Category::gp;
    t.provider_scope = "all";
    t.features = all_features();
    t.note = "standards-based service template";
    return t;
  }();
  return tosca;
}

const Technology& target_technology(std::string_view name) {
  if (name == tosca_technology().name) return tosca_technology();
  return technology(name);
}

IncompatibleModel::IncompatibleModel(TargetReport report)
    : Error(Errc::incompatible_model,
            fmt::format("model is incompatible with {}: {}", report.technology,
                        [&] {
                          std::vector<std::string> parts;
                          for (const auto& b : report.blockers) {
                            parts.push_back(fmt::format("{} ({})", b.subject, b.reason));
                          }
                          return fmt::format("{}", fmt::join(parts, ", "));
                        }()),
            [&] {
              std::vector<std::string> subjects;
              for (const auto& b : report.blockers) subjects.push_back(b.subject);
              return subjects;
            }()),
      report_(std::move(report)) {}

// ---------------------------------------------------------------------------
// transform

namespace {

[[noreturn]] void unmappable(std::string_view target, ElementKind kind, const std::string& subject) {
  throw Error(Errc::unmappable_element,
              fmt::format("{} cannot map the {} of '{}'", target, to_string(kind), subject),
              {subject});
}

void check_capabilities(const DeploymentModel& model, std::string_view target,
                        const Capabilities& caps, Manifest& manifest) {
  auto require = [&](ElementKind kind, const std::string& subject) {
    if (!caps.has(kind)) unmappable(target, kind, subject);
  };
  for (const auto& c : model.components) {
    require(ElementKind::component, c.name);
    if (!c.properties.empty()) require(ElementKind::component_property, c.name);
    if (!effective_operations(model, c).empty()) require(ElementKind::component_operation, c.name);
    if (!c.artifacts.empty()) require(ElementKind::artifact, c.name);
  }
  for (const auto& r : model.relations) {
    auto subject = relation_subject(r);
    require(ElementKind::relation, subject);
    if (!r.properties.empty()) require(ElementKind::relation_property, subject);
    if (!r.operations.empty()) require(ElementKind::relation_operation, subject);
    auto type = model.relation_types.find(r.type);
    bool custom = type != model.relation_types.end() && type->second.origin != TypeOrigin::builtin;
    if (custom && !caps.has(ElementKind::custom_relation_type)) {
      manifest.degraded.push_back(
          {subject, r.type, std::string(builtin_relation_kind(model, r))});
    }
  }
}

void check_coverage(const DeploymentModel& model, const Manifest& manifest,
                    std::string_view target) {
  std::set<std::string> absorbed;
  for (const auto& a : manifest.absorbed) absorbed.insert(a.component);
  for (const auto& c : model.components) {
    bool emitted = manifest.emitted.contains(c.name);
    if (emitted == absorbed.contains(c.name)) {
      throw Error(Errc::invalid_data,
                  fmt::format("plugin '{}' must either emit or absorb '{}'", target, c.name),
                  {c.name});
    }
  }
  for (const auto& r : model.relations) {
    bool recorded = std::any_of(manifest.edges.begin(), manifest.edges.end(), [&](const auto& e) {
      return e.source == r.source && e.target == r.target;
    });
    if (!recorded) {
      throw Error(Errc::invalid_data,
                  fmt::format("plugin '{}' did not map relation '{}'", target, relation_subject(r)),
                  {relation_subject(r)});
    }
  }
}

}  // namespace

FileSet transform(const ValidatedModel& validated, const Technology& tech,
                  const TransformOptions& options, const PluginRegistry& plugins) {
  const TransformerPlugin* plugin = plugins.find(tech.name);
  if (plugin == nullptr) {
    throw Error(Errc::unknown_technology, fmt::format("no plugin is bundled for '{}'", tech.name),
                {tech.name});
  }
  auto report = check(validated, tech);
  if (!report.compatible()) throw IncompatibleModel(std::move(report));

  const Capabilities caps = plugin->capabilities();
  EmitContext ctx(validated, tech, options, caps);
  check_capabilities(ctx.model(), tech.name, caps, ctx.manifest());
  plugin->emit(ctx);
  check_coverage(ctx.model(), ctx.manifest(), tech.name);

  FileSet files = std::move(ctx.files());
  Manifest manifest = std::move(ctx.manifest());
  manifest.target = tech.name;
  for (const auto& e : files.entries()) manifest.files.push_back(e.path);
  manifest.counts = files.summary();
  files.add(std::string(manifest_file), render_manifest(manifest));
  return files;
}

FileSet transform(const ValidatedModel& validated, std::string_view target,
                  const TransformOptions& options, const PluginRegistry& plugins) {
  return transform(validated, target_technology(target), options, plugins);
}

std::string_view to_string(PluginStatus status) noexcept {
  return status == PluginStatus::bundled ? "bundled" : "mapping-documented-only";
}

std::vector<TargetListing> list_targets(const PluginRegistry& plugins) {
  std::vector<TargetListing> out;
  auto status = [&](const std::string& name) {
    return plugins.find(name) ? PluginStatus::bundled : PluginStatus::documented;
  };
  for (const auto& t : registry()) {
    out.push_back({t.name, t.display_name, std::string(to_string(t.category)), status(t.name)});
  }
  const auto& tosca = tosca_technology();
  out.push_back({tosca.name, tosca.display_name, "standard", status(tosca.name)});
  return out;
}

// ---------------------------------------------------------------------------
// Identifiers

std::string base_identifier(std::string_view name, IdAllocator::Style style) {
  using Style = IdAllocator::Style;
  std::vector<std::string> words;
  std::string word;
  for (char ch : name) {
    auto c = static_cast<unsigned char>(ch);
    if (c < 0x80 && std::isalnum(c)) {
      word += static_cast<char>(c);
    } else if (!word.empty()) {
      words.push_back(std::move(word));
      word.clear();
    }
  }
  if (!word.empty()) words.push_back(std::move(word));

  std::string out;
  if (style == Style::pascal) {
    for (auto& w : words) {
      w[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(w[0])));
      out += w;
    }
    if (out.empty() || std::isdigit(static_cast<unsigned char>(out[0]))) out = "C" + out;
    return out;
  }
  const char sep = style == Style::snake ? '_' : '-';
  for (const auto& w : words) {
    if (!out.empty()) out += sep;
    for (char c : w) out += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  }
  if (out.empty() || std::isdigit(static_cast<unsigned char>(out[0]))) {
    out = std::string("c") + sep + out;
    if (out.back() == sep) out.pop_back();
  }
  if (style == Style::dns && out.size() > 50) {
    out.resize(50);
    while (out.back() == '-') out.pop_back();
  }
  return out;
}

const std::string& IdAllocator::id(std::string_view name) {
  if (auto it = ids_.find(name); it != ids_.end()) return it->second;
  const std::string base = base_identifier(name, style_);
  std::string candidate = base;
  const std::string sep = style_ == Style::snake ? "_" : style_ == Style::dns ? "-" : "";
  for (int n = 2; taken_.contains(candidate); ++n) candidate = fmt::format("{}{}{}", base, sep, n);
  taken_.insert(candidate);
  return ids_.emplace(std::string(name), std::move(candidate)).first->second;
}

std::string env_name(std::string_view name) {
  std::string out = base_identifier(name, IdAllocator::Style::snake);
  for (auto& c : out) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  return out;
}

}  // namespace edmm
