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
#include <map>
#include <set>
#include <unordered_map>

#include <fmt/format.h>

#include "dsl/literal_codec.hpp"
#include "edmm/dsl.hpp"
#include "yaml/yaml_tree.hpp"

namespace edmm::dsl {

using yaml::Node;

std::string format(const ParseDiagnostic& d) {
  return fmt::format("{}:{}:{}: {} {}: {}", d.source, d.line, d.column, to_string(d.severity),
                     d.code, d.message);
}

std::string default_relation_name(std::string_view type, std::string_view target) {
  return fmt::format("{}:{}", type, target);
}

bool is_identifier(std::string_view text) noexcept {
  if (text.empty()) return false;
  auto head = [](char c) { return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c == '_'; };
  auto tail = [&](char c) {
    return head(c) || (c >= '0' && c <= '9') || c == '-' || c == '.';
  };
  return head(text.front()) && std::all_of(text.begin() + 1, text.end(), tail);
}

bool is_component_name(std::string_view text) noexcept {
  if (text.empty() || text.front() == ' ' || text.back() == ' ') return false;
  return std::none_of(text.begin(), text.end(), [](char c) {
    return static_cast<unsigned char>(c) < 0x20 || c == 0x7f || c == ':' || c == '{' ||
           c == '}' || c == '$';
  });
}

namespace {

bool is_relation_name(std::string_view text) noexcept {
  if (text.empty()) return false;
  return std::none_of(text.begin(), text.end(), [](char c) {
    return static_cast<unsigned char>(c) < 0x20 || c == 0x7f || c == '{' || c == '}' || c == '$';
  });
}

struct Located {
  std::string source;
  yaml::Mark mark;
};

class Reader {
 public:
  explicit Reader(std::vector<ParseDiagnostic>& diagnostics) : diagnostics_(diagnostics) {}

  void set_source(const std::string& name) { source_ = name; }
  const std::string& source() const { return source_; }

  void error(const yaml::Mark& mark, std::string_view code, std::string message) {
    diagnostics_.push_back(ParseDiagnostic{Severity::error, source_, mark.line, mark.column,
                                           std::move(message), std::string(code)});
  }

  bool expect_map(const Node& node, std::string_view what) {
    if (node.is_map()) return true;
    error(node.mark, codes::invalid_value,
          fmt::format("{} must be a mapping, found {}", what, yaml::kind_name(node.kind)));
    return false;
  }

  /// Treats null as an empty mapping (`key:` with nothing after it).
  bool expect_optional_map(const Node& node, std::string_view what) {
    return node.is_null() || expect_map(node, what);
  }

  bool expect_sequence(const Node& node, std::string_view what) {
    if (node.is_sequence() || node.is_null()) return true;
    error(node.mark, codes::invalid_value,
          fmt::format("{} must be a sequence, found {}", what, yaml::kind_name(node.kind)));
    return false;
  }

  std::optional<std::string> text(const Node& node, std::string_view what) {
    if (node.is_scalar()) return node.value;
    error(node.mark, codes::invalid_value,
          fmt::format("{} must be a scalar, found {}", what, yaml::kind_name(node.kind)));
    return std::nullopt;
  }

  std::optional<std::string> identifier(const Node& node, std::string_view what) {
    auto value = text(node, what);
    if (!value) return std::nullopt;
    if (!is_identifier(*value)) {
      error(node.mark, codes::invalid_identifier,
            fmt::format("{} '{}' is not a valid identifier", what, *value));
      return std::nullopt;
    }
    return value;
  }

  std::optional<bool> boolean(const Node& node, std::string_view what) {
    if (node.is_scalar() && !node.quoted) {
      auto resolved = yaml::resolve_plain(node.value);
      if (resolved.is_boolean()) return resolved.get<bool>();
    }
    error(node.mark, codes::invalid_value, fmt::format("{} must be true or false", what));
    return std::nullopt;
  }

  std::optional<std::int64_t> integer(const Node& node, std::string_view what) {
    if (node.is_scalar() && !node.quoted) {
      auto resolved = yaml::resolve_plain(node.value);
      if (resolved.is_number_integer()) return resolved.get<std::int64_t>();
    }
    error(node.mark, codes::invalid_value, fmt::format("{} must be an integer", what));
    return std::nullopt;
  }

  /// Literal or reference property value.
  std::optional<PropertyValue> value(const Node& node, bool allow_reference) {
    if (node.is_scalar()) {
      if (!node.quoted) {
        auto resolved = yaml::resolve_plain(node.value);
        if (resolved.is_boolean()) return PropertyValue(resolved.get<bool>());
        if (resolved.is_number_integer()) return PropertyValue(resolved.get<std::int64_t>());
        if (resolved.is_null()) {
          error(node.mark, codes::invalid_value, "property values may not be null");
          return std::nullopt;
        }
        if (resolved.is_number_float()) {
          error(node.mark, codes::invalid_value,
                fmt::format("'{}' is not a supported value (no floating-point kind)", node.value));
          return std::nullopt;
        }
        if (looks_like_integer(node.value)) {
          error(node.mark, codes::invalid_value,
                fmt::format("integer '{}' is out of range", node.value));
          return std::nullopt;
        }
      }
      return string_value(node, allow_reference);
    }
    if (node.is_sequence()) {
      StringList items;
      for (const auto& item : node.items) {
        if (!item.is_scalar()) {
          error(item.mark, codes::invalid_value, "list values may only contain scalars");
          return std::nullopt;
        }
        auto decoded = decode_string(item.value);
        if (decoded.reference) {
          error(item.mark, codes::invalid_reference, "references are not allowed inside lists");
          return std::nullopt;
        }
        if (decoded.error) {
          error(item.mark, codes::invalid_reference, *decoded.error);
          return std::nullopt;
        }
        items.push_back(std::move(decoded.literal));
      }
      return PropertyValue(std::move(items));
    }
    error(node.mark, codes::invalid_value,
          fmt::format("property value must be a scalar or a list, found {}",
                      yaml::kind_name(node.kind)));
    return std::nullopt;
  }

  PropertyMap property_values(const Node& node, bool allow_reference) {
    PropertyMap out;
    if (!expect_optional_map(node, "properties")) return out;
    for (const auto& [key, raw] : node.entries) {
      auto name = identifier(key, "property name");
      auto parsed = value(raw, allow_reference);
      if (name && parsed) out.emplace(*name, std::move(*parsed));
    }
    return out;
  }

  std::map<std::string, PropertyDeclaration> declarations(const Node& node) {
    std::map<std::string, PropertyDeclaration> out;
    if (!expect_optional_map(node, "properties")) return out;
    for (const auto& [key, body] : node.entries) {
      auto name = identifier(key, "property name");
      if (!expect_map(body, "property declaration")) continue;
      PropertyDeclaration decl;
      bool ok = static_cast<bool>(name);
      bool has_kind = false;
      for (const auto& [field, raw] : body.entries) {
        if (field.value == "kind") {
          auto k = text(raw, "kind");
          auto parsed = k ? property_kind_from_string(*k) : std::nullopt;
          if (!parsed) {
            error(raw.mark, codes::invalid_value,
                  "kind must be one of string, integer, boolean, list");
            ok = false;
          } else {
            decl.kind = *parsed;
            has_kind = true;
          }
        } else if (field.value == "required") {
          auto b = boolean(raw, "required");
          if (b) decl.required = *b; else ok = false;
        } else if (field.value == "default") {
          auto v = value(raw, false);
          if (v) decl.default_value = std::move(*v); else ok = false;
        } else {
          unknown_key(field, "property declaration");
          ok = false;
        }
      }
      if (!has_kind && ok) {
        error(body.mark, codes::invalid_value,
              fmt::format("property declaration '{}' needs a kind", *name));
        ok = false;
      }
      if (ok) out.emplace(*name, std::move(decl));
    }
    return out;
  }

  std::optional<Artifact> artifact(const Node& node, std::optional<std::string> default_name,
                                   ArtifactKind default_kind) {
    if (node.is_scalar() && default_name) {
      if (node.value.empty()) {
        error(node.mark, codes::invalid_value, "artifact path must not be empty");
        return std::nullopt;
      }
      return Artifact{*default_name, node.value, default_kind};
    }
    if (!expect_map(node, "artifact")) return std::nullopt;
    Artifact out;
    out.kind = default_kind;
    bool ok = true;
    bool has_name = default_name.has_value();
    bool has_path = false;
    if (default_name) out.name = *default_name;
    for (const auto& [field, raw] : node.entries) {
      if (field.value == "name") {
        auto v = text(raw, "artifact name");
        if (v && !v->empty()) {
          out.name = *v;
          has_name = true;
        } else {
          if (v) error(raw.mark, codes::invalid_value, "artifact name must not be empty");
          ok = false;
        }
      } else if (field.value == "path") {
        auto v = text(raw, "artifact path");
        if (v && !v->empty()) {
          out.path = *v;
          has_path = true;
        } else {
          if (v) error(raw.mark, codes::invalid_value, "artifact path must not be empty");
          ok = false;
        }
      } else if (field.value == "kind") {
        auto v = text(raw, "artifact kind");
        auto k = v ? artifact_kind_from_string(*v) : std::nullopt;
        if (k) {
          out.kind = *k;
        } else {
          error(raw.mark, codes::invalid_value,
                "artifact kind must be one of script, archive, container-image, binary, other");
          ok = false;
        }
      } else {
        unknown_key(field, "artifact");
        ok = false;
      }
    }
    if (ok && !has_name) {
      error(node.mark, codes::invalid_value, "artifact needs a name");
      ok = false;
    }
    if (ok && !has_path) {
      error(node.mark, codes::invalid_value, "artifact needs a path");
      ok = false;
    }
    return ok ? std::optional<Artifact>(std::move(out)) : std::nullopt;
  }

  OperationMap operations(const Node& node) {
    OperationMap out;
    if (!expect_optional_map(node, "operations")) return out;
    for (const auto& [key, raw] : node.entries) {
      auto name = identifier(key, "operation name");
      if (!name) continue;
      if (auto a = artifact(raw, *name, ArtifactKind::script)) {
        out.emplace(*name, Operation{*name, std::move(*a)});
      }
    }
    return out;
  }

  std::vector<Artifact> artifacts(const Node& node) {
    std::vector<Artifact> out;
    if (!expect_sequence(node, "artifacts")) return out;
    std::set<std::string> names;
    for (const auto& item : node.items) {
      if (auto a = artifact(item, std::nullopt, ArtifactKind::other)) {
        if (!names.insert(a->name).second) {
          error(item.mark, codes::invalid_value,
                fmt::format("duplicate artifact name '{}'", a->name));
          continue;
        }
        out.push_back(std::move(*a));
      }
    }
    return out;
  }

  std::map<std::string, std::string> metadata(const Node& node) {
    std::map<std::string, std::string> out;
    if (!expect_optional_map(node, "metadata")) return out;
    for (const auto& [key, raw] : node.entries) {
      auto name = identifier(key, "metadata key");
      auto v = text(raw, "metadata value");
      if (name && v) out.emplace(*name, *v);
    }
    return out;
  }

  void unknown_key(const Node& key, std::string_view where) {
    error(key.mark, codes::unknown_key, fmt::format("unknown key '{}' in {}", key.value, where));
  }

 private:
  static bool looks_like_integer(std::string_view text) {
    if (!text.empty() && (text.front() == '-' || text.front() == '+')) text.remove_prefix(1);
    return !text.empty() && std::all_of(text.begin(), text.end(),
                                        [](char c) { return c >= '0' && c <= '9'; });
  }

  std::optional<PropertyValue> string_value(const Node& node, bool allow_reference) {
    auto decoded = decode_string(node.value);
    if (decoded.error) {
      error(node.mark, codes::invalid_reference, *decoded.error);
      return std::nullopt;
    }
    if (decoded.reference) {
      if (!allow_reference) {
        error(node.mark, codes::invalid_reference, "references are not allowed here");
        return std::nullopt;
      }
      return PropertyValue(*decoded.reference);
    }
    return PropertyValue(std::move(decoded.literal));
  }

  std::vector<ParseDiagnostic>& diagnostics_;
  std::string source_;
};

struct PendingRelation {
  Relation relation;
  Located where;
};

class ModelBuilder {
 public:
  ModelBuilder(const Catalog& base, std::vector<ParseDiagnostic>& diagnostics)
      : base_(base), read_(diagnostics) {}

  void document(const Node& doc, bool catalog_only) {
    if (!read_.expect_map(doc, "document")) return;
    bool has_version = false;
    for (const auto& [key, value] : doc.entries) {
      const std::string& k = key.value;
      if (k == "edmm_version") {
        has_version = true;
        yaml::Json v = value.is_scalar() && !value.quoted ? yaml::resolve_plain(value.value)
                                                          : yaml::Json(nullptr);
        if (!v.is_number_integer() || v.get<std::int64_t>() != 1) {
          read_.error(value.mark, codes::version, "edmm_version must be 1");
        }
      } else if (k == "component_types") {
        component_types(value);
      } else if (k == "relation_types") {
        relation_types(value);
      } else if (catalog_only && k == "catalog_version") {
        if (auto v = read_.integer(value, "catalog_version")) catalog_version_ = static_cast<int>(*v);
      } else if (!catalog_only && k == "name") {
        model_name(key, value);
      } else if (!catalog_only && k == "properties") {
        for (auto& [name, v] : read_.property_values(value, true)) {
          if (!model_.properties.emplace(name, std::move(v)).second) {
            read_.error(value.mark, codes::duplicate_key,
                        fmt::format("model property '{}' is defined more than once", name));
          }
        }
      } else if (!catalog_only && k == "components") {
        components(value);
      } else if (!catalog_only && k == "relations") {
        top_level_relations(value);
      } else {
        read_.unknown_key(key, catalog_only ? "catalog document" : "document");
      }
    }
    if (!has_version) {
      read_.error(doc.mark, codes::version, "document is missing the edmm_version: 1 header");
    }
  }

  Reader& reader() { return read_; }

  DeploymentModel finish_model() {
    if (!name_) {
      read_.set_source(first_source_);
      read_.error(yaml::Mark{}, codes::model_name, "model has no name");
    }
    model_.name = name_.value_or("");

    // Relations are grouped by source component, in component order.
    std::unordered_map<std::string, std::size_t> index;
    for (std::size_t i = 0; i < model_.components.size(); ++i) {
      index.emplace(model_.components[i].name, i);
    }
    for (auto& pending : top_level_) {
      add_relation(std::move(pending.relation), pending.where);
    }
    std::stable_sort(relations_.begin(), relations_.end(),
                     [&](const PendingRelation& a, const PendingRelation& b) {
                       auto ia = index.find(a.relation.source);
                       auto ib = index.find(b.relation.source);
                       std::size_t ka = ia == index.end() ? index.size() : ia->second;
                       std::size_t kb = ib == index.end() ? index.size() : ib->second;
                       return ka < kb;
                     });
    for (auto& r : relations_) model_.relations.push_back(std::move(r.relation));

    install_catalog(model_, base_);
    for (auto& [name, t] : local_component_types_) {
      if (base_.component_types.contains(name)) {
        collision(name, type_sites_[name]);
        continue;
      }
      model_.component_types.emplace(name, std::move(t));
    }
    for (auto& [name, t] : local_relation_types_) {
      if (base_.relation_types.contains(name)) {
        collision(name, type_sites_["relation:" + name]);
        continue;
      }
      model_.relation_types.emplace(name, std::move(t));
    }
    return std::move(model_);
  }

  Catalog finish_catalog(TypeOrigin origin) {
    Catalog catalog;
    catalog.origin = origin;
    catalog.version = catalog_version_;
    for (auto& [name, t] : local_component_types_) {
      t.origin = origin;
      catalog.component_types.emplace(name, std::move(t));
    }
    for (auto& [name, t] : local_relation_types_) {
      t.origin = origin;
      catalog.relation_types.emplace(name, std::move(t));
    }
    return catalog;
  }

  void set_first_source(const std::string& name) {
    if (first_source_.empty()) first_source_ = name;
  }

 private:
  Located here(const yaml::Mark& mark) const { return Located{read_.source(), mark}; }

  void collision(const std::string& name, const Located& where) {
    read_.set_source(where.source);
    read_.error(where.mark, codes::duplicate_type,
                fmt::format("type '{}' redefines a catalog type", name));
  }

  void model_name(const Node& key, const Node& value) {
    auto v = read_.text(value, "name");
    if (!v) return;
    if (v->empty()) {
      read_.error(value.mark, codes::model_name, "model name must not be empty");
      return;
    }
    if (name_) {
      read_.error(key.mark, codes::model_name,
                  fmt::format("model name is already set to '{}' in {}", *name_, name_source_));
      return;
    }
    name_ = *v;
    name_source_ = read_.source();
  }

  void component_types(const Node& node) {
    if (!read_.expect_optional_map(node, "component_types")) return;
    for (const auto& [key, body] : node.entries) {
      auto name = read_.identifier(key, "component type name");
      if (!name || !read_.expect_optional_map(body, "component type")) continue;
      ComponentType t;
      t.name = *name;
      t.origin = TypeOrigin::model;
      for (const auto& [field, raw] : body.entries) {
        if (field.value == "extends") {
          if (auto parent = read_.identifier(raw, "extends")) t.extends = *parent;
        } else if (field.value == "metadata") {
          t.metadata = read_.metadata(raw);
        } else if (field.value == "properties") {
          t.properties = read_.declarations(raw);
        } else if (field.value == "operations") {
          t.operations = read_.operations(raw);
        } else {
          read_.unknown_key(field, "component type");
        }
      }
      if (auto prior = type_sites_.find(*name); prior != type_sites_.end()) {
        read_.error(key.mark, codes::duplicate_type,
                    fmt::format("component type '{}' is already defined at {}:{}:{}", *name,
                                prior->second.source, prior->second.mark.line,
                                prior->second.mark.column));
        continue;
      }
      type_sites_.emplace(*name, here(key.mark));
      local_component_types_.emplace(*name, std::move(t));
    }
  }

  void relation_types(const Node& node) {
    if (!read_.expect_optional_map(node, "relation_types")) return;
    for (const auto& [key, body] : node.entries) {
      auto name = read_.identifier(key, "relation type name");
      if (!name || !read_.expect_optional_map(body, "relation type")) continue;
      RelationType t;
      t.name = *name;
      t.origin = TypeOrigin::model;
      for (const auto& [field, raw] : body.entries) {
        if (field.value == "extends") {
          if (auto parent = read_.identifier(raw, "extends")) t.extends = *parent;
        } else if (field.value == "properties") {
          t.properties = read_.declarations(raw);
        } else {
          read_.unknown_key(field, "relation type");
        }
      }
      std::string site = "relation:" + *name;
      if (auto prior = type_sites_.find(site); prior != type_sites_.end()) {
        read_.error(key.mark, codes::duplicate_type,
                    fmt::format("relation type '{}' is already defined at {}:{}:{}", *name,
                                prior->second.source, prior->second.mark.line,
                                prior->second.mark.column));
        continue;
      }
      type_sites_.emplace(site, here(key.mark));
      local_relation_types_.emplace(*name, std::move(t));
    }
  }

  void components(const Node& node) {
    if (!read_.expect_optional_map(node, "components")) return;
    for (const auto& [key, body] : node.entries) {
      const std::string& name = key.value;
      if (!is_component_name(name)) {
        read_.error(key.mark, codes::invalid_identifier,
                    fmt::format("'{}' is not a valid component name", name));
        continue;
      }
      if (auto prior = component_sites_.find(name); prior != component_sites_.end()) {
        read_.error(key.mark, codes::duplicate_component,
                    fmt::format("component '{}' is defined in both {} (line {}) and {} (line {})",
                                name, prior->second.source, prior->second.mark.line,
                                read_.source(), key.mark.line));
        continue;
      }
      component_sites_.emplace(name, here(key.mark));
      if (!read_.expect_map(body, fmt::format("component '{}'", name))) continue;

      Component c;
      c.name = name;
      bool has_type = false;
      for (const auto& [field, raw] : body.entries) {
        if (field.value == "type") {
          if (auto t = read_.identifier(raw, "component type")) {
            c.type = *t;
            has_type = true;
          }
        } else if (field.value == "properties") {
          c.properties = read_.property_values(raw, true);
        } else if (field.value == "operations") {
          c.operations = read_.operations(raw);
        } else if (field.value == "artifacts") {
          c.artifacts = read_.artifacts(raw);
        } else if (field.value == "relations") {
          inline_relations(name, raw);
        } else {
          read_.unknown_key(field, "component");
        }
      }
      if (!has_type) {
        read_.error(key.mark, codes::invalid_value,
                    fmt::format("component '{}' needs a type", name));
        continue;
      }
      model_.components.push_back(std::move(c));
    }
  }

  void inline_relations(const std::string& source, const Node& node) {
    if (!read_.expect_sequence(node, "relations")) return;
    for (const auto& item : node.items) {
      if (!read_.expect_map(item, "relation")) continue;
      bool long_form = std::any_of(item.entries.begin(), item.entries.end(),
                                   [](const auto& e) { return e.first.value == "target"; });
      if (!long_form) {
        if (item.entries.size() != 1) {
          read_.error(item.mark, codes::invalid_value,
                      "short relation form is a single '<type>: <target>' entry");
          continue;
        }
        const auto& [type_key, target_node] = item.entries.front();
        auto type = read_.identifier(type_key, "relation type");
        auto target = read_.text(target_node, "relation target");
        if (!type || !target) continue;
        Relation r;
        r.type = *type;
        r.source = source;
        r.target = *target;
        r.name = default_relation_name(r.type, r.target);
        add_relation(std::move(r), here(item.mark));
        continue;
      }
      if (auto r = relation_body(item, source)) add_relation(std::move(*r), here(item.mark));
    }
  }

  void top_level_relations(const Node& node) {
    if (!read_.expect_sequence(node, "relations")) return;
    for (const auto& item : node.items) {
      if (!read_.expect_map(item, "relation")) continue;
      if (auto r = relation_body(item, std::nullopt)) {
        top_level_.push_back(PendingRelation{std::move(*r), here(item.mark)});
      }
    }
  }

  std::optional<Relation> relation_body(const Node& item, std::optional<std::string> source) {
    Relation r;
    bool ok = true;
    std::optional<std::string> name;
    if (source) r.source = *source;
    bool has_type = false, has_target = false, has_source = source.has_value();
    for (const auto& [field, raw] : item.entries) {
      if (field.value == "type") {
        if (auto t = read_.identifier(raw, "relation type")) {
          r.type = *t;
          has_type = true;
        } else {
          ok = false;
        }
      } else if (field.value == "target") {
        if (auto t = read_.text(raw, "relation target")) {
          r.target = *t;
          has_target = true;
        } else {
          ok = false;
        }
      } else if (!source && field.value == "source") {
        if (auto t = read_.text(raw, "relation source")) {
          r.source = *t;
          has_source = true;
        } else {
          ok = false;
        }
      } else if (field.value == "name") {
        auto t = read_.text(raw, "relation name");
        if (t && is_relation_name(*t)) {
          name = *t;
        } else {
          if (t) {
            read_.error(raw.mark, codes::invalid_identifier,
                        fmt::format("'{}' is not a valid relation name", *t));
          }
          ok = false;
        }
      } else if (field.value == "properties") {
        r.properties = read_.property_values(raw, true);
      } else if (field.value == "operations") {
        r.operations = read_.operations(raw);
      } else {
        read_.unknown_key(field, "relation");
        ok = false;
      }
    }
    if (ok && (!has_type || !has_target || !has_source)) {
      read_.error(item.mark, codes::invalid_value,
                  source ? "relation needs a type and a target"
                         : "relation needs a source, a type and a target");
      ok = false;
    }
    if (!ok) return std::nullopt;
    r.name = name.value_or(default_relation_name(r.type, r.target));
    return r;
  }

  void add_relation(Relation r, const Located& where) {
    auto key = std::make_pair(r.source, r.name);
    if (!relation_names_.insert(key).second) {
      read_.set_source(where.source);
      read_.error(where.mark, codes::duplicate_relation,
                  fmt::format("component '{}' already has a relation named '{}'", r.source,
                              r.name));
      return;
    }
    relations_.push_back(PendingRelation{std::move(r), where});
  }

  const Catalog& base_;
  Reader read_;
  DeploymentModel model_;
  std::optional<std::string> name_;
  std::string name_source_;
  std::string first_source_;
  int catalog_version_ = 1;
  std::map<std::string, Located> component_sites_;
  std::map<std::string, Located> type_sites_;
  ComponentTypeMap local_component_types_;
  RelationTypeMap local_relation_types_;
  std::vector<PendingRelation> relations_;
  std::vector<PendingRelation> top_level_;
  std::set<std::pair<std::string, std::string>> relation_names_;
};

std::string_view load_error_code(yaml::LoadError::Reason reason) {
  switch (reason) {
    case yaml::LoadError::Reason::syntax: return codes::syntax;
    case yaml::LoadError::Reason::unsupported_feature: return codes::unsupported_feature;
    case yaml::LoadError::Reason::duplicate_key: return codes::duplicate_key;
  }
  return codes::syntax;
}

/// Shared driver: validates the source set, loads every document and feeds
/// it to the builder. Returns false when nothing could be read.
bool read_sources(const SourceSet& sources, ModelBuilder& builder, bool catalog_only,
                  std::vector<ParseDiagnostic>& diagnostics) {
  if (sources.empty()) {
    diagnostics.push_back(ParseDiagnostic{Severity::error, "<input>", 1, 1,
                                          "at least one source is required",
                                          std::string(codes::sources)});
    return false;
  }
  std::set<std::string> names;
  for (const auto& source : sources) {
    if (!names.insert(source.name).second) {
      diagnostics.push_back(ParseDiagnostic{Severity::error, source.name, 1, 1,
                                            fmt::format("source '{}' is listed twice", source.name),
                                            std::string(codes::sources)});
      return false;
    }
  }
  for (const auto& source : sources) {
    builder.set_first_source(source.name);
    builder.reader().set_source(source.name);
    std::vector<Node> documents;
    try {
      documents = yaml::load_all(source.text);
    } catch (const yaml::LoadError& e) {
      builder.reader().error(e.mark(), load_error_code(e.reason()), e.what());
      continue;
    }
    if (documents.empty()) {
      builder.reader().error(yaml::Mark{}, codes::version, "source contains no document");
      continue;
    }
    for (const auto& doc : documents) {
      builder.reader().set_source(source.name);
      builder.document(doc, catalog_only);
    }
  }
  return true;
}

bool has_errors(const std::vector<ParseDiagnostic>& diagnostics) {
  return std::any_of(diagnostics.begin(), diagnostics.end(),
                     [](const auto& d) { return d.severity == Severity::error; });
}

}  // namespace

ParseResult parse(const SourceSet& sources, const Catalog& base) {
  ParseResult result;
  try {
    ModelBuilder builder(base, result.diagnostics);
    if (!read_sources(sources, builder, false, result.diagnostics)) return result;
    DeploymentModel model = builder.finish_model();
    if (!has_errors(result.diagnostics)) result.model = std::move(model);
  } catch (const std::exception& e) {
    result.model.reset();
    result.diagnostics.push_back(ParseDiagnostic{Severity::error, "<input>", 1, 1,
                                                 fmt::format("internal parser error: {}", e.what()),
                                                 std::string(codes::syntax)});
  }
  return result;
}

CatalogParseResult parse_catalog(const SourceSet& sources, TypeOrigin origin) {
  CatalogParseResult result;
  try {
    static const Catalog empty{};
    ModelBuilder builder(empty, result.diagnostics);
    if (!read_sources(sources, builder, true, result.diagnostics)) return result;
    Catalog catalog = builder.finish_catalog(origin);
    if (!has_errors(result.diagnostics)) result.catalog = std::move(catalog);
  } catch (const std::exception& e) {
    result.catalog.reset();
    result.diagnostics.push_back(ParseDiagnostic{Severity::error, "<input>", 1, 1,
                                                 fmt::format("internal parser error: {}", e.what()),
                                                 std::string(codes::syntax)});
  }
  return result;
}

}  // namespace edmm::dsl
