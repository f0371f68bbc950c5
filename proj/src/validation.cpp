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

#include "edmm/validation.hpp"

#include <fmt/format.h>
#include <fmt/ranges.h>

#include <algorithm>
#include <functional>
#include <map>
#include <set>
#include <tuple>

#include "edmm/dsl.hpp"

namespace edmm {

namespace dc = diagnostic_codes;

std::string relation_subject(const Relation& relation) {
  return fmt::format("{}/{}", relation.source, relation.name);
}

namespace {

bool has_control(std::string_view text) {
  return std::any_of(text.begin(), text.end(),
                     [](char c) { return static_cast<unsigned char>(c) < 0x20 || c == 0x7f; });
}

/// Catalog types plus the model's local types; collisions keep the catalog's.
DeploymentModel rebase(const DeploymentModel& model, const Catalog& catalog,
                       std::vector<std::string>* collisions, std::vector<std::string>* stale = nullptr) {
  if (stale) {
    auto compare = [&](const auto& installed, const auto& shipped) {
      for (const auto& [name, t] : shipped) {
        auto it = installed.find(name);
        if (it == installed.end() || (it->second.origin != TypeOrigin::model && !(it->second == t))) {
          stale->push_back(name);
        }
      }
    };
    compare(model.component_types, catalog.component_types);
    compare(model.relation_types, catalog.relation_types);
  }
  DeploymentModel out = model;
  out.component_types = catalog.component_types;
  out.relation_types = catalog.relation_types;
  for (const auto& [name, t] : model.component_types) {
    if (t.origin != TypeOrigin::model) continue;
    if (!out.component_types.emplace(name, t).second && collisions) collisions->push_back(name);
  }
  for (const auto& [name, t] : model.relation_types) {
    if (t.origin != TypeOrigin::model) continue;
    if (!out.relation_types.emplace(name, t).second && collisions) collisions->push_back(name);
  }
  return out;
}

std::string_view code_for(Errc errc) {
  switch (errc) {
    case Errc::unknown_type: return dc::unknown_type;
    case Errc::cyclic_type_chain: return dc::cyclic_type_chain;
    case Errc::unknown_component: return dc::dangling_relation;
    case Errc::unresolved_reference: return dc::unresolved_reference;
    case Errc::reference_cycle: return dc::reference_cycle;
    case Errc::kind_mismatch: return dc::kind_mismatch;
    case Errc::hosting_cycle: return dc::hosting_cycle;
    case Errc::multiple_hosts: return dc::multiple_hosts;
    case Errc::dependency_cycle: return dc::dependency_cycle;
    case Errc::name_collision: return dc::type_collision;
    default: return dc::invalid_name;
  }
}

/// Strongly connected components with more than one member, each sorted.
std::vector<std::vector<std::string>> cycles(
    const std::set<std::string>& nodes, const std::map<std::string, std::set<std::string>>& edges) {
  std::map<std::string, std::set<std::string>> reach;
  for (const auto& start : nodes) {
    auto& seen = reach[start];
    std::vector<std::string> work{start};
    while (!work.empty()) {
      std::string n = std::move(work.back());
      work.pop_back();
      auto it = edges.find(n);
      if (it == edges.end()) continue;
      for (const auto& next : it->second) {
        if (seen.insert(next).second) work.push_back(next);
      }
    }
  }
  std::vector<std::vector<std::string>> out;
  std::set<std::string> assigned;
  for (const auto& n : nodes) {
    if (assigned.contains(n) || !reach[n].contains(n)) continue;
    std::vector<std::string> scc;
    for (const auto& m : reach[n]) {
      if (reach[m].contains(n)) scc.push_back(m);
    }
    assigned.insert(scc.begin(), scc.end());
    if (scc.size() > 1) out.push_back(std::move(scc));
  }
  return out;
}

class Validator {
 public:
  Validator(const DeploymentModel& input, const Catalog& catalog) : input_(input) {
    std::vector<std::string> collisions;
    std::vector<std::string> stale;
    model_ = rebase(input, catalog, &collisions, &stale);
    for (const auto& name : collisions) {
      error(dc::type_collision, name,
            fmt::format("local type '{}' redefines a catalog type", name));
    }
    for (const auto& name : stale) {
      error(dc::type_collision, name,
            fmt::format("catalog type '{}' is missing from the model or differs from the catalog", name));
    }
  }

  std::vector<Diagnostic> run() {
    check_types();
    check_model_properties();
    check_components();
    check_relations();
    check_graph();
    if (count(out_, Severity::error) == 0) probe();
    std::sort(out_.begin(), out_.end(), [](const Diagnostic& a, const Diagnostic& b) {
      return std::tie(a.severity, a.code, a.subject, a.message) <
             std::tie(b.severity, b.code, b.subject, b.message);
    });
    out_.erase(std::unique(out_.begin(), out_.end()), out_.end());
    return std::move(out_);
  }

 private:
  void error(std::string_view code, std::string subject, std::string message) {
    out_.push_back({Severity::error, std::string(code), std::move(subject), std::move(message)});
  }
  void warning(std::string_view code, std::string subject, std::string message) {
    out_.push_back({Severity::warning, std::string(code), std::move(subject), std::move(message)});
  }

  template <typename TypeMap>
  bool chain_ok(const TypeMap& types, const std::string& name, const std::string& subject,
                std::string_view what) {
    try {
      resolve_chain_of(types, name);
      return true;
    } catch (const Error& e) {
      if (e.code() == Errc::cyclic_type_chain) {
        error(dc::cyclic_type_chain, subject, e.what());
      } else {
        error(dc::unknown_type, subject, fmt::format("{} type chain is broken: {}", what, e.what()));
      }
      return false;
    }
  }

  void resolve_chain_of(const ComponentTypeMap&, const std::string& name) {
    resolve_component_type(model_, name);
  }
  void resolve_chain_of(const RelationTypeMap&, const std::string& name) {
    resolve_relation_type(model_, name);
  }

  void check_declarations(const std::string& type_name,
                          const std::map<std::string, PropertyDeclaration>& declarations) {
    for (const auto& [name, decl] : declarations) {
      if (!dsl::is_identifier(name)) {
        error(dc::invalid_name, type_name,
              fmt::format("property name '{}' is not an identifier", name));
      }
      if (decl.default_value && !decl.default_value->is_reference() &&
          decl.default_value->kind() != decl.kind) {
        error(dc::kind_mismatch, type_name,
              fmt::format("default of property '{}' is not a {}", name, to_string(decl.kind)));
      }
    }
  }

  void check_operations(const std::string& subject, const OperationMap& operations) {
    for (const auto& [name, op] : operations) {
      if (!dsl::is_identifier(name)) {
        error(dc::invalid_name, subject,
              fmt::format("operation name '{}' is not an identifier", name));
      }
      check_artifact(subject, op.artifact, fmt::format("operation '{}'", name));
    }
  }

  void check_artifact(const std::string& subject, const Artifact& artifact, std::string owner) {
    if (artifact.name.empty() || has_control(artifact.name)) {
      error(dc::invalid_artifact, subject, fmt::format("{} has an artifact without a valid name", owner));
    }
    if (artifact.path.empty() || has_control(artifact.path)) {
      error(dc::invalid_artifact, subject,
            fmt::format("artifact '{}' of {} has no valid path", artifact.name, owner));
    }
  }

  void check_types() {
    for (const auto& [name, t] : model_.component_types) {
      if (!dsl::is_identifier(name)) {
        error(dc::invalid_name, name, fmt::format("type name '{}' is not an identifier", name));
      }
      if (chain_ok(model_.component_types, name, name, "component")) good_component_types_.insert(name);
      check_declarations(name, t.properties);
      check_operations(name, t.operations);
    }
    for (const auto& [name, t] : model_.relation_types) {
      if (!dsl::is_identifier(name)) {
        error(dc::invalid_name, name, fmt::format("type name '{}' is not an identifier", name));
      }
      check_declarations(name, t.properties);
      if (!chain_ok(model_.relation_types, name, name, "relation")) continue;
      const auto chain = resolve_relation_type(model_, name);
      if (chain.back()->name != relation_names::depends_on) {
        error(dc::relation_type_root, name,
              fmt::format("relation type '{}' does not derive from {}", name,
                          relation_names::depends_on));
        continue;
      }
      good_relation_types_.insert(name);
    }
  }

  /// Resolves `value`; reports reference failures against `subject`.
  std::optional<PropertyValue> resolve(const std::string& subject, const std::string& property,
                                       const PropertyValue& value) {
    try {
      return resolve_value(model_, value);
    } catch (const Error& e) {
      if (e.code() == Errc::unresolved_reference) {
        error(dc::unresolved_reference, subject,
              fmt::format("property '{}': {}", property, e.what()));
      } else if (e.code() == Errc::reference_cycle) {
        error(dc::reference_cycle, subject, fmt::format("property '{}': {}", property, e.what()));
      }
      // Broken types of referenced components are reported on those components.
      return std::nullopt;
    }
  }

  void check_properties(const std::string& subject,
                        const std::map<std::string, PropertyDeclaration>& declarations,
                        const PropertyMap& overrides) {
    auto check_kind = [&](const std::string& property, const PropertyValue& resolved,
                          const PropertyDeclaration& decl) {
      if (resolved.kind() != decl.kind) {
        error(dc::kind_mismatch, subject,
              fmt::format("property '{}' is declared {} but holds a {}", property,
                          to_string(decl.kind),
                          to_string(resolved.kind().value_or(PropertyKind::string))));
      }
    };
    for (const auto& [property, value] : overrides) {
      if (!dsl::is_identifier(property)) {
        error(dc::invalid_name, subject,
              fmt::format("property name '{}' is not an identifier", property));
      }
      auto decl = declarations.find(property);
      if (decl == declarations.end()) {
        warning(dc::adhoc_property, subject,
                fmt::format("property '{}' is not declared by the type", property));
      }
      auto resolved = resolve(subject, property, value);
      if (resolved && decl != declarations.end()) check_kind(property, *resolved, decl->second);
    }
    for (const auto& [property, decl] : declarations) {
      if (overrides.contains(property)) continue;
      if (decl.default_value) {
        if (auto resolved = resolve(subject, property, *decl.default_value)) {
          check_kind(property, *resolved, decl);
        }
      } else if (decl.required) {
        error(dc::missing_required_property, subject,
              fmt::format("required property '{}' has no value", property));
      }
    }
  }

  void check_model_properties() {
    if (model_.name.empty() || has_control(model_.name)) {
      error(dc::invalid_name, "model", "model name is empty or contains control characters");
    }
    for (const auto& [property, value] : model_.properties) {
      if (!dsl::is_identifier(property)) {
        error(dc::invalid_name, "model",
              fmt::format("property name '{}' is not an identifier", property));
      }
      resolve("model", property, value);
    }
  }

  void check_components() {
    std::set<std::string> seen;
    for (const auto& c : model_.components) {
      if (!dsl::is_component_name(c.name)) {
        error(dc::invalid_name, c.name, fmt::format("'{}' is not a valid component name", c.name));
      }
      if (!seen.insert(c.name).second) {
        error(dc::duplicate_name, c.name, fmt::format("component '{}' is defined twice", c.name));
      }
      if (!model_.component_types.contains(c.type)) {
        error(dc::unknown_type, c.name,
              fmt::format("component '{}' has unknown type '{}'", c.name, c.type));
      } else if (good_component_types_.contains(c.type)) {
        check_properties(c.name, declared_properties(model_, c.type), c.properties);
      }
      check_operations(c.name, c.operations);
      std::set<std::string> artifact_names;
      for (const auto& a : c.artifacts) {
        check_artifact(c.name, a, fmt::format("component '{}'", c.name));
        if (!artifact_names.insert(a.name).second) {
          error(dc::invalid_artifact, c.name,
                fmt::format("artifact name '{}' is used twice", a.name));
        }
      }
    }
  }

  void check_relations() {
    std::set<std::pair<std::string, std::string>> seen;
    for (const auto& r : model_.relations) {
      const std::string subject = relation_subject(r);
      if (r.name.empty() || has_control(r.name)) {
        error(dc::invalid_name, subject, "relation name is empty or contains control characters");
      }
      if (!seen.emplace(r.source, r.name).second) {
        error(dc::duplicate_name, subject,
              fmt::format("component '{}' declares relation '{}' twice", r.source, r.name));
      }
      bool endpoints_ok = true;
      for (const auto& [role, name] : {std::pair{"source", &r.source}, {"target", &r.target}}) {
        if (model_.find_component(*name) == nullptr) {
          endpoints_ok = false;
          error(dc::dangling_relation, subject,
                fmt::format("{} '{}' is not a component of the model", role, *name));
        }
      }
      if (r.source == r.target) {
        error(dc::self_loop, subject, fmt::format("'{}' relates to itself", r.source));
      }
      bool type_ok = good_relation_types_.contains(r.type);
      if (!model_.relation_types.contains(r.type)) {
        error(dc::unknown_type, subject, fmt::format("relation has unknown type '{}'", r.type));
      } else if (type_ok) {
        std::map<std::string, PropertyDeclaration> declarations;
        for (const auto* t : resolve_relation_type(model_, r.type)) {
          for (const auto& [name, decl] : t->properties) declarations.emplace(name, decl);
        }
        check_properties(subject, declarations, r.properties);
      }
      check_operations(subject, r.operations);
      if (type_ok && endpoints_ok && r.source != r.target) graph_relations_.push_back(&r);
    }
  }

  void check_graph() {
    std::set<std::string> nodes;
    for (const auto& c : model_.components) nodes.insert(c.name);
    std::map<std::string, std::set<std::string>> hosting;
    std::map<std::string, std::set<std::string>> dependency;
    std::map<std::string, std::vector<std::string>> hosts;
    for (const auto* r : graph_relations_) {
      dependency[r->source].insert(r->target);
      if (relation_is_a(model_, r->type, relation_names::hosted_on)) {
        hosting[r->source].insert(r->target);
        hosts[r->source].push_back(r->target);
      }
    }
    for (const auto& [source, targets] : hosts) {
      if (targets.size() > 1) {
        error(dc::multiple_hosts, source,
              fmt::format("'{}' is hosted on {}", source, fmt::join(targets, ", ")));
      }
    }
    std::set<std::vector<std::string>> hosting_cycles;
    for (auto& members : cycles(nodes, hosting)) {
      error(dc::hosting_cycle, members.front(),
            fmt::format("hosting cycle among {}", fmt::join(members, ", ")));
      hosting_cycles.insert(std::move(members));
    }
    for (const auto& members : cycles(nodes, dependency)) {
      if (hosting_cycles.contains(members)) continue;
      error(dc::dependency_cycle, members.front(),
            fmt::format("dependency cycle among {}", fmt::join(members, ", ")));
    }
    if (input_.components.size() > 1) {
      std::set<std::string> incident;
      for (const auto& r : input_.relations) {
        incident.insert(r.source);
        incident.insert(r.target);
      }
      for (const auto& c : input_.components) {
        if (!incident.contains(c.name)) {
          warning(dc::unreachable_component, c.name,
                  fmt::format("'{}' has no relations", c.name));
        }
      }
    }
  }

  /// Runs every model query; anything they reject becomes a diagnostic.
  void probe() {
    try {
      for (const auto& c : model_.components) {
        effective_properties(model_, c);
        effective_operations(model_, c);
        effective_metadata(model_, c.type);
        hosting_stack(model_, c);
      }
      for (const auto& r : model_.relations) {
        effective_properties(model_, r);
        builtin_relation_kind(model_, r);
      }
      deployment_order(model_);
      stack_tops(model_);
      dsl::resolve_intrinsics(model_);
    } catch (const Error& e) {
      error(code_for(e.code()), e.subjects().empty() ? std::string("model") : e.subjects().front(),
            e.what());
    }
  }

  const DeploymentModel& input_;
  DeploymentModel model_;
  std::vector<Diagnostic> out_;
  std::set<std::string> good_component_types_;
  std::set<std::string> good_relation_types_;
  std::vector<const Relation*> graph_relations_;
};

}  // namespace

std::vector<Diagnostic> validate(const DeploymentModel& model, const Catalog& catalog) {
  return Validator(model, catalog).run();
}

std::size_t count(const std::vector<Diagnostic>& diagnostics, Severity severity) noexcept {
  return static_cast<std::size_t>(
      std::count_if(diagnostics.begin(), diagnostics.end(),
                    [&](const Diagnostic& d) { return d.severity == severity; }));
}

ValidationFailed::ValidationFailed(std::vector<Diagnostic> diagnostics)
    : Error(Errc::validation_failed,
            fmt::format("validation failed: {}{}", summary_line(diagnostics),
                        diagnostics.empty() ? std::string()
                                            : fmt::format("; first: {} {}", diagnostics.front().code,
                                                          diagnostics.front().message)),
            [&] {
              std::vector<std::string> subjects;
              for (const auto& d : diagnostics) {
                if (d.severity == Severity::error) subjects.push_back(d.subject);
              }
              return subjects;
            }()),
      diagnostics_(std::move(diagnostics)) {}

ValidatedModel assert_valid(const DeploymentModel& model, const Catalog& catalog) {
  auto diagnostics = validate(model, catalog);
  if (count(diagnostics, Severity::error) > 0) throw ValidationFailed(std::move(diagnostics));
  auto resolved = std::make_shared<const DeploymentModel>(
      dsl::resolve_intrinsics(rebase(model, catalog, nullptr)));
  return ValidatedModel(std::move(resolved), std::move(diagnostics));
}

std::string escape_field(std::string_view text) {
  std::string out;
  out.reserve(text.size());
  for (char c : text) {
    switch (c) {
      case '\\': out += "\\\\"; break;
      case '\t': out += "\\t"; break;
      case '\n': out += "\\n"; break;
      case '\r': out += "\\r"; break;
      default: out += c;
    }
  }
  return out;
}

std::string render_text(const std::vector<Diagnostic>& diagnostics) {
  std::string out;
  for (const auto& d : diagnostics) {
    out += fmt::format("{} {} [{}]: {}\n", to_string(d.severity), d.code, d.subject, d.message);
  }
  return out;
}

std::string render_machine(const std::vector<Diagnostic>& diagnostics) {
  std::string out;
  for (const auto& d : diagnostics) {
    out += fmt::format("diagnostic\t{}\t{}\t{}\t{}\n", to_string(d.severity), d.code,
                       escape_field(d.subject), escape_field(d.message));
  }
  return out;
}

std::string summary_line(const std::vector<Diagnostic>& diagnostics) {
  auto errors = count(diagnostics, Severity::error);
  auto warnings = count(diagnostics, Severity::warning);
  return fmt::format("{} error{}, {} warning{}", errors, errors == 1 ? "" : "s", warnings,
                     warnings == 1 ? "" : "s");
}

}  // namespace edmm
