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

#include "support.hpp"

#include <fmt/format.h>
#include <unistd.h>

#include <algorithm>
#include <fstream>
#include <functional>
#include <limits>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>

#include "edmm/catalog.hpp"
#include "edmm/compat.hpp"
#include "edmm/dsl.hpp"

#ifndef EDMM_SOURCE_DIR
#error "EDMM_SOURCE_DIR must be defined"
#endif

namespace edmm::testing {

namespace fs = std::filesystem;

fs::path source_dir() { return fs::path(EDMM_SOURCE_DIR); }

fs::path fixture_path(const std::string& relative) {
  return source_dir() / "tests" / "fixtures" / relative;
}

std::string read_text(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

namespace {

DeploymentModel parse_or_throw(const dsl::SourceSet& sources) {
  auto result = dsl::parse(sources);
  if (!result.ok()) {
    std::string text;
    for (const auto& d : result.diagnostics) text += dsl::format(d) + "\n";
    throw std::runtime_error("parse failed:\n" + text);
  }
  return std::move(*result.model);
}

}  // namespace

DeploymentModel load_model(const fs::path& path) {
  return parse_or_throw({{path.filename().string(), read_text(path)}});
}

DeploymentModel reference_model() {
  return load_model(fixture_path("reference/reference_scenario.edmm.yaml"));
}

DeploymentModel chain_model() { return load_model(fixture_path("chain/chain.edmm.yaml")); }

DeploymentModel parse_text(const std::string& text, const std::string& source) {
  return parse_or_throw({{source, text}});
}

TempDir::TempDir() {
  static int counter = 0;
  path_ = fs::temp_directory_path() /
          fmt::format("edmm-test-{}-{}-{}", ::getpid(), counter++, std::random_device{}());
  fs::create_directories(path_);
}

TempDir::~TempDir() {
  std::error_code ec;
  fs::remove_all(path_, ec);
}

// ---------------------------------------------------------------------------
// Generator

namespace {

using Rng = std::mt19937_64;

int uniform(Rng& rng, int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); }
bool chance(Rng& rng, double p) { return std::bernoulli_distribution(p)(rng); }

template <typename T>
const T& pick(Rng& rng, const std::vector<T>& items) {
  return items[static_cast<std::size_t>(uniform(rng, 0, static_cast<int>(items.size()) - 1))];
}

const std::vector<std::string>& tricky_strings() {
  static const std::vector<std::string> pool{
      "plain",        "with space", "yes",           "no",         "null",
      "~",            "true",       "123",           "0x1F",       "-",
      "a: b",         "#not a comment", "${region}",  "$${double}", "",
      "  padded  ",   "quote'\"",   "line1\nline2",  "tab\there",  "z\xc3\xbcrich",
      "[not, a, list]", "{not: map}", "- item",       "@at",        "1.5",
      "-0",           "'single'",   "\"double\"",    "back\\slash", "ends with colon:"};
  return pool;
}

PropertyValue random_literal(Rng& rng, PropertyKind kind) {
  switch (kind) {
    case PropertyKind::string: return PropertyValue(pick(rng, tricky_strings()));
    case PropertyKind::integer: {
      static const std::vector<std::int64_t> edge{0,
                                                  -1,
                                                  1,
                                                  8080,
                                                  std::numeric_limits<std::int64_t>::max(),
                                                  std::numeric_limits<std::int64_t>::min()};
      if (chance(rng, 0.3)) return PropertyValue(pick(rng, edge));
      return PropertyValue(static_cast<std::int64_t>(
          std::uniform_int_distribution<std::int64_t>(-1'000'000'000'000, 1'000'000'000'000)(rng)));
    }
    case PropertyKind::boolean: return PropertyValue(chance(rng, 0.5));
    case PropertyKind::string_list: {
      StringList items;
      int n = uniform(rng, 0, 3);
      for (int i = 0; i < n; ++i) items.push_back(pick(rng, tricky_strings()));
      return PropertyValue(std::move(items));
    }
  }
  return PropertyValue();
}

PropertyKind random_kind(Rng& rng) {
  static const std::vector<PropertyKind> kinds{PropertyKind::string, PropertyKind::integer,
                                               PropertyKind::boolean, PropertyKind::string_list};
  return pick(rng, kinds);
}

std::string component_name(Rng& rng, int index, bool exotic) {
  if (!exotic) return fmt::format("comp_{}", index);
  switch (uniform(rng, 0, 11)) {
    case 0: return fmt::format("Web Server {}", index);
    case 1: return fmt::format("db-{}.internal", index);
    case 2: return fmt::format("Z\xc3\xbcrich Node {}", index);
    case 3: return fmt::format("#{} hash", index);
    case 4: return fmt::format("'quoted' {}", index);
    case 5: return fmt::format("- dash {}", index);
    case 6: return fmt::format("{}", 1000 + index);
    case 7: return fmt::format("[bracket] {}", index);
    case 8: return fmt::format("a, b {}", index);
    case 9: return fmt::format("true{}", index == 0 ? std::string() : std::to_string(index));
    case 10: return fmt::format("? q {}", index);
    default: return fmt::format("comp_{}", index);
  }
}

Artifact random_artifact(Rng& rng, const std::string& name) {
  static const std::vector<std::pair<ArtifactKind, std::string>> samples{
      {ArtifactKind::archive, "artifacts/app.tar.gz"},
      {ArtifactKind::container_image, "registry.example.com/team/app:1.0"},
      {ArtifactKind::binary, "https://example.com/bin/tool"},
      {ArtifactKind::other, "files/config.ini"},
      {ArtifactKind::script, "scripts/setup.sh"},
  };
  const auto& [kind, path] = pick(rng, samples);
  return Artifact{name, path, kind};
}

Operation random_operation(Rng& rng, const std::string& name, const std::string& owner_slug) {
  Operation op;
  op.name = name;
  if (chance(rng, 0.7)) {
    op.artifact = Artifact{name, fmt::format("scripts/{}-{}.sh", owner_slug, name), ArtifactKind::script};
  } else {
    op.artifact = Artifact{"impl-" + name, fmt::format("bin/{}-{}", owner_slug, name),
                           chance(rng, 0.5) ? ArtifactKind::binary : ArtifactKind::other};
  }
  return op;
}

OperationMap random_operations(Rng& rng, int max, const std::string& owner_slug) {
  static const std::vector<std::string> names{"create", "install", "configure", "start", "stop",
                                              "terminate", "backup"};
  OperationMap ops;
  int n = uniform(rng, 0, max);
  for (int i = 0; i < n; ++i) {
    const auto& name = pick(rng, names);
    ops[name] = random_operation(rng, name, owner_slug);
  }
  return ops;
}

std::map<std::string, PropertyDeclaration> random_declarations(Rng& rng, int max,
                                                               const std::string& prefix) {
  std::map<std::string, PropertyDeclaration> out;
  int n = uniform(rng, 0, max);
  for (int i = 0; i < n; ++i) {
    PropertyDeclaration d;
    d.kind = random_kind(rng);
    d.required = chance(rng, 0.4);
    if (chance(rng, 0.5)) d.default_value = random_literal(rng, d.kind);
    out[fmt::format("{}_{}", prefix, i)] = std::move(d);
  }
  return out;
}

std::string slug(const std::string& name) {
  std::string out;
  for (unsigned char c : name) out += std::isalnum(c) ? static_cast<char>(std::tolower(c)) : '-';
  return out;
}

/// Literal-valued properties available as reference targets, keyed by kind.
struct ReferencePool {
  std::vector<std::pair<Reference, PropertyKind>> entries;

  std::optional<Reference> find(Rng& rng, PropertyKind kind) const {
    std::vector<Reference> matches;
    for (const auto& [ref, k] : entries) {
      if (k == kind) matches.push_back(ref);
    }
    if (matches.empty()) return std::nullopt;
    return pick(rng, matches);
  }
};

}  // namespace

DeploymentModel random_model(Rng& rng, const GeneratorOptions& options) {
  DeploymentModel m;
  m.name = fmt::format("generated-{}", uniform(rng, 0, 999999));
  install_catalog(m, builtin_catalog());
  ReferencePool pool;

  int model_props = uniform(rng, 0, 3);
  for (int i = 0; i < model_props; ++i) {
    const std::string name = fmt::format("setting_{}", i);
    PropertyKind kind = random_kind(rng);
    std::optional<Reference> ref = options.references && chance(rng, 0.3) ? pool.find(rng, kind)
                                                                          : std::nullopt;
    m.properties[name] = ref ? PropertyValue(*ref) : random_literal(rng, kind);
    pool.entries.emplace_back(Reference{"", name}, kind);
  }

  if (options.local_types) {
    std::vector<std::string> parents;
    for (const auto& [name, _] : m.component_types) parents.push_back(name);
    int n = uniform(rng, 0, 3);
    for (int i = 0; i < n; ++i) {
      ComponentType t;
      t.name = fmt::format("local_type_{}", i);
      t.extends = pick(rng, parents);
      t.properties = random_declarations(rng, 3, fmt::format("lt{}", i));
      t.operations = random_operations(rng, 2, t.name);
      int meta = uniform(rng, 0, 2);
      for (int k = 0; k < meta; ++k) t.metadata[fmt::format("note.k{}", k)] = pick(rng, tricky_strings());
      t.origin = TypeOrigin::model;
      parents.push_back(t.name);
      m.component_types[t.name] = std::move(t);
    }
    std::vector<std::string> rel_parents{std::string(relation_names::connects_to),
                                         std::string(relation_names::depends_on)};
    int r = uniform(rng, 0, 2);
    for (int i = 0; i < r; ++i) {
      RelationType t;
      t.name = fmt::format("local_link_{}", i);
      t.extends = pick(rng, rel_parents);
      t.properties = random_declarations(rng, 2, fmt::format("ll{}", i));
      t.origin = TypeOrigin::model;
      rel_parents.push_back(t.name);
      m.relation_types[t.name] = std::move(t);
    }
  }

  std::vector<std::string> type_names;
  for (const auto& [name, _] : m.component_types) {
    if (component_is_a(m, name, "platform_service")) {
      if (!options.anchor_type.empty()) continue;
      if (!options.provider.empty() && effective_metadata(m, name).contains("provider") &&
          effective_metadata(m, name).at("provider") != options.provider) {
        continue;
      }
    }
    type_names.push_back(name);
  }
  std::vector<std::string> link_types{std::string(relation_names::connects_to),
                                      std::string(relation_names::depends_on)};
  for (const auto& [name, t] : m.relation_types) {
    if (t.origin == TypeOrigin::model) link_types.push_back(name);
  }

  // Assigns every declared property a value when required, some otherwise.
  auto fill = [&](const std::string& owner, const std::map<std::string, PropertyDeclaration>& decls,
                  PropertyMap& out, bool pool_it) {
    for (const auto& [name, decl] : decls) {
      bool need = decl.required && !decl.default_value;
      if (!need && !chance(rng, 0.5)) continue;
      std::optional<Reference> ref = options.references && chance(rng, 0.25)
                                         ? pool.find(rng, decl.kind)
                                         : std::nullopt;
      out[name] = ref ? PropertyValue(*ref) : random_literal(rng, decl.kind);
      if (pool_it && !owner.empty()) pool.entries.emplace_back(Reference{owner, name}, decl.kind);
    }
    if (chance(rng, 0.15)) out["extra_setting"] = random_literal(rng, random_kind(rng));
  };

  int n = uniform(rng, options.min_components, options.max_components);
  std::set<std::string> used_names;
  for (int i = 0; i < n; ++i) {
    Component c;
    do {
      c.name = component_name(rng, i, options.exotic_names);
    } while (!used_names.insert(c.name).second);
    c.type = i == 0 && !options.anchor_type.empty() ? options.anchor_type : pick(rng, type_names);
    fill(c.name, declared_properties(m, c.type), c.properties, true);
    c.operations = random_operations(rng, 2, slug(c.name));
    int artifacts = uniform(rng, 0, 2);
    for (int a = 0; a < artifacts; ++a) c.artifacts.push_back(random_artifact(rng, fmt::format("artifact-{}", a)));
    if (options.container_images) {
      c.artifacts.push_back(Artifact{"image", fmt::format("registry.example.com/c{}:1.{}", i, uniform(rng, 0, 9)),
                                     ArtifactKind::container_image});
    }

    std::set<std::string> relation_names_used;
    auto add_relation = [&](const std::string& type, const std::string& target) {
      Relation r;
      r.type = type;
      r.source = c.name;
      r.target = target;
      r.name = dsl::default_relation_name(type, target);
      if (relation_names_used.contains(r.name) || chance(rng, 0.15)) {
        r.name = fmt::format("link-{}", relation_names_used.size());
      }
      relation_names_used.insert(r.name);
      std::map<std::string, PropertyDeclaration> decls;
      for (const auto* t : resolve_relation_type(m, type)) {
        for (const auto& [pn, pd] : t->properties) decls.try_emplace(pn, pd);
      }
      if (options.relation_extras) {
        fill("", decls, r.properties, false);
        if (chance(rng, 0.2)) r.operations = random_operations(rng, 1, slug(c.name) + "-rel");
      } else {
        for (const auto& [pn, pd] : decls) {
          if (pd.required && !pd.default_value) r.properties[pn] = random_literal(rng, pd.kind);
        }
      }
      m.relations.push_back(std::move(r));
    };
    if (i > 0 && (!options.anchor_type.empty() || chance(rng, 0.5))) {
      add_relation(std::string(relation_names::hosted_on), m.components[uniform(rng, 0, i - 1)].name);
    }
    if (i > 0) {
      int links = uniform(rng, 0, 2);
      for (int k = 0; k < links; ++k) {
        add_relation(pick(rng, link_types), m.components[uniform(rng, 0, i - 1)].name);
      }
    }
    m.components.push_back(std::move(c));
  }
  return m;
}

void materialize_artifacts(const DeploymentModel& model, const fs::path& root) {
  auto write = [&](const OperationMap& ops) {
    for (const auto& [_, op] : ops) {
      if (!is_safe_relative_path(op.artifact.path)) continue;
      fs::path p = root / op.artifact.path;
      fs::create_directories(p.parent_path());
      std::ofstream(p) << "#!/bin/sh\necho " << op.name << "\n";
    }
  };
  for (const auto& [_, t] : model.component_types) write(t.operations);
  for (const auto& c : model.components) write(c.operations);
}

// ---------------------------------------------------------------------------
// Mutations

namespace {

Component* random_component(DeploymentModel& m, Rng& rng) {
  if (m.components.empty()) return nullptr;
  return &m.components[static_cast<std::size_t>(uniform(rng, 0, static_cast<int>(m.components.size()) - 1))];
}

Relation* random_relation(DeploymentModel& m, Rng& rng) {
  if (m.relations.empty()) return nullptr;
  return &m.relations[static_cast<std::size_t>(uniform(rng, 0, static_cast<int>(m.relations.size()) - 1))];
}

void add_relation(DeploymentModel& m, std::string type, std::string source, std::string target) {
  Relation r;
  r.name = fmt::format("mut-{}", m.relations.size());
  r.type = std::move(type);
  r.source = std::move(source);
  r.target = std::move(target);
  m.relations.push_back(std::move(r));
}

}  // namespace

std::string mutate(DeploymentModel& m, Rng& rng) {
  using Mutation = std::function<std::string(DeploymentModel&, Rng&)>;
  static const std::vector<Mutation> mutations{
      [](DeploymentModel& m, Rng& rng) -> std::string {
        if (m.components.empty()) return "noop";
        auto i = uniform(rng, 0, static_cast<int>(m.components.size()) - 1);
        m.components.erase(m.components.begin() + i);
        return "remove component";
      },
      [](DeploymentModel& m, Rng& rng) -> std::string {
        auto* r = random_relation(m, rng);
        if (!r) return "noop";
        r->target = "ghost";
        return "dangling target";
      },
      [](DeploymentModel& m, Rng& rng) -> std::string {
        auto* r = random_relation(m, rng);
        if (!r) return "noop";
        r->source = "phantom";
        return "dangling source";
      },
      [](DeploymentModel& m, Rng& rng) -> std::string {
        auto* r = random_relation(m, rng);
        if (!r) return "noop";
        r->target = r->source;
        return "self loop";
      },
      [](DeploymentModel& m, Rng& rng) -> std::string {
        auto* a = random_component(m, rng);
        auto* b = random_component(m, rng);
        if (!a || !b) return "noop";
        std::string an = a->name;
        std::string bn = b->name;
        add_relation(m, "hosted_on", an, bn);
        add_relation(m, "hosted_on", an, bn == an ? "ghost" : an);
        return "extra host";
      },
      [](DeploymentModel& m, Rng& rng) -> std::string {
        auto* r = random_relation(m, rng);
        if (!r) return "noop";
        add_relation(m, "hosted_on", r->target, r->source);
        return "hosting back edge";
      },
      [](DeploymentModel& m, Rng& rng) -> std::string {
        auto* r = random_relation(m, rng);
        if (!r) return "noop";
        add_relation(m, "depends_on", r->target, r->source);
        return "dependency back edge";
      },
      [](DeploymentModel& m, Rng& rng) -> std::string {
        auto* c = random_component(m, rng);
        if (!c) return "noop";
        c->type = "no_such_type";
        return "unknown type";
      },
      [](DeploymentModel& m, Rng& rng) -> std::string {
        auto* c = random_component(m, rng);
        if (!c || m.component_types.empty()) return "noop";
        auto it = m.component_types.begin();
        std::advance(it, uniform(rng, 0, static_cast<int>(m.component_types.size()) - 1));
        c->type = it->first;
        return "retype";
      },
      [](DeploymentModel& m, Rng& rng) -> std::string {
        auto* c = random_component(m, rng);
        if (!c || c->properties.empty()) return "noop";
        c->properties.erase(c->properties.begin());
        return "drop property";
      },
      [](DeploymentModel& m, Rng& rng) -> std::string {
        auto* c = random_component(m, rng);
        if (!c) return "noop";
        std::map<std::string, PropertyDeclaration> decls;
        try {
          decls = declared_properties(m, c->type);
        } catch (const Error&) {
        }
        if (decls.empty()) {
          c->properties["port"] = PropertyValue(true);
          return "wrong kind ad-hoc";
        }
        const auto& [name, decl] = *decls.begin();
        c->properties[name] = decl.kind == PropertyKind::integer ? PropertyValue("eighty")
                                                                  : PropertyValue(std::int64_t{80});
        return "wrong kind";
      },
      [](DeploymentModel& m, Rng& rng) -> std::string {
        auto* c = random_component(m, rng);
        if (!c) return "noop";
        c->properties["ref_prop"] = PropertyValue(Reference{"", "missing_setting"});
        return "unresolved model reference";
      },
      [](DeploymentModel& m, Rng& rng) -> std::string {
        auto* c = random_component(m, rng);
        if (!c) return "noop";
        c->properties["ref_prop"] = PropertyValue(Reference{"Nobody", "x"});
        return "unresolved component reference";
      },
      [](DeploymentModel& m, Rng& rng) -> std::string {
        auto* c = random_component(m, rng);
        if (!c) return "noop";
        auto* d = random_component(m, rng);
        c->properties["loop_a"] = PropertyValue(Reference{d->name, "loop_b"});
        d->properties["loop_b"] = PropertyValue(Reference{c->name, "loop_a"});
        return "reference cycle";
      },
      [](DeploymentModel& m, Rng&) -> std::string {
        m.properties["cyc_a"] = PropertyValue(Reference{"", "cyc_b"});
        m.properties["cyc_b"] = PropertyValue(Reference{"", "cyc_a"});
        return "model reference cycle";
      },
      [](DeploymentModel& m, Rng& rng) -> std::string {
        ComponentType a{"mut_a", "mut_b", {}, {}, {}, TypeOrigin::model};
        ComponentType b{"mut_b", "mut_a", {}, {}, {}, TypeOrigin::model};
        m.component_types["mut_a"] = a;
        m.component_types["mut_b"] = b;
        if (auto* c = random_component(m, rng)) c->type = "mut_a";
        return "type cycle";
      },
      [](DeploymentModel& m, Rng& rng) -> std::string {
        m.component_types["mut_orphan"] = ComponentType{"mut_orphan", "missing_parent", {}, {}, {},
                                                        TypeOrigin::model};
        if (auto* c = random_component(m, rng)) c->type = "mut_orphan";
        return "unknown parent";
      },
      [](DeploymentModel& m, Rng& rng) -> std::string {
        auto* c = random_component(m, rng);
        if (!c) return "noop";
        Component copy = *c;
        m.components.push_back(copy);
        return "duplicate component";
      },
      [](DeploymentModel& m, Rng& rng) -> std::string {
        auto* c = random_component(m, rng);
        if (!c) return "noop";
        c->artifacts.push_back(Artifact{"empty", "", ArtifactKind::binary});
        return "empty artifact path";
      },
      [](DeploymentModel& m, Rng& rng) -> std::string {
        auto* c = random_component(m, rng);
        if (!c) return "noop";
        c->operations["install"] = Operation{"install", Artifact{"", "x.sh", ArtifactKind::script}};
        return "nameless operation artifact";
      },
      [](DeploymentModel& m, Rng& rng) -> std::string {
        auto* c = random_component(m, rng);
        if (!c) return "noop";
        const std::string old = c->name;
        c->name = "bad:name";
        for (auto& r : m.relations) {
          if (r.source == old) r.source = c->name;
          if (r.target == old) r.target = c->name;
        }
        return "invalid name";
      },
      [](DeploymentModel& m, Rng& rng) -> std::string {
        if (m.relations.empty()) return "noop";
        m.relations.erase(m.relations.begin() + uniform(rng, 0, static_cast<int>(m.relations.size()) - 1));
        return "remove relation";
      },
      [](DeploymentModel& m, Rng& rng) -> std::string {
        m.relation_types["mut_rootless"] = RelationType{"mut_rootless", std::nullopt, {}, TypeOrigin::model};
        auto* a = random_component(m, rng);
        auto* b = random_component(m, rng);
        if (a && b) add_relation(m, "mut_rootless", a->name, b->name);
        return "rootless relation type";
      },
      [](DeploymentModel& m, Rng& rng) -> std::string {
        auto* r = random_relation(m, rng);
        if (!r) return "noop";
        r->type = "no_such_relation";
        return "unknown relation type";
      },
      [](DeploymentModel& m, Rng& rng) -> std::string {
        auto* c = random_component(m, rng);
        if (!c) return "noop";
        m.component_types.erase(c->type);
        return "erase used type";
      },
      [](DeploymentModel& m, Rng& rng) -> std::string {
        Component c;
        c.name = fmt::format("added {}", m.components.size());
        auto it = m.component_types.begin();
        if (it == m.component_types.end()) return "noop";
        std::advance(it, uniform(rng, 0, static_cast<int>(m.component_types.size()) - 1));
        c.type = it->first;
        m.components.push_back(std::move(c));
        return "add component";
      },
      [](DeploymentModel& m, Rng& rng) -> std::string {
        auto* r = random_relation(m, rng);
        if (!r) return "noop";
        Relation copy = *r;
        m.relations.push_back(copy);
        return "duplicate relation";
      },
      [](DeploymentModel& m, Rng&) -> std::string {
        m.name.clear();
        return "empty model name";
      },
      [](DeploymentModel& m, Rng& rng) -> std::string {
        auto* c = random_component(m, rng);
        if (!c) return "noop";
        c->properties["bad name"] = PropertyValue("x");
        return "invalid property name";
      },
      [](DeploymentModel& m, Rng& rng) -> std::string {
        auto* r = random_relation(m, rng);
        if (!r) return "noop";
        std::swap(r->source, r->target);
        return "reverse relation";
      },
      [](DeploymentModel& m, Rng&) -> std::string {
        m.relation_types.erase(std::string(relation_names::depends_on));
        return "erase relation root";
      },
      [](DeploymentModel& m, Rng&) -> std::string {
        auto it = m.component_types.find("compute");
        if (it == m.component_types.end()) return "noop";
        it->second.origin = TypeOrigin::model;
        it->second.metadata["provider"] = "elsewhere";
        return "redefine builtin";
      },
      [](DeploymentModel& m, Rng& rng) -> std::string {
        auto* r = random_relation(m, rng);
        if (!r) return "noop";
        r->properties["weight"] = PropertyValue(Reference{r->source, "nonexistent"});
        return "relation reference";
      },
      [](DeploymentModel& m, Rng& rng) -> std::string {
        auto* c = random_component(m, rng);
        if (!c) return "noop";
        auto it = m.component_types.find(c->type);
        if (it == m.component_types.end()) return "noop";
        it->second.properties["mut_required"] = PropertyDeclaration{PropertyKind::string, true, std::nullopt};
        return "new required property";
      },
      [](DeploymentModel& m, Rng& rng) -> std::string {
        auto it = m.component_types.begin();
        if (it == m.component_types.end()) return "noop";
        std::advance(it, uniform(rng, 0, static_cast<int>(m.component_types.size()) - 1));
        it->second.properties["mut_default"] =
            PropertyDeclaration{PropertyKind::boolean, false, PropertyValue("not-bool")};
        return "bad default";
      },
      [](DeploymentModel& m, Rng& rng) -> std::string {
        auto* c = random_component(m, rng);
        if (!c) return "noop";
        c->properties["via"] = PropertyValue(Reference{c->name, "via"});
        return "self reference";
      },
  };
  return mutations[static_cast<std::size_t>(uniform(rng, 0, static_cast<int>(mutations.size()) - 1))](m, rng);
}

// ---------------------------------------------------------------------------
// Query exercise

QueryOutcome exercise_queries(const DeploymentModel& model, const fs::path& artifact_root) {
  std::string step;
  try {
    step = "assert_valid";
    auto validated = assert_valid(model);
    const auto& vm = validated.model();
    for (const DeploymentModel* m : {&model, &vm}) {
      for (const auto& c : m->components) {
        step = "component queries on " + c.name;
        resolve_component_type(*m, c.type);
        declared_properties(*m, c.type);
        effective_metadata(*m, c.type);
        effective_operations(*m, c);
        auto once = effective_properties(*m, c);
        hosting_stack(*m, c);
        host_relation(*m, c);
      }
      for (const auto& r : m->relations) {
        step = "relation queries on " + relation_subject(r);
        resolve_relation_type(*m, r.type);
        effective_properties(*m, r);
        builtin_relation_kind(*m, r);
      }
      step = "deployment_order";
      deployment_order(*m);
      step = "stack_tops";
      stack_tops(*m);
    }
    step = "resolve_intrinsics";
    dsl::resolve_intrinsics(model);
    step = "serialize";
    dsl::serialize(model);
    for (const auto& tech : registry()) {
      step = "check " + tech.name;
      check(validated, tech);
    }
    TransformOptions options;
    options.artifact_root = artifact_root;
    for (const auto& target : bundled_plugins().targets()) {
      step = "transform " + target;
      try {
        transform(validated, target, options);
      } catch (const Error& e) {
        if (e.code() != Errc::incompatible_model && e.code() != Errc::unmappable_element &&
            e.code() != Errc::missing_artifact_file) {
          throw;
        }
      }
    }
  } catch (const std::exception& e) {
    return {false, fmt::format("{}: {}", step, e.what())};
  }
  return {};
}

// ---------------------------------------------------------------------------
// Order oracle

std::vector<Edge> dependency_edges(const DeploymentModel& model) {
  auto derives_from_root = [&](std::string type) {
    std::set<std::string> seen;
    while (seen.insert(type).second) {
      if (type == relation_names::depends_on) return true;
      auto it = model.relation_types.find(type);
      if (it == model.relation_types.end() || !it->second.extends) return false;
      type = *it->second.extends;
    }
    return false;
  };
  std::vector<Edge> edges;
  for (const auto& r : model.relations) {
    if (derives_from_root(r.type)) edges.emplace_back(r.source, r.target);
  }
  return edges;
}

bool is_topological(const std::vector<std::string>& order, const std::vector<std::string>& names,
                    const std::vector<Edge>& edges) {
  std::vector<std::string> a = order;
  std::vector<std::string> b = names;
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  if (a != b) return false;
  std::map<std::string, std::size_t> index;
  for (std::size_t i = 0; i < order.size(); ++i) index[order[i]] = i;
  return std::all_of(edges.begin(), edges.end(), [&](const Edge& e) {
    return index.at(e.second) < index.at(e.first);
  });
}

OrderEnumeration enumerate_orders(const std::vector<std::string>& names,
                                  const std::vector<Edge>& edges,
                                  const std::vector<std::string>& candidate) {
  if (names.size() > 12) throw std::invalid_argument("order enumeration is bounded to 12 nodes");
  const std::size_t n = names.size();
  std::map<std::string, std::size_t> id;
  for (std::size_t i = 0; i < n; ++i) id[names[i]] = i;
  std::vector<std::uint32_t> prerequisites(n, 0);  // targets that must come first
  for (const auto& [source, target] : edges) {
    prerequisites[id.at(source)] |= 1u << id.at(target);
  }
  OrderEnumeration out;
  std::vector<std::string> current;
  std::function<void(std::uint32_t)> walk = [&](std::uint32_t placed) {
    if (current.size() == n) {
      ++out.count;
      if (current == candidate) out.contains = true;
      if (out.smallest.empty() || current < out.smallest) out.smallest = current;
      return;
    }
    for (std::size_t i = 0; i < n; ++i) {
      const std::uint32_t bit = 1u << i;
      if ((placed & bit) || (prerequisites[i] & ~placed)) continue;
      current.push_back(names[i]);
      walk(placed | bit);
      current.pop_back();
    }
  };
  walk(0);
  return out;
}

OrderEnumeration permutation_orders(std::vector<std::string> names, const std::vector<Edge>& edges,
                                    const std::vector<std::string>& candidate) {
  if (names.size() > 8) throw std::invalid_argument("permutation oracle is bounded to 8 nodes");
  const std::vector<std::string> all = names;
  std::sort(names.begin(), names.end());
  OrderEnumeration out;
  do {
    if (!is_topological(names, all, edges)) continue;
    ++out.count;
    if (names == candidate) out.contains = true;
    if (out.smallest.empty()) out.smallest = names;  // permutations arrive in ascending order
  } while (std::next_permutation(names.begin(), names.end()));
  return out;
}

DeploymentModel random_dag_model(Rng& rng, int n, double edge_probability) {
  DeploymentModel m;
  m.name = "dag";
  install_catalog(m, builtin_catalog());
  std::vector<std::string> labels;
  for (int i = 0; i < n; ++i) labels.push_back(std::string(1, static_cast<char>('a' + i)));
  std::shuffle(labels.begin(), labels.end(), rng);
  static const std::vector<std::string> kinds{"depends_on", "connects_to", "hosted_on"};
  for (int i = 0; i < n; ++i) {
    m.components.push_back(Component{labels[static_cast<std::size_t>(i)], "base", {}, {}, {}});
    bool hosted = false;
    for (int j = 0; j < i; ++j) {
      if (!chance(rng, edge_probability)) continue;
      std::string kind = pick(rng, kinds);
      if (kind == "hosted_on") {
        if (hosted) kind = "depends_on";
        hosted = true;
      }
      Relation r;
      r.type = kind;
      r.source = labels[static_cast<std::size_t>(i)];
      r.target = labels[static_cast<std::size_t>(j)];
      r.name = dsl::default_relation_name(kind, r.target);
      m.relations.push_back(std::move(r));
    }
  }
  return m;
}

}  // namespace edmm::testing
