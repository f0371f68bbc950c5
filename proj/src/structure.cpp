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

#include "edmm/structure.hpp"

#include <fmt/format.h>

#include <map>
#include <optional>
#include <regex>
#include <sstream>

#include "yaml/yaml_tree.hpp"

namespace edmm::structure {

using yaml::Json;

namespace {

class Checker {
 public:
  explicit Checker(const FileSet& files) : files_(files) {}

  Structure take() { return std::move(out_); }

  void problem(std::string message) { out_.problems.push_back(std::move(message)); }

  std::optional<Json> yaml_file(std::string_view path) {
    const FileEntry* f = files_.find(path);
    if (f == nullptr) {
      problem(fmt::format("{}: missing", path));
      return std::nullopt;
    }
    try {
      auto docs = yaml::load_all_json(f->content);
      if (docs.size() != 1) {
        problem(fmt::format("{}: expected one YAML document, found {}", path, docs.size()));
        return std::nullopt;
      }
      return std::move(docs.front());
    } catch (const std::exception& e) {
      problem(fmt::format("{}: not YAML: {}", path, e.what()));
      return std::nullopt;
    }
  }

  std::optional<Json> json_file(std::string_view path) {
    const FileEntry* f = files_.find(path);
    if (f == nullptr) {
      problem(fmt::format("{}: missing", path));
      return std::nullopt;
    }
    try {
      return Json::parse(f->content);
    } catch (const std::exception& e) {
      problem(fmt::format("{}: not JSON: {}", path, e.what()));
      return std::nullopt;
    }
  }

  /// Pointer to `obj[key]` when it has the wanted shape, else a problem.
  const Json* field(const Json& obj, std::string_view key, Json::value_t type,
                    const std::string& where, bool required = true) {
    if (!obj.is_object()) {
      problem(fmt::format("{}: expected a map", where));
      return nullptr;
    }
    auto it = obj.find(std::string(key));
    if (it == obj.end()) {
      if (required) problem(fmt::format("{}: missing '{}'", where, key));
      return nullptr;
    }
    bool ok = it->type() == type ||
              (type == Json::value_t::number_integer && it->is_number_integer());
    if (!ok) {
      problem(fmt::format("{}.{}: expected {}", where, key, Json(type).type_name()));
      return nullptr;
    }
    return &*it;
  }

  void only_keys(const Json& obj, std::initializer_list<std::string_view> allowed,
                 const std::string& where) {
    if (!obj.is_object()) return;
    for (const auto& [key, _] : obj.items()) {
      if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) {
        problem(fmt::format("{}: unexpected key '{}'", where, key));
      }
    }
  }

  void unit(std::string name) { out_.units.insert(std::move(name)); }
  void dependency(std::string from, std::string to) {
    out_.dependencies.emplace(std::move(from), std::move(to));
  }
  const std::set<std::string>& units() const { return out_.units; }

  void known_files(const std::function<bool(std::string_view)>& accept) {
    for (const auto& e : files_.entries()) {
      if (e.path != manifest_file && !accept(e.path)) {
        problem(fmt::format("{}: unexpected file", e.path));
      }
    }
  }

  const FileSet& files() const { return files_; }

 private:
  const FileSet& files_;
  Structure out_;
};

constexpr auto kString = Json::value_t::string;
constexpr auto kObject = Json::value_t::object;
constexpr auto kArray = Json::value_t::array;
constexpr auto kInteger = Json::value_t::number_integer;

bool starts_with(std::string_view s, std::string_view p) { return s.substr(0, p.size()) == p; }
bool ends_with(std::string_view s, std::string_view p) {
  return s.size() >= p.size() && s.substr(s.size() - p.size()) == p;
}

// --- Docker Compose --------------------------------------------------------

void docker_compose(Checker& c) {
  c.known_files([](std::string_view p) { return p == "docker-compose.yml"; });
  auto doc = c.yaml_file("docker-compose.yml");
  if (!doc) return;
  c.only_keys(*doc, {"services", "networks", "volumes"}, "docker-compose.yml");
  const Json* services = c.field(*doc, "services", kObject, "docker-compose.yml");
  if (!services) return;
  static const std::regex name_re("[a-zA-Z0-9][a-zA-Z0-9_.-]*");
  for (const auto& [name, _] : services->items()) c.unit(name);
  for (const auto& [name, svc] : services->items()) {
    const std::string where = "services." + name;
    if (!std::regex_match(name, name_re)) c.problem(where + ": invalid service name");
    c.only_keys(svc, {"image", "environment", "depends_on", "labels"}, where);
    c.field(svc, "image", kString, where);
    if (const Json* env = c.field(svc, "environment", kObject, where, false)) {
      for (const auto& [k, v] : env->items()) {
        if (!v.is_string()) c.problem(fmt::format("{}.environment.{}: expected string", where, k));
      }
    }
    if (const Json* labels = c.field(svc, "labels", kObject, where, false)) {
      for (const auto& [k, v] : labels->items()) {
        if (!v.is_string()) c.problem(fmt::format("{}.labels.{}: expected string", where, k));
      }
    }
    if (const Json* deps = c.field(svc, "depends_on", kArray, where, false)) {
      for (const auto& d : *deps) {
        if (!d.is_string() || !c.units().contains(d.get<std::string>())) {
          c.problem(fmt::format("{}.depends_on: unknown service {}", where, d.dump()));
        } else {
          c.dependency(name, d.get<std::string>());
        }
      }
    }
  }
}

// --- Kubernetes ------------------------------------------------------------

void kubernetes(Checker& c) {
  static const std::regex dns_re("[a-z]([-a-z0-9]*[a-z0-9])?");
  c.known_files([](std::string_view p) {
    return p.find('/') == std::string_view::npos && ends_with(p, ".yaml") &&
           (starts_with(p, "deployment-") || starts_with(p, "service-"));
  });
  std::map<std::string, Json> deployments;  // name -> pod labels
  std::map<std::string, std::string> depends_annotations;
  std::vector<std::pair<std::string, std::string>> service_env;  // deployment, referenced service
  std::set<std::string> services;
  std::vector<std::pair<std::string, Json>> service_selectors;

  for (const auto& e : c.files().entries()) {
    if (!starts_with(e.path, "deployment-")) continue;
    auto doc = c.yaml_file(e.path);
    if (!doc) continue;
    const std::string& w = e.path;
    c.only_keys(*doc, {"apiVersion", "kind", "metadata", "spec"}, w);
    const Json* api = c.field(*doc, "apiVersion", kString, w);
    const Json* kind = c.field(*doc, "kind", kString, w);
    if (api && *api != "apps/v1") c.problem(w + ": apiVersion must be apps/v1");
    if (kind && *kind != "Deployment") c.problem(w + ": kind must be Deployment");
    const Json* meta = c.field(*doc, "metadata", kObject, w);
    const Json* spec = c.field(*doc, "spec", kObject, w);
    if (!meta || !spec) continue;
    const Json* name = c.field(*meta, "name", kString, w + ".metadata");
    if (!name) continue;
    const std::string n = name->get<std::string>();
    if (!std::regex_match(n, dns_re) || n.size() > 63) c.problem(w + ": invalid name " + n);
    if (const Json* ann = c.field(*meta, "annotations", kObject, w + ".metadata", false)) {
      auto it = ann->find("edmm/depends-on");
      if (it != ann->end()) {
        if (it->is_string()) depends_annotations[n] = it->get<std::string>();
        else c.problem(w + ": depends-on annotation must be a string");
      }
    }
    c.field(*spec, "replicas", kInteger, w + ".spec", false);
    const Json* selector = c.field(*spec, "selector", kObject, w + ".spec");
    const Json* match = selector ? c.field(*selector, "matchLabels", kObject, w + ".spec.selector")
                                 : nullptr;
    const Json* tmpl = c.field(*spec, "template", kObject, w + ".spec");
    if (!tmpl) continue;
    const Json* tmeta = c.field(*tmpl, "metadata", kObject, w + ".spec.template");
    const Json* labels = tmeta ? c.field(*tmeta, "labels", kObject, w + ".spec.template.metadata")
                               : nullptr;
    if (match && labels) {
      for (const auto& [k, v] : match->items()) {
        if (!labels->contains(k) || (*labels)[k] != v) {
          c.problem(w + ": selector does not match the pod template labels");
        }
      }
    }
    const Json* pspec = c.field(*tmpl, "spec", kObject, w + ".spec.template");
    const Json* containers = pspec ? c.field(*pspec, "containers", kArray, w + ".spec.template.spec")
                                   : nullptr;
    if (containers) {
      if (containers->empty()) c.problem(w + ": no containers");
      for (const auto& ct : *containers) {
        c.field(ct, "name", kString, w + ".container");
        c.field(ct, "image", kString, w + ".container");
        if (const Json* env = c.field(ct, "env", kArray, w + ".container", false)) {
          for (const auto& var : *env) {
            const Json* vn = c.field(var, "name", kString, w + ".env");
            const Json* vv = c.field(var, "value", kString, w + ".env");
            if (vn && vv && ends_with(vn->get<std::string>(), "_SERVICE")) {
              service_env.emplace_back(n, vv->get<std::string>());
            }
          }
        }
      }
    }
    if (deployments.contains(n)) c.problem(w + ": duplicate deployment " + n);
    deployments[n] = labels ? *labels : Json::object();
    c.unit(n);
  }

  for (const auto& e : c.files().entries()) {
    if (!starts_with(e.path, "service-")) continue;
    auto doc = c.yaml_file(e.path);
    if (!doc) continue;
    const std::string& w = e.path;
    const Json* api = c.field(*doc, "apiVersion", kString, w);
    const Json* kind = c.field(*doc, "kind", kString, w);
    if (api && *api != "v1") c.problem(w + ": apiVersion must be v1");
    if (kind && *kind != "Service") c.problem(w + ": kind must be Service");
    const Json* meta = c.field(*doc, "metadata", kObject, w);
    const Json* spec = c.field(*doc, "spec", kObject, w);
    if (!meta || !spec) continue;
    if (const Json* name = c.field(*meta, "name", kString, w + ".metadata")) {
      services.insert(name->get<std::string>());
    }
    if (const Json* ports = c.field(*spec, "ports", kArray, w + ".spec")) {
      if (ports->empty()) c.problem(w + ": no ports");
      for (const auto& p : *ports) c.field(p, "port", kInteger, w + ".spec.ports");
    }
    if (const Json* selector = c.field(*spec, "selector", kObject, w + ".spec")) {
      service_selectors.emplace_back(w, *selector);
    }
  }

  for (const auto& [w, selector] : service_selectors) {
    bool targets_pods = false;
    for (const auto& [_, labels] : deployments) {
      bool all = !selector.empty();
      for (const auto& [k, v] : selector.items()) all = all && labels.contains(k) && labels[k] == v;
      targets_pods = targets_pods || all;
    }
    if (!targets_pods) c.problem(w + ": selector matches no deployment");
  }
  for (const auto& [n, _] : deployments) {
    if (!services.contains(n)) c.problem(fmt::format("deployment {} has no service", n));
  }
  for (const auto& [from, svc] : service_env) {
    if (!services.contains(svc)) c.problem(fmt::format("{}: env names unknown service {}", from, svc));
  }
  for (const auto& [from, list] : depends_annotations) {
    std::stringstream ss(list);
    std::string item;
    while (std::getline(ss, item, ',')) {
      if (!deployments.contains(item)) {
        c.problem(fmt::format("{}: depends-on names unknown deployment {}", from, item));
      } else {
        c.dependency(from, item);
      }
    }
  }
}

// --- Terraform -------------------------------------------------------------

void collect_interpolations(const Json& node, std::vector<std::string>& out) {
  if (node.is_string()) {
    const auto& s = node.get_ref<const std::string&>();
    for (std::size_t i = 0; i + 1 < s.size(); ++i) {
      if ((s[i] == '$' || s[i] == '%') && s[i + 1] == s[i] && i + 2 < s.size() && s[i + 2] == '{') {
        i += 2;
      } else if (s[i] == '$' && s[i + 1] == '{') {
        auto end = s.find('}', i + 2);
        out.push_back(s.substr(i + 2, end == std::string::npos ? std::string::npos : end - i - 2));
        if (end == std::string::npos) break;
        i = end;
      }
    }
  } else if (node.is_structured()) {
    for (const auto& child : node) collect_interpolations(child, out);
  }
}

void terraform(Checker& c) {
  c.known_files([](std::string_view p) { return p == "main.tf.json"; });
  auto doc = c.json_file("main.tf.json");
  if (!doc) return;
  const std::string w = "main.tf.json";
  c.only_keys(*doc, {"terraform", "provider", "locals", "variable", "resource", "data", "output"}, w);
  const Json* resources = c.field(*doc, "resource", kObject, w);
  if (!resources) return;
  static const std::regex name_re("[A-Za-z_][A-Za-z0-9_-]*");
  for (const auto& [type, named] : resources->items()) {
    if (!std::regex_match(type, name_re)) c.problem(w + ": invalid resource type " + type);
    if (!named.is_object()) {
      c.problem(fmt::format("{}: resource.{} must be a map", w, type));
      continue;
    }
    for (const auto& [name, _] : named.items()) {
      if (!std::regex_match(name, name_re)) c.problem(w + ": invalid resource name " + name);
      c.unit(type + "." + name);
    }
  }
  std::set<std::string> locals;
  if (const Json* l = c.field(*doc, "locals", kObject, w, false)) {
    for (const auto& [k, _] : l->items()) locals.insert(k);
  }
  auto check_refs = [&](const Json& node, const std::string& where) {
    std::vector<std::string> refs;
    collect_interpolations(node, refs);
    for (const auto& ref : refs) {
      auto dot = ref.find('.');
      std::string head = ref.substr(0, dot);
      if (head == "self") continue;
      if (head == "local") {
        if (!locals.contains(ref.substr(dot + 1))) {
          c.problem(fmt::format("{}: unknown local in ${{{}}}", where, ref));
        }
        continue;
      }
      auto second = dot == std::string::npos ? std::string::npos : ref.find('.', dot + 1);
      if (!c.units().contains(ref.substr(0, second))) {
        c.problem(fmt::format("{}: unknown resource in ${{{}}}", where, ref));
      }
    }
  };
  if (const Json* l = c.field(*doc, "locals", kObject, w, false)) check_refs(*l, w + ".locals");
  for (const auto& [type, named] : resources->items()) {
    if (!named.is_object()) continue;
    for (const auto& [name, body] : named.items()) {
      const std::string id = type + "." + name;
      const std::string where = w + ": " + id;
      if (!body.is_object()) {
        c.problem(where + " must be a map");
        continue;
      }
      check_refs(body, where);
      if (const Json* deps = c.field(body, "depends_on", kArray, where, false)) {
        for (const auto& d : *deps) {
          if (!d.is_string() || !c.units().contains(d.get<std::string>())) {
            c.problem(fmt::format("{}: depends_on names unknown resource {}", where, d.dump()));
          } else {
            c.dependency(id, d.get<std::string>());
          }
        }
      }
      if (const Json* provs = c.field(body, "provisioner", kArray, where, false)) {
        for (const auto& p : *provs) {
          if (!p.is_object() || p.size() != 1) {
            c.problem(where + ": each provisioner must have exactly one type");
            continue;
          }
          const auto& kind = p.begin().key();
          if (kind != "remote-exec" && kind != "local-exec" && kind != "file") {
            c.problem(where + ": unknown provisioner " + kind);
          }
          if (kind == "remote-exec" && !body.contains("connection")) {
            c.problem(where + ": remote-exec needs a connection");
          }
        }
      }
    }
  }
}

// --- Ansible ---------------------------------------------------------------

void ansible(Checker& c) {
  static const std::regex role_file_re("roles/([A-Za-z0-9_]+)/(tasks|meta)/main\\.yml");
  std::set<std::string> roles_with_tasks;
  std::set<std::string> roles_with_meta;
  c.known_files([&](std::string_view p) {
    std::smatch m;
    std::string s(p);
    if (std::regex_match(s, m, role_file_re)) {
      (m[2] == "tasks" ? roles_with_tasks : roles_with_meta).insert(m[1]);
      return true;
    }
    return p == "playbook.yml" || p == "inventory.ini";
  });
  for (const auto& r : roles_with_tasks) c.unit(r);
  for (const auto& r : roles_with_meta) {
    if (!roles_with_tasks.contains(r)) c.problem(fmt::format("role {} has meta but no tasks", r));
  }

  std::set<std::string> groups;
  if (const FileEntry* inv = c.files().find("inventory.ini")) {
    std::istringstream in(inv->content);
    std::string line;
    bool in_group = false;
    while (std::getline(in, line)) {
      if (line.empty() || line[0] == '#' || line[0] == ';') continue;
      if (line.front() == '[') {
        if (line.back() != ']') c.problem("inventory.ini: malformed group header " + line);
        groups.insert(line.substr(1, line.size() - 2));
        in_group = true;
      } else if (!in_group) {
        c.problem("inventory.ini: host outside any group");
      }
    }
  } else {
    c.problem("inventory.ini: missing");
  }

  if (auto playbook = c.yaml_file("playbook.yml")) {
    if (!playbook->is_array() || playbook->empty()) c.problem("playbook.yml: expected a list of plays");
    for (const auto& play : *playbook) {
      const std::string w = "playbook.yml play";
      c.only_keys(play, {"name", "hosts", "vars", "roles", "become"}, w);
      if (const Json* hosts = c.field(play, "hosts", kString, w)) {
        if (!groups.contains(hosts->get<std::string>())) {
          c.problem(fmt::format("{}: hosts {} is not an inventory group", w, hosts->dump()));
        }
      }
      c.field(play, "vars", kObject, w, false);
      if (const Json* roles = c.field(play, "roles", kArray, w)) {
        for (const auto& r : *roles) {
          if (!r.is_string() || !c.units().contains(r.get<std::string>())) {
            c.problem(fmt::format("{}: unknown role {}", w, r.dump()));
          }
        }
      }
    }
  }

  for (const auto& r : roles_with_tasks) {
    const std::string path = fmt::format("roles/{}/tasks/main.yml", r);
    auto tasks = c.yaml_file(path);
    if (!tasks) continue;
    if (!tasks->is_array() || tasks->empty()) {
      c.problem(path + ": expected a non-empty task list");
      continue;
    }
    for (const auto& task : *tasks) {
      if (!task.is_object()) {
        c.problem(path + ": task must be a map");
        continue;
      }
      c.field(task, "name", kString, path);
      std::size_t modules = 0;
      for (const auto& [k, _] : task.items()) modules += k == "name" ? 0 : 1;
      if (modules != 1) c.problem(path + ": each task needs exactly one module");
    }
  }
  for (const auto& r : roles_with_meta) {
    const std::string path = fmt::format("roles/{}/meta/main.yml", r);
    auto meta = c.yaml_file(path);
    if (!meta) continue;
    const Json* deps = c.field(*meta, "dependencies", kArray, path);
    if (!deps) continue;
    for (const auto& d : *deps) {
      const Json* role = c.field(d, "role", kString, path + " dependency");
      if (!role) continue;
      if (!c.units().contains(role->get<std::string>())) {
        c.problem(fmt::format("{}: unknown role {}", path, role->dump()));
      } else {
        c.dependency(r, role->get<std::string>());
      }
    }
  }
}

// --- CloudFormation --------------------------------------------------------

void collect_cfn_refs(const Json& node, std::vector<std::string>& out) {
  if (node.is_object()) {
    for (const auto& [k, v] : node.items()) {
      if (k == "Ref" && v.is_string()) out.push_back(v.get<std::string>());
      if (k == "Fn::GetAtt" && v.is_array() && !v.empty() && v[0].is_string()) {
        out.push_back(v[0].get<std::string>());
      }
      collect_cfn_refs(v, out);
    }
  } else if (node.is_array()) {
    for (const auto& v : node) collect_cfn_refs(v, out);
  }
}

void cloudformation(Checker& c) {
  c.known_files([](std::string_view p) { return p == "template.json"; });
  auto doc = c.json_file("template.json");
  if (!doc) return;
  const std::string w = "template.json";
  c.only_keys(*doc, {"AWSTemplateFormatVersion", "Description", "Parameters", "Resources",
                     "Outputs", "Metadata"},
              w);
  if (const Json* v = c.field(*doc, "AWSTemplateFormatVersion", kString, w)) {
    if (*v != "2010-09-09") c.problem(w + ": unsupported format version");
  }
  const Json* resources = c.field(*doc, "Resources", kObject, w);
  if (!resources) return;
  if (resources->empty()) c.problem(w + ": Resources is empty");
  static const std::regex id_re("[A-Za-z0-9]+");
  static const std::regex type_re("[A-Za-z0-9]+::[A-Za-z0-9]+::[A-Za-z0-9]+");
  for (const auto& [id, _] : resources->items()) {
    if (!std::regex_match(id, id_re)) c.problem(w + ": invalid logical id " + id);
    c.unit(id);
  }
  for (const auto& [id, res] : resources->items()) {
    const std::string where = w + ": " + id;
    c.only_keys(res, {"Type", "Properties", "DependsOn", "Metadata", "Condition"}, where);
    if (const Json* type = c.field(res, "Type", kString, where)) {
      if (!std::regex_match(type->get<std::string>(), type_re)) {
        c.problem(where + ": invalid resource type " + type->get<std::string>());
      }
    }
    if (res.contains("DependsOn")) {
      const Json& deps = res["DependsOn"];
      std::vector<Json> items = deps.is_array() ? std::vector<Json>(deps.begin(), deps.end())
                                                : std::vector<Json>{deps};
      for (const auto& d : items) {
        if (!d.is_string() || !c.units().contains(d.get<std::string>())) {
          c.problem(fmt::format("{}: DependsOn names unknown resource {}", where, d.dump()));
        } else {
          c.dependency(id, d.get<std::string>());
        }
      }
    }
    std::vector<std::string> refs;
    if (res.contains("Properties")) collect_cfn_refs(res["Properties"], refs);
    for (const auto& ref : refs) {
      if (!c.units().contains(ref)) c.problem(fmt::format("{}: reference to unknown {}", where, ref));
    }
  }
}

// --- TOSCA -----------------------------------------------------------------

void tosca(Checker& c) {
  c.known_files([](std::string_view p) { return p == "service-template.yaml"; });
  auto doc = c.yaml_file("service-template.yaml");
  if (!doc) return;
  const std::string w = "service-template.yaml";
  c.only_keys(*doc, {"tosca_definitions_version", "metadata", "description", "interface_types",
                     "node_types", "relationship_types", "topology_template"},
              w);
  if (const Json* v = c.field(*doc, "tosca_definitions_version", kString, w)) {
    if (!starts_with(v->get<std::string>(), "tosca_simple_yaml_")) {
      c.problem(w + ": unsupported definitions version");
    }
  }

  std::set<std::string> interface_ops;
  if (const Json* itypes = c.field(*doc, "interface_types", kObject, w, false)) {
    for (const auto& [_, def] : itypes->items()) {
      if (const Json* ops = c.field(def, "operations", kObject, w + ".interface_types", false)) {
        for (const auto& [op, __] : ops->items()) interface_ops.insert(op);
      }
    }
  }

  auto defined_types = [&](const char* section, std::string_view normative_prefix) {
    std::set<std::string> names;
    const Json* types = c.field(*doc, section, kObject, w, false);
    if (!types) return names;
    for (const auto& [name, _] : types->items()) names.insert(name);
    for (const auto& [name, def] : types->items()) {
      const Json* parent = c.field(def, "derived_from", kString, fmt::format("{}.{}", section, name));
      if (!parent) continue;
      const auto p = parent->get<std::string>();
      if (!starts_with(p, normative_prefix) && !names.contains(p)) {
        c.problem(fmt::format("{}.{}: derived_from unknown type {}", section, name, p));
      }
    }
    // Chains must end at a normative type.
    for (const auto& name : names) {
      std::set<std::string> seen;
      std::string current = name;
      while (names.contains(current) && seen.insert(current).second) {
        current = (*types)[current].value("derived_from", std::string());
      }
      if (names.contains(current)) c.problem(fmt::format("{}.{}: cyclic derivation", section, name));
    }
    return names;
  };
  auto node_types = defined_types("node_types", "tosca.nodes.");
  auto rel_types = defined_types("relationship_types", "tosca.relationships.");

  const Json* topo = c.field(*doc, "topology_template", kObject, w);
  if (!topo) return;
  const Json* templates = c.field(*topo, "node_templates", kObject, w + ".topology_template");
  if (!templates) return;
  std::set<std::string> rel_templates;
  if (const Json* rts = c.field(*topo, "relationship_templates", kObject, w, false)) {
    for (const auto& [name, rt] : rts->items()) {
      rel_templates.insert(name);
      if (const Json* type = c.field(rt, "type", kString, "relationship_templates." + name)) {
        const auto t = type->get<std::string>();
        if (!starts_with(t, "tosca.relationships.") && !rel_types.contains(t)) {
          c.problem(fmt::format("relationship_templates.{}: unknown type {}", name, t));
        }
      }
    }
  }
  for (const auto& [name, _] : templates->items()) c.unit(name);
  for (const auto& [name, node] : templates->items()) {
    const std::string where = "node_templates." + name;
    c.only_keys(node, {"type", "metadata", "properties", "artifacts", "interfaces", "requirements"},
                where);
    if (const Json* type = c.field(node, "type", kString, where)) {
      const auto t = type->get<std::string>();
      if (!starts_with(t, "tosca.nodes.") && !node_types.contains(t)) {
        c.problem(fmt::format("{}: unknown node type {}", where, t));
      }
    }
    if (const Json* artifacts = c.field(node, "artifacts", kObject, where, false)) {
      for (const auto& [an, a] : artifacts->items()) {
        c.field(a, "type", kString, where + ".artifacts." + an);
        c.field(a, "file", kString, where + ".artifacts." + an);
      }
    }
    if (const Json* interfaces = c.field(node, "interfaces", kObject, where, false)) {
      for (const auto& [iname, iface] : interfaces->items()) {
        if (const Json* ops = c.field(iface, "operations", kObject, where + ".interfaces." + iname, false)) {
          for (const auto& [op, __] : ops->items()) {
            if (!interface_ops.contains(op)) {
              c.problem(fmt::format("{}: operation {} is not declared by an interface type", where, op));
            }
          }
        }
      }
    }
    if (const Json* reqs = c.field(node, "requirements", kArray, where, false)) {
      for (const auto& req : *reqs) {
        if (!req.is_object() || req.size() != 1) {
          c.problem(where + ": each requirement must have exactly one name");
          continue;
        }
        const Json& body = req.begin().value();
        const Json* target = c.field(body, "node", kString, where + ".requirements");
        if (const Json* rel = c.field(body, "relationship", kString, where + ".requirements", false)) {
          const auto r = rel->get<std::string>();
          if (!rel_templates.contains(r) && !starts_with(r, "tosca.relationships.") &&
              !rel_types.contains(r)) {
            c.problem(fmt::format("{}: unknown relationship {}", where, r));
          }
        }
        if (!target) continue;
        const auto t = target->get<std::string>();
        if (!templates->contains(t)) {
          c.problem(fmt::format("{}: requirement targets unknown node {}", where, t));
        } else {
          c.dependency(name, t);
        }
      }
    }
  }
}

}  // namespace

Structure parse(std::string_view target, const FileSet& files) {
  Checker c(files);
  if (target == "docker-compose") docker_compose(c);
  else if (target == "kubernetes") kubernetes(c);
  else if (target == "terraform") terraform(c);
  else if (target == "ansible") ansible(c);
  else if (target == "aws-cloudformation") cloudformation(c);
  else if (target == "tosca") tosca(c);
  else c.problem(fmt::format("no structural grammar for target '{}'", target));
  return c.take();
}

std::vector<std::string> verify(const DeploymentModel& model, const FileSet& files) {
  std::vector<std::string> problems;
  const FileEntry* manifest_entry = files.find(manifest_file);
  if (manifest_entry == nullptr) return {"manifest: missing"};
  Manifest manifest;
  try {
    manifest = parse_manifest(manifest_entry->content);
  } catch (const std::exception& e) {
    return {fmt::format("manifest: {}", e.what())};
  }

  Structure s = parse(manifest.target, files);
  for (auto& p : s.problems) problems.push_back(std::move(p));

  std::set<std::string> listed(manifest.files.begin(), manifest.files.end());
  std::set<std::string> present;
  for (const auto& e : files.entries()) {
    if (e.path != manifest_file) present.insert(e.path);
  }
  if (listed != present) problems.push_back("manifest: file list does not match the output");

  std::map<std::string, std::set<std::string>> units_of;
  std::map<std::string, std::string> owner_of_unit;
  for (const auto& [component, unit] : manifest.emitted) {
    if (model.find_component(component) == nullptr) {
      problems.push_back(fmt::format("manifest: emitted unknown component '{}'", component));
    }
    if (!s.units.contains(unit)) {
      problems.push_back(fmt::format("'{}' is mapped to '{}', which the output does not define",
                                     component, unit));
    }
    if (auto [it, fresh] = owner_of_unit.emplace(unit, component); !fresh) {
      problems.push_back(fmt::format("unit '{}' is claimed by '{}' and '{}'", unit, it->second,
                                     component));
    }
    units_of[component].insert(unit);
  }
  for (const auto& a : manifest.absorbed) {
    auto into = manifest.emitted.find(a.into);
    if (manifest.emitted.contains(a.component)) {
      problems.push_back(fmt::format("'{}' is both emitted and absorbed", a.component));
    }
    if (into == manifest.emitted.end()) {
      problems.push_back(
          fmt::format("'{}' is absorbed into '{}', which is not emitted", a.component, a.into));
      continue;
    }
    units_of[a.component].insert(into->second);
  }
  for (const auto& unit : s.units) {
    if (!owner_of_unit.contains(unit)) {
      problems.push_back(fmt::format("unit '{}' does not correspond to any component", unit));
    }
  }
  for (const auto& c : model.components) {
    if (!units_of.contains(c.name)) {
      problems.push_back(fmt::format("component '{}' is neither emitted nor absorbed", c.name));
    }
  }

  for (const auto& r : model.relations) {
    if (!relation_is_a(model, r.type, relation_names::depends_on)) continue;
    bool recorded = std::any_of(manifest.edges.begin(), manifest.edges.end(), [&](const auto& e) {
      return e.source == r.source && e.target == r.target;
    });
    if (!recorded) {
      problems.push_back(fmt::format("manifest: no record for edge {} -> {}", r.source, r.target));
    }
    const auto& sources = units_of[r.source];
    const auto& targets = units_of[r.target];
    for (const auto& u : sources) {
      if (targets.contains(u)) continue;
      bool found = std::any_of(targets.begin(), targets.end(),
                               [&](const std::string& v) { return s.dependencies.contains({u, v}); });
      if (!found) {
        problems.push_back(fmt::format("edge {} -> {} has no native dependency from '{}'", r.source,
                                       r.target, u));
      }
    }
  }
  return problems;
}

}  // namespace edmm::structure
