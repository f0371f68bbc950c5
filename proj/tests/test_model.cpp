// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <random>
#include <set>

#include "edmm/catalog.hpp"
#include "edmm/dsl.hpp"
#include "edmm/validation.hpp"
#include "support.hpp"

using namespace edmm;

namespace {

std::vector<std::string> names_of(const std::vector<const Component*>& stack) {
  std::vector<std::string> out;
  for (const auto* c : stack) out.push_back(c->name);
  return out;
}

template <typename F>
Errc error_code_of(F&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an edmm::Error");
  return Errc::invalid_data;
}

DeploymentModel with_catalog() {
  DeploymentModel m;
  m.name = "m";
  install_catalog(m, builtin_catalog());
  return m;
}

void link(DeploymentModel& m, std::string type, std::string source, std::string target) {
  m.relations.push_back(Relation{dsl::default_relation_name(type, target), type, source, target, {}, {}});
}

}  // namespace

TEST_CASE("resolve_component_type walks to the root") {
  auto m = with_catalog();
  auto chain = resolve_component_type(m, "tomcat");
  REQUIRE(chain.size() == 4);
  CHECK(chain[0]->name == "tomcat");
  CHECK(chain[1]->name == "web_server");
  CHECK(chain[2]->name == "software_component");
  CHECK(chain[3]->name == "base");

  auto root = resolve_component_type(m, "base");
  REQUIRE(root.size() == 1);
  CHECK(root[0]->name == "base");

  CHECK(error_code_of([&] { resolve_component_type(m, "no_such_type"); }) == Errc::unknown_type);
}

TEST_CASE("resolve_component_type detects extends cycles") {
  auto m = with_catalog();
  m.component_types["x"] = ComponentType{"x", "y", {}, {}, {}, TypeOrigin::model};
  m.component_types["y"] = ComponentType{"y", "x", {}, {}, {}, TypeOrigin::model};
  CHECK(error_code_of([&] { resolve_component_type(m, "x"); }) == Errc::cyclic_type_chain);
}

TEST_CASE("the last element of every type chain has no parent") {
  auto m = testing::reference_model();
  for (const auto& [name, _] : m.component_types) {
    auto chain = resolve_component_type(m, name);
    CHECK(chain.front()->name == name);
    CHECK_FALSE(chain.back()->extends.has_value());
  }
  for (const auto& [name, _] : m.relation_types) {
    auto chain = resolve_relation_type(m, name);
    CHECK_FALSE(chain.back()->extends.has_value());
  }
}

TEST_CASE("effective_properties merges overrides, defaults and references") {
  auto m = testing::reference_model();
  auto tomcat = effective_properties(m, *m.find_component("Tomcat"));
  CHECK(tomcat.at("port") == PropertyValue(8080));

  auto ec2 = effective_properties(m, *m.find_component("AWS EC2"));
  CHECK(ec2.at("region") == PropertyValue("eu-west-1"));
  CHECK(ec2.at("instance_type") == PropertyValue("t3.medium"));

  auto admin = effective_properties(m, *m.find_component("Admin App"));
  CHECK(admin.at("admin_port") == PropertyValue(9000));

  auto empty = with_catalog();
  empty.components.push_back(Component{"b", "base", {}, {}, {}});
  CHECK(effective_properties(empty, empty.components[0]).empty());
}

TEST_CASE("effective_properties leaves undeclared-without-default properties absent") {
  auto m = testing::reference_model();
  auto vm = effective_properties(m, *m.find_component("Ubuntu LTS"));
  CHECK(vm.contains("os_family"));
  CHECK_FALSE(vm.contains("address"));
}

TEST_CASE("effective_properties errors on broken references and kinds") {
  auto m = with_catalog();
  m.components.push_back(Component{"a", "compute", {{"os_family", PropertyValue(Reference{"", "nope"})}}, {}, {}});
  CHECK(error_code_of([&] { effective_properties(m, m.components[0]); }) == Errc::unresolved_reference);
  m.components[0].properties["os_family"] = PropertyValue(std::int64_t{3});
  CHECK(error_code_of([&] { effective_properties(m, m.components[0]); }) == Errc::kind_mismatch);
}

TEST_CASE("effective_properties is idempotent") {
  std::mt19937_64 rng(11);
  for (int i = 0; i < 60; ++i) {
    auto m = testing::random_model(rng);
    for (const auto& c : m.components) {
      auto once = effective_properties(m, c);
      Component again = c;
      again.properties = once;
      CHECK(effective_properties(m, again) == once);
    }
  }
}

TEST_CASE("hosting_stack follows hosted_on to the leaf") {
  auto m = testing::reference_model();
  CHECK(names_of(hosting_stack(m, *m.find_component("Order App"))) ==
        std::vector<std::string>{"Order App", "Tomcat", "Ubuntu LTS", "AWS EC2"});
  CHECK(names_of(hosting_stack(m, *m.find_component("AWS EC2"))) == std::vector<std::string>{"AWS EC2"});
  CHECK(names_of(hosting_stack(m, *m.find_component("Admin App"))) ==
        std::vector<std::string>{"Admin App", "OpenStack"});
}

TEST_CASE("hosting_stack errors") {
  auto m = with_catalog();
  m.components = {Component{"A", "base", {}, {}, {}}, Component{"B", "base", {}, {}, {}},
                  Component{"C", "base", {}, {}, {}}};
  link(m, "hosted_on", "A", "B");
  link(m, "hosted_on", "B", "A");
  CHECK(error_code_of([&] { hosting_stack(m, m.components[0]); }) == Errc::hosting_cycle);

  m.relations.clear();
  link(m, "hosted_on", "A", "B");
  link(m, "hosted_on", "A", "C");
  CHECK(error_code_of([&] { hosting_stack(m, m.components[0]); }) == Errc::multiple_hosts);

  m.relations.clear();
  link(m, "hosted_on", "A", "ghost");
  CHECK(error_code_of([&] { hosting_stack(m, m.components[0]); }) == Errc::unknown_component);
}

TEST_CASE("deployment_order examples") {
  auto m = with_catalog();
  m.components = {Component{"A", "base", {}, {}, {}}, Component{"B", "base", {}, {}, {}},
                  Component{"C", "base", {}, {}, {}}};
  link(m, "hosted_on", "A", "B");
  link(m, "hosted_on", "B", "C");
  CHECK(deployment_order(m) == std::vector<std::string>{"C", "B", "A"});

  auto pair = with_catalog();
  pair.components = {Component{"b", "base", {}, {}, {}}, Component{"a", "base", {}, {}, {}}};
  CHECK(deployment_order(pair) == std::vector<std::string>{"a", "b"});
}

TEST_CASE("deployment_order reports the cycle") {
  auto m = with_catalog();
  m.components = {Component{"a", "base", {}, {}, {}}, Component{"b", "base", {}, {}, {}},
                  Component{"c", "base", {}, {}, {}}, Component{"d", "base", {}, {}, {}}};
  link(m, "depends_on", "a", "b");
  link(m, "connects_to", "b", "c");
  link(m, "hosted_on", "c", "a");
  link(m, "depends_on", "d", "a");
  try {
    deployment_order(m);
    FAIL("expected a dependency cycle");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::dependency_cycle);
    std::set<std::string> members(e.subjects().begin(), e.subjects().end());
    CHECK(members == std::set<std::string>{"a", "b", "c"});
  }
}

TEST_CASE("deployment_order matches the brute-force oracle on random graphs") {
  std::mt19937_64 rng(3);
  for (int i = 0; i < 300; ++i) {
    int n = std::uniform_int_distribution<int>(1, 7)(rng);
    auto m = testing::random_dag_model(rng, n, 0.35);
    auto order = deployment_order(m);
    std::vector<std::string> names;
    for (const auto& c : m.components) names.push_back(c.name);
    auto edges = testing::dependency_edges(m);
    auto oracle = testing::permutation_orders(names, edges, order);
    CHECK(oracle.count >= 1);
    CHECK(oracle.contains);
    CHECK(order == oracle.smallest);
  }
}

TEST_CASE("deployment_order respects every edge on generated models") {
  std::mt19937_64 rng(5);
  for (int i = 0; i < 100; ++i) {
    auto m = testing::random_model(rng);
    auto order = deployment_order(m);
    std::vector<std::string> names;
    for (const auto& c : m.components) names.push_back(c.name);
    CHECK(testing::is_topological(order, names, testing::dependency_edges(m)));
  }
}

TEST_CASE("custom relation types count as dependencies") {
  auto m = with_catalog();
  m.relation_types["uses"] = RelationType{"uses", "connects_to", {}, TypeOrigin::model};
  m.components = {Component{"a", "base", {}, {}, {}}, Component{"b", "base", {}, {}, {}}};
  link(m, "uses", "a", "b");
  CHECK(deployment_order(m) == std::vector<std::string>{"b", "a"});
  CHECK(builtin_relation_kind(m, m.relations[0]) == relation_names::connects_to);
  CHECK(relation_is_a(m, "uses", relation_names::depends_on));
}

TEST_CASE("stack_tops lists components nothing is hosted on") {
  auto m = testing::reference_model();
  std::set<std::string> tops;
  for (const auto* c : stack_tops(m)) tops.insert(c->name);
  CHECK(tops == std::set<std::string>{"Order App", "JMS 1.1 Queue", "Order Worker",
                                      "MongoDB Collection", "Admin App"});
}

TEST_CASE("effective_operations overlays component operations on type operations") {
  auto m = with_catalog();
  ComponentType t{"svc", "software_component", {}, {}, {}, TypeOrigin::model};
  t.operations["install"] = Operation{"install", Artifact{"install", "type-install.sh", ArtifactKind::script}};
  t.operations["start"] = Operation{"start", Artifact{"start", "type-start.sh", ArtifactKind::script}};
  m.component_types["svc"] = t;
  Component c{"s", "svc", {}, {}, {}};
  c.operations["start"] = Operation{"start", Artifact{"start", "own-start.sh", ArtifactKind::script}};
  m.components.push_back(c);
  auto ops = effective_operations(m, m.components[0]);
  CHECK(ops.at("install").artifact.path == "type-install.sh");
  CHECK(ops.at("start").artifact.path == "own-start.sh");
}

TEST_CASE("queries are total on validated generated models") {
  std::mt19937_64 rng(13);
  testing::TempDir dir;
  for (int i = 0; i < 40; ++i) {
    auto m = testing::random_model(rng);
    REQUIRE(count(validate(m), Severity::error) == 0);
    auto outcome = testing::exercise_queries(m, dir.path());
    CHECK_MESSAGE(outcome.ok, outcome.failure);
  }
}
