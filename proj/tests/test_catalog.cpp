// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <set>

#include "edmm/catalog.hpp"
#include "edmm/dsl.hpp"
#include "support.hpp"

using namespace edmm;

namespace {

DeploymentModel catalog_model(const Catalog& catalog) {
  DeploymentModel m;
  m.name = "catalog";
  install_catalog(m, catalog);
  return m;
}

Catalog user_catalog(const std::string& text) {
  auto r = dsl::parse_catalog({{"user.yaml", text}});
  REQUIRE(r.ok());
  return *r.catalog;
}

}  // namespace

TEST_CASE("builtin catalog contains the required type tree") {
  const Catalog& c = builtin_catalog();
  CHECK(c.origin == TypeOrigin::builtin);
  const std::map<std::string, std::string> parents{
      {"compute", "base"},
      {"software_component", "base"},
      {"web_server", "software_component"},
      {"web_application", "software_component"},
      {"dbms", "software_component"},
      {"database", "base"},
      {"queue", "base"},
      {"function", "base"},
      {"platform_service", "base"},
      {"aws_ec2", "platform_service"},
      {"aws_sqs", "platform_service"},
      {"aws_lambda", "platform_service"},
      {"azure_cosmos_db", "platform_service"},
      {"openstack_compute", "platform_service"},
  };
  REQUIRE(c.component_types.contains("base"));
  CHECK_FALSE(c.component_types.at("base").extends.has_value());
  for (const auto& [type, parent] : parents) {
    REQUIRE_MESSAGE(c.component_types.contains(type), type);
    CHECK(c.component_types.at(type).extends == std::optional<std::string>(parent));
    CHECK(c.component_types.at(type).origin == TypeOrigin::builtin);
  }
  CHECK_FALSE(c.relation_types.at("depends_on").extends.has_value());
  CHECK(c.relation_types.at("hosted_on").extends == std::optional<std::string>("depends_on"));
  CHECK(c.relation_types.at("connects_to").extends == std::optional<std::string>("depends_on"));
}

TEST_CASE("hosted_on and connects_to are distinct with a shared root") {
  auto m = catalog_model(builtin_catalog());
  auto hosted = resolve_relation_type(m, "hosted_on");
  auto connects = resolve_relation_type(m, "connects_to");
  REQUIRE(hosted.size() == 2);
  REQUIRE(connects.size() == 2);
  CHECK(hosted[0]->name != connects[0]->name);
  CHECK(hosted[1]->name == "depends_on");
  CHECK(connects[1]->name == "depends_on");
}

TEST_CASE("aws_ec2 carries compute and aws tags") {
  auto m = catalog_model(builtin_catalog());
  auto meta = effective_metadata(m, "aws_ec2");
  CHECK(meta.at("category") == "compute");
  CHECK(meta.at("provider") == "aws");
  CHECK(meta.at("delivery_model") == "iaas");
}

TEST_CASE("every builtin chain terminates at its root") {
  auto m = catalog_model(builtin_catalog());
  for (const auto& [name, _] : m.component_types) {
    CHECK(resolve_component_type(m, name).back()->name == "base");
  }
  for (const auto& [name, _] : m.relation_types) {
    CHECK(resolve_relation_type(m, name).back()->name == "depends_on");
  }
}

TEST_CASE("platform service leaves carry exactly one known provider") {
  auto m = catalog_model(builtin_catalog());
  const std::set<std::string> providers{"aws", "azure", "openstack"};
  int leaves = 0;
  for (const auto& [name, t] : m.component_types) {
    if (name == "platform_service" || !component_is_a(m, name, "platform_service")) continue;
    ++leaves;
    auto meta = effective_metadata(m, name);
    REQUIRE_MESSAGE(meta.contains("provider"), name);
    CHECK(providers.contains(meta.at("provider")));
    CHECK(meta.contains("delivery_model"));
  }
  CHECK(leaves == 5);
}

TEST_CASE("builtin catalog text is the shipped data file") {
  CHECK(builtin_catalog_source() ==
        testing::read_text(testing::source_dir() / "catalog" / "builtin.edmm.yaml"));
}

TEST_CASE("merge resolves user types into builtins") {
  auto user = user_catalog("edmm_version: 1\ncomponent_types:\n  my_app:\n    extends: web_application\n");
  auto merged = merge(builtin_catalog(), user);
  auto m = catalog_model(merged);
  auto chain = resolve_component_type(m, "my_app");
  CHECK(chain.size() >= 3);
  CHECK(chain.back()->name == "base");
  CHECK(merged.component_types.at("my_app").origin == TypeOrigin::user);
}

TEST_CASE("merge with an empty user catalog is the identity") {
  Catalog empty;
  CHECK(merge(builtin_catalog(), empty).component_types == builtin_catalog().component_types);
  CHECK(merge(builtin_catalog(), empty).relation_types == builtin_catalog().relation_types);
}

TEST_CASE("merge rejects redefinitions and unknown parents") {
  auto redefine = user_catalog("edmm_version: 1\ncomponent_types:\n  compute:\n    extends: base\n");
  try {
    merge(builtin_catalog(), redefine);
    FAIL("expected a name collision");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::name_collision);
  }
  auto orphan = user_catalog("edmm_version: 1\ncomponent_types:\n  stray:\n    extends: nowhere\n");
  try {
    merge(builtin_catalog(), orphan);
    FAIL("expected an unknown parent");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::unknown_parent);
  }
  auto rel = user_catalog("edmm_version: 1\nrelation_types:\n  hosted_on:\n    extends: depends_on\n");
  CHECK_THROWS_AS(merge(builtin_catalog(), rel), Error);
}

TEST_CASE("user relation types extend builtin roots") {
  auto user = user_catalog("edmm_version: 1\nrelation_types:\n  reads_from:\n    extends: connects_to\n");
  auto m = catalog_model(merge(builtin_catalog(), user));
  CHECK(relation_is_a(m, "reads_from", "depends_on"));
}
