// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <cstdlib>
#include <fstream>
#include <nlohmann/json.hpp>
#include <random>
#include <set>

#include "edmm/structure.hpp"
#include "edmm/transform.hpp"
#include "support.hpp"

using namespace edmm;
namespace fs = std::filesystem;

namespace {

FileSet chain_files(std::string_view target) {
  auto files = transform(assert_valid(testing::chain_model()), target,
                         TransformOptions{testing::fixture_path("chain")});
  auto problems = structure::verify(testing::chain_model(), files);
  CHECK_MESSAGE(problems.empty(), (problems.empty() ? std::string() : problems.front()));
  return files;
}

const std::string& content(const FileSet& files, const std::string& path) {
  const auto* f = files.find(path);
  REQUIRE_MESSAGE(f != nullptr, path);
  return f->content;
}

bool contains(const std::string& haystack, const std::string& needle) {
  return haystack.find(needle) != std::string::npos;
}

Manifest manifest_of(const FileSet& files) {
  return parse_manifest(content(files, std::string(manifest_file)));
}

}  // namespace

TEST_CASE("docker-compose collapses the chain into one service") {
  auto files = chain_files("docker-compose");
  const auto& yml = content(files, "docker-compose.yml");
  CHECK(contains(yml, "services:\n  app:\n    image: registry.example.com/app:1.0\n"));
  CHECK(contains(yml, "CONTEXT_PATH: /"));
  auto m = manifest_of(files);
  CHECK(m.emitted.size() == 1);
  CHECK(m.absorbed.size() == 2);
}

TEST_CASE("kubernetes emits a deployment and a service per top") {
  auto files = chain_files("kubernetes");
  const auto& deployment = content(files, "deployment-app.yaml");
  CHECK(contains(deployment, "apiVersion: apps/v1\nkind: Deployment\n"));
  CHECK(contains(deployment, "image: registry.example.com/app:1.0"));
  CHECK(contains(deployment, "containerPort: 8080"));
  const auto& service = content(files, "service-app.yaml");
  CHECK(contains(service, "apiVersion: v1\nkind: Service\n"));
  CHECK(contains(service, "port: 8080"));
}

TEST_CASE("terraform maps hosting to depends_on and operations to provisioners") {
  auto files = chain_files("terraform");
  auto doc = nlohmann::json::parse(content(files, "main.tf.json"));
  const auto& res = doc.at("resource");
  CHECK(res.at("aws_instance").at("vm").at("depends_on").empty());
  CHECK(res.at("null_resource").at("server").at("depends_on") == nlohmann::json{"aws_instance.vm"});
  CHECK(res.at("null_resource").at("app").at("depends_on") == nlohmann::json{"null_resource.server"});
  const auto& scripts = res.at("null_resource").at("app").at("provisioner").at(0).at("remote-exec").at("scripts");
  CHECK(scripts == nlohmann::json{"scripts/app-install.sh", "scripts/app-start.sh"});
  CHECK(doc.at("provider").at("aws").at("region") == "us-east-1");
}

TEST_CASE("ansible emits one role per component") {
  auto files = chain_files("ansible");
  for (const char* role : {"app", "server", "vm"}) {
    CHECK(files.find(std::string("roles/") + role + "/tasks/main.yml") != nullptr);
    CHECK(files.find(std::string("roles/") + role + "/meta/main.yml") != nullptr);
  }
  CHECK(contains(content(files, "roles/app/meta/main.yml"), "- role: server"));
  CHECK(contains(content(files, "roles/app/tasks/main.yml"), "ansible.builtin.script: scripts/app-install.sh"));
  CHECK(contains(content(files, "playbook.yml"), "roles:\n    - vm\n    - server\n    - app\n"));
}

TEST_CASE("cloudformation absorbs software into its instance") {
  auto files = chain_files("aws-cloudformation");
  auto doc = nlohmann::json::parse(content(files, "template.json"));
  CHECK(doc.at("AWSTemplateFormatVersion") == "2010-09-09");
  const auto& vm = doc.at("Resources").at("Vm");
  CHECK(vm.at("Type") == "AWS::EC2::Instance");
  std::string user_data = vm.at("Properties").at("UserData").at("Fn::Base64");
  auto server = user_data.find("echo install server");
  auto app = user_data.find("echo install app");
  auto start = user_data.find("echo start app");
  CHECK(server < app);
  CHECK(app < start);
  CHECK(start != std::string::npos);
}

TEST_CASE("tosca keeps every element") {
  auto files = chain_files("tosca");
  const auto& st = content(files, "service-template.yaml");
  CHECK(st.rfind("tosca_definitions_version: tosca_simple_yaml_1_3\n", 0) == 0);
  for (const char* node : {"    app:\n", "    server:\n", "    vm:\n"}) CHECK(contains(st, node));
  CHECK(contains(st, "type: tosca.relationships.HostedOn"));
  CHECK(manifest_of(files).absorbed.empty());
}

TEST_CASE("terraform output for the reference scenario matches the golden files") {
  auto files = transform(assert_valid(testing::reference_model()), "terraform",
                         TransformOptions{testing::fixture_path("reference")});
  CHECK(structure::verify(testing::reference_model(), files).empty());
  const fs::path golden = testing::source_dir() / "tests" / "golden" / "terraform" / "reference";
  if (std::getenv("EDMM_RECORD_GOLDEN") != nullptr) {
    fs::remove_all(golden);
    for (const auto& f : files.entries()) {
      fs::create_directories((golden / f.path).parent_path());
      std::ofstream(golden / f.path, std::ios::binary) << f.content;
    }
  }
  std::set<std::string> on_disk;
  for (const auto& e : fs::recursive_directory_iterator(golden)) {
    if (e.is_regular_file()) on_disk.insert(fs::relative(e.path(), golden).generic_string());
  }
  std::set<std::string> produced;
  for (const auto& f : files.entries()) produced.insert(f.path);
  CHECK(on_disk == produced);
  for (const auto& f : files.entries()) {
    CHECK_MESSAGE(testing::read_text(golden / f.path) == f.content, f.path);
  }
}

TEST_CASE("every bundled plugin produces structurally sound output") {
  std::mt19937_64 rng(17);
  testing::TempDir dir;
  std::map<std::string, int> sound;
  for (int i = 0; i < 150; ++i) {
    testing::GeneratorOptions opts;
    opts.relation_extras = i % 4 == 0;
    if (i % 4 == 1) opts.container_images = true;
    if (i % 4 == 2) opts.provider = "aws";
    if (i % 4 == 3) {
      opts.provider = "aws";
      opts.anchor_type = "aws_ec2";
    }
    auto m = i == 0 ? testing::reference_model() : testing::random_model(rng, opts);
    testing::materialize_artifacts(m, dir.path());
    auto vm = assert_valid(m);
    for (const auto& target : bundled_plugins().targets()) {
      FileSet files;
      try {
        files = transform(vm, target, TransformOptions{dir.path()});
      } catch (const Error& e) {
        CHECK_MESSAGE((e.code() == Errc::incompatible_model || e.code() == Errc::unmappable_element),
                      e.what());
        continue;
      }
      auto problems = structure::verify(vm.model(), files);
      CHECK_MESSAGE(problems.empty(), (target + ": " + (problems.empty() ? "" : problems.front())));
      ++sound[target];
    }
  }
  for (const auto& target : bundled_plugins().targets()) {
    CHECK_MESSAGE(sound[target] >= 10, target);
  }
}

TEST_CASE("user text stays literal in every target language") {
  auto m = testing::parse_text(
      "edmm_version: 1\nname: m\ncomponents:\n  app:\n    type: web_application\n"
      "    properties:\n      context_path: \"$(HOME) ${HOME} {{ home }} %{ if x }\"\n"
      "    artifacts:\n      - name: image\n        path: registry.example.com/app:1\n"
      "        kind: container-image\n");
  auto vm = assert_valid(m);
  auto text_of = [&](std::string_view target, const std::string& path) {
    return content(transform(vm, target), path);
  };
  CHECK(contains(text_of("docker-compose", "docker-compose.yml"), "$$(HOME) $${HOME} {{ home }}"));
  CHECK(contains(text_of("kubernetes", "deployment-app.yaml"), "$$(HOME) ${HOME} {{ home }}"));
  CHECK(contains(text_of("terraform", "main.tf.json"), "$(HOME) $${HOME} {{ home }} %%{ if x }"));
  CHECK(contains(text_of("ansible", "playbook.yml"), "$(HOME) ${HOME} {{ '{' }}{ home }}"));
}
