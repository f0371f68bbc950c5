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

#include "edmm/cli.hpp"

#include <fmt/format.h>
#include <unistd.h>

#include <CLI11.hpp>
#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>

#include "edmm/compat.hpp"
#include "edmm/dsl.hpp"
#include "edmm/transform.hpp"
#include "edmm/validation.hpp"

namespace edmm::cli {

namespace fs = std::filesystem;

namespace {

constexpr std::string_view kDescription =
    "Parse, validate and transform EDMM deployment models.\n\n"
    "Exit codes:\n"
    "  0  success\n"
    "  1  parse or validation errors\n"
    "  2  model incompatible with or unmappable to the target\n"
    "  3  usage error or unknown target\n"
    "  4  I/O error or missing artifact file\n\n"
    "Catalogs: --catalog FILE (repeatable); otherwise EDMM_CATALOG_PATH, a\n"
    "colon-separated list of catalog files or directories of *.yaml files.\n\n"
    "transform writes OUTPUT/TARGET/ through a staging directory that is renamed\n"
    "into place only on success; an existing non-empty OUTPUT/TARGET/ is kept\n"
    "unless --force is given.";

enum class Format { text, machine };

struct Options {
  std::vector<std::string> inputs;
  std::vector<std::string> catalogs;
  std::vector<std::string> targets;
  std::string output;
  std::string artifact_root;
  Format format = Format::text;
  bool force = false;
};

/// Failure that maps straight to an exit code.
struct Exit {
  int code;
  std::string message;
};

class Runner {
 public:
  Runner(const Options& options, std::ostream& out, std::ostream& err)
      : o_(options), out_(out), err_(err) {}

  int parse_command();
  int validate_command();
  int check_command();
  int transform_command();
  int list_targets_command();

  int fail(const Exit& e) {
    err_ << "edmm: " << e.message << "\n";
    if (machine()) out_ << fmt::format("error\t{}\t{}\n", e.code, escape_field(e.message));
    return e.code;
  }

 private:
  bool machine() const { return o_.format == Format::machine; }

  static std::string read_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Exit{exit_code::io, fmt::format("cannot read '{}'", path.string())};
    std::stringstream ss;
    ss << in.rdbuf();
    if (in.bad()) throw Exit{exit_code::io, fmt::format("error reading '{}'", path.string())};
    return ss.str();
  }

  std::vector<std::string> catalog_files() const {
    if (!o_.catalogs.empty()) return o_.catalogs;
    std::vector<std::string> files;
    const char* env = std::getenv(catalog_path_variable);
    if (env == nullptr) return files;
    std::stringstream ss(env);
    std::string entry;
    while (std::getline(ss, entry, ':')) {
      if (entry.empty()) continue;
      std::error_code ec;
      if (fs::is_directory(entry, ec)) {
        std::vector<std::string> found;
        for (const auto& f : fs::directory_iterator(entry, ec)) {
          auto ext = f.path().extension();
          if (f.is_regular_file() && (ext == ".yaml" || ext == ".yml")) found.push_back(f.path().string());
        }
        std::sort(found.begin(), found.end());
        files.insert(files.end(), found.begin(), found.end());
      } else {
        files.push_back(entry);
      }
    }
    return files;
  }

  void report_parse_diagnostics(const std::vector<dsl::ParseDiagnostic>& diagnostics,
                                std::size_t& errors, std::size_t& warnings) {
    for (const auto& d : diagnostics) {
      (d.severity == Severity::error ? errors : warnings) += 1;
      if (machine()) {
        out_ << fmt::format("diagnostic\t{}\t{}\t{}\t{}\n", to_string(d.severity), d.code,
                            escape_field(fmt::format("{}:{}:{}", d.source, d.line, d.column)),
                            escape_field(d.message));
      } else {
        err_ << dsl::format(d) << "\n";
      }
    }
  }

  void summary(std::size_t errors, std::size_t warnings) {
    if (machine()) {
      out_ << fmt::format("summary\t{}\t{}\n", errors, warnings);
    } else {
      out_ << fmt::format("{} error{}, {} warning{}\n", errors, errors == 1 ? "" : "s", warnings,
                          warnings == 1 ? "" : "s");
    }
  }

  /// Builtin catalog merged with user catalogs; nullopt after reporting errors.
  std::optional<Catalog> load_catalog() {
    auto files = catalog_files();
    if (files.empty()) return builtin_catalog();
    dsl::SourceSet sources;
    for (const auto& f : files) sources.push_back({f, read_file(f)});
    auto parsed = dsl::parse_catalog(sources, TypeOrigin::user);
    if (!parsed.ok()) {
      std::size_t errors = 0;
      std::size_t warnings = 0;
      report_parse_diagnostics(parsed.diagnostics, errors, warnings);
      summary(errors, warnings);
      return std::nullopt;
    }
    try {
      return merge(builtin_catalog(), *parsed.catalog);
    } catch (const Error& e) {
      throw Exit{exit_code::invalid_model, fmt::format("catalog: {}", e.what())};
    }
  }

  struct Loaded {
    Catalog catalog;
    DeploymentModel model;
    std::size_t parse_warnings = 0;
  };

  /// Parses the inputs; nullopt after reporting parse errors.
  std::optional<Loaded> load() {
    auto catalog = load_catalog();
    if (!catalog) return std::nullopt;
    dsl::SourceSet sources;
    for (const auto& f : o_.inputs) sources.push_back({f, read_file(f)});
    auto parsed = dsl::parse(sources, *catalog);
    std::size_t errors = 0;
    std::size_t warnings = 0;
    report_parse_diagnostics(parsed.diagnostics, errors, warnings);
    if (!parsed.ok()) {
      summary(errors, warnings);
      return std::nullopt;
    }
    return Loaded{std::move(*catalog), std::move(*parsed.model), warnings};
  }

  /// Validates and reports; nullopt after reporting validation errors.
  std::optional<ValidatedModel> validated(Loaded& loaded, bool print_clean) {
    auto diagnostics = validate(loaded.model, loaded.catalog);
    std::size_t errors = count(diagnostics, Severity::error);
    std::size_t warnings = count(diagnostics, Severity::warning) + loaded.parse_warnings;
    if (errors > 0 || print_clean) {
      out_ << (machine() ? render_machine(diagnostics) : render_text(diagnostics));
      summary(errors, warnings);
    } else if (!diagnostics.empty()) {
      // Warnings only: keep stdout for the command's own output.
      if (machine()) out_ << render_machine(diagnostics);
      else err_ << render_text(diagnostics);
    }
    if (errors > 0) return std::nullopt;
    return assert_valid(loaded.model, loaded.catalog);
  }

  const Technology& resolve_target(const std::string& name) {
    try {
      return target_technology(name);
    } catch (const Error& e) {
      throw Exit{exit_code::usage, e.what()};
    }
  }

  void write_atomically(const FileSet& files, const fs::path& destination);

  const Options& o_;
  std::ostream& out_;
  std::ostream& err_;
};

int Runner::parse_command() {
  auto loaded = load();
  if (!loaded) return exit_code::invalid_model;
  if (machine()) {
    out_ << fmt::format("model\t{}\t{}\t{}\n", escape_field(loaded->model.name),
                        loaded->model.components.size(), loaded->model.relations.size());
    summary(0, loaded->parse_warnings);
  } else {
    out_ << dsl::serialize(loaded->model);
  }
  return exit_code::success;
}

int Runner::validate_command() {
  auto loaded = load();
  if (!loaded) return exit_code::invalid_model;
  return validated(*loaded, true) ? exit_code::success : exit_code::invalid_model;
}

int Runner::check_command() {
  std::vector<const Technology*> techs;
  for (const auto& t : o_.targets) techs.push_back(&resolve_target(t));
  auto loaded = load();
  if (!loaded) return exit_code::invalid_model;
  auto model = validated(*loaded, false);
  if (!model) return exit_code::invalid_model;
  int code = exit_code::success;
  for (const auto* tech : techs) {
    auto report = check(*model, *tech);
    out_ << (machine() ? render_machine(report) : render_text(report));
    if (!report.compatible()) code = exit_code::incompatible;
  }
  return code;
}

int Runner::transform_command() {
  const Technology& tech = resolve_target(o_.targets.front());
  if (!bundled_plugins().find(tech.name)) {
    throw Exit{exit_code::usage, fmt::format("no plugin is bundled for '{}'", tech.name)};
  }
  std::error_code ec;
  const fs::path outdir = fs::path(o_.output) / tech.name;
  if (fs::exists(outdir, ec) && !o_.force &&
      !(fs::is_directory(outdir, ec) && fs::is_empty(outdir, ec))) {
    throw Exit{exit_code::io,
               fmt::format("'{}' exists and is not empty (use --force)", outdir.string())};
  }
  auto loaded = load();
  if (!loaded) return exit_code::invalid_model;
  auto model = validated(*loaded, false);
  if (!model) return exit_code::invalid_model;

  TransformOptions options;
  options.artifact_root = o_.artifact_root.empty()
                              ? fs::path(o_.inputs.front()).parent_path()
                              : fs::path(o_.artifact_root);
  if (options.artifact_root.empty()) options.artifact_root = ".";
  FileSet files;
  try {
    files = transform(*model, tech, options);
  } catch (const IncompatibleModel& e) {
    out_ << (machine() ? render_machine(e.report()) : render_text(e.report()));
    throw Exit{exit_code::incompatible, e.what()};
  } catch (const Error& e) {
    switch (e.code()) {
      case Errc::unmappable_element: throw Exit{exit_code::incompatible, e.what()};
      case Errc::missing_artifact_file: throw Exit{exit_code::io, e.what()};
      case Errc::unknown_technology: throw Exit{exit_code::usage, e.what()};
      default: throw;
    }
  }

  write_atomically(files, outdir);
  for (const auto& f : files.entries()) {
    if (machine()) out_ << fmt::format("file\t{}\t{}\n", escape_field(f.path), f.content.size());
    else out_ << (outdir / f.path).string() << "\n";
  }
  if (!machine()) {
    out_ << fmt::format("{}: wrote {} files to {}\n", tech.name, files.size(), outdir.string());
  }
  return exit_code::success;
}

void Runner::write_atomically(const FileSet& files, const fs::path& destination) {
  const fs::path outdir = fs::absolute(destination).lexically_normal();
  const fs::path parent = outdir.parent_path();
  const std::string tag = fmt::format("{}.{}", outdir.filename().string(), ::getpid());
  const fs::path staging = parent / (".edmm-staging-" + tag);
  const fs::path previous = parent / (".edmm-previous-" + tag);
  std::error_code ec;
  try {
    fs::create_directories(parent);
    fs::remove_all(staging);
    fs::create_directory(staging);
    for (const auto& f : files.entries()) {
      const fs::path target = staging / f.path;
      fs::create_directories(target.parent_path());
      std::ofstream out(target, std::ios::binary | std::ios::trunc);
      out << f.content;
      out.close();
      if (!out) throw Exit{exit_code::io, fmt::format("cannot write '{}'", target.string())};
    }
    bool moved_aside = false;
    if (fs::exists(outdir)) {
      fs::rename(outdir, previous);
      moved_aside = true;
    }
    try {
      fs::rename(staging, outdir);
    } catch (...) {
      if (moved_aside) fs::rename(previous, outdir, ec);
      throw;
    }
    if (moved_aside) fs::remove_all(previous, ec);
  } catch (const fs::filesystem_error& e) {
    fs::remove_all(staging, ec);
    throw Exit{exit_code::io, e.what()};
  } catch (...) {
    fs::remove_all(staging, ec);
    throw;
  }
}

int Runner::list_targets_command() {
  auto rows = list_targets();
  if (machine()) {
    for (const auto& t : rows) {
      out_ << fmt::format("target\t{}\t{}\t{}\t{}\n", t.name, escape_field(t.display_name),
                          t.category, to_string(t.status));
    }
    return exit_code::success;
  }
  std::size_t name_w = 4;
  std::size_t display_w = 12;
  for (const auto& t : rows) {
    name_w = std::max(name_w, t.name.size());
    display_w = std::max(display_w, t.display_name.size());
  }
  out_ << fmt::format("{:<{}}  {:<{}}  {:<8}  {}\n", "NAME", name_w, "DISPLAY NAME", display_w,
                      "CATEGORY", "STATUS");
  for (const auto& t : rows) {
    out_ << fmt::format("{:<{}}  {:<{}}  {:<8}  {}\n", t.name, name_w, t.display_name, display_w,
                        t.category, to_string(t.status));
  }
  return exit_code::success;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{std::string(kDescription), "edmm"};
  app.require_subcommand(1);
  app.formatter(std::make_shared<CLI::Formatter>());
  Options o;

  const std::map<std::string, Format> formats{{"text", Format::text}, {"machine", Format::machine}};
  auto common = [&](CLI::App* sub, bool with_inputs) {
    sub->add_option("--format", o.format, "Output format: text or machine")
        ->transform(CLI::CheckedTransformer(formats, CLI::ignore_case));
    if (with_inputs) {
      sub->add_option("--catalog", o.catalogs, "Additional type catalog file (repeatable)");
      sub->add_option("inputs", o.inputs, "Model files, merged in order")->required();
    }
  };

  auto* parse = app.add_subcommand("parse", "Parse models and print the canonical form");
  common(parse, true);
  auto* validate_cmd = app.add_subcommand("validate", "Validate models and list diagnostics");
  common(validate_cmd, true);
  auto* check_cmd = app.add_subcommand("check", "Check compatibility with target technologies");
  common(check_cmd, true);
  check_cmd->add_option("--target", o.targets, "Target technology (repeatable)")->required();
  auto* transform_cmd = app.add_subcommand("transform", "Generate deployment files for a target");
  common(transform_cmd, true);
  transform_cmd->add_option("--target", o.targets, "Target technology")->required()->expected(1);
  transform_cmd->add_option("--output", o.output, "Output directory")->required();
  transform_cmd->add_option("--artifact-root", o.artifact_root,
                            "Directory artifact paths are relative to (default: first input's)");
  transform_cmd->add_flag("--force", o.force, "Replace an existing OUTPUT/TARGET directory");
  auto* list_cmd = app.add_subcommand("list-targets", "List known target technologies");
  common(list_cmd, false);

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return exit_code::success;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return exit_code::success;
  } catch (const CLI::ParseError& e) {
    err << "edmm: " << e.what() << "\n";
    auto* failed = app.get_subcommands().empty() ? &app : app.get_subcommands().front();
    err << "Run '" << (failed == &app ? "edmm" : "edmm " + failed->get_name())
        << " --help' for usage.\n";
    return exit_code::usage;
  }

  Runner runner(o, out, err);
  try {
    if (parse->parsed()) return runner.parse_command();
    if (validate_cmd->parsed()) return runner.validate_command();
    if (check_cmd->parsed()) return runner.check_command();
    if (transform_cmd->parsed()) return runner.transform_command();
    return runner.list_targets_command();
  } catch (const Exit& e) {
    return runner.fail(e);
  } catch (const Error& e) {
    return runner.fail(Exit{exit_code::invalid_model, e.what()});
  } catch (const std::exception& e) {
    return runner.fail(Exit{exit_code::io, e.what()});
  }
}

}  // namespace edmm::cli
