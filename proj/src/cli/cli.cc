// Copyright 2026 The detml Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "detml/cli.h"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <optional>
#include <regex>
#include <sstream>

#include "CLI11.hpp"
#include "detml/facts.h"
#include "detml/lint.h"
#include "detml/rules.h"
#include "detml/scaffold.h"
#include "detml/sysintel.h"
#include "detml/version.h"
#include "nlohmann/json.hpp"

namespace detml {
namespace {

using nlohmann::json;

struct GlobalOptions {
  std::string color = "auto";
  int verbosity = 0;
  std::string rules_path;
  bool version = false;
};

struct LintArgs {
  std::string path = ".";
  std::string format = "text";
  bool strict = false;
  bool require_stamp = false;
  std::vector<std::string> include;
  std::vector<std::string> exclude;
  std::string env_manifest;
  int jobs = 0;
  bool dump_facts = false;
};

struct CreateArgs {
  std::string template_name;
  std::string template_version;
  std::vector<std::string> vars;
  std::string template_dir;
  bool no_input = false;
  std::string dest;
  std::string format = "text";
};

struct SyncArgs {
  std::string project = ".";
  bool check_only = false;
  std::string template_dir;
  std::string to_version;
  std::string format = "text";
};

struct ListArgs {
  std::string template_dir;
  std::string format = "text";
};

struct ReportArgs {
  std::string format = "json";
  std::string out;
};

struct ManifestArgs {
  std::string params;
  std::string metrics;
  std::string env;
  std::string revision;
  std::string hardware;
  std::string out;
  std::string format = "json";
};

// Reports a failure: message on stderr, and an {"error": ...} object on
// stdout when JSON output was requested so stdout always parses.
class Failer {
 public:
  Failer(CliStreams& io, const bool& json) : io_(io), json_(json) {}
  int operator()(std::string_view message) const {
    io_.err << "detml: error: " << message << "\n";
    if (json_) io_.out << json{{"error", std::string(message)}}.dump(2) << "\n";
    return kExitUsage;
  }
  int operator()(const absl::Status& status) const {
    return (*this)(std::string(status.message()));
  }

 private:
  CliStreams& io_;
  const bool& json_;
};

absl::StatusOr<std::string> ReadFile(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return absl::NotFoundError("cannot read " + path);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

absl::Status WriteOutput(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out << content;
  out.close();
  if (!out) return absl::InternalError("cannot write " + path);
  return absl::OkStatus();
}

absl::StatusOr<RuleCatalog> LoadCatalog(const GlobalOptions& global) {
  if (global.rules_path.empty()) return BuiltinRules();
  absl::StatusOr<std::string> text = ReadFile(global.rules_path);
  if (!text.ok()) return text.status();
  absl::StatusOr<RuleCatalog> catalog = LoadRules(*text);
  if (!catalog.ok()) {
    return absl::InvalidArgumentError(global.rules_path + ": " +
                                      std::string(catalog.status().message()));
  }
  return catalog;
}

absl::StatusOr<std::vector<TemplateDescriptor>> AvailableTemplates(const std::string& dir) {
  std::vector<TemplateDescriptor> templates = BuiltinTemplates();
  if (!dir.empty()) {
    absl::StatusOr<std::vector<TemplateDescriptor>> extra = LoadTemplateDir(dir);
    if (!extra.ok()) return extra.status();
    templates.insert(templates.end(), extra->begin(), extra->end());
  }
  return templates;
}

bool UseColor(const GlobalOptions& global, const CliStreams& io) {
  return global.color == "on" || (global.color == "auto" && io.out_is_tty);
}

// ---------------------------------------------------------------------------

int RunLint(const GlobalOptions& global, const LintArgs& args, CliStreams& io,
            const Failer& fail) {
  if (args.dump_facts) {
    absl::StatusOr<std::string> text = ReadFile(args.path);
    if (!text.ok()) return fail(text.status());
    absl::StatusOr<FactSet> facts = ParseSource(*text, args.path);
    if (!facts.ok()) return fail(facts.status());
    io.out << FactSetToJson(*facts).dump(2) << "\n";
    return kExitOk;
  }
  absl::StatusOr<RuleCatalog> catalog = LoadCatalog(global);
  if (!catalog.ok()) return fail(catalog.status());
  LintOptions options;
  if (!args.include.empty()) options.include = args.include;
  options.exclude = args.exclude;
  options.strict = args.strict;
  options.require_stamp = args.require_stamp;
  if (!args.env_manifest.empty()) options.env_manifest = args.env_manifest;
  options.jobs = args.jobs;
  absl::StatusOr<LintReport> report = LintProject(args.path, *catalog, options);
  if (!report.ok()) return fail(report.status());

  if (args.format == "json") {
    io.out << LintReportToJson(*report).dump(2) << "\n";
  } else {
    std::string text = LintReportToText(*report);
    if (UseColor(global, io)) {
      std::string colored;
      std::istringstream lines(text);
      for (std::string line; std::getline(lines, line);) {
        bool error = line.rfind("ERROR", 0) == 0;
        std::size_t cut = line.find(' ');
        colored += (error ? "\033[31m" : "\033[33m") + line.substr(0, cut) + "\033[0m" +
                   line.substr(cut) + "\n";
      }
      text = colored;
    }
    io.out << text;
  }
  if (global.verbosity > 0) {
    for (const FileResult& file : report->files) {
      for (const Diagnostic& d : file.diagnostics) {
        io.err << file.path << ":" << d.location.line << ":" << d.location.column << ": "
               << d.message << "\n";
      }
    }
    for (const std::string& note : report->notes) io.err << "note: " << note << "\n";
  }
  io.err << report->counts.errors << " error(s), " << report->counts.warnings
         << " warning(s) in " << report->files.size() << " file(s)\n";
  return report->exit_code;
}

absl::StatusOr<std::string> Prompt(const TemplateVariable& variable, CliStreams& io) {
  std::regex re(variable.validation, std::regex::ECMAScript);
  for (int attempt = 0; attempt < 3; ++attempt) {
    io.err << (variable.prompt.empty() ? variable.key : variable.prompt) << " ["
           << variable.default_value << "]: " << std::flush;
    std::string line;
    if (!std::getline(io.in, line)) return variable.default_value;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) return variable.default_value;
    if (std::regex_match(line, re)) return line;
    io.err << "  '" << line << "' does not match " << variable.validation << "\n";
  }
  return absl::InvalidArgumentError("invalid value for " + variable.key + " after 3 attempts");
}

int RunCreate(const CreateArgs& args, CliStreams& io, const Failer& fail) {
  absl::StatusOr<std::vector<TemplateDescriptor>> templates =
      AvailableTemplates(args.template_dir);
  if (!templates.ok()) return fail(templates.status());
  std::optional<std::string_view> version;
  if (!args.template_version.empty()) version = args.template_version;
  const TemplateDescriptor* descriptor =
      FindTemplate(*templates, args.template_name, version);
  if (descriptor == nullptr) {
    return fail("no template '" + args.template_name +
                (version ? "' at version " + args.template_version : std::string("'")));
  }
  std::map<std::string, std::string> answers;
  for (const std::string& var : args.vars) {
    std::size_t eq = var.find('=');
    if (eq == std::string::npos || eq == 0) {
      return fail("--var expects key=value, got '" + var + "'");
    }
    if (!answers.emplace(var.substr(0, eq), var.substr(eq + 1)).second) {
      return fail("--var " + var.substr(0, eq) + " given twice");
    }
  }
  if (io.in_is_tty && !args.no_input) {
    for (const TemplateVariable& variable : descriptor->variables) {
      if (answers.count(variable.key)) continue;
      absl::StatusOr<std::string> value = Prompt(variable, io);
      if (!value.ok()) return fail(value.status());
      answers[variable.key] = *value;
    }
  }
  absl::StatusOr<std::filesystem::path> root =
      CreateProject(*descriptor, answers, args.dest, UtcTimestamp());
  if (!root.ok()) return fail(root.status());
  if (args.format == "json") {
    absl::StatusOr<ProjectConfig> stamp = ReadProjectConfig(*root);
    json answers_json = stamp.ok() ? json(stamp->answers) : json::object();
    io.out << json{{"path", root->string()},
                   {"template", descriptor->name},
                   {"version", descriptor->version},
                   {"answers", answers_json}}
                  .dump(2)
           << "\n";
  } else {
    io.out << "Created " << descriptor->name << " " << descriptor->version
           << " project in " << root->string() << "\n";
  }
  return kExitOk;
}

json SyncDiffToJson(const SyncDiff& diff) {
  json added = json::array();
  for (const AddedFile& f : diff.added) added.push_back(f.path);
  json modified = json::array();
  for (const ModifiedFile& f : diff.modified) {
    modified.push_back({{"path", f.path}, {"diff", f.diff}});
  }
  return {{"from_version", diff.from_version},
          {"to_version", diff.to_version},
          {"added", added},
          {"removed", diff.removed},
          {"modified", modified}};
}

int RunSync(const SyncArgs& args, CliStreams& io, const Failer& fail) {
  absl::StatusOr<ProjectConfig> stamp = ReadProjectConfig(args.project);
  if (!stamp.ok()) return fail(stamp.status());
  absl::StatusOr<std::vector<TemplateDescriptor>> templates =
      AvailableTemplates(args.template_dir);
  if (!templates.ok()) return fail(templates.status());

  std::string target = args.to_version;
  if (target.empty()) {
    absl::StatusOr<std::optional<std::string>> update = CheckForUpdate(*stamp, *templates);
    if (!update.ok()) return fail(update.status());
    target = update->value_or(stamp->template_version);
  }
  const TemplateDescriptor* descriptor =
      FindTemplate(*templates, stamp->template_name, target);
  if (descriptor == nullptr) {
    return fail("no template '" + stamp->template_name + "' at version " + target);
  }
  absl::StatusOr<SyncDiff> diff = ComputeSync(args.project, *descriptor);
  if (!diff.ok()) return fail(diff.status());
  const bool json_out = args.format == "json";

  if (args.check_only || diff->empty()) {
    if (json_out) {
      json out = SyncDiffToJson(*diff);
      out["up_to_date"] = diff->empty();
      io.out << out.dump(2) << "\n";
      return kExitOk;
    }
    if (diff->empty()) {
      io.out << "Project is up to date with " << stamp->template_name << " "
             << stamp->template_version << "\n";
      return kExitOk;
    }
    io.out << "Template update " << diff->from_version << " -> " << diff->to_version << "\n";
    for (const AddedFile& f : diff->added) io.out << "A " << f.path << "\n";
    for (const std::string& p : diff->removed) io.out << "D " << p << "\n";
    for (const ModifiedFile& f : diff->modified) io.out << "M " << f.path << "\n";
    for (const ModifiedFile& f : diff->modified) io.out << "\n" << f.diff;
    return kExitOk;
  }

  absl::StatusOr<ApplyResult> result = ApplySync(args.project, *diff);
  if (!result.ok()) return fail(result.status());
  if (json_out) {
    json out = SyncDiffToJson(*diff);
    out["applied"] = result->applied;
    out["conflicted"] = result->conflicted;
    io.out << out.dump(2) << "\n";
  } else {
    for (const std::string& p : result->applied) io.out << "applied   " << p << "\n";
    for (const std::string& p : result->conflicted) io.out << "CONFLICT  " << p << "\n";
    if (result->conflicted.empty()) {
      io.out << "Synced to " << diff->to_version << "\n";
    } else {
      io.out << "Resolve the conflict markers, then run `detml sync` again; the stamp "
                "stays at "
             << diff->from_version << "\n";
    }
  }
  return result->conflicted.empty() ? kExitOk : kExitFindings;
}

int RunTemplatesList(const ListArgs& args, CliStreams& io, const Failer& fail) {
  absl::StatusOr<std::vector<TemplateDescriptor>> templates =
      AvailableTemplates(args.template_dir);
  if (!templates.ok()) return fail(templates.status());
  std::vector<const TemplateDescriptor*> sorted;
  for (const TemplateDescriptor& t : *templates) sorted.push_back(&t);
  std::stable_sort(sorted.begin(), sorted.end(), [](const auto* a, const auto* b) {
    if (a->name != b->name) return a->name < b->name;
    return *SemVer::Parse(a->version) < *SemVer::Parse(b->version);
  });
  if (args.format == "json") {
    json out = json::array();
    for (const TemplateDescriptor* t : sorted) {
      json variables = json::array();
      for (const TemplateVariable& v : t->variables) {
        variables.push_back({{"key", v.key},
                             {"prompt", v.prompt},
                             {"default", v.default_value},
                             {"validation", v.validation}});
      }
      out.push_back({{"name", t->name},
                     {"version", t->version},
                     {"description", t->description},
                     {"variables", variables}});
    }
    io.out << out.dump(2) << "\n";
  } else {
    for (const TemplateDescriptor* t : sorted) {
      io.out << t->name << "\t" << t->version << "\t" << t->description << "\n";
    }
  }
  return kExitOk;
}

int Emit(CliStreams& io, const Failer& fail, const std::string& out_path,
         const std::string& format, const std::string& content) {
  if (out_path.empty()) {
    io.out << content;
    return kExitOk;
  }
  if (absl::Status s = WriteOutput(out_path, content); !s.ok()) return fail(s);
  if (format == "json") {
    io.out << json{{"written", out_path}}.dump(2) << "\n";
  } else {
    io.err << "wrote " << out_path << "\n";
  }
  return kExitOk;
}

int RunReport(const ReportArgs& args, CliStreams& io, const Failer& fail) {
  std::unique_ptr<SystemProbe> probe = MakeLinuxProbe();
  HardwareReport report = CollectReport(*probe);
  std::string content = args.format == "html" ? RenderHardwareHtml(report)
                                              : CanonicalJson(HardwareReportToJson(report));
  return Emit(io, fail, args.out, args.format, content);
}

std::optional<std::string> GitRevision() {
  FILE* pipe = popen("git rev-parse HEAD 2>/dev/null", "r");
  if (pipe == nullptr) return std::nullopt;
  char buffer[128] = {};
  std::string out;
  while (fgets(buffer, sizeof(buffer), pipe) != nullptr) out += buffer;
  if (pclose(pipe) != 0) return std::nullopt;
  while (!out.empty() && (out.back() == '\n' || out.back() == '\r')) out.pop_back();
  if (out.empty()) return std::nullopt;
  return out;
}

int RunManifestCommand(const ManifestArgs& args, CliStreams& io, const Failer& fail) {
  absl::StatusOr<std::string> params_text = ReadFile(args.params);
  if (!params_text.ok()) return fail(params_text.status());
  absl::StatusOr<std::string> metrics_text = ReadFile(args.metrics);
  if (!metrics_text.ok()) return fail(metrics_text.status());
  absl::StatusOr<std::string> env_bytes = ReadFile(args.env);
  if (!env_bytes.ok()) return fail(env_bytes.status());
  absl::StatusOr<std::map<std::string, json>> params = ParseKeyValueFile(*params_text);
  if (!params.ok()) return fail(args.params + ": " + std::string(params.status().message()));
  absl::StatusOr<std::map<std::string, json>> metrics = ParseKeyValueFile(*metrics_text);
  if (!metrics.ok()) return fail(args.metrics + ": " + std::string(metrics.status().message()));

  HardwareReport hardware;
  if (!args.hardware.empty()) {
    absl::StatusOr<std::string> text = ReadFile(args.hardware);
    if (!text.ok()) return fail(text.status());
    json parsed = json::parse(*text, nullptr, false);
    if (parsed.is_discarded()) return fail(args.hardware + " is not valid JSON");
    absl::StatusOr<HardwareReport> report = HardwareReportFromJson(parsed);
    if (!report.ok()) return fail(args.hardware + ": " + std::string(report.status().message()));
    hardware = *std::move(report);
  } else {
    std::unique_ptr<SystemProbe> probe = MakeLinuxProbe();
    hardware = CollectReport(*probe);
  }
  std::optional<std::string> revision;
  if (!args.revision.empty()) {
    revision = args.revision;
  } else {
    revision = GitRevision();
  }
  absl::StatusOr<RunManifest> manifest =
      BuildManifest(hardware, *params, *metrics, revision, *env_bytes);
  if (!manifest.ok()) return fail(manifest.status());
  std::string content = args.format == "html" ? RenderManifestHtml(*manifest)
                                              : CanonicalJson(RunManifestToJson(*manifest));
  return Emit(io, fail, args.out, args.format, content);
}

int RunRulesList(const GlobalOptions& global, const std::string& format, CliStreams& io,
                 const Failer& fail) {
  absl::StatusOr<RuleCatalog> catalog = LoadCatalog(global);
  if (!catalog.ok()) return fail(catalog.status());
  if (format == "json") {
    json out = json::array();
    for (const auto& [id, rule] : catalog->rules()) {
      out.push_back({{"id", id},
                     {"severity", std::string(SeverityName(rule.severity))},
                     {"library", std::string(LibraryName(rule.library))},
                     {"kind", std::string(RuleKindName(rule.kind))},
                     {"message", rule.message},
                     {"paper_anchor", rule.paper_anchor}});
    }
    io.out << out.dump(2) << "\n";
    return kExitOk;
  }
  for (const auto& [id, rule] : catalog->rules()) {
    io.out << id << "\t" << SeverityName(rule.severity) << "\t" << LibraryName(rule.library)
           << "\t" << rule.message << "\t\"" << rule.paper_anchor << "\"\n";
  }
  return kExitOk;
}

bool WantsJson(const std::vector<std::string>& args) {
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (args[i] == "--format=json") return true;
    if (args[i] == "--format" && i + 1 < args.size() && args[i + 1] == "json") return true;
  }
  return false;
}

}  // namespace

int RunCli(const std::vector<std::string>& args, CliStreams io) {
  bool json_output = WantsJson(args);
  Failer fail(io, json_output);

  CLI::App app{"Determinism compliance checks for machine-learning projects.", "detml"};
  app.require_subcommand(0, 1);
  GlobalOptions global;
  app.add_flag("--version", global.version, "Print tool and rule catalog versions");
  app.add_option("--color", global.color, "Colour text output")
      ->check(CLI::IsMember({"auto", "on", "off"}));
  app.add_flag("-v,--verbose", global.verbosity, "More output on stderr (repeatable)");
  app.add_option("--rules", global.rules_path, "Rule file overlaid on the built-in rules");

  const auto text_or_json = CLI::IsMember({"text", "json"});

  LintArgs lint;
  CLI::App* lint_cmd = app.add_subcommand("lint", "Check a project or file against the rules");
  lint_cmd->fallthrough();
  lint_cmd->add_option("path", lint.path, "Project directory or single file");
  lint_cmd->add_option("--format", lint.format)->check(text_or_json);
  lint_cmd->add_flag("--strict", lint.strict, "Treat warnings as errors");
  lint_cmd->add_flag("--require-stamp", lint.require_stamp,
                     "Fail when .detml/project.cfg is missing or invalid");
  lint_cmd->add_option("--include", lint.include, "Glob of files to lint (repeatable)");
  lint_cmd->add_option("--exclude", lint.exclude, "Glob of paths to skip (repeatable)");
  lint_cmd->add_option("--env-manifest", lint.env_manifest,
                       "Environment manifest path relative to the project");
  lint_cmd->add_option("-j,--jobs", lint.jobs, "Parser threads (0 = all cores)")
      ->check(CLI::NonNegativeNumber);
  lint_cmd->add_flag("--dump-facts", lint.dump_facts,
                     "Print the extracted facts of a single file as JSON");

  CreateArgs create;
  CLI::App* create_cmd = app.add_subcommand("create", "Create a project from a template");
  create_cmd->fallthrough();
  create_cmd->add_option("--template", create.template_name, "Template name")->required();
  create_cmd->add_option("--template-version", create.template_version,
                         "Template version (default: newest)");
  create_cmd->add_option("--var", create.vars, "Answer as key=value (repeatable)");
  create_cmd->add_option("--template-dir", create.template_dir, "Additional templates");
  create_cmd->add_flag("--no-input", create.no_input, "Never prompt; use defaults");
  create_cmd->add_option("--format", create.format)->check(text_or_json);
  create_cmd->add_option("dest", create.dest, "Destination directory")->required();

  SyncArgs sync;
  CLI::App* sync_cmd = app.add_subcommand("sync", "Merge a newer template version");
  sync_cmd->fallthrough();
  sync_cmd->add_option("project", sync.project, "Project directory");
  sync_cmd->add_flag("--check-only", sync.check_only, "Show the diff without applying it");
  sync_cmd->add_option("--template-dir", sync.template_dir, "Additional templates");
  sync_cmd->add_option("--to", sync.to_version, "Target version (default: newest)");
  sync_cmd->add_option("--format", sync.format)->check(text_or_json);

  ListArgs templates_list;
  CLI::App* templates_cmd = app.add_subcommand("templates", "Template commands");
  templates_cmd->require_subcommand(1);
  templates_cmd->fallthrough();
  CLI::App* templates_list_cmd = templates_cmd->add_subcommand("list", "List templates");
  templates_list_cmd->fallthrough();
  templates_list_cmd->add_option("--template-dir", templates_list.template_dir,
                                 "Additional templates");
  templates_list_cmd->add_option("--format", templates_list.format)->check(text_or_json);

  ReportArgs report;
  CLI::App* report_cmd = app.add_subcommand("report", "Hardware report of this machine");
  report_cmd->fallthrough();
  report_cmd->add_option("--format", report.format)->check(CLI::IsMember({"json", "html"}));
  report_cmd->add_option("--out", report.out, "Write to FILE instead of stdout");

  ManifestArgs manifest;
  CLI::App* manifest_cmd = app.add_subcommand("manifest", "Run manifest for provenance");
  manifest_cmd->fallthrough();
  manifest_cmd->add_option("--params", manifest.params, "Hyperparameters (key=value)")
      ->required();
  manifest_cmd->add_option("--metrics", manifest.metrics, "Metrics (key=value)")->required();
  manifest_cmd->add_option("--env", manifest.env, "Environment manifest file")->required();
  manifest_cmd->add_option("--revision", manifest.revision,
                           "Source revision (default: git rev-parse HEAD)");
  manifest_cmd->add_option("--hardware", manifest.hardware,
                           "Hardware report JSON to embed instead of probing");
  manifest_cmd->add_option("--out", manifest.out, "Write to FILE instead of stdout");
  manifest_cmd->add_option("--format", manifest.format)->check(CLI::IsMember({"json", "html"}));

  std::string rules_format = "text";
  CLI::App* rules_cmd = app.add_subcommand("rules", "Rule catalog commands");
  rules_cmd->require_subcommand(1);
  rules_cmd->fallthrough();
  CLI::App* rules_list_cmd = rules_cmd->add_subcommand("list", "List the active rules");
  rules_list_cmd->fallthrough();
  rules_list_cmd->add_option("--format", rules_format)->check(text_or_json);

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    io.out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    io.out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    fail(e.what());
    io.err << app.help();
    return kExitUsage;
  }
  global.verbosity = std::min(global.verbosity, 3);

  if (global.version) {
    io.out << "detml " << kToolVersion << "\nrule catalog " << kCatalogVersion << "\n";
    return kExitOk;
  }
  if (lint_cmd->parsed()) return RunLint(global, lint, io, fail);
  if (create_cmd->parsed()) return RunCreate(create, io, fail);
  if (sync_cmd->parsed()) return RunSync(sync, io, fail);
  if (templates_list_cmd->parsed()) return RunTemplatesList(templates_list, io, fail);
  if (report_cmd->parsed()) return RunReport(report, io, fail);
  if (manifest_cmd->parsed()) return RunManifestCommand(manifest, io, fail);
  if (rules_list_cmd->parsed()) return RunRulesList(global, rules_format, io, fail);

  if (json_output) io.out << json{{"error", "no subcommand given"}}.dump(2) << "\n";
  io.err << app.help();
  return kExitUsage;
}

}  // namespace detml
