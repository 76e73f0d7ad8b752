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

#include "detml/lint.h"

#include <algorithm>
#include <atomic>
#include <fstream>
#include <map>
#include <sstream>
#include <thread>
#include <tuple>

#include "absl/status/status.h"
#include "detml/scaffold.h"
#include "lint/project_checks.h"

namespace detml {
namespace fs = std::filesystem;
namespace {

Violation MakeViolation(const Rule& rule, Scope scope, std::optional<Location> location) {
  return {rule.id, rule.severity, scope, std::move(location),
          rule.message, rule.fix_hint, rule.paper_anchor};
}

bool Satisfies(const Rule& rule, const Fact& fact) {
  return RuleKindAccepts(rule.kind, fact.kind) && rule.matcher.Matches(fact);
}

// Forbidden/Advisory hits of `facts` for rules active on this file.
void AddPatternHits(const FactSet& facts, const RuleCatalog& catalog,
                    std::vector<Violation>& out) {
  for (const auto& [id, rule] : catalog.rules()) {
    if (IsRequirement(rule.kind) || !rule.activation.IsActive(facts.imported_libraries)) {
      continue;
    }
    for (const Fact& fact : facts.facts) {
      if (Satisfies(rule, fact)) out.push_back(MakeViolation(rule, Scope::kFile, fact.location));
    }
  }
}

// Missing requirements over a set of files sharing one import set.
void AddMissingRequirements(const std::vector<const FactSet*>& files,
                            const std::set<std::string>& imported,
                            const RuleCatalog& catalog, Scope scope,
                            std::vector<Violation>& out) {
  for (const auto& [id, rule] : catalog.rules()) {
    if (!IsRequirement(rule.kind) || !rule.activation.IsActive(imported)) continue;
    bool satisfied = std::any_of(files.begin(), files.end(), [&](const FactSet* fs) {
      return std::any_of(fs->facts.begin(), fs->facts.end(),
                         [&](const Fact& fact) { return Satisfies(rule, fact); });
    });
    if (!satisfied) out.push_back(MakeViolation(rule, scope, std::nullopt));
  }
}

bool ViolationLess(const Violation& a, const Violation& b) {
  auto key = [](const Violation& v) {
    return std::make_tuple(std::cref(v.rule_id), v.location ? v.location->file : std::string(),
                           v.location ? v.location->line : 0,
                           v.location ? v.location->column : 0, std::cref(v.message));
  };
  return key(a) < key(b);
}

bool IsIgnoredDirName(const std::string& name) {
  return name.empty() || name.front() == '.' || name == "__pycache__" || name == "venv" ||
         name == "node_modules" || name == "site-packages";
}

bool MatchSegment(std::string_view pattern, std::string_view text) {
  // Iterative wildcard match with single-star backtracking.
  std::size_t p = 0, t = 0, star = std::string_view::npos, mark = 0;
  while (t < text.size()) {
    if (p < pattern.size() && (pattern[p] == '?' || pattern[p] == text[t])) {
      ++p, ++t;
    } else if (p < pattern.size() && pattern[p] == '*') {
      star = p++;
      mark = t;
    } else if (star != std::string_view::npos) {
      p = star + 1;
      t = ++mark;
    } else {
      return false;
    }
  }
  while (p < pattern.size() && pattern[p] == '*') ++p;
  return p == pattern.size();
}

std::vector<std::string_view> Segments(std::string_view path) {
  std::vector<std::string_view> parts;
  std::size_t pos = 0;
  while (pos <= path.size()) {
    std::size_t slash = path.find('/', pos);
    if (slash == std::string_view::npos) slash = path.size();
    if (slash > pos) parts.push_back(path.substr(pos, slash - pos));
    pos = slash + 1;
  }
  return parts;
}

bool MatchSegments(const std::vector<std::string_view>& pattern, std::size_t pi,
                   const std::vector<std::string_view>& path, std::size_t ti) {
  if (pi == pattern.size()) return ti == path.size();
  if (pattern[pi] == "**") {
    for (std::size_t skip = ti; skip <= path.size(); ++skip) {
      if (MatchSegments(pattern, pi + 1, path, skip)) return true;
    }
    return false;
  }
  return ti < path.size() && MatchSegment(pattern[pi], path[ti]) &&
         MatchSegments(pattern, pi + 1, path, ti + 1);
}

bool AnyGlobMatches(const std::vector<std::string>& globs, std::string_view rel) {
  return std::any_of(globs.begin(), globs.end(),
                     [&](const std::string& g) { return PathGlobMatch(g, rel); });
}

// Source files under `root` selected by the include/exclude globs, sorted.
absl::StatusOr<std::vector<std::string>> CollectFiles(const fs::path& root,
                                                      const LintOptions& options) {
  std::vector<std::string> files;
  std::error_code ec;
  fs::recursive_directory_iterator it(root, fs::directory_options::none, ec), end;
  if (ec) return absl::NotFoundError("cannot read " + root.string() + ": " + ec.message());
  for (; it != end; it.increment(ec)) {
    if (ec) return absl::InternalError("cannot list " + root.string() + ": " + ec.message());
    std::string rel = it->path().lexically_relative(root).generic_string();
    std::error_code type_ec;
    if (it->is_directory(type_ec)) {
      if (IsIgnoredDirName(it->path().filename().string()) ||
          AnyGlobMatches(options.exclude, rel)) {
        it.disable_recursion_pending();
      }
      continue;
    }
    if (!it->is_regular_file(type_ec)) continue;
    if (AnyGlobMatches(options.include, rel) && !AnyGlobMatches(options.exclude, rel)) {
      files.push_back(std::move(rel));
    }
  }
  std::sort(files.begin(), files.end());
  return files;
}

struct ParsedFile {
  FactSet facts;
  std::vector<Diagnostic> diagnostics;
  bool ok = false;
};

ParsedFile ParseFile(const fs::path& path, const std::string& rel) {
  ParsedFile parsed;
  std::ifstream in(path, std::ios::binary);
  std::ostringstream buffer;
  if (in) buffer << in.rdbuf();
  if (!in || in.bad()) {
    parsed.diagnostics.push_back({"cannot read file", {rel, 1, 1}});
    return parsed;
  }
  absl::StatusOr<FactSet> facts = ParseSource(buffer.str(), rel);
  if (!facts.ok()) {
    parsed.diagnostics.push_back(
        {"file skipped: " + std::string(facts.status().message()), {rel, 1, 1}});
    return parsed;
  }
  parsed.facts = *std::move(facts);
  parsed.diagnostics = parsed.facts.parse_diagnostics;
  parsed.ok = true;
  return parsed;
}

std::vector<ParsedFile> ParseAll(const fs::path& root, const std::vector<std::string>& rels,
                                 int jobs) {
  std::vector<ParsedFile> results(rels.size());
  unsigned workers = jobs > 0 ? static_cast<unsigned>(jobs)
                              : std::max(1u, std::thread::hardware_concurrency());
  workers = std::min<unsigned>(workers, std::max<std::size_t>(1, rels.size()));
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t i; (i = next.fetch_add(1)) < rels.size();) {
      results[i] = ParseFile(root / rels[i], rels[i]);
    }
  };
  if (workers <= 1) {
    work();
    return results;
  }
  std::vector<std::thread> threads;
  for (unsigned w = 0; w < workers; ++w) threads.emplace_back(work);
  for (std::thread& t : threads) t.join();
  return results;
}

nlohmann::json LocationToJson(const Location& location) {
  return {{"file", location.file}, {"line", location.line}, {"column", location.column}};
}

nlohmann::json ViolationToJson(const Violation& v) {
  return {{"rule_id", v.rule_id},
          {"severity", std::string(SeverityName(v.severity))},
          {"scope", std::string(ScopeName(v.scope))},
          {"location", v.location ? LocationToJson(*v.location) : nlohmann::json(nullptr)},
          {"message", v.message},
          {"fix_hint", v.fix_hint},
          {"paper_anchor", v.paper_anchor}};
}

std::string ViolationLine(const Violation& v, std::string_view default_path) {
  std::string where = v.location ? v.location->file : std::string(default_path);
  if (v.location) {
    where += ":" + std::to_string(v.location->line);
  }
  std::string severity(SeverityName(v.severity));
  std::transform(severity.begin(), severity.end(), severity.begin(), ::toupper);
  return severity + " " + v.rule_id + " " + where + " " + v.message + "\n";
}

}  // namespace

std::string_view ScopeName(Scope scope) {
  return scope == Scope::kFile ? "file" : "project";
}

bool PathGlobMatch(std::string_view pattern, std::string_view path) {
  if (pattern.find('/') == std::string_view::npos) {
    std::size_t slash = path.rfind('/');
    return MatchSegment(pattern,
                        slash == std::string_view::npos ? path : path.substr(slash + 1));
  }
  return MatchSegments(Segments(pattern), 0, Segments(path), 0);
}

std::vector<Violation> LintFacts(const FactSet& facts, const RuleCatalog& catalog) {
  std::vector<Violation> out;
  AddMissingRequirements({&facts}, facts.imported_libraries, catalog, Scope::kFile, out);
  AddPatternHits(facts, catalog, out);
  std::sort(out.begin(), out.end(), ViolationLess);
  return out;
}

absl::StatusOr<LintReport> LintProject(const fs::path& root, const RuleCatalog& catalog,
                                       const LintOptions& options) {
  LintReport report;
  report.catalog_version = catalog.version();
  std::error_code ec;
  if (!fs::exists(root, ec)) {
    return absl::NotFoundError("path " + root.string() + " does not exist");
  }

  if (fs::is_regular_file(root, ec)) {
    // A single file: per-file semantics, no project checks.
    std::string name = root.filename().string();
    ParsedFile parsed = ParseFile(root, name);
    FileResult result{name, {}, parsed.diagnostics};
    if (parsed.ok) result.violations = LintFacts(parsed.facts, catalog);
    report.files.push_back(std::move(result));
    report.notes.push_back("single file linted; project checks skipped");
    FinalizeReport(report, options.strict);
    return report;
  }

  absl::StatusOr<std::vector<std::string>> rels = CollectFiles(root, options);
  if (!rels.ok()) return rels.status();
  std::vector<ParsedFile> parsed = ParseAll(root, *rels, options.jobs);

  // Reduction in path order: independent of which worker finished first.
  std::vector<const FactSet*> all;
  std::set<std::string> imported;
  for (std::size_t i = 0; i < parsed.size(); ++i) {
    FileResult result{(*rels)[i], {}, parsed[i].diagnostics};
    if (parsed[i].ok) {
      AddPatternHits(parsed[i].facts, catalog, result.violations);
      all.push_back(&parsed[i].facts);
      imported.insert(parsed[i].facts.imported_libraries.begin(),
                      parsed[i].facts.imported_libraries.end());
    }
    report.files.push_back(std::move(result));
  }
  AddMissingRequirements(all, imported, catalog, Scope::kProject, report.project_violations);

  ProjectContext context{root, options, imported};
  RunProjectChecks(context, report.project_violations, report.notes);
  FinalizeReport(report, options.strict);
  return report;
}

void FinalizeReport(LintReport& report, bool strict) {
  std::sort(report.files.begin(), report.files.end(),
            [](const FileResult& a, const FileResult& b) { return a.path < b.path; });
  report.counts = {};
  auto tally = [&](std::vector<Violation>& violations) {
    for (Violation& v : violations) {
      if (strict) v.severity = Severity::kError;
      (v.severity == Severity::kError ? report.counts.errors : report.counts.warnings)++;
    }
    std::sort(violations.begin(), violations.end(), ViolationLess);
  };
  for (FileResult& file : report.files) {
    tally(file.violations);
    std::stable_sort(file.diagnostics.begin(), file.diagnostics.end(),
                     [](const Diagnostic& a, const Diagnostic& b) {
                       return std::tie(a.location.line, a.location.column) <
                              std::tie(b.location.line, b.location.column);
                     });
  }
  tally(report.project_violations);
  std::sort(report.notes.begin(), report.notes.end());
  report.exit_code = report.counts.errors > 0 ? 1 : 0;
}

nlohmann::json LintReportToJson(const LintReport& report) {
  nlohmann::json files = nlohmann::json::array();
  for (const FileResult& file : report.files) {
    nlohmann::json violations = nlohmann::json::array();
    for (const Violation& v : file.violations) violations.push_back(ViolationToJson(v));
    nlohmann::json diagnostics = nlohmann::json::array();
    for (const Diagnostic& d : file.diagnostics) {
      diagnostics.push_back(
          {{"message", d.message}, {"line", d.location.line}, {"column", d.location.column}});
    }
    files.push_back(
        {{"path", file.path}, {"violations", violations}, {"diagnostics", diagnostics}});
  }
  nlohmann::json project = nlohmann::json::array();
  for (const Violation& v : report.project_violations) project.push_back(ViolationToJson(v));
  return {{"tool_version", report.tool_version},
          {"catalog_version", report.catalog_version},
          {"files", files},
          {"project_violations", project},
          {"counts", {{"errors", report.counts.errors}, {"warnings", report.counts.warnings}}},
          {"exit_code", report.exit_code},
          {"notes", report.notes}};
}

std::string LintReportToText(const LintReport& report) {
  std::string out;
  for (const FileResult& file : report.files) {
    for (const Violation& v : file.violations) out += ViolationLine(v, file.path);
  }
  for (const Violation& v : report.project_violations) out += ViolationLine(v, ".");
  return out;
}

}  // namespace detml
