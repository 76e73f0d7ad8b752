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

#ifndef DETML_LINT_H_
#define DETML_LINT_H_

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "absl/status/statusor.h"
#include "detml/facts.h"
#include "detml/rules.h"
#include "detml/version.h"
#include "nlohmann/json.hpp"

namespace detml {

enum class Scope { kFile, kProject };
std::string_view ScopeName(Scope scope);

struct Violation {
  std::string rule_id;
  Severity severity = Severity::kError;
  Scope scope = Scope::kFile;
  // Set for ForbiddenCall/AdvisoryPattern hits and for project checks tied
  // to a manifest line; never set for missing requirements.
  std::optional<Location> location;
  std::string message;
  std::string fix_hint;
  std::string paper_anchor;

  friend bool operator==(const Violation&, const Violation&) = default;
};

// Per-file rule evaluation. Required* rules fire when no fact in this file
// satisfies them; Forbidden/Advisory rules fire once per matching fact.
std::vector<Violation> LintFacts(const FactSet& facts, const RuleCatalog& catalog);

struct FileResult {
  std::string path;  // relative to the project root, '/'-separated
  std::vector<Violation> violations;
  std::vector<Diagnostic> diagnostics;
};

struct LintCounts {
  int errors = 0;
  int warnings = 0;
};

struct LintReport {
  std::string tool_version{kToolVersion};
  std::string catalog_version;
  std::vector<FileResult> files;
  std::vector<Violation> project_violations;
  LintCounts counts;
  int exit_code = 0;
  std::vector<std::string> notes;
};

struct LintOptions {
  std::vector<std::string> include = {"**/*.py"};
  std::vector<std::string> exclude;
  bool strict = false;
  bool require_stamp = false;
  // Environment manifest relative to the root. When unset the first of
  // environment.yml, environment.yaml and requirements.txt is used.
  std::optional<std::string> env_manifest;
  // Worker threads for parsing; 0 picks the hardware concurrency.
  int jobs = 0;
};

// Glob over '/'-separated relative paths: '*' and '?' stay within a segment,
// '**' spans segments. Patterns without '/' match the last segment only.
bool PathGlobMatch(std::string_view pattern, std::string_view path);

// Lints every included source file below `root` plus the project checks.
// Required* rules are evaluated once over the union of all files' facts and
// reported as project violations.
absl::StatusOr<LintReport> LintProject(const std::filesystem::path& root,
                                       const RuleCatalog& catalog,
                                       const LintOptions& options = {});

// Sorts, applies --strict, and recomputes counts and exit code.
void FinalizeReport(LintReport& report, bool strict);

nlohmann::json LintReportToJson(const LintReport& report);
// One line per violation: "SEVERITY rule-id path[:line] message".
std::string LintReportToText(const LintReport& report);

}  // namespace detml

#endif  // DETML_LINT_H_
