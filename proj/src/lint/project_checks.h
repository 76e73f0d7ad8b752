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

#ifndef DETML_LINT_PROJECT_CHECKS_H_
#define DETML_LINT_PROJECT_CHECKS_H_

#include <filesystem>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "detml/lint.h"

namespace detml {

struct ProjectContext {
  const std::filesystem::path& root;
  const LintOptions& options;
  const std::set<std::string>& imported_libraries;  // union over linted files
};

// Ids of the project-level checks, sorted.
const std::vector<std::string>& ProjectCheckIds();

// Anchor quote of a project check, or "" for an unknown id.
std::string_view ProjectCheckAnchor(std::string_view id);

// Container file, environment manifest pins, CUBLAS workspace setting and
// (with options.require_stamp) the template stamp.
void RunProjectChecks(const ProjectContext& context, std::vector<Violation>& out,
                      std::vector<std::string>& notes);

// Exposed for tests.
struct DependencyLine {
  std::string spec;  // as written, comments and quotes removed
  int line = 0;
};
std::vector<DependencyLine> CondaDependencies(std::string_view yaml);
std::vector<DependencyLine> RequirementsDependencies(std::string_view text);

enum class PinKind { kPinned, kUnpinned, kComplex };
PinKind ClassifyDependency(std::string_view spec);

// Value the Dockerfile assigns to `name` through ENV, or "" when unset.
std::string DockerfileEnv(std::string_view dockerfile, std::string_view name);

}  // namespace detml

#endif  // DETML_LINT_PROJECT_CHECKS_H_
