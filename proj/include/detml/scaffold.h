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

#ifndef DETML_SCAFFOLD_H_
#define DETML_SCAFFOLD_H_

#include <compare>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"

namespace detml {

// Semantic version (major.minor.patch[-prerelease][+build]). Build metadata
// is kept for printing but ignored when comparing.
struct SemVer {
  int major = 0;
  int minor = 0;
  int patch = 0;
  std::string prerelease;
  std::string build;

  static std::optional<SemVer> Parse(std::string_view text);
  std::string ToString() const;

  friend std::strong_ordering operator<=>(const SemVer& a, const SemVer& b);
  friend bool operator==(const SemVer& a, const SemVer& b) {
    return (a <=> b) == std::strong_ordering::equal;
  }
};

struct TemplateVariable {
  std::string key;
  std::string prompt;
  std::string default_value;
  std::string validation;  // ECMAScript regex the whole answer must match
};

struct TemplateDescriptor {
  std::string name;
  std::string version;
  std::string description;
  std::vector<TemplateVariable> variables;  // in prompt order
  // Relative path (may itself contain placeholders) -> template text.
  std::map<std::string, std::string> files;
};

// Parses a template from its files: "template.cfg" plus "files/<path>"
// entries, keyed by '/'-separated relative path. Fails when a placeholder
// has no variable or the config is malformed.
absl::StatusOr<TemplateDescriptor> ParseTemplate(
    const std::map<std::string, std::string>& raw_files);

// Loads every immediate subdirectory of `dir` that contains template.cfg.
absl::StatusOr<std::vector<TemplateDescriptor>> LoadTemplateDir(
    const std::filesystem::path& dir);

// Templates compiled into the binary.
const std::vector<TemplateDescriptor>& BuiltinTemplates();

// Highest-version descriptor named `name`, or nullptr.
const TemplateDescriptor* FindTemplate(
    const std::vector<TemplateDescriptor>& templates, std::string_view name,
    std::optional<std::string_view> version = std::nullopt);

// Replaces every `{{ key }}` slot (key matching [a-z_][a-z0-9_]*). Text that
// does not form a valid slot is copied verbatim. Unknown keys are an error.
absl::StatusOr<std::string> RenderText(
    std::string_view text, const std::map<std::string, std::string>& values);

// Keys of all valid slots in `text`, in order of first appearance.
std::vector<std::string> PlaceholderKeys(std::string_view text);

// Fills defaults for missing answers and validates every answer. Unknown
// answer keys are an error.
absl::StatusOr<std::map<std::string, std::string>> ResolveAnswers(
    const TemplateDescriptor& descriptor,
    const std::map<std::string, std::string>& answers);

// Renders all files (paths and contents). `answers` must be resolved.
absl::StatusOr<std::map<std::string, std::string>> RenderTemplate(
    const TemplateDescriptor& descriptor,
    const std::map<std::string, std::string>& answers);

// The stamp written into generated projects.
struct ProjectConfig {
  std::string template_name;
  std::string template_version;
  std::map<std::string, std::string> answers;
  std::string created;  // ISO-8601 UTC

  friend bool operator==(const ProjectConfig&, const ProjectConfig&) = default;
};

inline constexpr std::string_view kStampPath = ".detml/project.cfg";
inline constexpr std::string_view kBaselineDir = ".detml/baseline";

std::string SerializeProjectConfig(const ProjectConfig& config);
absl::StatusOr<ProjectConfig> ParseProjectConfig(std::string_view text);
absl::StatusOr<ProjectConfig> ReadProjectConfig(
    const std::filesystem::path& project_root);

// Current UTC time as "YYYY-MM-DDTHH:MM:SSZ".
std::string UtcTimestamp();

// Renders `descriptor` into `dest` (absent or empty), writes the stamp and
// the baseline snapshot. Files are staged in a sibling directory and moved
// into place at the end.
absl::StatusOr<std::filesystem::path> CreateProject(
    const TemplateDescriptor& descriptor,
    const std::map<std::string, std::string>& answers,
    const std::filesystem::path& dest, std::string_view created);

// Greatest version of the stamp's template strictly newer than the stamp.
absl::StatusOr<std::optional<std::string>> CheckForUpdate(
    const ProjectConfig& stamp,
    const std::vector<TemplateDescriptor>& available);

struct AddedFile {
  std::string path;
  std::string content;
};

struct ModifiedFile {
  std::string path;
  std::string diff;  // unified diff, baseline -> new rendering
};

struct SyncDiff {
  std::string from_version;
  std::string to_version;
  // The stamp's answers resolved against the new template (new variables
  // take their defaults); written to the stamp when the sync completes.
  std::map<std::string, std::string> answers;
  std::vector<AddedFile> added;
  std::vector<std::string> removed;
  std::vector<ModifiedFile> modified;

  bool empty() const {
    return added.empty() && removed.empty() && modified.empty();
  }
};

// Renders `new_descriptor` with the stamp's answers and diffs it against the
// stored baseline. Working files are not read.
absl::StatusOr<SyncDiff> ComputeSync(const std::filesystem::path& project_root,
                                     const TemplateDescriptor& new_descriptor);

struct ApplyResult {
  std::vector<std::string> applied;
  std::vector<std::string> conflicted;
};

// Applies `diff` to the working tree using the baseline as merge ancestor.
// The stamp version and baseline advance only when nothing conflicted.
absl::StatusOr<ApplyResult> ApplySync(const std::filesystem::path& project_root,
                                      const SyncDiff& diff);

}  // namespace detml

#endif  // DETML_SCAFFOLD_H_
