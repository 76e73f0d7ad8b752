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

#include "lint/project_checks.h"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <optional>
#include <sstream>

#include "detml/scaffold.h"

namespace detml {
namespace fs = std::filesystem;
namespace {

constexpr std::string_view kContainerfile = "project-containerfile";
constexpr std::string_view kEnvPinned = "project-env-pinned";
constexpr std::string_view kCublas = "project-cublas-workspace";
constexpr std::string_view kStamp = "project-config-stamp";

constexpr std::string_view kCublasValue = ":4096:8";

struct CheckInfo {
  std::string_view id;
  std::string_view anchor;
  std::string_view fix_hint;
};

constexpr CheckInfo kChecks[] = {
    {kContainerfile, "The complete runtime environment must be containerized",
     "Add a Dockerfile at the project root that builds the full runtime environment."},
    {kEnvPinned, "isolated runtime environments based on Conda and Docker",
     "Pin every dependency to an exact version (name=version in environment.yml, "
     "name==version in requirements.txt)."},
    {kCublas, "defines the CUBLAS_WORKSPACE_CONFIG=:4096:8 environment variable",
     "Add `ENV CUBLAS_WORKSPACE_CONFIG=:4096:8` to the Dockerfile."},
    {kStamp, "All mlf-core templates are versioned",
     "Create the project with `detml create`, or restore .detml/project.cfg."},
};

const CheckInfo& Info(std::string_view id) {
  for (const CheckInfo& info : kChecks) {
    if (info.id == id) return info;
  }
  return kChecks[0];
}

Violation Make(std::string_view id, Severity severity, std::string message,
               std::optional<Location> location = std::nullopt) {
  const CheckInfo& info = Info(id);
  return {std::string(id), severity, Scope::kProject, std::move(location), std::move(message),
          std::string(info.fix_hint), std::string(info.anchor)};
}

std::optional<std::string> ReadText(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return std::nullopt;
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

std::string_view Trim(std::string_view s) {
  std::size_t b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  std::size_t e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::string StripComment(std::string_view line) {
  // A '#' starts a comment at line start or after whitespace.
  for (std::size_t i = 0; i < line.size(); ++i) {
    if (line[i] == '#' && (i == 0 || line[i - 1] == ' ' || line[i - 1] == '\t')) {
      return std::string(line.substr(0, i));
    }
  }
  return std::string(line);
}

std::string Unquote(std::string_view s) {
  if (s.size() >= 2 && (s.front() == '"' || s.front() == '\'') && s.back() == s.front()) {
    return std::string(s.substr(1, s.size() - 2));
  }
  return std::string(s);
}

std::vector<std::string_view> Lines(std::string_view text) {
  std::vector<std::string_view> lines;
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t nl = text.find('\n', pos);
    if (nl == std::string_view::npos) nl = text.size();
    lines.push_back(text.substr(pos, nl - pos));
    pos = nl + 1;
  }
  return lines;
}

bool IsNameChar(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-' || c == '.';
}

bool IsVersionChar(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '.' || c == '+' ||
         c == '!' || c == '-';
}

std::string DependencyName(std::string_view spec) {
  std::size_t end = 0;
  while (end < spec.size() && IsNameChar(spec[end])) ++end;
  return std::string(spec.substr(0, end));
}

void CheckContainerfile(const ProjectContext& context, std::optional<fs::path>& dockerfile,
                        std::vector<Violation>& out) {
  for (const char* name : {"Dockerfile", "Containerfile"}) {
    std::error_code ec;
    if (fs::is_regular_file(context.root / name, ec)) {
      dockerfile = context.root / name;
      return;
    }
  }
  out.push_back(Make(kContainerfile, Severity::kError,
                     "No Dockerfile or Containerfile at the project root; the runtime "
                     "environment is not containerised."));
}

void CheckEnvManifest(const ProjectContext& context, std::vector<Violation>& out,
                      std::vector<std::string>& notes) {
  std::vector<std::string> candidates;
  if (context.options.env_manifest) {
    candidates.push_back(*context.options.env_manifest);
  } else {
    candidates = {"environment.yml", "environment.yaml", "requirements.txt"};
  }
  for (const std::string& rel : candidates) {
    std::optional<std::string> text = ReadText(context.root / rel);
    if (!text) continue;
    bool is_requirements = rel.size() >= 4 && rel.compare(rel.size() - 4, 4, ".txt") == 0;
    std::vector<DependencyLine> deps =
        is_requirements ? RequirementsDependencies(*text) : CondaDependencies(*text);
    for (const DependencyLine& dep : deps) {
      std::string where = rel + ":" + std::to_string(dep.line);
      switch (ClassifyDependency(dep.spec)) {
        case PinKind::kPinned:
          break;
        case PinKind::kUnpinned:
          out.push_back(Make(kEnvPinned, Severity::kWarning,
                             "Dependency '" + DependencyName(dep.spec) +
                                 "' is not pinned to an exact version.",
                             Location{rel, dep.line, 1}));
          break;
        case PinKind::kComplex:
          notes.push_back(where + ": dependency spec '" + dep.spec +
                          "' not checked for pinning (only name=version and "
                          "name==version are parsed)");
          break;
      }
    }
    return;
  }
  std::string wanted = candidates.size() == 1 ? candidates.front()
                                              : "environment.yml or requirements.txt";
  out.push_back(Make(kEnvPinned, Severity::kError,
                     "No environment manifest (" + wanted + ") found; dependencies are not "
                     "recorded."));
}

void CheckCublas(const ProjectContext& context, const std::optional<fs::path>& dockerfile,
                 std::vector<Violation>& out) {
  if (!dockerfile || context.imported_libraries.count("torch") == 0) return;
  std::optional<std::string> text = ReadText(*dockerfile);
  std::string value = text ? DockerfileEnv(*text, "CUBLAS_WORKSPACE_CONFIG") : "";
  if (value == kCublasValue) return;
  std::string name = dockerfile->filename().string();
  out.push_back(Make(kCublas, Severity::kWarning,
                     value.empty()
                         ? name + " does not set CUBLAS_WORKSPACE_CONFIG=:4096:8; cuBLAS "
                                  "may pick non-deterministic workspaces for torch."
                         : name + " sets CUBLAS_WORKSPACE_CONFIG=" + value +
                               " instead of :4096:8.",
                     Location{dockerfile->lexically_relative(context.root).generic_string(), 1,
                              1}));
}

void CheckStamp(const ProjectContext& context, std::vector<Violation>& out) {
  absl::StatusOr<ProjectConfig> stamp = ReadProjectConfig(context.root);
  if (stamp.ok()) return;
  std::error_code ec;
  bool missing = !fs::exists(context.root / kStampPath, ec);
  out.push_back(Make(kStamp, Severity::kError,
                     missing ? std::string(kStampPath) + " is missing."
                             : std::string(kStampPath) + " cannot be parsed: " +
                                   std::string(stamp.status().message())));
}

}  // namespace

const std::vector<std::string>& ProjectCheckIds() {
  static const std::vector<std::string> ids = [] {
    std::vector<std::string> v;
    for (const CheckInfo& info : kChecks) v.emplace_back(info.id);
    std::sort(v.begin(), v.end());
    return v;
  }();
  return ids;
}

std::string_view ProjectCheckAnchor(std::string_view id) {
  for (const CheckInfo& info : kChecks) {
    if (info.id == id) return info.anchor;
  }
  return {};
}

void RunProjectChecks(const ProjectContext& context, std::vector<Violation>& out,
                      std::vector<std::string>& notes) {
  std::optional<fs::path> dockerfile;
  CheckContainerfile(context, dockerfile, out);
  CheckEnvManifest(context, out, notes);
  CheckCublas(context, dockerfile, out);
  if (context.options.require_stamp) CheckStamp(context, out);
}

std::vector<DependencyLine> CondaDependencies(std::string_view yaml) {
  std::vector<DependencyLine> deps;
  bool in_dependencies = false;
  int line_no = 0;
  for (std::string_view raw : Lines(yaml)) {
    ++line_no;
    std::string line = StripComment(raw);
    std::string_view trimmed = Trim(line);
    if (trimmed.empty()) continue;
    bool top_level = line.front() != ' ' && line.front() != '\t' && line.front() != '-';
    if (top_level) {
      in_dependencies = trimmed.rfind("dependencies:", 0) == 0;
      continue;
    }
    if (!in_dependencies || trimmed.front() != '-') continue;
    std::string item = Unquote(Trim(trimmed.substr(1)));
    // "- pip:" opens a nested list whose items are collected on their own.
    if (item.empty() || item.back() == ':') continue;
    deps.push_back({item, line_no});
  }
  return deps;
}

std::vector<DependencyLine> RequirementsDependencies(std::string_view text) {
  std::vector<DependencyLine> deps;
  int line_no = 0;
  for (std::string_view raw : Lines(text)) {
    ++line_no;
    std::string line = StripComment(raw);
    std::string_view trimmed = Trim(line);
    if (!trimmed.empty()) deps.push_back({std::string(trimmed), line_no});
  }
  return deps;
}

PinKind ClassifyDependency(std::string_view spec) {
  std::string name = DependencyName(spec);
  if (name.empty()) return PinKind::kComplex;
  std::string_view rest = Trim(spec.substr(name.size()));
  if (rest.empty()) return PinKind::kUnpinned;
  std::size_t op = rest.rfind("==", 0) == 0 ? 2 : (rest.front() == '=' ? 1 : 0);
  if (op == 0) {
    // Ranges and exclusions are plain specs that just do not pin.
    return rest.find_first_of("<>~!") == 0 ? PinKind::kUnpinned : PinKind::kComplex;
  }
  std::string_view version = Trim(rest.substr(op));
  // Conda also allows name=version=build; the build string is an exact pin too.
  if (op == 1) {
    std::size_t build = version.find('=');
    if (build != std::string_view::npos) {
      std::string_view build_id = version.substr(build + 1);
      if (build_id.empty() || !std::all_of(build_id.begin(), build_id.end(), IsVersionChar)) {
        return PinKind::kComplex;
      }
      version = version.substr(0, build);
    }
  }
  if (version.empty() || !std::all_of(version.begin(), version.end(), IsVersionChar)) {
    return PinKind::kComplex;
  }
  return PinKind::kPinned;
}

std::string DockerfileEnv(std::string_view dockerfile, std::string_view name) {
  // Join continuation lines into logical instructions.
  std::vector<std::string> instructions;
  std::string current;
  for (std::string_view raw : Lines(dockerfile)) {
    std::string_view line = Trim(raw);
    if (current.empty() && (line.empty() || line.front() == '#')) continue;
    if (!line.empty() && line.back() == '\\') {
      current += std::string(line.substr(0, line.size() - 1)) + " ";
      continue;
    }
    current += std::string(line);
    instructions.push_back(std::move(current));
    current.clear();
  }
  if (!current.empty()) instructions.push_back(std::move(current));

  std::string value;
  for (const std::string& instruction : instructions) {
    std::istringstream in(instruction);
    std::string keyword;
    in >> keyword;
    std::transform(keyword.begin(), keyword.end(), keyword.begin(), ::toupper);
    if (keyword != "ENV") continue;
    std::vector<std::string> words;
    for (std::string word; in >> word;) words.push_back(word);
    if (words.empty()) continue;
    if (words.front().find('=') == std::string::npos) {
      // Legacy form: ENV NAME value
      if (words.front() == name && words.size() >= 2) value = Unquote(words[1]);
      continue;
    }
    for (const std::string& word : words) {
      std::size_t eq = word.find('=');
      if (eq != std::string::npos && std::string_view(word).substr(0, eq) == name) {
        value = Unquote(std::string_view(word).substr(eq + 1));
      }
    }
  }
  return value;
}

}  // namespace detml
