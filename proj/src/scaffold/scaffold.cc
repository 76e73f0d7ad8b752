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

#include "detml/scaffold.h"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <ctime>
#include <fstream>
#include <random>
#include <regex>
#include <set>
#include <sstream>
#include <system_error>

#include "absl/status/status.h"
#include "detml/diff.h"
#include "scaffold/embedded_templates.h"
#include "scaffold/ini.h"

namespace detml {
namespace fs = std::filesystem;
namespace {

bool IsKeyStart(char c) { return (c >= 'a' && c <= 'z') || c == '_'; }
bool IsKeyChar(char c) { return IsKeyStart(c) || (c >= '0' && c <= '9'); }

// Finds the next `{{ key }}` slot at or after `from`. On success sets
// [begin, end) to the slot's extent and `key` to its name.
bool NextSlot(std::string_view text, std::size_t from, std::size_t* begin,
              std::size_t* end, std::string_view* key) {
  while (true) {
    std::size_t open = text.find("{{", from);
    if (open == std::string_view::npos) return false;
    std::size_t i = open + 2;
    while (i < text.size() && text[i] == ' ') ++i;
    std::size_t key_begin = i;
    if (i < text.size() && IsKeyStart(text[i])) {
      while (i < text.size() && IsKeyChar(text[i])) ++i;
      std::size_t key_end = i;
      while (i < text.size() && text[i] == ' ') ++i;
      if (text.compare(i, 2, "}}") == 0) {
        *begin = open;
        *end = i + 2;
        *key = text.substr(key_begin, key_end - key_begin);
        return true;
      }
    }
    from = open + 1;
  }
}

absl::StatusOr<std::string> ReadFile(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return absl::NotFoundError("cannot read " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  if (in.bad()) return absl::DataLossError("error reading " + path.string());
  return buffer.str();
}

absl::Status WriteFile(const fs::path& path, std::string_view content) {
  std::error_code ec;
  fs::create_directories(path.parent_path(), ec);
  if (ec) return absl::InternalError("cannot create " + path.parent_path().string() +
                                     ": " + ec.message());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
  out.close();
  if (!out) return absl::InternalError("cannot write " + path.string());
  return absl::OkStatus();
}

// Regular files under `root`, keyed by '/'-separated relative path.
absl::StatusOr<std::map<std::string, std::string>> ReadTree(const fs::path& root) {
  std::map<std::string, std::string> files;
  std::error_code ec;
  for (fs::recursive_directory_iterator it(root, ec), end; !ec && it != end;
       it.increment(ec)) {
    if (!it->is_regular_file()) continue;
    absl::StatusOr<std::string> content = ReadFile(it->path());
    if (!content.ok()) return content.status();
    files.emplace(it->path().lexically_relative(root).generic_string(),
                  *std::move(content));
  }
  if (ec) return absl::InternalError("cannot list " + root.string() + ": " + ec.message());
  return files;
}

bool IsSafeRelativePath(std::string_view path) {
  if (path.empty() || path.front() == '/') return false;
  for (const auto& part : fs::path(std::string(path))) {
    if (part == ".." || part == ".") return false;
  }
  return true;
}

std::string UniqueSuffix() {
  std::random_device rd;
  std::ostringstream out;
  out << std::hex << rd() << rd();
  return out.str();
}

// Writes `files` (relative path -> content) into a fresh staging directory
// next to `root` and returns its path.
absl::StatusOr<fs::path> Stage(const fs::path& root,
                               const std::map<std::string, std::string>& files) {
  fs::path parent = root.parent_path().empty() ? fs::path(".") : root.parent_path();
  fs::path staging = parent / ("." + root.filename().string() + ".detml-staging-" +
                               UniqueSuffix());
  for (const auto& [rel, content] : files) {
    if (absl::Status s = WriteFile(staging / rel, content); !s.ok()) {
      std::error_code ignored;
      fs::remove_all(staging, ignored);
      return s;
    }
  }
  return staging;
}

std::string BaselinePath(std::string_view rel) {
  return std::string(kBaselineDir) + "/" + std::string(rel);
}

}  // namespace

// ---------------------------------------------------------------------------
// SemVer

std::optional<SemVer> SemVer::Parse(std::string_view text) {
  SemVer v;
  std::size_t plus = text.find('+');
  if (plus != std::string_view::npos) {
    v.build = std::string(text.substr(plus + 1));
    if (v.build.empty()) return std::nullopt;
    text = text.substr(0, plus);
  }
  std::size_t dash = text.find('-');
  if (dash != std::string_view::npos) {
    v.prerelease = std::string(text.substr(dash + 1));
    if (v.prerelease.empty()) return std::nullopt;
    text = text.substr(0, dash);
  }
  int* parts[] = {&v.major, &v.minor, &v.patch};
  for (int i = 0; i < 3; ++i) {
    std::size_t dot = i < 2 ? text.find('.') : text.size();
    if (dot == std::string_view::npos) return std::nullopt;
    std::string_view number = text.substr(0, dot);
    if (number.empty() || (number.size() > 1 && number.front() == '0')) return std::nullopt;
    auto [ptr, ec] = std::from_chars(number.data(), number.data() + number.size(), *parts[i]);
    if (ec != std::errc() || ptr != number.data() + number.size()) return std::nullopt;
    text = i < 2 ? text.substr(dot + 1) : std::string_view();
  }
  return v;
}

std::string SemVer::ToString() const {
  std::string s = std::to_string(major) + "." + std::to_string(minor) + "." +
                  std::to_string(patch);
  if (!prerelease.empty()) s += "-" + prerelease;
  if (!build.empty()) s += "+" + build;
  return s;
}

std::strong_ordering operator<=>(const SemVer& a, const SemVer& b) {
  if (auto c = std::tie(a.major, a.minor, a.patch) <=> std::tie(b.major, b.minor, b.patch);
      c != 0) {
    return c;
  }
  // A release sorts above any of its pre-releases.
  if (a.prerelease.empty() || b.prerelease.empty()) {
    return a.prerelease.empty() <=> b.prerelease.empty();
  }
  auto split = [](const std::string& s) {
    std::vector<std::string> ids;
    std::stringstream in(s);
    for (std::string id; std::getline(in, id, '.');) ids.push_back(id);
    return ids;
  };
  auto numeric = [](const std::string& s) {
    return !s.empty() && std::all_of(s.begin(), s.end(), ::isdigit);
  };
  std::vector<std::string> x = split(a.prerelease);
  std::vector<std::string> y = split(b.prerelease);
  for (std::size_t i = 0; i < std::min(x.size(), y.size()); ++i) {
    bool xn = numeric(x[i]);
    bool yn = numeric(y[i]);
    if (xn && yn) {
      if (x[i].size() != y[i].size()) return x[i].size() <=> y[i].size();
      if (auto c = x[i] <=> y[i]; c != 0) return c;
    } else if (xn != yn) {
      return xn ? std::strong_ordering::less : std::strong_ordering::greater;
    } else if (auto c = x[i] <=> y[i]; c != 0) {
      return c;
    }
  }
  return x.size() <=> y.size();
}

// ---------------------------------------------------------------------------
// Templates

std::vector<std::string> PlaceholderKeys(std::string_view text) {
  std::vector<std::string> keys;
  std::size_t pos = 0, begin, end;
  std::string_view key;
  while (NextSlot(text, pos, &begin, &end, &key)) {
    if (std::find(keys.begin(), keys.end(), key) == keys.end()) keys.emplace_back(key);
    pos = end;
  }
  return keys;
}

absl::StatusOr<std::string> RenderText(std::string_view text,
                                       const std::map<std::string, std::string>& values) {
  std::string out;
  std::size_t pos = 0, begin, end;
  std::string_view key;
  while (NextSlot(text, pos, &begin, &end, &key)) {
    auto it = values.find(std::string(key));
    if (it == values.end()) {
      return absl::InvalidArgumentError("no value for placeholder '" + std::string(key) + "'");
    }
    out.append(text.substr(pos, begin - pos));
    out += it->second;
    pos = end;
  }
  out.append(text.substr(pos));
  return out;
}

absl::StatusOr<TemplateDescriptor> ParseTemplate(
    const std::map<std::string, std::string>& raw_files) {
  auto cfg = raw_files.find("template.cfg");
  if (cfg == raw_files.end()) return absl::InvalidArgumentError("template.cfg missing");
  absl::StatusOr<std::vector<ini::Section>> sections = ini::Parse(cfg->second);
  if (!sections.ok()) {
    return absl::InvalidArgumentError("template.cfg " + std::string(sections.status().message()));
  }
  TemplateDescriptor descriptor;
  std::set<std::string> declared;
  for (const ini::Section& section : *sections) {
    auto error = [&](const std::string& message) {
      return absl::InvalidArgumentError("template.cfg line " + std::to_string(section.line) +
                                        ": " + message);
    };
    if (section.name == "template") {
      for (const auto& [key, value] : section.entries) {
        if (key == "name") descriptor.name = value;
        else if (key == "version") descriptor.version = value;
        else if (key == "description") descriptor.description = value;
        else return error("unknown key '" + key + "' in [template]");
      }
      continue;
    }
    if (section.name.rfind("variable ", 0) != 0) {
      return error("unknown section [" + section.name + "]");
    }
    TemplateVariable variable;
    variable.key = section.name.substr(9);
    if (variable.key.empty() || !IsKeyStart(variable.key.front()) ||
        !std::all_of(variable.key.begin(), variable.key.end(), IsKeyChar)) {
      return error("invalid variable key '" + variable.key + "'");
    }
    if (!declared.insert(variable.key).second) {
      return error("variable '" + variable.key + "' declared twice");
    }
    for (const auto& [key, value] : section.entries) {
      if (key == "prompt") variable.prompt = value;
      else if (key == "default") variable.default_value = value;
      else if (key == "validation") variable.validation = value;
      else return error("unknown key '" + key + "' in [" + section.name + "]");
    }
    if (variable.validation.empty()) variable.validation = ".*";
    try {
      std::regex re(variable.validation, std::regex::ECMAScript);
      if (!std::regex_match(variable.default_value, re)) {
        return error("default of '" + variable.key + "' fails its own validation");
      }
    } catch (const std::regex_error&) {
      return error("invalid validation regex for '" + variable.key + "'");
    }
    descriptor.variables.push_back(std::move(variable));
  }
  if (descriptor.name.empty() || descriptor.version.empty()) {
    return absl::InvalidArgumentError("template.cfg must set name and version in [template]");
  }
  if (!SemVer::Parse(descriptor.version)) {
    return absl::InvalidArgumentError("template version '" + descriptor.version +
                                      "' is not a semantic version");
  }
  constexpr std::string_view kFilesPrefix = "files/";
  for (const auto& [path, content] : raw_files) {
    if (path == "template.cfg") continue;
    if (path.rfind(kFilesPrefix, 0) != 0) {
      return absl::InvalidArgumentError("unexpected template entry '" + path +
                                        "' (content belongs under files/)");
    }
    std::string rel = path.substr(kFilesPrefix.size());
    for (std::string_view text : {std::string_view(rel), std::string_view(content)}) {
      for (const std::string& key : PlaceholderKeys(text)) {
        if (declared.count(key) == 0) {
          return absl::InvalidArgumentError("placeholder '" + key + "' in " + rel +
                                            " has no [variable " + key + "] section");
        }
      }
    }
    descriptor.files.emplace(std::move(rel), content);
  }
  return descriptor;
}

absl::StatusOr<std::vector<TemplateDescriptor>> LoadTemplateDir(const fs::path& dir) {
  std::error_code ec;
  if (!fs::is_directory(dir, ec)) {
    return absl::NotFoundError("template directory " + dir.string() + " does not exist");
  }
  std::vector<fs::path> candidates;
  for (const auto& entry : fs::directory_iterator(dir, ec)) {
    if (entry.is_directory() && fs::exists(entry.path() / "template.cfg")) {
      candidates.push_back(entry.path());
    }
  }
  if (ec) return absl::InternalError("cannot list " + dir.string() + ": " + ec.message());
  std::sort(candidates.begin(), candidates.end());
  std::vector<TemplateDescriptor> templates;
  for (const fs::path& candidate : candidates) {
    absl::StatusOr<std::map<std::string, std::string>> files = ReadTree(candidate);
    if (!files.ok()) return files.status();
    absl::StatusOr<TemplateDescriptor> descriptor = ParseTemplate(*files);
    if (!descriptor.ok()) {
      return absl::InvalidArgumentError(candidate.string() + ": " +
                                        std::string(descriptor.status().message()));
    }
    templates.push_back(*std::move(descriptor));
  }
  return templates;
}

const std::vector<TemplateDescriptor>& BuiltinTemplates() {
  static const std::vector<TemplateDescriptor>* templates = [] {
    std::map<std::string, std::map<std::string, std::string>> grouped;
    for (std::size_t i = 0; i < kEmbeddedTemplateFileCount; ++i) {
      std::string_view path = kEmbeddedTemplateFiles[i].path;
      std::size_t slash = path.find('/');
      grouped[std::string(path.substr(0, slash))][std::string(path.substr(slash + 1))] =
          std::string(kEmbeddedTemplateFiles[i].content);
    }
    auto* out = new std::vector<TemplateDescriptor>;
    for (const auto& [dir, files] : grouped) {
      absl::StatusOr<TemplateDescriptor> descriptor = ParseTemplate(files);
      // Embedded templates are validated by the test suite; a broken one is a
      // build defect, not a runtime condition.
      if (descriptor.ok()) out->push_back(*std::move(descriptor));
    }
    return out;
  }();
  return *templates;
}

const TemplateDescriptor* FindTemplate(const std::vector<TemplateDescriptor>& templates,
                                       std::string_view name,
                                       std::optional<std::string_view> version) {
  const TemplateDescriptor* best = nullptr;
  for (const TemplateDescriptor& t : templates) {
    if (t.name != name) continue;
    std::optional<SemVer> v = SemVer::Parse(t.version);
    if (version) {
      std::optional<SemVer> wanted = SemVer::Parse(*version);
      if (wanted && v && *wanted == *v) return &t;
      continue;
    }
    if (best == nullptr || *SemVer::Parse(best->version) < *v) best = &t;
  }
  return best;
}

absl::StatusOr<std::map<std::string, std::string>> ResolveAnswers(
    const TemplateDescriptor& descriptor,
    const std::map<std::string, std::string>& answers) {
  std::map<std::string, std::string> resolved;
  for (const TemplateVariable& variable : descriptor.variables) {
    auto it = answers.find(variable.key);
    std::string value = it == answers.end() ? variable.default_value : it->second;
    if (!std::regex_match(value, std::regex(variable.validation, std::regex::ECMAScript))) {
      return absl::InvalidArgumentError("invalid value for " + variable.key + ": '" + value +
                                        "' does not match " + variable.validation);
    }
    resolved.emplace(variable.key, std::move(value));
  }
  for (const auto& [key, value] : answers) {
    if (resolved.count(key) == 0) {
      return absl::InvalidArgumentError("template " + descriptor.name +
                                        " has no variable '" + key + "'");
    }
  }
  return resolved;
}

absl::StatusOr<std::map<std::string, std::string>> RenderTemplate(
    const TemplateDescriptor& descriptor,
    const std::map<std::string, std::string>& answers) {
  std::map<std::string, std::string> rendered;
  for (const auto& [path, text] : descriptor.files) {
    absl::StatusOr<std::string> rel = RenderText(path, answers);
    if (!rel.ok()) return rel.status();
    if (!IsSafeRelativePath(*rel) || rel->rfind(".detml/", 0) == 0) {
      return absl::InvalidArgumentError("template path '" + *rel + "' is not allowed");
    }
    absl::StatusOr<std::string> content = RenderText(text, answers);
    if (!content.ok()) return content.status();
    if (!rendered.emplace(*rel, *std::move(content)).second) {
      return absl::InvalidArgumentError("two template files render to '" + *rel + "'");
    }
  }
  return rendered;
}

// ---------------------------------------------------------------------------
// Stamp

std::string SerializeProjectConfig(const ProjectConfig& config) {
  std::string out = "[template]\n";
  out += "name = " + ini::QuoteIfNeeded(config.template_name) + "\n";
  out += "version = " + ini::QuoteIfNeeded(config.template_version) + "\n";
  out += "\n[answers]\n";
  for (const auto& [key, value] : config.answers) {
    out += key + " = " + ini::QuoteIfNeeded(value) + "\n";
  }
  out += "\n[meta]\n";
  out += "created = " + ini::QuoteIfNeeded(config.created) + "\n";
  return out;
}

absl::StatusOr<ProjectConfig> ParseProjectConfig(std::string_view text) {
  absl::StatusOr<std::vector<ini::Section>> sections = ini::Parse(text);
  if (!sections.ok()) return sections.status();
  ProjectConfig config;
  std::set<std::string> seen;
  for (const ini::Section& section : *sections) {
    if (!seen.insert(section.name).second) {
      return absl::InvalidArgumentError("section [" + section.name + "] repeated");
    }
    for (const auto& [key, value] : section.entries) {
      if (section.name == "answers") {
        config.answers[key] = value;
      } else if (section.name == "template" && key == "name") {
        config.template_name = value;
      } else if (section.name == "template" && key == "version") {
        config.template_version = value;
      } else if (section.name == "meta" && key == "created") {
        config.created = value;
      } else {
        return absl::InvalidArgumentError("unexpected key '" + key + "' in [" +
                                          section.name + "]");
      }
    }
  }
  if (config.template_name.empty()) {
    return absl::InvalidArgumentError("stamp has no [template] name");
  }
  if (!SemVer::Parse(config.template_version)) {
    return absl::InvalidArgumentError("stamp version '" + config.template_version +
                                      "' is not a semantic version");
  }
  return config;
}

absl::StatusOr<ProjectConfig> ReadProjectConfig(const fs::path& project_root) {
  absl::StatusOr<std::string> text = ReadFile(project_root / kStampPath);
  if (!text.ok()) return text.status();
  absl::StatusOr<ProjectConfig> config = ParseProjectConfig(*text);
  if (!config.ok()) {
    return absl::InvalidArgumentError((project_root / kStampPath).string() + ": " +
                                      std::string(config.status().message()));
  }
  return config;
}

std::string UtcTimestamp() {
  std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buffer[32];
  std::strftime(buffer, sizeof(buffer), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buffer;
}

// ---------------------------------------------------------------------------
// Create and sync

absl::StatusOr<fs::path> CreateProject(const TemplateDescriptor& descriptor,
                                       const std::map<std::string, std::string>& answers,
                                       const fs::path& dest, std::string_view created) {
  std::error_code ec;
  bool exists = fs::exists(dest, ec);
  if (exists && (!fs::is_directory(dest, ec) || !fs::is_empty(dest, ec))) {
    return absl::AlreadyExistsError("destination " + dest.string() +
                                    " exists and is not empty");
  }
  absl::StatusOr<std::map<std::string, std::string>> resolved =
      ResolveAnswers(descriptor, answers);
  if (!resolved.ok()) return resolved.status();
  absl::StatusOr<std::map<std::string, std::string>> rendered =
      RenderTemplate(descriptor, *resolved);
  if (!rendered.ok()) return rendered.status();

  std::map<std::string, std::string> tree = *rendered;
  for (const auto& [rel, content] : *rendered) tree.emplace(BaselinePath(rel), content);
  tree.emplace(std::string(kStampPath),
               SerializeProjectConfig({descriptor.name, descriptor.version, *resolved,
                                       std::string(created)}));

  fs::path root = dest.lexically_normal();
  if (root.filename().empty()) root = root.parent_path();
  absl::StatusOr<fs::path> staging = Stage(root, tree);
  if (!staging.ok()) return staging.status();
  if (exists) fs::remove(root, ec);
  if (!ec) fs::create_directories(root.parent_path().empty() ? "." : root.parent_path(), ec);
  if (!ec) fs::rename(*staging, root, ec);
  if (ec) {
    std::error_code ignored;
    fs::remove_all(*staging, ignored);
    return absl::InternalError("cannot move project into " + root.string() + ": " +
                               ec.message());
  }
  return root;
}

absl::StatusOr<std::optional<std::string>> CheckForUpdate(
    const ProjectConfig& stamp, const std::vector<TemplateDescriptor>& available) {
  std::optional<SemVer> current = SemVer::Parse(stamp.template_version);
  if (!current) {
    return absl::InvalidArgumentError("stamp version '" + stamp.template_version +
                                      "' is not a semantic version");
  }
  const TemplateDescriptor* newest = FindTemplate(available, stamp.template_name);
  if (newest == nullptr) {
    return absl::NotFoundError("unknown template '" + stamp.template_name + "'");
  }
  if (*SemVer::Parse(newest->version) > *current) return newest->version;
  return std::optional<std::string>();
}

absl::StatusOr<SyncDiff> ComputeSync(const fs::path& project_root,
                                     const TemplateDescriptor& new_descriptor) {
  absl::StatusOr<ProjectConfig> stamp = ReadProjectConfig(project_root);
  if (!stamp.ok()) return stamp.status();
  if (stamp->template_name != new_descriptor.name) {
    return absl::FailedPreconditionError("project uses template '" + stamp->template_name +
                                         "', not '" + new_descriptor.name + "'");
  }
  fs::path baseline_dir = project_root / kBaselineDir;
  std::error_code ec;
  if (!fs::is_directory(baseline_dir, ec)) {
    return absl::FailedPreconditionError(
        "baseline snapshot " + baseline_dir.string() +
        " is missing; re-initialize the project with `detml create`");
  }
  SyncDiff diff;
  diff.from_version = stamp->template_version;
  diff.to_version = new_descriptor.version;

  std::map<std::string, std::string> carried;
  for (const TemplateVariable& variable : new_descriptor.variables) {
    if (auto it = stamp->answers.find(variable.key); it != stamp->answers.end()) {
      carried.insert(*it);
    }
  }
  absl::StatusOr<std::map<std::string, std::string>> answers =
      ResolveAnswers(new_descriptor, carried);
  if (!answers.ok()) return answers.status();
  diff.answers = *answers;
  if (*SemVer::Parse(diff.from_version) == *SemVer::Parse(diff.to_version)) {
    diff.answers = stamp->answers;
    return diff;
  }

  absl::StatusOr<std::map<std::string, std::string>> baseline = ReadTree(baseline_dir);
  if (!baseline.ok()) return baseline.status();
  absl::StatusOr<std::map<std::string, std::string>> rendered =
      RenderTemplate(new_descriptor, *answers);
  if (!rendered.ok()) return rendered.status();

  for (const auto& [rel, content] : *rendered) {
    auto it = baseline->find(rel);
    if (it == baseline->end()) {
      diff.added.push_back({rel, content});
    } else if (it->second != content) {
      diff.modified.push_back({rel, UnifiedDiff(it->second, content, rel)});
    }
  }
  for (const auto& [rel, content] : *baseline) {
    if (rendered->count(rel) == 0) diff.removed.push_back(rel);
  }
  return diff;
}

absl::StatusOr<ApplyResult> ApplySync(const fs::path& project_root, const SyncDiff& diff) {
  ApplyResult result;
  if (diff.empty()) return result;
  absl::StatusOr<ProjectConfig> stamp = ReadProjectConfig(project_root);
  if (!stamp.ok()) return stamp.status();
  if (stamp->template_version != diff.from_version) {
    return absl::FailedPreconditionError("diff was computed from version " +
                                         diff.from_version + " but the project is at " +
                                         stamp->template_version);
  }
  fs::path baseline_dir = project_root / kBaselineDir;
  absl::StatusOr<std::map<std::string, std::string>> baseline = ReadTree(baseline_dir);
  if (!baseline.ok()) return baseline.status();

  const std::string theirs_label = "template " + diff.to_version;
  std::map<std::string, std::string> writes;    // relative to project root
  std::vector<std::string> deletes;             // relative to project root
  std::map<std::string, std::string> new_baseline = *baseline;

  auto read_working = [&](const std::string& rel) -> std::optional<std::string> {
    absl::StatusOr<std::string> text = ReadFile(project_root / rel);
    if (!text.ok()) return std::nullopt;
    return *std::move(text);
  };

  for (const AddedFile& file : diff.added) {
    new_baseline[file.path] = file.content;
    std::optional<std::string> working = read_working(file.path);
    if (!working || *working == file.content) {
      if (!working) writes[file.path] = file.content;
      result.applied.push_back(file.path);
      continue;
    }
    MergeResult merged = Merge3("", *working, file.content, "working", theirs_label);
    writes[file.path] = merged.text;
    (merged.conflicted ? result.conflicted : result.applied).push_back(file.path);
  }
  for (const std::string& rel : diff.removed) {
    auto base = baseline->find(rel);
    new_baseline.erase(rel);
    std::optional<std::string> working = read_working(rel);
    if (working && base != baseline->end() && *working != base->second) {
      result.conflicted.push_back(rel);
      continue;
    }
    if (working) deletes.push_back(rel);
    result.applied.push_back(rel);
  }
  for (const ModifiedFile& file : diff.modified) {
    auto base = baseline->find(file.path);
    if (base == baseline->end()) {
      return absl::FailedPreconditionError("baseline has no " + file.path);
    }
    absl::StatusOr<std::string> updated = ApplyPatch(base->second, file.diff);
    if (!updated.ok()) {
      return absl::FailedPreconditionError("diff for " + file.path +
                                           " does not apply to the baseline: " +
                                           std::string(updated.status().message()));
    }
    new_baseline[file.path] = *updated;
    std::optional<std::string> working = read_working(file.path);
    if (!working) {
      // The user deleted a file the template changed; leave it deleted.
      result.conflicted.push_back(file.path);
      continue;
    }
    MergeResult merged = Merge3(base->second, *working, *updated, "working", theirs_label);
    if (merged.text != *working) writes[file.path] = merged.text;
    (merged.conflicted ? result.conflicted : result.applied).push_back(file.path);
  }

  if (result.conflicted.empty()) {
    ProjectConfig updated = *stamp;
    updated.template_version = diff.to_version;
    updated.answers = diff.answers.empty() ? stamp->answers : diff.answers;
    writes[std::string(kStampPath)] = SerializeProjectConfig(updated);
    for (const auto& [rel, content] : new_baseline) writes[BaselinePath(rel)] = content;
    for (const auto& [rel, content] : *baseline) {
      if (new_baseline.count(rel) == 0) deletes.push_back(BaselinePath(rel));
    }
  }

  // Every new file is written beside its target first; targets are only
  // replaced once all temporaries exist.
  const std::string suffix = ".detml-tmp-" + UniqueSuffix();
  std::vector<std::string> written;
  for (const auto& [rel, content] : writes) {
    if (absl::Status s = WriteFile(project_root / (rel + suffix), content); !s.ok()) {
      std::error_code ignored;
      for (const std::string& done : written) fs::remove(project_root / (done + suffix), ignored);
      fs::remove(project_root / (rel + suffix), ignored);
      return s;
    }
    written.push_back(rel);
  }
  std::error_code ec;
  for (const std::string& rel : written) {
    fs::rename(project_root / (rel + suffix), project_root / rel, ec);
    if (ec) return absl::InternalError("cannot replace " + rel + ": " + ec.message());
  }
  for (const std::string& rel : deletes) {
    fs::remove(project_root / rel, ec);
    if (ec) return absl::InternalError("cannot remove " + rel + ": " + ec.message());
    // Drop directories the removal left empty, stopping at the root.
    for (fs::path dir = fs::path(rel).parent_path(); !dir.empty(); dir = dir.parent_path()) {
      if (!fs::is_empty(project_root / dir, ec) || ec) break;
      fs::remove(project_root / dir, ec);
    }
    ec.clear();
  }
  std::sort(result.applied.begin(), result.applied.end());
  std::sort(result.conflicted.begin(), result.conflicted.end());
  return result;
}

}  // namespace detml
