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

#include "detml/rules.h"

#include <algorithm>
#include <array>
#include <string>
#include <utility>

namespace detml {
namespace {

template <typename Enum, std::size_t N>
std::optional<Enum> FromName(const std::array<std::pair<Enum, std::string_view>, N>& table,
                             std::string_view name) {
  for (const auto& [value, text] : table) {
    if (text == name) return value;
  }
  return std::nullopt;
}

template <typename Enum, std::size_t N>
std::string_view ToName(const std::array<std::pair<Enum, std::string_view>, N>& table,
                        Enum value) {
  for (const auto& [v, text] : table) {
    if (v == value) return text;
  }
  return "";
}

constexpr std::array<std::pair<Library, std::string_view>, 4> kLibraries = {{
    {Library::kPytorch, "pytorch"},
    {Library::kTensorflow, "tensorflow"},
    {Library::kXgboost, "xgboost"},
    {Library::kGeneral, "general"},
}};

constexpr std::array<std::pair<RuleKind, std::string_view>, 6> kRuleKinds = {{
    {RuleKind::kRequiredCall, "RequiredCall"},
    {RuleKind::kRequiredAssign, "RequiredAssign"},
    {RuleKind::kRequiredEnv, "RequiredEnv"},
    {RuleKind::kForbiddenCall, "ForbiddenCall"},
    {RuleKind::kRequiredKeywordArg, "RequiredKeywordArg"},
    {RuleKind::kAdvisoryPattern, "AdvisoryPattern"},
}};

constexpr std::array<std::pair<Severity, std::string_view>, 2> kSeverities = {{
    {Severity::kError, "error"},
    {Severity::kWarning, "warning"},
}};

constexpr std::array<std::pair<MatchMode, std::string_view>, 4> kMatchModes = {{
    {MatchMode::kExact, "exact"},
    {MatchMode::kPrefix, "prefix"},
    {MatchMode::kSuffix, "suffix"},
    {MatchMode::kGlob, "glob"},
}};

bool IsBoundary(char c) { return c == '.' || c == '#'; }

bool GlobMatch(std::string_view pattern, std::string_view text) {
  std::size_t p = 0, t = 0;
  std::size_t star = std::string_view::npos, resume = 0;
  while (t < text.size()) {
    if (p < pattern.size() && (pattern[p] == '?' || pattern[p] == text[t])) {
      ++p;
      ++t;
    } else if (p < pattern.size() && pattern[p] == '*') {
      star = p++;
      resume = t;
    } else if (star != std::string_view::npos) {
      p = star + 1;
      t = ++resume;
    } else {
      return false;
    }
  }
  while (p < pattern.size() && pattern[p] == '*') ++p;
  return p == pattern.size();
}

}  // namespace

std::string_view LibraryName(Library library) { return ToName(kLibraries, library); }
std::optional<Library> LibraryFromName(std::string_view name) {
  return FromName(kLibraries, name);
}
std::string_view RuleKindName(RuleKind kind) { return ToName(kRuleKinds, kind); }
std::optional<RuleKind> RuleKindFromName(std::string_view name) {
  return FromName(kRuleKinds, name);
}
std::string_view SeverityName(Severity severity) { return ToName(kSeverities, severity); }
std::optional<Severity> SeverityFromName(std::string_view name) {
  return FromName(kSeverities, name);
}
std::string_view MatchModeName(MatchMode mode) { return ToName(kMatchModes, mode); }
std::optional<MatchMode> MatchModeFromName(std::string_view name) {
  return FromName(kMatchModes, name);
}

bool IsRequirement(RuleKind kind) {
  return kind == RuleKind::kRequiredCall || kind == RuleKind::kRequiredAssign ||
         kind == RuleKind::kRequiredEnv || kind == RuleKind::kRequiredKeywordArg;
}

bool RuleKindAccepts(RuleKind rule_kind, FactKind fact_kind) {
  switch (rule_kind) {
    case RuleKind::kRequiredCall:
    case RuleKind::kForbiddenCall:
      return fact_kind == FactKind::kCall;
    case RuleKind::kRequiredAssign:
      return fact_kind == FactKind::kAssign || fact_kind == FactKind::kKeywordArg;
    case RuleKind::kRequiredEnv:
      return fact_kind == FactKind::kEnvSet;
    case RuleKind::kRequiredKeywordArg:
      return fact_kind == FactKind::kKeywordArg;
    case RuleKind::kAdvisoryPattern:
      return fact_kind == FactKind::kCall || fact_kind == FactKind::kKeywordArg ||
             fact_kind == FactKind::kAssign;
  }
  return false;
}

bool PathPattern::Matches(std::string_view path) const {
  switch (mode) {
    case MatchMode::kExact:
      return path == text;
    case MatchMode::kPrefix:
      return path.size() >= text.size() && path.substr(0, text.size()) == text &&
             (path.size() == text.size() || IsBoundary(path[text.size()]));
    case MatchMode::kSuffix:
      return path.size() >= text.size() &&
             path.substr(path.size() - text.size()) == text &&
             (path.size() == text.size() ||
              IsBoundary(path[path.size() - text.size() - 1]));
    case MatchMode::kGlob:
      return GlobMatch(text, path);
  }
  return false;
}

bool Matcher::MatchesPath(std::string_view path) const {
  return std::any_of(patterns.begin(), patterns.end(),
                     [path](const PathPattern& p) { return p.Matches(path); });
}

bool Matcher::Matches(const Fact& fact) const {
  if (!MatchesPath(fact.canonical_path)) return false;
  if (!required_value) return true;
  const auto* literal = std::get_if<Literal>(&fact.value);
  return literal != nullptr && LiteralEquals(*literal, *required_value);
}

bool Activation::IsActive(const std::set<std::string>& imported_libraries) const {
  if (kind == ActivationKind::kAlways) return true;
  return std::any_of(modules.begin(), modules.end(), [&](const std::string& m) {
    return imported_libraries.count(m) > 0;
  });
}

std::vector<std::string> DefaultModules(Library library) {
  switch (library) {
    case Library::kPytorch: return {"torch"};
    case Library::kTensorflow: return {"tensorflow"};
    case Library::kXgboost: return {"xgboost"};
    case Library::kGeneral: return {};
  }
  return {};
}

const Rule* RuleCatalog::Lookup(std::string_view id) const {
  auto it = rules_.find(std::string(id));
  return it == rules_.end() ? nullptr : &it->second;
}

void RuleCatalog::Put(Rule rule) {
  std::string id = rule.id;
  rules_.insert_or_assign(std::move(id), std::move(rule));
}

}  // namespace detml
