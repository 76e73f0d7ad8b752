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

#ifndef DETML_RULES_H_
#define DETML_RULES_H_

#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "absl/status/statusor.h"
#include "detml/facts.h"

namespace detml {

enum class Library { kPytorch, kTensorflow, kXgboost, kGeneral };
enum class RuleKind {
  kRequiredCall,
  kRequiredAssign,
  kRequiredEnv,
  kForbiddenCall,
  kRequiredKeywordArg,
  kAdvisoryPattern,
};
enum class Severity { kError, kWarning };
enum class MatchMode { kExact, kPrefix, kSuffix, kGlob };
enum class ActivationKind { kAlways, kLibraryImported };

std::string_view LibraryName(Library library);
std::optional<Library> LibraryFromName(std::string_view name);
std::string_view RuleKindName(RuleKind kind);
std::optional<RuleKind> RuleKindFromName(std::string_view name);
std::string_view SeverityName(Severity severity);
std::optional<Severity> SeverityFromName(std::string_view name);
std::string_view MatchModeName(MatchMode mode);
std::optional<MatchMode> MatchModeFromName(std::string_view name);

// Required* rules are satisfied by presence; the others fire per match.
bool IsRequirement(RuleKind kind);

// Whether facts of `fact_kind` are candidates for rules of `rule_kind`.
bool RuleKindAccepts(RuleKind rule_kind, FactKind fact_kind);

// A canonical-path pattern. Prefix and suffix matching respect path segment
// boundaries ('.' and '#'): prefix "torch.nn.MaxPool3d" matches
// "torch.nn.MaxPool3d" and "torch.nn.MaxPool3d.forward" but not
// "torch.nn.MaxPool3dX". Glob patterns use '*' (any run) and '?'.
struct PathPattern {
  MatchMode mode = MatchMode::kExact;
  std::string text;

  bool Matches(std::string_view path) const;
  friend bool operator==(const PathPattern&, const PathPattern&) = default;
};

struct Matcher {
  std::vector<PathPattern> patterns;  // any may match
  std::optional<Literal> required_value;

  bool MatchesPath(std::string_view path) const;
  // Path match plus, when a value is required, literal equality.
  bool Matches(const Fact& fact) const;
  friend bool operator==(const Matcher&, const Matcher&) = default;
};

struct Activation {
  ActivationKind kind = ActivationKind::kAlways;
  // kLibraryImported: active when any of these top-level modules is imported.
  std::vector<std::string> modules;

  bool IsActive(const std::set<std::string>& imported_libraries) const;
  friend bool operator==(const Activation&, const Activation&) = default;
};

// Top-level modules a library's rules activate on by default.
std::vector<std::string> DefaultModules(Library library);

struct Rule {
  std::string id;
  Library library = Library::kGeneral;
  RuleKind kind = RuleKind::kRequiredCall;
  Matcher matcher;
  Severity severity = Severity::kError;
  std::string message;
  std::string fix_hint;
  Activation activation;
  std::string paper_anchor;

  friend bool operator==(const Rule&, const Rule&) = default;
};

class RuleCatalog {
 public:
  RuleCatalog() = default;
  explicit RuleCatalog(std::string version) : version_(std::move(version)) {}

  const std::string& version() const { return version_; }
  void set_version(std::string version) { version_ = std::move(version); }

  // Rules keyed and ordered by id.
  const std::map<std::string, Rule>& rules() const { return rules_; }
  std::size_t size() const { return rules_.size(); }

  // nullptr when no rule has this id.
  const Rule* Lookup(std::string_view id) const;

  // Inserts or replaces the rule with the same id.
  void Put(Rule rule);

  friend bool operator==(const RuleCatalog&, const RuleCatalog&) = default;

 private:
  std::string version_;
  std::map<std::string, Rule> rules_;
};

inline constexpr std::string_view kCatalogVersion = "1.0.0";

// The determinism rules shipped with the tool.
const RuleCatalog& BuiltinRules();

// Ids of every built-in rule, sorted.
std::vector<std::string> BuiltinRuleIds();

// Parses a rule file (format in docs/rule-file-format.md) and overlays it on
// `base`. Rules whose id exists in `base` replace it, inheriting keys the
// document leaves out. Errors name the offending line.
absl::StatusOr<RuleCatalog> OverlayRules(const RuleCatalog& base,
                                         std::string_view document);

// OverlayRules(BuiltinRules(), document).
absl::StatusOr<RuleCatalog> LoadRules(std::string_view document);

}  // namespace detml

#endif  // DETML_RULES_H_
