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

#ifndef DETML_FACTS_H_
#define DETML_FACTS_H_

#include <cstdint>
#include <filesystem>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "absl/status/statusor.h"
#include "nlohmann/json.hpp"

namespace detml {

struct Location {
  std::string file;
  int line = 1;    // 1-based
  int column = 1;  // 1-based, in bytes

  friend bool operator==(const Location&, const Location&) = default;
};

// Python literal values the analyzer can evaluate statically.
struct NoneLiteral {
  friend bool operator==(NoneLiteral, NoneLiteral) = default;
};
using Literal = std::variant<NoneLiteral, bool, std::int64_t, double, std::string>;

// Literal equality the way Python compares them: ints and floats compare
// numerically, bools only equal bools.
bool LiteralEquals(const Literal& a, const Literal& b);
std::string LiteralToString(const Literal& value);
nlohmann::json LiteralToJson(const Literal& value);
std::optional<Literal> LiteralFromJson(const nlohmann::json& value);

// A fact's value slot: absent (imports, most calls), a literal, or the marker
// for an expression that cannot be evaluated statically.
struct NoValue {
  friend bool operator==(NoValue, NoValue) = default;
};
struct NonLiteral {
  friend bool operator==(NonLiteral, NonLiteral) = default;
};
using FactValue = std::variant<NoValue, NonLiteral, Literal>;

enum class FactKind { kImport, kCall, kAssign, kEnvSet, kKeywordArg };

std::string_view FactKindName(FactKind kind);
std::optional<FactKind> FactKindFromName(std::string_view name);

struct Fact {
  FactKind kind = FactKind::kCall;
  // Dotted path. EnvSet facts use "env:NAME"; KeywordArg facts use
  // "<callee>#<keyword>"; dict literal keys use "dict#<key>".
  std::string canonical_path;
  FactValue value = NoValue{};
  Location location;
  // Import facts only: the local name the statement binds, if any, and the
  // qualified path that name denotes (`import a.b` binds `a` to "a").
  std::optional<std::string> binding;
  std::optional<std::string> binding_target;
  // False when the path is rooted at a name with no import binding.
  bool resolved = true;

  friend bool operator==(const Fact&, const Fact&) = default;
};

struct Diagnostic {
  std::string message;
  Location location;

  friend bool operator==(const Diagnostic&, const Diagnostic&) = default;
};

struct FactSet {
  std::string file;
  std::vector<Fact> facts;
  std::set<std::string> imported_libraries;
  std::vector<Diagnostic> parse_diagnostics;

  friend bool operator==(const FactSet&, const FactSet&) = default;
};

// Parses Python source into raw facts. Paths are as written; call
// ResolveAliases to canonicalize them. Fails only on invalid UTF-8; syntax
// errors become parse_diagnostics and analysis continues with the next
// statement.
absl::StatusOr<FactSet> ParseSourceRaw(std::string_view text,
                                       std::string_view file);

// Rewrites every path rooted at an import alias to its fully qualified form.
// Unbound roots are kept verbatim with resolved = false.
FactSet ResolveAliases(const FactSet& raw_facts);

// ParseSourceRaw followed by ResolveAliases.
absl::StatusOr<FactSet> ParseSource(std::string_view text,
                                    std::string_view file);

// Top-level module of an import path ("torch.backends.cudnn" -> "torch").
std::string TopLevelModule(std::string_view import_path);

nlohmann::json FactSetToJson(const FactSet& facts);
absl::StatusOr<FactSet> FactSetFromJson(const nlohmann::json& json);

}  // namespace detml

#endif  // DETML_FACTS_H_
