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

#include "detml/facts.h"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <string>
#include <utility>

#include "absl/status/status.h"
#include "facts/parser.h"

namespace detml {
namespace {

using python::DottedName;
using python::Expr;
using python::Stmt;

bool IsValidUtf8(std::string_view text, std::size_t* bad_offset) {
  std::size_t i = 0;
  while (i < text.size()) {
    auto c = static_cast<unsigned char>(text[i]);
    std::size_t len = 0;
    std::uint32_t cp = 0;
    if (c < 0x80) {
      ++i;
      continue;
    } else if ((c & 0xE0) == 0xC0) {
      len = 2;
      cp = c & 0x1F;
    } else if ((c & 0xF0) == 0xE0) {
      len = 3;
      cp = c & 0x0F;
    } else if ((c & 0xF8) == 0xF0) {
      len = 4;
      cp = c & 0x07;
    } else {
      *bad_offset = i;
      return false;
    }
    if (i + len > text.size()) {
      *bad_offset = i;
      return false;
    }
    for (std::size_t k = 1; k < len; ++k) {
      auto cc = static_cast<unsigned char>(text[i + k]);
      if ((cc & 0xC0) != 0x80) {
        *bad_offset = i;
        return false;
      }
      cp = (cp << 6) | (cc & 0x3F);
    }
    bool overlong = (len == 2 && cp < 0x80) || (len == 3 && cp < 0x800) ||
                    (len == 4 && cp < 0x10000);
    if (overlong || cp > 0x10FFFF || (cp >= 0xD800 && cp <= 0xDFFF)) {
      *bad_offset = i;
      return false;
    }
    i += len;
  }
  return true;
}

// Calls whose target cannot be determined statically.
const std::set<std::string>& OpaqueCallees() {
  static const std::set<std::string> kCallees = {
      "getattr", "setattr", "delattr", "exec", "eval", "compile",
      "__import__", "importlib.import_module"};
  return kCallees;
}

std::string RootOf(std::string_view path) {
  std::size_t end = path.find_first_of(".#");
  return std::string(path.substr(0, end));
}

// Import bindings of a module, applied with nearest-preceding semantics:
// a use resolves against the last binding of that name at or before its
// line, or the first later binding when none precede it.
class BindingTable {
 public:
  void Add(const std::string& name, const std::string& target, int line) {
    bindings_[name].push_back({line, target});
  }

  std::optional<std::string> Lookup(const std::string& name, int line) const {
    auto it = bindings_.find(name);
    if (it == bindings_.end()) return std::nullopt;
    const auto& entries = it->second;
    const std::string* best = nullptr;
    for (const auto& [bound_line, target] : entries) {
      if (bound_line <= line) best = &target;
    }
    if (best == nullptr) best = &entries.front().second;
    return *best;
  }

  // Rewrites the root segment of `path` when it is bound.
  std::pair<std::string, bool> Resolve(std::string_view path, int line) const {
    std::string root = RootOf(path);
    std::optional<std::string> target = Lookup(root, line);
    if (!target) return {std::string(path), false};
    return {*target + std::string(path.substr(root.size())), true};
  }

 private:
  std::map<std::string, std::vector<std::pair<int, std::string>>> bindings_;
};

class FactExtractor {
 public:
  FactExtractor(std::string file, const python::Module& module)
      : file_(std::move(file)), module_(module) {
    for (const Stmt& stmt : module_.statements) {
      if (stmt.kind != Stmt::Kind::kImport) continue;
      for (const auto& clause : stmt.imports) {
        if (clause.binding) bindings_.Add(*clause.binding, clause.target, clause.line);
      }
    }
  }

  FactSet Run() {
    FactSet out;
    out.file = file_;
    for (const auto& err : module_.errors) {
      out.parse_diagnostics.push_back({err.message, Loc(err.line, err.column)});
    }
    for (const Stmt& stmt : module_.statements) {
      switch (stmt.kind) {
        case Stmt::Kind::kImport:
          for (const auto& clause : stmt.imports) {
            Fact f;
            f.kind = FactKind::kImport;
            f.canonical_path = clause.module;
            f.location = Loc(clause.line, clause.column);
            f.binding = clause.binding;
            if (clause.binding) f.binding_target = clause.target;
            facts_.push_back(std::move(f));
          }
          break;
        case Stmt::Kind::kAssign:
          for (const auto& target : stmt.targets) {
            AssignTarget(*target, stmt.value.get());
            Visit(*target);
          }
          if (stmt.value) Visit(*stmt.value);
          break;
        case Stmt::Kind::kExpr:
          for (const auto& e : stmt.exprs) Visit(*e);
          break;
      }
    }
    std::stable_sort(facts_.begin(), facts_.end(), [](const Fact& a, const Fact& b) {
      return std::tie(a.location.line, a.location.column) <
             std::tie(b.location.line, b.location.column);
    });
    std::stable_sort(diagnostics_.begin(), diagnostics_.end(),
                     [](const Diagnostic& a, const Diagnostic& b) {
                       return std::tie(a.location.line, a.location.column) <
                              std::tie(b.location.line, b.location.column);
                     });
    for (auto& d : diagnostics_) out.parse_diagnostics.push_back(std::move(d));
    std::stable_sort(out.parse_diagnostics.begin(), out.parse_diagnostics.end(),
                     [](const Diagnostic& a, const Diagnostic& b) {
                       return std::tie(a.location.line, a.location.column) <
                              std::tie(b.location.line, b.location.column);
                     });
    for (const Fact& f : facts_) {
      if (f.kind == FactKind::kImport && !f.canonical_path.starts_with('.')) {
        out.imported_libraries.insert(TopLevelModule(f.canonical_path));
      }
    }
    out.facts = std::move(facts_);
    return out;
  }

 private:
  Location Loc(int line, int column) const { return Location{file_, line, column}; }

  static FactValue ValueOf(const Expr* e) {
    if (e != nullptr && e->kind == Expr::Kind::kLiteral) return e->literal;
    return NonLiteral{};
  }

  void AssignTarget(const Expr& target, const Expr* value) {
    switch (target.kind) {
      case Expr::Kind::kAttribute: {
        std::optional<std::string> path = DottedName(target);
        if (!path) return;
        Fact f;
        f.kind = FactKind::kAssign;
        f.canonical_path = *path;
        f.value = ValueOf(value);
        f.location = Loc(target.line, target.column);
        facts_.push_back(std::move(f));
        return;
      }
      case Expr::Kind::kSubscript:
        EnvWrite(target, value);
        return;
      case Expr::Kind::kSequence: {
        bool paired = value != nullptr && value->kind == Expr::Kind::kSequence &&
                      value->children.size() == target.children.size();
        for (std::size_t i = 0; i < target.children.size(); ++i) {
          AssignTarget(*target.children[i],
                       paired ? value->children[i].get() : nullptr);
        }
        return;
      }
      case Expr::Kind::kStarred:
        if (target.base) AssignTarget(*target.base, nullptr);
        return;
      default:
        return;
    }
  }

  void EnvWrite(const Expr& target, const Expr* value) {
    if (!target.base || target.children.empty()) return;
    std::optional<std::string> base = DottedName(*target.base);
    if (!base) return;
    auto [resolved, bound] = bindings_.Resolve(*base, target.line);
    if (resolved != "os.environ") return;
    const Expr& key = *target.children.front();
    const auto* name = key.kind == Expr::Kind::kLiteral
                           ? std::get_if<std::string>(&key.literal)
                           : nullptr;
    if (name == nullptr) {
      diagnostics_.push_back(
          {"analysis-opaque construct: environment write with a computed key",
           Loc(target.line, target.column)});
      return;
    }
    Fact f;
    f.kind = FactKind::kEnvSet;
    f.canonical_path = "env:" + *name;
    f.value = ValueOf(value);
    f.location = Loc(target.line, target.column);
    facts_.push_back(std::move(f));
  }

  void Visit(const Expr& e) {
    switch (e.kind) {
      case Expr::Kind::kCall:
        VisitCall(e);
        return;
      case Expr::Kind::kDict:
        for (const auto& item : e.items) {
          if (item.key && item.key->kind == Expr::Kind::kLiteral) {
            if (const auto* key = std::get_if<std::string>(&item.key->literal)) {
              Fact f;
              f.kind = FactKind::kKeywordArg;
              f.canonical_path = "dict#" + *key;
              f.value = ValueOf(item.value.get());
              f.location = Loc(item.key->line, item.key->column);
              facts_.push_back(std::move(f));
            }
          }
          if (item.key) Visit(*item.key);
          if (item.value) Visit(*item.value);
        }
        return;
      default:
        if (e.base) Visit(*e.base);
        for (const auto& child : e.children) Visit(*child);
        return;
    }
  }

  void VisitCall(const Expr& call) {
    std::optional<std::string> callee = DottedName(*call.base);
    if (!callee) {
      Visit(*call.base);
    } else {
      auto [resolved, bound] = bindings_.Resolve(*callee, call.line);
      if (OpaqueCallees().count(resolved) > 0) {
        diagnostics_.push_back({"analysis-opaque construct: call to " + resolved,
                                Loc(call.line, call.column)});
      }
      Fact f;
      f.kind = FactKind::kCall;
      f.canonical_path = *callee;
      f.location = Loc(call.line, call.column);
      if (!call.children.empty()) {
        const Expr& first = *call.children.front();
        if (first.kind == Expr::Kind::kLiteral) f.value = first.literal;
      }
      facts_.push_back(std::move(f));
      for (const auto& kw : call.keywords) {
        if (kw.name.empty()) continue;
        Fact k;
        k.kind = FactKind::kKeywordArg;
        k.canonical_path = *callee + "#" + kw.name;
        k.value = ValueOf(kw.value.get());
        k.location = Loc(kw.line, kw.column);
        facts_.push_back(std::move(k));
      }
    }
    for (const auto& arg : call.children) Visit(*arg);
    for (const auto& kw : call.keywords) Visit(*kw.value);
  }

  std::string file_;
  const python::Module& module_;
  BindingTable bindings_;
  std::vector<Fact> facts_;
  std::vector<Diagnostic> diagnostics_;
};

}  // namespace

bool LiteralEquals(const Literal& a, const Literal& b) {
  auto as_number = [](const Literal& v) -> std::optional<double> {
    if (const auto* i = std::get_if<std::int64_t>(&v)) return static_cast<double>(*i);
    if (const auto* d = std::get_if<double>(&v)) return *d;
    return std::nullopt;
  };
  std::optional<double> na = as_number(a);
  std::optional<double> nb = as_number(b);
  if (na && nb) return *na == *nb;
  return a == b;
}

std::string LiteralToString(const Literal& value) {
  return std::visit(
      [](const auto& v) -> std::string {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, NoneLiteral>) {
          return "None";
        } else if constexpr (std::is_same_v<T, bool>) {
          return v ? "True" : "False";
        } else if constexpr (std::is_same_v<T, std::string>) {
          return "'" + v + "'";
        } else if constexpr (std::is_same_v<T, double>) {
          return nlohmann::json(v).dump();
        } else {
          return std::to_string(v);
        }
      },
      value);
}

nlohmann::json LiteralToJson(const Literal& value) {
  return std::visit(
      [](const auto& v) -> nlohmann::json {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, NoneLiteral>) {
          return nullptr;
        } else {
          return v;
        }
      },
      value);
}

std::optional<Literal> LiteralFromJson(const nlohmann::json& value) {
  if (value.is_null()) return Literal{NoneLiteral{}};
  if (value.is_boolean()) return Literal{value.get<bool>()};
  if (value.is_number_integer()) return Literal{value.get<std::int64_t>()};
  if (value.is_number_float()) return Literal{value.get<double>()};
  if (value.is_string()) return Literal{value.get<std::string>()};
  return std::nullopt;
}

std::string_view FactKindName(FactKind kind) {
  switch (kind) {
    case FactKind::kImport: return "Import";
    case FactKind::kCall: return "Call";
    case FactKind::kAssign: return "Assign";
    case FactKind::kEnvSet: return "EnvSet";
    case FactKind::kKeywordArg: return "KeywordArg";
  }
  return "Call";
}

std::optional<FactKind> FactKindFromName(std::string_view name) {
  for (FactKind k : {FactKind::kImport, FactKind::kCall, FactKind::kAssign,
                     FactKind::kEnvSet, FactKind::kKeywordArg}) {
    if (FactKindName(k) == name) return k;
  }
  return std::nullopt;
}

std::string TopLevelModule(std::string_view import_path) {
  if (!import_path.empty() && import_path.front() == '.') {
    std::size_t end = import_path.find_first_not_of('.');
    return std::string(import_path.substr(0, end == std::string_view::npos ? import_path.size() : end));
  }
  return std::string(import_path.substr(0, import_path.find('.')));
}

absl::StatusOr<FactSet> ParseSourceRaw(std::string_view text,
                                       std::string_view file) {
  std::size_t bad = 0;
  if (!IsValidUtf8(text, &bad)) {
    return absl::InvalidArgumentError(
        std::string(file) + ": invalid UTF-8 at byte offset " + std::to_string(bad));
  }
  if (text.substr(0, 3) == "\xEF\xBB\xBF") text.remove_prefix(3);
  python::Module module = python::Parse(text);
  return FactExtractor(std::string(file), module).Run();
}

FactSet ResolveAliases(const FactSet& raw_facts) {
  BindingTable bindings;
  for (const Fact& f : raw_facts.facts) {
    if (f.kind == FactKind::kImport && f.binding) {
      bindings.Add(*f.binding, f.binding_target.value_or(f.canonical_path),
                   f.location.line);
    }
  }
  FactSet out = raw_facts;
  for (Fact& f : out.facts) {
    switch (f.kind) {
      case FactKind::kImport:
      case FactKind::kEnvSet:
        f.resolved = true;
        break;
      default: {
        if (f.canonical_path.rfind("dict#", 0) == 0) {
          f.resolved = true;
          break;
        }
        auto [path, bound] = bindings.Resolve(f.canonical_path, f.location.line);
        f.canonical_path = std::move(path);
        f.resolved = bound;
      }
    }
  }
  return out;
}

absl::StatusOr<FactSet> ParseSource(std::string_view text, std::string_view file) {
  absl::StatusOr<FactSet> raw = ParseSourceRaw(text, file);
  if (!raw.ok()) return raw.status();
  return ResolveAliases(*raw);
}

nlohmann::json FactSetToJson(const FactSet& facts) {
  nlohmann::json out;
  out["file"] = facts.file;
  out["facts"] = nlohmann::json::array();
  for (const Fact& f : facts.facts) {
    nlohmann::json j;
    j["kind"] = FactKindName(f.kind);
    j["path"] = f.canonical_path;
    j["line"] = f.location.line;
    j["column"] = f.location.column;
    j["resolved"] = f.resolved;
    if (f.binding) j["binding"] = *f.binding;
    if (f.binding_target) j["binding_target"] = *f.binding_target;
    if (const auto* lit = std::get_if<Literal>(&f.value)) {
      j["value"] = LiteralToJson(*lit);
    } else if (std::holds_alternative<NonLiteral>(f.value)) {
      j["non_literal"] = true;
    }
    out["facts"].push_back(std::move(j));
  }
  out["imported_libraries"] = facts.imported_libraries;
  out["diagnostics"] = nlohmann::json::array();
  for (const Diagnostic& d : facts.parse_diagnostics) {
    out["diagnostics"].push_back(
        {{"message", d.message}, {"line", d.location.line}, {"column", d.location.column}});
  }
  return out;
}

absl::StatusOr<FactSet> FactSetFromJson(const nlohmann::json& json) {
  try {
    FactSet out;
    out.file = json.at("file").get<std::string>();
    for (const auto& j : json.at("facts")) {
      Fact f;
      std::optional<FactKind> kind = FactKindFromName(j.at("kind").get<std::string>());
      if (!kind) return absl::InvalidArgumentError("unknown fact kind");
      f.kind = *kind;
      f.canonical_path = j.at("path").get<std::string>();
      f.location = Location{out.file, j.at("line").get<int>(), j.at("column").get<int>()};
      f.resolved = j.at("resolved").get<bool>();
      if (j.contains("binding")) f.binding = j["binding"].get<std::string>();
      if (j.contains("binding_target")) {
        f.binding_target = j["binding_target"].get<std::string>();
      }
      if (j.contains("value")) {
        std::optional<Literal> lit = LiteralFromJson(j["value"]);
        if (!lit) return absl::InvalidArgumentError("fact value is not a literal");
        f.value = *lit;
      } else if (j.value("non_literal", false)) {
        f.value = NonLiteral{};
      }
      out.facts.push_back(std::move(f));
    }
    for (const auto& lib : json.at("imported_libraries")) {
      out.imported_libraries.insert(lib.get<std::string>());
    }
    for (const auto& d : json.at("diagnostics")) {
      out.parse_diagnostics.push_back(
          {d.at("message").get<std::string>(),
           Location{out.file, d.at("line").get<int>(), d.at("column").get<int>()}});
    }
    return out;
  } catch (const nlohmann::json::exception& e) {
    return absl::InvalidArgumentError(std::string("malformed fact set: ") + e.what());
  }
}

}  // namespace detml
