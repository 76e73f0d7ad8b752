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

// Parser for rule overlay files: a small TOML subset with one [[rule]] table
// per rule. See docs/rule-file-format.md.

#include <cctype>
#include <charconv>
#include <map>
#include <set>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "absl/status/status.h"
#include "detml/rules.h"

namespace detml {
namespace {

using ScalarValue = std::variant<std::string, std::int64_t, double, bool>;
using ArrayValue = std::vector<ScalarValue>;
using Value = std::variant<ScalarValue, ArrayValue>;

struct Entry {
  Value value;
  int line;
};

struct Table {
  int line = 0;
  std::map<std::string, Entry> entries;
};

absl::Status LineError(int line, const std::string& message) {
  return absl::InvalidArgumentError("rule file line " + std::to_string(line) +
                                    ": " + message);
}

class ValueReader {
 public:
  ValueReader(std::string_view text, int line) : text_(text), line_(line) {}

  absl::Status Read(Value* out) {
    SkipSpace();
    if (Peek() == '[') {
      ++pos_;
      ArrayValue array;
      SkipSpace();
      while (Peek() != ']') {
        ScalarValue scalar;
        if (absl::Status s = ReadScalar(&scalar); !s.ok()) return s;
        array.push_back(std::move(scalar));
        SkipSpace();
        if (Peek() == ',') {
          ++pos_;
          SkipSpace();
          continue;
        }
        if (Peek() != ']') return LineError(line_, "expected ',' or ']' in array");
      }
      ++pos_;
      *out = std::move(array);
    } else {
      ScalarValue scalar;
      if (absl::Status s = ReadScalar(&scalar); !s.ok()) return s;
      *out = std::move(scalar);
    }
    SkipSpace();
    if (pos_ < text_.size() && text_[pos_] != '#') {
      return LineError(line_, "unexpected trailing characters");
    }
    return absl::OkStatus();
  }

 private:
  char Peek() const { return pos_ < text_.size() ? text_[pos_] : '\0'; }

  void SkipSpace() {
    while (pos_ < text_.size() && (text_[pos_] == ' ' || text_[pos_] == '\t')) ++pos_;
  }

  absl::Status ReadScalar(ScalarValue* out) {
    char c = Peek();
    if (c == '"') return ReadBasicString(out);
    if (c == '\'') {
      std::size_t end = text_.find('\'', pos_ + 1);
      if (end == std::string_view::npos) return LineError(line_, "unterminated string");
      *out = std::string(text_.substr(pos_ + 1, end - pos_ - 1));
      pos_ = end + 1;
      return absl::OkStatus();
    }
    std::size_t start = pos_;
    while (pos_ < text_.size() &&
           (std::isalnum(static_cast<unsigned char>(text_[pos_])) ||
            text_[pos_] == '.' || text_[pos_] == '+' || text_[pos_] == '-' ||
            text_[pos_] == '_')) {
      ++pos_;
    }
    std::string word(text_.substr(start, pos_ - start));
    if (word.empty()) return LineError(line_, "expected a value");
    if (word == "true" || word == "false") {
      *out = word == "true";
      return absl::OkStatus();
    }
    std::string digits;
    for (char d : word) {
      if (d != '_') digits.push_back(d);
    }
    const char* first = digits.data() + (digits.front() == '+' ? 1 : 0);
    const char* last = digits.data() + digits.size();
    if (digits.find_first_of(".eE") == std::string::npos) {
      std::int64_t v = 0;
      auto [ptr, ec] = std::from_chars(first, last, v);
      if (ec == std::errc() && ptr == last) {
        *out = v;
        return absl::OkStatus();
      }
    } else {
      double v = 0;
      auto [ptr, ec] = std::from_chars(first, last, v);
      if (ec == std::errc() && ptr == last) {
        *out = v;
        return absl::OkStatus();
      }
    }
    return LineError(line_, "invalid value '" + word + "'");
  }

  absl::Status ReadBasicString(ScalarValue* out) {
    std::string value;
    ++pos_;
    while (true) {
      if (pos_ >= text_.size()) return LineError(line_, "unterminated string");
      char c = text_[pos_++];
      if (c == '"') break;
      if (c != '\\') {
        value.push_back(c);
        continue;
      }
      if (pos_ >= text_.size()) return LineError(line_, "unterminated string");
      char e = text_[pos_++];
      switch (e) {
        case 'n': value.push_back('\n'); break;
        case 't': value.push_back('\t'); break;
        case 'r': value.push_back('\r'); break;
        case '"': value.push_back('"'); break;
        case '\\': value.push_back('\\'); break;
        default:
          return LineError(line_, std::string("unsupported escape '\\") + e + "'");
      }
    }
    *out = std::move(value);
    return absl::OkStatus();
  }

  std::string_view text_;
  int line_;
  std::size_t pos_ = 0;
};

const std::set<std::string>& KnownKeys() {
  static const std::set<std::string> kKeys = {
      "id",       "library",  "kind",       "path",    "match",  "value",
      "severity", "message",  "fix_hint",   "activation", "modules", "anchor"};
  return kKeys;
}

struct Document {
  bool empty = true;
  std::vector<Table> tables;
};

absl::Status ParseDocument(std::string_view text, Document* doc) {
  int line_no = 0;
  bool saw_format = false;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t nl = text.find('\n', pos);
    std::string_view line =
        text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
    pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    std::size_t first = line.find_first_not_of(" \t");
    if (first == std::string_view::npos || line[first] == '#') continue;
    line.remove_prefix(first);
    doc->empty = false;

    if (line.front() == '[') {
      std::size_t end = line.find_first_of('#');
      std::string_view header = line.substr(0, end);
      while (!header.empty() && (header.back() == ' ' || header.back() == '\t')) {
        header.remove_suffix(1);
      }
      if (header != "[[rule]]") {
        return LineError(line_no, "unknown table header '" + std::string(header) +
                                      "' (expected [[rule]])");
      }
      if (!saw_format) {
        return LineError(line_no, "'catalog_format = 1' must come first");
      }
      doc->tables.push_back(Table{line_no, {}});
      continue;
    }

    std::size_t eq = line.find('=');
    if (eq == std::string_view::npos) {
      return LineError(line_no, "expected 'key = value'");
    }
    std::string_view key = line.substr(0, eq);
    while (!key.empty() && (key.back() == ' ' || key.back() == '\t')) key.remove_suffix(1);
    if (key.empty()) return LineError(line_no, "missing key before '='");
    for (char c : key) {
      if (!std::isalnum(static_cast<unsigned char>(c)) && c != '_') {
        return LineError(line_no, "invalid key '" + std::string(key) + "'");
      }
    }
    Value value;
    if (absl::Status s = ValueReader(line.substr(eq + 1), line_no).Read(&value); !s.ok()) {
      return s;
    }
    if (!saw_format) {
      if (key != "catalog_format") {
        return LineError(line_no, "'catalog_format = 1' must come first");
      }
      const auto* scalar = std::get_if<ScalarValue>(&value);
      const auto* version = scalar ? std::get_if<std::int64_t>(scalar) : nullptr;
      if (version == nullptr || *version != 1) {
        return LineError(line_no, "unsupported catalog_format (expected 1)");
      }
      saw_format = true;
      continue;
    }
    if (doc->tables.empty()) {
      return LineError(line_no, "key '" + std::string(key) + "' outside a [[rule]] table");
    }
    std::string k(key);
    if (KnownKeys().count(k) == 0) {
      return LineError(line_no, "unknown key '" + k + "'");
    }
    Table& table = doc->tables.back();
    if (table.entries.count(k) > 0) {
      return LineError(line_no, "duplicate key '" + k + "'");
    }
    table.entries.emplace(std::move(k), Entry{std::move(value), line_no});
  }
  return absl::OkStatus();
}

absl::StatusOr<std::string> GetString(const Entry& e, const std::string& key) {
  const auto* scalar = std::get_if<ScalarValue>(&e.value);
  const auto* s = scalar ? std::get_if<std::string>(scalar) : nullptr;
  if (s == nullptr) return LineError(e.line, "'" + key + "' must be a string");
  return *s;
}

absl::StatusOr<std::vector<std::string>> GetStringList(const Entry& e,
                                                       const std::string& key) {
  if (const auto* scalar = std::get_if<ScalarValue>(&e.value)) {
    if (const auto* s = std::get_if<std::string>(scalar)) return std::vector<std::string>{*s};
    return LineError(e.line, "'" + key + "' must be a string or array of strings");
  }
  std::vector<std::string> out;
  for (const ScalarValue& v : std::get<ArrayValue>(e.value)) {
    const auto* s = std::get_if<std::string>(&v);
    if (s == nullptr) return LineError(e.line, "'" + key + "' must contain only strings");
    out.push_back(*s);
  }
  return out;
}

// Applies one table to `rule` (a copy of the rule it replaces, or a blank
// rule for new ids).
absl::Status ApplyTable(const Table& table, bool is_new, Rule* rule) {
  static const char* kRequiredForNew[] = {"id",       "library",  "kind",
                                          "path",     "severity", "message",
                                          "fix_hint", "activation"};
  if (is_new) {
    for (const char* key : kRequiredForNew) {
      if (table.entries.count(key) == 0) {
        return LineError(table.line, "rule '" + rule->id + "' is missing required key '" +
                                         key + "'");
      }
    }
  }
  auto find = [&](const char* key) -> const Entry* {
    auto it = table.entries.find(key);
    return it == table.entries.end() ? nullptr : &it->second;
  };
  if (const Entry* e = find("library")) {
    absl::StatusOr<std::string> name = GetString(*e, "library");
    if (!name.ok()) return name.status();
    std::optional<Library> library = LibraryFromName(*name);
    if (!library) return LineError(e->line, "unknown library '" + *name + "'");
    rule->library = *library;
  }
  if (const Entry* e = find("kind")) {
    absl::StatusOr<std::string> name = GetString(*e, "kind");
    if (!name.ok()) return name.status();
    std::optional<RuleKind> kind = RuleKindFromName(*name);
    if (!kind) return LineError(e->line, "unknown rule kind '" + *name + "'");
    rule->kind = *kind;
  }
  MatchMode mode = MatchMode::kExact;
  if (const Entry* e = find("match")) {
    absl::StatusOr<std::string> name = GetString(*e, "match");
    if (!name.ok()) return name.status();
    std::optional<MatchMode> parsed = MatchModeFromName(*name);
    if (!parsed) return LineError(e->line, "unknown match mode '" + *name + "'");
    mode = *parsed;
    if (!find("path")) {
      for (PathPattern& p : rule->matcher.patterns) p.mode = mode;
    }
  }
  if (const Entry* e = find("path")) {
    absl::StatusOr<std::vector<std::string>> paths = GetStringList(*e, "path");
    if (!paths.ok()) return paths.status();
    if (paths->empty()) return LineError(e->line, "'path' must not be empty");
    rule->matcher.patterns.clear();
    for (std::string& p : *paths) rule->matcher.patterns.push_back({mode, std::move(p)});
  }
  if (const Entry* e = find("value")) {
    const auto* scalar = std::get_if<ScalarValue>(&e->value);
    if (scalar == nullptr) return LineError(e->line, "'value' must be a literal");
    rule->matcher.required_value =
        std::visit([](const auto& v) -> Literal { return v; }, *scalar);
  }
  if (const Entry* e = find("severity")) {
    absl::StatusOr<std::string> name = GetString(*e, "severity");
    if (!name.ok()) return name.status();
    std::optional<Severity> severity = SeverityFromName(*name);
    if (!severity) return LineError(e->line, "unknown severity '" + *name + "'");
    rule->severity = *severity;
  }
  for (const char* key : {"message", "fix_hint", "anchor"}) {
    if (const Entry* e = find(key)) {
      absl::StatusOr<std::string> text = GetString(*e, key);
      if (!text.ok()) return text.status();
      std::string k = key;
      (k == "message" ? rule->message : k == "fix_hint" ? rule->fix_hint
                                                        : rule->paper_anchor) = *text;
    }
  }
  const Entry* modules = find("modules");
  if (const Entry* e = find("activation")) {
    absl::StatusOr<std::string> name = GetString(*e, "activation");
    if (!name.ok()) return name.status();
    if (*name == "always") {
      rule->activation = {ActivationKind::kAlways, {}};
    } else if (*name == "library-imported") {
      rule->activation.kind = ActivationKind::kLibraryImported;
      if (!modules) rule->activation.modules = DefaultModules(rule->library);
    } else {
      return LineError(e->line, "unknown activation '" + *name +
                                    "' (expected always or library-imported)");
    }
  }
  if (modules) {
    absl::StatusOr<std::vector<std::string>> list = GetStringList(*modules, "modules");
    if (!list.ok()) return list.status();
    rule->activation.modules = std::move(*list);
  }
  if (rule->activation.kind == ActivationKind::kLibraryImported &&
      rule->activation.modules.empty()) {
    return LineError(table.line, "rule '" + rule->id +
                                     "' is library-imported but names no modules");
  }
  if (rule->matcher.required_value && rule->kind != RuleKind::kRequiredAssign &&
      rule->kind != RuleKind::kRequiredEnv && rule->kind != RuleKind::kRequiredKeywordArg) {
    return LineError(table.line, "rule '" + rule->id + "': 'value' is only valid for " +
                                     "RequiredAssign, RequiredEnv and RequiredKeywordArg");
  }
  return absl::OkStatus();
}

bool IsKebabCase(std::string_view id) {
  if (id.empty() || id.front() == '-' || id.back() == '-') return false;
  for (char c : id) {
    if (!(std::islower(static_cast<unsigned char>(c)) ||
          std::isdigit(static_cast<unsigned char>(c)) || c == '-')) {
      return false;
    }
  }
  return id.find("--") == std::string_view::npos;
}

}  // namespace

absl::StatusOr<RuleCatalog> OverlayRules(const RuleCatalog& base,
                                         std::string_view document) {
  Document doc;
  if (absl::Status s = ParseDocument(document, &doc); !s.ok()) return s;
  if (doc.empty) return base;

  RuleCatalog merged = base;
  std::map<std::string, int> seen;
  for (const Table& table : doc.tables) {
    auto id_it = table.entries.find("id");
    if (id_it == table.entries.end()) {
      return LineError(table.line, "rule table is missing 'id'");
    }
    absl::StatusOr<std::string> id = GetString(id_it->second, "id");
    if (!id.ok()) return id.status();
    if (!IsKebabCase(*id)) {
      return LineError(id_it->second.line, "rule id '" + *id + "' is not kebab-case");
    }
    if (auto [it, inserted] = seen.emplace(*id, id_it->second.line); !inserted) {
      return LineError(id_it->second.line, "duplicate rule id '" + *id +
                                               "' (first defined on line " +
                                               std::to_string(it->second) + ")");
    }
    const Rule* existing = base.Lookup(*id);
    Rule rule = existing ? *existing : Rule{};
    rule.id = *id;
    if (absl::Status s = ApplyTable(table, existing == nullptr, &rule); !s.ok()) return s;
    merged.Put(std::move(rule));
  }
  return merged;
}

absl::StatusOr<RuleCatalog> LoadRules(std::string_view document) {
  return OverlayRules(BuiltinRules(), document);
}

}  // namespace detml
