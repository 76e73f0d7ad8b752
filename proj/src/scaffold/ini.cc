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

#include "scaffold/ini.h"

#include <set>
#include <string>

#include "absl/status/status.h"

namespace detml::ini {
namespace {

std::string_view Trim(std::string_view s) {
  std::size_t b = s.find_first_not_of(" \t");
  if (b == std::string_view::npos) return {};
  std::size_t e = s.find_last_not_of(" \t");
  return s.substr(b, e - b + 1);
}

absl::Status LineError(int line, const std::string& message) {
  return absl::InvalidArgumentError("line " + std::to_string(line) + ": " + message);
}

absl::StatusOr<std::string> Unquote(std::string_view raw, int line) {
  std::string out;
  for (std::size_t i = 1; i + 1 < raw.size(); ++i) {
    char c = raw[i];
    if (c != '\\') {
      out.push_back(c);
      continue;
    }
    if (i + 2 >= raw.size()) return LineError(line, "dangling escape in quoted value");
    switch (raw[++i]) {
      case '\\': out.push_back('\\'); break;
      case '"': out.push_back('"'); break;
      case 'n': out.push_back('\n'); break;
      case 't': out.push_back('\t'); break;
      case 'r': out.push_back('\r'); break;
      default: return LineError(line, "unknown escape in quoted value");
    }
  }
  return out;
}

}  // namespace

absl::StatusOr<std::vector<Section>> Parse(std::string_view text) {
  std::vector<Section> sections;
  std::set<std::string> keys;
  int line_no = 0;
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t nl = text.find('\n', pos);
    std::string_view raw = text.substr(pos, nl == std::string_view::npos ? nl : nl - pos);
    pos = nl == std::string_view::npos ? text.size() : nl + 1;
    ++line_no;
    if (!raw.empty() && raw.back() == '\r') raw.remove_suffix(1);
    std::string_view line = Trim(raw);
    if (line.empty() || line.front() == '#' || line.front() == ';') continue;
    if (line.front() == '[') {
      if (line.back() != ']') return LineError(line_no, "unterminated section header");
      sections.push_back({std::string(Trim(line.substr(1, line.size() - 2))), line_no, {}});
      keys.clear();
      continue;
    }
    std::size_t eq = line.find('=');
    if (eq == std::string_view::npos) return LineError(line_no, "expected 'key = value'");
    if (sections.empty()) return LineError(line_no, "key outside of any section");
    std::string key(Trim(line.substr(0, eq)));
    if (key.empty()) return LineError(line_no, "empty key");
    if (!keys.insert(key).second) {
      return LineError(line_no, "duplicate key '" + key + "' in [" +
                                    sections.back().name + "]");
    }
    std::string_view value = Trim(line.substr(eq + 1));
    std::string parsed(value);
    if (value.size() >= 2 && value.front() == '"' && value.back() == '"') {
      absl::StatusOr<std::string> unquoted = Unquote(value, line_no);
      if (!unquoted.ok()) return unquoted.status();
      parsed = *std::move(unquoted);
    }
    sections.back().entries.emplace_back(std::move(key), std::move(parsed));
  }
  return sections;
}

std::string QuoteIfNeeded(std::string_view value) {
  bool needs = value.empty() ? false
                             : (value.front() == ' ' || value.front() == '\t' ||
                                value.back() == ' ' || value.back() == '\t' ||
                                value.front() == '"');
  for (char c : value) {
    if (c == '\n' || c == '\r') needs = true;
  }
  if (!needs) return std::string(value);
  std::string out = "\"";
  for (char c : value) {
    switch (c) {
      case '\\': out += "\\\\"; break;
      case '"': out += "\\\""; break;
      case '\n': out += "\\n"; break;
      case '\t': out += "\\t"; break;
      case '\r': out += "\\r"; break;
      default: out.push_back(c);
    }
  }
  out += "\"";
  return out;
}

}  // namespace detml::ini
