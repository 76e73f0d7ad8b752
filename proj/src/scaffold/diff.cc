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

#include "detml/diff.h"

#include <algorithm>
#include <charconv>
#include <string>
#include <vector>

#include "absl/status/status.h"

namespace detml {
namespace {

enum class Op { kEqual, kDelete, kInsert };

struct Edit {
  Op op;
  int a;  // index into the old lines (kEqual, kDelete)
  int b;  // index into the new lines (kEqual, kInsert)
};

// Myers' O(ND) shortest edit script.
std::vector<Edit> EditScript(const std::vector<std::string>& a,
                             const std::vector<std::string>& b) {
  const int n = static_cast<int>(a.size());
  const int m = static_cast<int>(b.size());
  const int max = n + m;
  const int offset = max + 1;
  std::vector<int> v(2 * max + 3, 0);
  std::vector<std::vector<int>> trace;
  int found_d = -1;
  for (int d = 0; d <= max && found_d < 0; ++d) {
    trace.push_back(v);
    for (int k = -d; k <= d; k += 2) {
      int x;
      if (k == -d || (k != d && v[offset + k - 1] < v[offset + k + 1])) {
        x = v[offset + k + 1];
      } else {
        x = v[offset + k - 1] + 1;
      }
      int y = x - k;
      while (x < n && y < m && a[x] == b[y]) {
        ++x;
        ++y;
      }
      v[offset + k] = x;
      if (x >= n && y >= m) {
        found_d = d;
        break;
      }
    }
  }

  std::vector<Edit> edits;
  int x = n;
  int y = m;
  for (int d = found_d; d > 0; --d) {
    const std::vector<int>& prev = trace[d];
    int k = x - y;
    int prev_k;
    if (k == -d || (k != d && prev[offset + k - 1] < prev[offset + k + 1])) {
      prev_k = k + 1;
    } else {
      prev_k = k - 1;
    }
    int prev_x = prev[offset + prev_k];
    int prev_y = prev_x - prev_k;
    while (x > prev_x && y > prev_y) {
      --x;
      --y;
      edits.push_back({Op::kEqual, x, y});
    }
    if (x == prev_x) {
      --y;
      edits.push_back({Op::kInsert, x, y});
    } else {
      --x;
      edits.push_back({Op::kDelete, x, y});
    }
  }
  while (x > 0 && y > 0) {
    --x;
    --y;
    edits.push_back({Op::kEqual, x, y});
  }
  std::reverse(edits.begin(), edits.end());
  return edits;
}

void AppendDiffLine(std::string& out, char prefix, const std::string& line) {
  out.push_back(prefix);
  out += line;
  if (line.empty() || line.back() != '\n') {
    out += "\n\\ No newline at end of file\n";
  }
}

std::string RangeText(int start, int count) {
  // Zero-length ranges name the line before the insertion point.
  std::string text = std::to_string(count == 0 ? start : start + 1);
  if (count != 1) text += "," + std::to_string(count);
  return text;
}

bool ParseInt(std::string_view text, int* out) {
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), *out);
  return ec == std::errc() && ptr == text.data() + text.size();
}

// "-12,3" or "+4" -> start, count.
bool ParseRange(std::string_view text, char sign, int* start, int* count) {
  if (text.empty() || text.front() != sign) return false;
  text.remove_prefix(1);
  std::size_t comma = text.find(',');
  *count = 1;
  if (comma != std::string_view::npos) {
    if (!ParseInt(text.substr(comma + 1), count)) return false;
    text = text.substr(0, comma);
  }
  return ParseInt(text, start);
}

std::vector<int> MatchedIndices(const std::vector<std::string>& base,
                                const std::vector<std::string>& other) {
  std::vector<int> matched(base.size(), -1);
  for (const Edit& e : EditScript(base, other)) {
    if (e.op == Op::kEqual) matched[e.a] = e.b;
  }
  return matched;
}

void AppendLines(std::string& out, const std::vector<std::string>& lines, int from,
                 int to) {
  for (int i = from; i < to; ++i) out += lines[i];
}

bool RangesEqual(const std::vector<std::string>& a, int a_from, int a_to,
                 const std::vector<std::string>& b, int b_from, int b_to) {
  return a_to - a_from == b_to - b_from &&
         std::equal(a.begin() + a_from, a.begin() + a_to, b.begin() + b_from);
}

void EnsureNewline(std::string& out) {
  if (!out.empty() && out.back() != '\n') out.push_back('\n');
}

}  // namespace

std::vector<std::string> SplitLines(std::string_view text) {
  std::vector<std::string> lines;
  std::string current;
  for (std::size_t i = 0; i < text.size(); ++i) {
    char c = text[i];
    if (c == '\r' && i + 1 < text.size() && text[i + 1] == '\n') continue;
    current.push_back(c);
    if (c == '\n') {
      lines.push_back(std::move(current));
      current.clear();
    }
  }
  if (!current.empty()) lines.push_back(std::move(current));
  return lines;
}

std::string UnifiedDiff(std::string_view before, std::string_view after,
                        std::string_view path, int context) {
  std::vector<std::string> a = SplitLines(before);
  std::vector<std::string> b = SplitLines(after);
  std::vector<Edit> edits = EditScript(a, b);
  std::string out;
  const int total = static_cast<int>(edits.size());
  int i = 0;
  while (i < total) {
    while (i < total && edits[i].op == Op::kEqual) ++i;
    if (i >= total) break;
    // [start, end) covers the hunk's edits plus context; hunks whose context
    // would touch are joined.
    int start = std::max(0, i - context);
    int end = i;
    while (true) {
      while (end < total && edits[end].op != Op::kEqual) ++end;
      int run = end;
      while (run < total && edits[run].op == Op::kEqual) ++run;
      if (run < total && run - end <= 2 * context) {
        end = run;
        continue;
      }
      end = std::min(total, end + context);
      break;
    }
    int a_start = edits[start].a;
    int b_start = edits[start].b;
    int a_count = 0;
    int b_count = 0;
    std::string body;
    for (int j = start; j < end; ++j) {
      const Edit& e = edits[j];
      switch (e.op) {
        case Op::kEqual:
          AppendDiffLine(body, ' ', a[e.a]);
          ++a_count;
          ++b_count;
          break;
        case Op::kDelete:
          AppendDiffLine(body, '-', a[e.a]);
          ++a_count;
          break;
        case Op::kInsert:
          AppendDiffLine(body, '+', b[e.b]);
          ++b_count;
          break;
      }
    }
    if (out.empty()) {
      out += "--- a/" + std::string(path) + "\n";
      out += "+++ b/" + std::string(path) + "\n";
    }
    out += "@@ -" + RangeText(a_start, a_count) + " +" + RangeText(b_start, b_count) +
           " @@\n";
    out += body;
    i = end;
  }
  return out;
}

absl::StatusOr<std::string> ApplyPatch(std::string_view text, std::string_view patch) {
  std::vector<std::string> lines = SplitLines(text);
  std::vector<std::string> patch_lines = SplitLines(patch);
  std::string out;
  int cursor = 0;  // next unconsumed line of `lines`
  std::size_t p = 0;
  while (p < patch_lines.size()) {
    std::string_view line = patch_lines[p];
    if (line.rfind("---", 0) == 0 || line.rfind("+++", 0) == 0) {
      ++p;
      continue;
    }
    if (line.rfind("@@ ", 0) != 0) {
      return absl::InvalidArgumentError("malformed patch line " + std::to_string(p + 1));
    }
    std::size_t close = line.find(" @@", 3);
    if (close == std::string_view::npos) {
      return absl::InvalidArgumentError("malformed hunk header on patch line " +
                                        std::to_string(p + 1));
    }
    std::string_view ranges = line.substr(3, close - 3);
    std::size_t space = ranges.find(' ');
    int old_start, old_count, new_start, new_count;
    if (space == std::string_view::npos ||
        !ParseRange(ranges.substr(0, space), '-', &old_start, &old_count) ||
        !ParseRange(ranges.substr(space + 1), '+', &new_start, &new_count)) {
      return absl::InvalidArgumentError("malformed hunk header on patch line " +
                                        std::to_string(p + 1));
    }
    int position = old_count == 0 ? old_start : old_start - 1;
    if (position < cursor || position > static_cast<int>(lines.size())) {
      return absl::FailedPreconditionError("hunk at line " + std::to_string(old_start) +
                                           " is out of range");
    }
    AppendLines(out, lines, cursor, position);
    cursor = position;
    ++p;
    int seen_old = 0;
    int seen_new = 0;
    while (p < patch_lines.size() && (seen_old < old_count || seen_new < new_count ||
                                      patch_lines[p].rfind("\\", 0) == 0)) {
      std::string_view body = patch_lines[p];
      ++p;
      if (body.empty()) {
        return absl::InvalidArgumentError("empty line inside hunk");
      }
      char kind = body.front();
      std::string content(body.substr(1));
      bool no_newline = p < patch_lines.size() && patch_lines[p].rfind("\\", 0) == 0;
      if (no_newline) {
        if (!content.empty() && content.back() == '\n') content.pop_back();
        ++p;
      }
      if (kind == ' ' || kind == '-') {
        if (cursor >= static_cast<int>(lines.size()) || lines[cursor] != content) {
          return absl::FailedPreconditionError(
              "hunk does not apply at line " + std::to_string(cursor + 1));
        }
        ++cursor;
        ++seen_old;
        if (kind == ' ') {
          out += content;
          ++seen_new;
        }
      } else if (kind == '+') {
        out += content;
        ++seen_new;
      } else {
        return absl::InvalidArgumentError("unexpected line inside hunk");
      }
    }
    if (seen_old != old_count || seen_new != new_count) {
      return absl::InvalidArgumentError("truncated hunk");
    }
  }
  AppendLines(out, lines, cursor, static_cast<int>(lines.size()));
  return out;
}

MergeResult Merge3(std::string_view base_text, std::string_view ours_text,
                   std::string_view theirs_text, std::string_view ours_label,
                   std::string_view theirs_label) {
  std::vector<std::string> base = SplitLines(base_text);
  std::vector<std::string> ours = SplitLines(ours_text);
  std::vector<std::string> theirs = SplitLines(theirs_text);
  std::vector<int> in_ours = MatchedIndices(base, ours);
  std::vector<int> in_theirs = MatchedIndices(base, theirs);

  MergeResult result;
  const int n = static_cast<int>(base.size());
  int i = 0, o = 0, t = 0;
  while (i < n || o < static_cast<int>(ours.size()) ||
         t < static_cast<int>(theirs.size())) {
    if (i < n && in_ours[i] == o && in_theirs[i] == t) {
      result.text += base[i];
      ++i, ++o, ++t;
      continue;
    }
    // Unstable chunk up to the next base line matched on both sides.
    int j = i;
    while (j < n && (in_ours[j] < 0 || in_theirs[j] < 0)) ++j;
    int o_end = j < n ? in_ours[j] : static_cast<int>(ours.size());
    int t_end = j < n ? in_theirs[j] : static_cast<int>(theirs.size());
    bool ours_same = RangesEqual(ours, o, o_end, base, i, j);
    bool theirs_same = RangesEqual(theirs, t, t_end, base, i, j);
    if (ours_same) {
      AppendLines(result.text, theirs, t, t_end);
    } else if (theirs_same || RangesEqual(ours, o, o_end, theirs, t, t_end)) {
      AppendLines(result.text, ours, o, o_end);
    } else {
      result.conflicted = true;
      EnsureNewline(result.text);
      result.text += "<<<<<<< " + std::string(ours_label) + "\n";
      AppendLines(result.text, ours, o, o_end);
      EnsureNewline(result.text);
      result.text += "=======\n";
      AppendLines(result.text, theirs, t, t_end);
      EnsureNewline(result.text);
      result.text += ">>>>>>> " + std::string(theirs_label) + "\n";
    }
    i = j, o = o_end, t = t_end;
  }
  return result;
}

}  // namespace detml
