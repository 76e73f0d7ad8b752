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

#ifndef DETML_DIFF_H_
#define DETML_DIFF_H_

#include <string>
#include <string_view>
#include <vector>

#include "absl/status/statusor.h"

namespace detml {

// Splits text into lines, each keeping its trailing '\n'. CRLF is normalised
// to LF first. A final line without '\n' is kept as is.
std::vector<std::string> SplitLines(std::string_view text);

// Unified diff of `before` and `after` with `context` lines of context.
// Returns "" when the texts are equal. Headers are "--- a/<path>" and
// "+++ b/<path>"; a missing trailing newline is marked with the usual
// "\ No newline at end of file" line.
std::string UnifiedDiff(std::string_view before, std::string_view after,
                        std::string_view path, int context = 3);

// Applies a unified diff produced by UnifiedDiff. Hunks must match exactly at
// their stated positions.
absl::StatusOr<std::string> ApplyPatch(std::string_view text,
                                       std::string_view patch);

struct MergeResult {
  std::string text;
  bool conflicted = false;
};

// Line-based three-way merge. Regions changed on only one side take that
// side; identical changes on both sides merge cleanly; anything else becomes
// a conflict block labelled with `ours_label` and `theirs_label`.
MergeResult Merge3(std::string_view base, std::string_view ours,
                   std::string_view theirs, std::string_view ours_label,
                   std::string_view theirs_label);

}  // namespace detml

#endif  // DETML_DIFF_H_
