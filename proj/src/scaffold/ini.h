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

#ifndef DETML_SCAFFOLD_INI_H_
#define DETML_SCAFFOLD_INI_H_

#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "absl/status/statusor.h"

namespace detml::ini {

struct Section {
  std::string name;
  int line = 0;
  std::vector<std::pair<std::string, std::string>> entries;
};

// Parses "[section]" headers and "key = value" lines. '#' and ';' start
// comment lines. A value wrapped in double quotes is unescaped (\\ \" \n \t),
// which is how leading/trailing blanks and newlines survive a round trip.
// Keys outside any section, malformed lines and repeated keys in a section
// are errors naming the line.
absl::StatusOr<std::vector<Section>> Parse(std::string_view text);

// Formats a value so that Parse returns it unchanged.
std::string QuoteIfNeeded(std::string_view value);

}  // namespace detml::ini

#endif  // DETML_SCAFFOLD_INI_H_
