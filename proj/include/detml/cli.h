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

#ifndef DETML_CLI_H_
#define DETML_CLI_H_

#include <iosfwd>
#include <string>
#include <vector>

namespace detml {

struct CliStreams {
  std::istream& in;
  std::ostream& out;
  std::ostream& err;
  // Whether `in` is an interactive terminal (enables create prompts) and
  // whether `out` is one (enables --color=auto).
  bool in_is_tty = false;
  bool out_is_tty = false;
};

// Exit codes shared by every subcommand.
inline constexpr int kExitOk = 0;
inline constexpr int kExitFindings = 1;  // lint errors or sync conflicts
inline constexpr int kExitUsage = 2;     // usage or tool error

// Runs one invocation. `args` excludes the program name.
int RunCli(const std::vector<std::string>& args, CliStreams io);

}  // namespace detml

#endif  // DETML_CLI_H_
