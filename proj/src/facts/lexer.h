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

#ifndef DETML_SRC_FACTS_LEXER_H_
#define DETML_SRC_FACTS_LEXER_H_

#include <string>
#include <string_view>
#include <vector>

namespace detml::python {

enum class TokenKind {
  kName,
  kNumber,
  kString,
  kOp,
  kNewline,
  kIndent,
  kDedent,
  kEnd,
};

struct Token {
  TokenKind kind = TokenKind::kEnd;
  // Names, operators and numbers: the source text. Strings: the decoded
  // value (escape sequences processed unless raw).
  std::string text;
  int line = 1;
  int column = 1;
  // String tokens only.
  bool is_fstring = false;
  bool is_bytes = false;
};

struct LexError {
  std::string message;
  int line = 1;
  int column = 1;
};

struct TokenStream {
  std::vector<Token> tokens;
  std::vector<LexError> errors;
};

// Tokenizes Python 3 source, producing INDENT/DEDENT/NEWLINE structure
// tokens. Never fails: malformed input produces LexErrors and the best
// token stream that can be recovered.
TokenStream Tokenize(std::string_view source);

}  // namespace detml::python

#endif  // DETML_SRC_FACTS_LEXER_H_
