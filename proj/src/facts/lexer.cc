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

#include "facts/lexer.h"

#include <array>
#include <cctype>
#include <cstdint>
#include <string>
#include <string_view>

namespace detml::python {
namespace {

bool IsNameStart(unsigned char c) {
  return std::isalpha(c) || c == '_' || c >= 0x80;
}

bool IsNameChar(unsigned char c) {
  return std::isalnum(c) || c == '_' || c >= 0x80;
}

bool IsStringPrefix(std::string_view word) {
  if (word.empty() || word.size() > 2) return false;
  bool raw = false, bytes = false, fmt = false, uni = false;
  for (char ch : word) {
    switch (std::tolower(static_cast<unsigned char>(ch))) {
      case 'r': if (raw) return false; raw = true; break;
      case 'b': if (bytes) return false; bytes = true; break;
      case 'f': if (fmt) return false; fmt = true; break;
      case 'u': if (uni) return false; uni = true; break;
      default: return false;
    }
  }
  if (uni && word.size() > 1) return false;
  if (bytes && fmt) return false;
  return true;
}

constexpr std::array<std::string_view, 4> kThreeCharOps = {"**=", "//=", ">>=",
                                                           "<<="};
constexpr std::array<std::string_view, 21> kTwoCharOps = {
    "**", "//", "<<", ">>", "<=", ">=", "==", "!=", "->", "+=", "-=",
    "*=", "/=", "%=", "&=", "|=", "^=", "@=", ":=", "<>", "..."};

void AppendUtf8(std::string& out, std::uint32_t cp) {
  if (cp < 0x80) {
    out.push_back(static_cast<char>(cp));
  } else if (cp < 0x800) {
    out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else if (cp < 0x10000) {
    out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else {
    out.push_back(static_cast<char>(0xF0 | (cp >> 18)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  }
}

int HexValue(char c) {
  if (c >= '0' && c <= '9') return c - '0';
  if (c >= 'a' && c <= 'f') return c - 'a' + 10;
  if (c >= 'A' && c <= 'F') return c - 'A' + 10;
  return -1;
}

// Processes backslash escapes of a non-raw string body.
std::string DecodeEscapes(std::string_view body) {
  std::string out;
  out.reserve(body.size());
  for (std::size_t i = 0; i < body.size(); ++i) {
    char c = body[i];
    if (c != '\\' || i + 1 >= body.size()) {
      out.push_back(c);
      continue;
    }
    char e = body[++i];
    switch (e) {
      case '\n': break;
      case 'n': out.push_back('\n'); break;
      case 't': out.push_back('\t'); break;
      case 'r': out.push_back('\r'); break;
      case 'a': out.push_back('\a'); break;
      case 'b': out.push_back('\b'); break;
      case 'f': out.push_back('\f'); break;
      case 'v': out.push_back('\v'); break;
      case '\\': out.push_back('\\'); break;
      case '\'': out.push_back('\''); break;
      case '"': out.push_back('"'); break;
      case 'x':
      case 'u':
      case 'U': {
        std::size_t digits = e == 'x' ? 2 : (e == 'u' ? 4 : 8);
        std::uint32_t cp = 0;
        std::size_t n = 0;
        while (n < digits && i + 1 < body.size() && HexValue(body[i + 1]) >= 0) {
          cp = cp * 16 + static_cast<std::uint32_t>(HexValue(body[++i]));
          ++n;
        }
        if (n == digits) {
          AppendUtf8(out, cp);
        } else {
          out.push_back('\\');
          out.push_back(e);
        }
        break;
      }
      default:
        if (e >= '0' && e <= '7') {
          std::uint32_t cp = static_cast<std::uint32_t>(e - '0');
          for (int k = 0; k < 2 && i + 1 < body.size() && body[i + 1] >= '0' &&
                          body[i + 1] <= '7';
               ++k) {
            cp = cp * 8 + static_cast<std::uint32_t>(body[++i] - '0');
          }
          AppendUtf8(out, cp);
        } else {
          out.push_back('\\');
          out.push_back(e);
        }
    }
  }
  return out;
}

class Lexer {
 public:
  explicit Lexer(std::string_view source) : src_(source) {}

  TokenStream Run() {
    indents_.push_back(0);
    while (pos_ < src_.size()) {
      if (at_line_start_ && depth_ == 0) {
        if (!HandleIndentation()) continue;
      }
      LexOne();
    }
    if (depth_ > 0) {
      Error("unexpected end of file inside brackets", line_, Column());
    }
    if (!out_.tokens.empty() && out_.tokens.back().kind != TokenKind::kNewline &&
        out_.tokens.back().kind != TokenKind::kDedent &&
        out_.tokens.back().kind != TokenKind::kIndent) {
      Emit(TokenKind::kNewline, "", line_, Column());
    }
    while (indents_.size() > 1) {
      indents_.pop_back();
      Emit(TokenKind::kDedent, "", line_, Column());
    }
    Emit(TokenKind::kEnd, "", line_, Column());
    return std::move(out_);
  }

 private:
  int Column() const { return static_cast<int>(pos_ - line_start_) + 1; }

  void Emit(TokenKind kind, std::string text, int line, int column) {
    Token t;
    t.kind = kind;
    t.text = std::move(text);
    t.line = line;
    t.column = column;
    out_.tokens.push_back(std::move(t));
  }

  void Error(std::string message, int line, int column) {
    out_.errors.push_back({std::move(message), line, column});
  }

  void NewLine() {
    ++line_;
    line_start_ = pos_;
  }

  // Measures leading whitespace of a physical line and emits INDENT/DEDENT.
  // Returns false when the line is blank or comment-only (consumed whole).
  bool HandleIndentation() {
    int width = 0;
    while (pos_ < src_.size()) {
      char c = src_[pos_];
      if (c == ' ') {
        ++width;
      } else if (c == '\t') {
        width = (width / 8 + 1) * 8;
      } else if (c == '\f') {
        width = 0;
      } else {
        break;
      }
      ++pos_;
    }
    if (pos_ >= src_.size()) return false;
    char c = src_[pos_];
    if (c == '#' || c == '\n' || c == '\r') {
      while (pos_ < src_.size() && src_[pos_] != '\n') ++pos_;
      if (pos_ < src_.size()) {
        ++pos_;
        NewLine();
      }
      return false;
    }
    at_line_start_ = false;
    if (width > indents_.back()) {
      indents_.push_back(width);
      Emit(TokenKind::kIndent, "", line_, Column());
    } else if (width < indents_.back()) {
      while (indents_.size() > 1 && width < indents_.back()) {
        indents_.pop_back();
        Emit(TokenKind::kDedent, "", line_, Column());
      }
      if (width != indents_.back()) {
        Error("unindent does not match any outer indentation level", line_,
              Column());
      }
    }
    return true;
  }

  void LexOne() {
    char c = src_[pos_];
    unsigned char uc = static_cast<unsigned char>(c);
    if (c == ' ' || c == '\t' || c == '\f') {
      ++pos_;
      return;
    }
    if (c == '\r') {
      ++pos_;
      return;
    }
    if (c == '#') {
      while (pos_ < src_.size() && src_[pos_] != '\n') ++pos_;
      return;
    }
    if (c == '\n') {
      int col = Column();
      ++pos_;
      if (depth_ == 0) {
        if (!out_.tokens.empty() &&
            out_.tokens.back().kind != TokenKind::kNewline) {
          Emit(TokenKind::kNewline, "", line_, col);
        }
        at_line_start_ = true;
      }
      NewLine();
      return;
    }
    if (c == '\\') {
      std::size_t next = pos_ + 1;
      if (next < src_.size() && src_[next] == '\r') ++next;
      if (next < src_.size() && src_[next] == '\n') {
        pos_ = next + 1;
        NewLine();
        return;
      }
      Error("unexpected character after line continuation", line_, Column());
      ++pos_;
      return;
    }
    if (IsNameStart(uc)) {
      LexNameOrString();
      return;
    }
    if (std::isdigit(uc) ||
        (c == '.' && pos_ + 1 < src_.size() &&
         std::isdigit(static_cast<unsigned char>(src_[pos_ + 1])))) {
      LexNumber();
      return;
    }
    if (c == '\'' || c == '"') {
      LexString("");
      return;
    }
    LexOperator();
  }

  void LexNameOrString() {
    std::size_t start = pos_;
    int col = Column();
    while (pos_ < src_.size() &&
           IsNameChar(static_cast<unsigned char>(src_[pos_]))) {
      ++pos_;
    }
    std::string_view word = src_.substr(start, pos_ - start);
    if (pos_ < src_.size() && (src_[pos_] == '\'' || src_[pos_] == '"') &&
        IsStringPrefix(word)) {
      pos_ = start;
      std::string prefix(word);
      pos_ += prefix.size();
      LexString(prefix, col);
      return;
    }
    Emit(TokenKind::kName, std::string(word), line_, col);
  }

  void LexNumber() {
    std::size_t start = pos_;
    int col = Column();
    bool hex = src_[pos_] == '0' && pos_ + 1 < src_.size() &&
               (src_[pos_ + 1] == 'x' || src_[pos_ + 1] == 'X');
    while (pos_ < src_.size()) {
      char c = src_[pos_];
      if (std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '.') {
        ++pos_;
      } else if ((c == '+' || c == '-') && !hex &&
                 (src_[pos_ - 1] == 'e' || src_[pos_ - 1] == 'E')) {
        ++pos_;
      } else {
        break;
      }
    }
    Emit(TokenKind::kNumber, std::string(src_.substr(start, pos_ - start)),
         line_, col);
  }

  void LexString(const std::string& prefix, int col = -1) {
    if (col < 0) col = Column();
    int line = line_;
    bool raw = false, fmt = false, bytes = false;
    for (char p : prefix) {
      char l = static_cast<char>(std::tolower(static_cast<unsigned char>(p)));
      raw |= l == 'r';
      fmt |= l == 'f';
      bytes |= l == 'b';
    }
    char quote = src_[pos_];
    bool triple = src_.substr(pos_, 3) == std::string(3, quote);
    pos_ += triple ? 3 : 1;
    std::size_t body_start = pos_;
    bool closed = false;
    std::size_t body_end = pos_;
    while (pos_ < src_.size()) {
      char c = src_[pos_];
      if (c == '\\') {
        if (pos_ + 1 < src_.size() && src_[pos_ + 1] == '\n') {
          pos_ += 2;
          NewLine();
          continue;
        }
        pos_ += 2;
        continue;
      }
      if (c == '\n') {
        if (!triple) break;
        ++pos_;
        NewLine();
        continue;
      }
      if (c == quote) {
        if (!triple) {
          body_end = pos_;
          ++pos_;
          closed = true;
          break;
        }
        if (src_.substr(pos_, 3) == std::string(3, quote)) {
          body_end = pos_;
          pos_ += 3;
          closed = true;
          break;
        }
      }
      ++pos_;
    }
    if (!closed) {
      body_end = std::min(pos_, src_.size());
      Error(triple ? "unterminated triple-quoted string"
                   : "unterminated string literal",
            line, col);
    }
    std::string_view body = src_.substr(body_start, body_end - body_start);
    Token t;
    t.kind = TokenKind::kString;
    t.text = raw ? std::string(body) : DecodeEscapes(body);
    t.line = line;
    t.column = col;
    t.is_fstring = fmt;
    t.is_bytes = bytes;
    out_.tokens.push_back(std::move(t));
  }

  void LexOperator() {
    int col = Column();
    for (std::string_view op : kThreeCharOps) {
      if (src_.substr(pos_, 3) == op) {
        pos_ += 3;
        Emit(TokenKind::kOp, std::string(op), line_, col);
        return;
      }
    }
    for (std::string_view op : kTwoCharOps) {
      if (src_.substr(pos_, op.size()) == op) {
        pos_ += op.size();
        Emit(TokenKind::kOp, std::string(op), line_, col);
        return;
      }
    }
    char c = src_[pos_];
    static constexpr std::string_view kSingle = "+-*/%@&|^~<>()[]{},:.;=!";
    if (kSingle.find(c) == std::string_view::npos) {
      Error(std::string("unexpected character '") + c + "'", line_, col);
      ++pos_;
      return;
    }
    ++pos_;
    if (c == '(' || c == '[' || c == '{') {
      ++depth_;
    } else if (c == ')' || c == ']' || c == '}') {
      if (depth_ == 0) {
        Error(std::string("unmatched '") + c + "'", line_, col);
      } else {
        --depth_;
      }
    }
    Emit(TokenKind::kOp, std::string(1, c), line_, col);
  }

  std::string_view src_;
  std::size_t pos_ = 0;
  std::size_t line_start_ = 0;
  int line_ = 1;
  int depth_ = 0;
  bool at_line_start_ = true;
  std::vector<int> indents_;
  TokenStream out_;
};

}  // namespace

TokenStream Tokenize(std::string_view source) { return Lexer(source).Run(); }

}  // namespace detml::python
