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

#include "facts/parser.h"

#include <charconv>
#include <cmath>
#include <cstdint>
#include <set>
#include <string>
#include <string_view>
#include <utility>

#include "facts/lexer.h"

namespace detml::python {
namespace {

const std::set<std::string_view>& ReservedWords() {
  static const std::set<std::string_view> kWords = {
      "False", "None",   "True",    "and",      "as",     "assert", "async",
      "await", "break",  "class",   "continue", "def",    "del",    "elif",
      "else",  "except", "finally", "for",      "from",   "global", "if",
      "import", "in",    "is",      "lambda",   "nonlocal", "not",  "or",
      "pass",  "raise",  "return",  "try",      "while",  "with",   "yield"};
  return kWords;
}

bool IsAugAssign(std::string_view op) {
  static const std::set<std::string_view> kOps = {
      "+=", "-=", "*=", "/=", "//=", "%=", "@=", "&=", "|=", "^=", ">>=",
      "<<=", "**="};
  return kOps.count(op) > 0;
}

struct ParseFailure {
  std::string message;
  int line;
  int column;
};

ExprPtr MakeExpr(Expr::Kind kind, const Token& at) {
  auto e = std::make_unique<Expr>();
  e->kind = kind;
  e->line = at.line;
  e->column = at.column;
  return e;
}

std::optional<Literal> ParseNumber(std::string_view text) {
  std::string clean;
  clean.reserve(text.size());
  for (char c : text) {
    if (c != '_') clean.push_back(c);
  }
  if (clean.empty()) return std::nullopt;
  char last = clean.back();
  if (last == 'j' || last == 'J') return std::nullopt;
  int base = 10;
  std::string_view digits = clean;
  if (clean.size() > 2 && clean[0] == '0') {
    char p = static_cast<char>(clean[1] | 0x20);
    if (p == 'x') base = 16;
    if (p == 'o') base = 8;
    if (p == 'b') base = 2;
    if (base != 10) digits.remove_prefix(2);
  }
  bool is_float = base == 10 && clean.find_first_of(".eE") != std::string::npos;
  if (!is_float) {
    std::int64_t value = 0;
    auto [ptr, ec] =
        std::from_chars(digits.data(), digits.data() + digits.size(), value, base);
    if (ec != std::errc() || ptr != digits.data() + digits.size()) {
      return std::nullopt;
    }
    return Literal{value};
  }
  double value = 0;
  auto [ptr, ec] =
      std::from_chars(clean.data(), clean.data() + clean.size(), value);
  if (ec != std::errc() || ptr != clean.data() + clean.size()) {
    return std::nullopt;
  }
  return Literal{value};
}

class Parser {
 public:
  explicit Parser(TokenStream stream) : toks_(std::move(stream.tokens)) {
    for (auto& e : stream.errors) {
      module_.errors.push_back({std::move(e.message), e.line, e.column});
    }
  }

  Module Run() {
    while (!At(TokenKind::kEnd)) {
      if (At(TokenKind::kDedent)) {
        ++pos_;
        continue;
      }
      ParseStatementRecovering();
    }
    return std::move(module_);
  }

 private:
  // ---- token helpers ----------------------------------------------------

  const Token& Peek(std::size_t ahead = 0) const {
    std::size_t i = std::min(pos_ + ahead, toks_.size() - 1);
    return toks_[i];
  }
  bool At(TokenKind kind) const { return Peek().kind == kind; }
  bool AtOp(std::string_view op) const {
    return Peek().kind == TokenKind::kOp && Peek().text == op;
  }
  bool AtName(std::string_view word) const {
    return Peek().kind == TokenKind::kName && Peek().text == word;
  }
  bool AtOpAhead(std::size_t ahead, std::string_view op) const {
    const Token& t = Peek(ahead);
    return t.kind == TokenKind::kOp && t.text == op;
  }
  const Token& Advance() {
    const Token& t = Peek();
    if (pos_ < toks_.size() - 1) ++pos_;
    return t;
  }
  [[noreturn]] void Fail(std::string message) const {
    const Token& t = Peek();
    throw ParseFailure{std::move(message), t.line, t.column};
  }
  std::string Describe(const Token& t) const {
    switch (t.kind) {
      case TokenKind::kNewline: return "end of line";
      case TokenKind::kIndent: return "indent";
      case TokenKind::kDedent: return "dedent";
      case TokenKind::kEnd: return "end of file";
      case TokenKind::kString: return "string";
      default: return "'" + t.text + "'";
    }
  }
  void ExpectOp(std::string_view op) {
    if (!AtOp(op)) {
      Fail("expected '" + std::string(op) + "', found " + Describe(Peek()));
    }
    Advance();
  }
  void ExpectName(std::string_view word) {
    if (!AtName(word)) {
      Fail("expected '" + std::string(word) + "', found " + Describe(Peek()));
    }
    Advance();
  }
  std::string ExpectIdentifier() {
    const Token& t = Peek();
    if (t.kind != TokenKind::kName || ReservedWords().count(t.text) > 0) {
      Fail("expected identifier, found " + Describe(t));
    }
    Advance();
    return t.text;
  }
  void ExpectNewline() {
    if (At(TokenKind::kNewline)) {
      Advance();
      return;
    }
    if (At(TokenKind::kEnd)) return;
    Fail("unexpected " + Describe(Peek()));
  }

  // ---- statements -------------------------------------------------------

  void ParseStatementRecovering() {
    std::size_t stmt_mark = module_.statements.size();
    try {
      ParseStatement();
    } catch (const ParseFailure& failure) {
      module_.errors.push_back(
          {"syntax error: " + failure.message, failure.line, failure.column});
      // Drop half-built statements, resynchronize on the next logical line.
      // Blocks opened inside the failed statement are parsed normally.
      module_.statements.resize(stmt_mark);
      SkipToLineEnd();
    }
  }

  void SkipToLineEnd() {
    while (!At(TokenKind::kEnd) && !At(TokenKind::kNewline)) {
      if (At(TokenKind::kIndent) || At(TokenKind::kDedent)) break;
      Advance();
    }
    if (At(TokenKind::kNewline)) Advance();
  }

  void ParseStatement() {
    const Token& t = Peek();
    if (t.kind == TokenKind::kNewline) {
      Advance();
      return;
    }
    if (t.kind == TokenKind::kIndent) {
      module_.errors.push_back({"syntax error: unexpected indent", t.line, t.column});
      Advance();
      ParseBlockBody();
      return;
    }
    if (t.kind == TokenKind::kOp && t.text == "@") {
      Advance();
      AddExprStmt(ParseNamedExpr(), t.line);
      ExpectNewline();
      return;
    }
    if (t.kind == TokenKind::kName) {
      const std::string& w = t.text;
      if (w == "if" || w == "elif" || w == "while") {
        Advance();
        AddExprStmt(ParseNamedExpr(), t.line);
        ParseSuite();
        return;
      }
      if (w == "else" || w == "try" || w == "finally") {
        Advance();
        ParseSuite();
        return;
      }
      if (w == "for") {
        ParseFor();
        return;
      }
      if (w == "with") {
        ParseWith();
        return;
      }
      if (w == "except") {
        Advance();
        if (AtOp("*")) Advance();
        if (!AtOp(":")) {
          AddExprStmt(ParseTest(), t.line);
          if (AtName("as")) {
            Advance();
            ExpectIdentifier();
          } else if (AtOp(",")) {
            Advance();
            ParseTest();
          }
        }
        ParseSuite();
        return;
      }
      if (w == "def") {
        ParseFunctionDef();
        return;
      }
      if (w == "class") {
        ParseClassDef();
        return;
      }
      if (w == "async") {
        Advance();
        if (AtName("def")) {
          ParseFunctionDef();
        } else if (AtName("for")) {
          ParseFor();
        } else if (AtName("with")) {
          ParseWith();
        } else {
          Fail("expected 'def', 'for' or 'with' after 'async'");
        }
        return;
      }
      if ((w == "match" || w == "case") && LineEndsWithColon()) {
        // Structural pattern matching: patterns carry no facts, only the
        // block body matters.
        while (!AtOp(":") || !IsSuiteStart(1)) Advance();
        ParseSuite();
        return;
      }
    }
    ParseSimpleStatementLine();
  }

  // True when the current logical line is a `match x:` style header whose
  // last token is ':'.
  bool LineEndsWithColon() const {
    if (Peek(1).kind != TokenKind::kName && Peek(1).kind != TokenKind::kNumber &&
        Peek(1).kind != TokenKind::kString && Peek(1).kind != TokenKind::kOp) {
      return false;
    }
    if (Peek(1).kind == TokenKind::kOp) {
      std::string_view op = Peek(1).text;
      if (op != "(" && op != "[" && op != "{" && op != "-" && op != "*") {
        return false;
      }
    }
    std::size_t i = pos_;
    while (i + 1 < toks_.size() && toks_[i + 1].kind != TokenKind::kNewline &&
           toks_[i + 1].kind != TokenKind::kEnd) {
      ++i;
    }
    return toks_[i].kind == TokenKind::kOp && toks_[i].text == ":";
  }

  bool IsSuiteStart(std::size_t ahead) const {
    TokenKind k = Peek(ahead).kind;
    return k == TokenKind::kNewline || k == TokenKind::kEnd;
  }

  void ParseSuite() {
    ExpectOp(":");
    if (At(TokenKind::kNewline)) {
      Advance();
      if (!At(TokenKind::kIndent)) {
        Fail("expected an indented block");
      }
      Advance();
      ParseBlockBody();
      return;
    }
    ParseSimpleStatementLine();
  }

  // Statements up to the matching DEDENT (consumed).
  void ParseBlockBody() {
    while (!At(TokenKind::kEnd)) {
      if (At(TokenKind::kDedent)) {
        Advance();
        return;
      }
      ParseStatementRecovering();
    }
  }

  void ParseFor() {
    int line = Peek().line;
    Advance();  // for
    std::vector<ExprPtr> exprs;
    exprs.push_back(ParseTargetList());
    ExpectName("in");
    exprs.push_back(ParseStarExprList());
    for (auto& e : exprs) AddExprStmt(std::move(e), line);
    ParseSuite();
  }

  void ParseWith() {
    int line = Peek().line;
    Advance();  // with
    if (AtOp("(")) {
      std::size_t mark = pos_;
      try {
        Advance();
        std::vector<ExprPtr> items = ParseWithItems(")");
        ExpectOp(")");
        if (!AtOp(":")) Fail("expected ':'");
        for (auto& e : items) AddExprStmt(std::move(e), line);
        ParseSuite();
        return;
      } catch (const ParseFailure&) {
        pos_ = mark;
      }
    }
    std::vector<ExprPtr> items = ParseWithItems(":");
    for (auto& e : items) AddExprStmt(std::move(e), line);
    ParseSuite();
  }

  std::vector<ExprPtr> ParseWithItems(std::string_view terminator) {
    std::vector<ExprPtr> items;
    while (true) {
      items.push_back(ParseTest());
      if (AtName("as")) {
        Advance();
        items.push_back(ParseTarget());
      }
      if (!AtOp(",")) break;
      Advance();
      if (AtOp(terminator)) break;
    }
    return items;
  }

  void ParseFunctionDef() {
    int line = Peek().line;
    Advance();  // def
    ExpectIdentifier();
    if (AtOp("[")) SkipBalanced();
    ExpectOp("(");
    std::vector<ExprPtr> defaults = ParseParameters(")");
    ExpectOp(")");
    if (AtOp("->")) {
      Advance();
      defaults.push_back(ParseTest());
    }
    for (auto& e : defaults) AddExprStmt(std::move(e), line);
    ParseSuite();
  }

  void ParseClassDef() {
    int line = Peek().line;
    const Token& at = Peek();
    Advance();  // class
    ExpectIdentifier();
    if (AtOp("[")) SkipBalanced();
    if (AtOp("(")) {
      auto holder = MakeExpr(Expr::Kind::kOther, at);
      Advance();
      ParseArguments(*holder);
      ExpectOp(")");
      for (auto& kw : holder->keywords) holder->children.push_back(std::move(kw.value));
      holder->keywords.clear();
      AddExprStmt(std::move(holder), line);
    }
    ParseSuite();
  }

  void SkipBalanced() {
    int depth = 0;
    do {
      if (AtOp("(") || AtOp("[") || AtOp("{")) ++depth;
      if (AtOp(")") || AtOp("]") || AtOp("}")) --depth;
      if (At(TokenKind::kEnd)) Fail("unbalanced brackets");
      Advance();
    } while (depth > 0);
  }

  // Parameter list of def/lambda. Returns default values and annotations so
  // calls inside them are still scanned.
  std::vector<ExprPtr> ParseParameters(std::string_view terminator) {
    std::vector<ExprPtr> exprs;
    bool allow_annotation = terminator == ")";
    while (!AtOp(terminator)) {
      if (AtOp("/") || AtOp("*") || AtOp("**")) {
        Advance();
        if (AtOp(",") || AtOp(terminator)) {
          if (AtOp(",")) Advance();
          continue;
        }
      }
      ExpectIdentifier();
      if (allow_annotation && AtOp(":")) {
        Advance();
        exprs.push_back(ParseTest());
      }
      if (AtOp("=")) {
        Advance();
        exprs.push_back(ParseTest());
      }
      if (!AtOp(",")) break;
      Advance();
    }
    return exprs;
  }

  void ParseSimpleStatementLine() {
    while (true) {
      ParseSmallStatement();
      if (!AtOp(";")) break;
      Advance();
      if (At(TokenKind::kNewline) || At(TokenKind::kEnd)) break;
    }
    ExpectNewline();
  }

  void ParseSmallStatement() {
    const Token& t = Peek();
    if (t.kind == TokenKind::kName) {
      const std::string& w = t.text;
      if (w == "import") {
        ParseImport();
        return;
      }
      if (w == "from") {
        ParseFromImport();
        return;
      }
      if (w == "pass" || w == "break" || w == "continue") {
        Advance();
        return;
      }
      if (w == "global" || w == "nonlocal") {
        Advance();
        ExpectIdentifier();
        while (AtOp(",")) {
          Advance();
          ExpectIdentifier();
        }
        return;
      }
      if (w == "return" || w == "del") {
        Advance();
        if (!AtStatementEnd()) AddExprStmt(ParseStarExprList(), t.line);
        return;
      }
      if (w == "raise") {
        Advance();
        if (!AtStatementEnd()) {
          AddExprStmt(ParseTest(), t.line);
          if (AtName("from")) {
            Advance();
            AddExprStmt(ParseTest(), t.line);
          }
        }
        return;
      }
      if (w == "assert") {
        Advance();
        AddExprStmt(ParseTest(), t.line);
        if (AtOp(",")) {
          Advance();
          AddExprStmt(ParseTest(), t.line);
        }
        return;
      }
    }
    ParseExpressionStatement();
  }

  bool AtStatementEnd() const {
    return At(TokenKind::kNewline) || At(TokenKind::kEnd) || AtOp(";");
  }

  std::string ParseDottedName() {
    std::string name = ExpectIdentifier();
    while (AtOp(".")) {
      Advance();
      name += ".";
      name += ExpectIdentifier();
    }
    return name;
  }

  void ParseImport() {
    Stmt stmt;
    stmt.kind = Stmt::Kind::kImport;
    stmt.line = Peek().line;
    Advance();  // import
    while (true) {
      const Token& at = Peek();
      ImportClause clause;
      clause.line = at.line;
      clause.column = at.column;
      clause.module = ParseDottedName();
      if (AtName("as")) {
        Advance();
        clause.binding = ExpectIdentifier();
        clause.target = clause.module;
      } else {
        clause.binding = clause.module.substr(0, clause.module.find('.'));
        clause.target = *clause.binding;
      }
      stmt.imports.push_back(std::move(clause));
      if (!AtOp(",")) break;
      Advance();
    }
    module_.statements.push_back(std::move(stmt));
  }

  void ParseFromImport() {
    Stmt stmt;
    stmt.kind = Stmt::Kind::kImport;
    stmt.line = Peek().line;
    Advance();  // from
    std::string module;
    while (AtOp(".") || AtOp("...")) {
      module += Advance().text;
    }
    if (!AtName("import")) {
      std::string dotted = ParseDottedName();
      module += dotted;
    }
    if (module.empty()) Fail("expected module name");
    ExpectName("import");
    auto join = [&module](const std::string& name) {
      if (module.back() == '.') return module + name;
      return module + "." + name;
    };
    if (AtOp("*")) {
      const Token& at = Advance();
      stmt.imports.push_back({join("*"), std::nullopt, "", at.line, at.column});
      module_.statements.push_back(std::move(stmt));
      return;
    }
    bool paren = AtOp("(");
    if (paren) Advance();
    while (true) {
      const Token& at = Peek();
      ImportClause clause;
      clause.line = at.line;
      clause.column = at.column;
      std::string name = ExpectIdentifier();
      clause.module = join(name);
      clause.target = clause.module;
      if (AtName("as")) {
        Advance();
        clause.binding = ExpectIdentifier();
      } else {
        clause.binding = name;
      }
      stmt.imports.push_back(std::move(clause));
      if (!AtOp(",")) break;
      Advance();
      if (paren && AtOp(")")) break;
    }
    if (paren) ExpectOp(")");
    module_.statements.push_back(std::move(stmt));
  }

  void ParseExpressionStatement() {
    int line = Peek().line;
    ExprPtr first = ParseStarExprList();
    if (AtOp("=")) {
      Stmt stmt;
      stmt.kind = Stmt::Kind::kAssign;
      stmt.line = line;
      stmt.targets.push_back(std::move(first));
      while (AtOp("=")) {
        Advance();
        ExprPtr next = AtName("yield") ? ParseYield() : ParseStarExprList();
        if (AtOp("=")) {
          stmt.targets.push_back(std::move(next));
        } else {
          stmt.value = std::move(next);
        }
      }
      module_.statements.push_back(std::move(stmt));
      return;
    }
    if (Peek().kind == TokenKind::kOp && IsAugAssign(Peek().text)) {
      Advance();
      ExprPtr value = AtName("yield") ? ParseYield() : ParseStarExprList();
      AddExprStmt(std::move(first), line);
      AddExprStmt(std::move(value), line);
      return;
    }
    if (AtOp(":")) {
      Advance();
      ExprPtr annotation = ParseTest();
      AddExprStmt(std::move(annotation), line);
      if (AtOp("=")) {
        Advance();
        Stmt stmt;
        stmt.kind = Stmt::Kind::kAssign;
        stmt.line = line;
        stmt.targets.push_back(std::move(first));
        stmt.value = AtName("yield") ? ParseYield() : ParseStarExprList();
        module_.statements.push_back(std::move(stmt));
      } else {
        AddExprStmt(std::move(first), line);
      }
      return;
    }
    AddExprStmt(std::move(first), line);
  }

  void AddExprStmt(ExprPtr expr, int line) {
    if (!expr) return;
    Stmt stmt;
    stmt.kind = Stmt::Kind::kExpr;
    stmt.line = line;
    stmt.exprs.push_back(std::move(expr));
    module_.statements.push_back(std::move(stmt));
  }

  // ---- expressions ------------------------------------------------------

  ExprPtr MakeSequence(const Token& at, std::vector<ExprPtr> elements) {
    auto seq = MakeExpr(Expr::Kind::kSequence, at);
    seq->children = std::move(elements);
    return seq;
  }

  // Comma-separated expressions (with star-expressions); a bare tuple when
  // more than one element or a trailing comma is present.
  ExprPtr ParseStarExprList() {
    if (AtName("yield")) return ParseYield();
    const Token& at = Peek();
    ExprPtr first = ParseStarOrNamed();
    if (!AtOp(",")) return first;
    std::vector<ExprPtr> elements;
    elements.push_back(std::move(first));
    while (AtOp(",")) {
      Advance();
      if (AtExpressionEnd()) break;
      elements.push_back(ParseStarOrNamed());
    }
    return MakeSequence(at, std::move(elements));
  }

  bool AtExpressionEnd() const {
    const Token& t = Peek();
    if (t.kind == TokenKind::kNewline || t.kind == TokenKind::kEnd) return true;
    if (t.kind != TokenKind::kOp) return t.kind == TokenKind::kName && t.text == "in";
    return t.text == "=" || t.text == ")" || t.text == "]" || t.text == "}" ||
           t.text == ":" || t.text == ";" || IsAugAssign(t.text);
  }

  ExprPtr ParseStarOrNamed() {
    if (AtOp("*")) {
      const Token& at = Advance();
      auto star = MakeExpr(Expr::Kind::kStarred, at);
      star->base = ParseBitOr();
      return star;
    }
    return ParseNamedExpr();
  }

  ExprPtr ParseTargetList() {
    const Token& at = Peek();
    ExprPtr first = ParseTarget();
    if (!AtOp(",")) return first;
    std::vector<ExprPtr> elements;
    elements.push_back(std::move(first));
    while (AtOp(",")) {
      Advance();
      if (AtName("in") || AtOp("=")) break;
      elements.push_back(ParseTarget());
    }
    return MakeSequence(at, std::move(elements));
  }

  ExprPtr ParseTarget() {
    if (AtOp("*")) {
      const Token& at = Advance();
      auto star = MakeExpr(Expr::Kind::kStarred, at);
      star->base = ParseBitOr();
      return star;
    }
    return ParseBitOr();
  }

  ExprPtr ParseYield() {
    const Token& at = Advance();  // yield
    auto e = MakeExpr(Expr::Kind::kOther, at);
    if (AtName("from")) {
      Advance();
      e->children.push_back(ParseTest());
    } else if (!AtExpressionEnd()) {
      e->children.push_back(ParseStarExprList());
    }
    return e;
  }

  ExprPtr ParseNamedExpr() {
    if (Peek().kind == TokenKind::kName && AtOpAhead(1, ":=")) {
      const Token& at = Peek();
      auto target = MakeExpr(Expr::Kind::kName, at);
      target->name = ExpectIdentifier();
      Advance();  // :=
      auto e = MakeExpr(Expr::Kind::kOther, at);
      e->children.push_back(std::move(target));
      e->children.push_back(ParseTest());
      return e;
    }
    return ParseTest();
  }

  ExprPtr ParseTest() {
    if (AtName("lambda")) return ParseLambda();
    const Token& at = Peek();
    ExprPtr cond_true = ParseOrTest();
    if (AtName("if")) {
      Advance();
      auto e = MakeExpr(Expr::Kind::kOther, at);
      e->children.push_back(std::move(cond_true));
      e->children.push_back(ParseOrTest());
      ExpectName("else");
      e->children.push_back(ParseTest());
      return e;
    }
    return cond_true;
  }

  ExprPtr ParseLambda() {
    const Token& at = Advance();  // lambda
    auto e = MakeExpr(Expr::Kind::kOther, at);
    e->children = ParseParameters(":");
    ExpectOp(":");
    e->children.push_back(ParseTest());
    return e;
  }

  ExprPtr Binary(const Token& at, ExprPtr lhs, ExprPtr rhs) {
    auto e = MakeExpr(Expr::Kind::kOther, at);
    e->children.push_back(std::move(lhs));
    e->children.push_back(std::move(rhs));
    return e;
  }

  ExprPtr ParseOrTest() {
    const Token& at = Peek();
    ExprPtr lhs = ParseAndTest();
    while (AtName("or")) {
      Advance();
      lhs = Binary(at, std::move(lhs), ParseAndTest());
    }
    return lhs;
  }

  ExprPtr ParseAndTest() {
    const Token& at = Peek();
    ExprPtr lhs = ParseNotTest();
    while (AtName("and")) {
      Advance();
      lhs = Binary(at, std::move(lhs), ParseNotTest());
    }
    return lhs;
  }

  ExprPtr ParseNotTest() {
    if (AtName("not")) {
      const Token& at = Advance();
      auto e = MakeExpr(Expr::Kind::kOther, at);
      e->children.push_back(ParseNotTest());
      return e;
    }
    return ParseComparison();
  }

  bool AtComparisonOp() const {
    const Token& t = Peek();
    if (t.kind == TokenKind::kOp) {
      return t.text == "<" || t.text == ">" || t.text == "==" ||
             t.text == ">=" || t.text == "<=" || t.text == "!=" || t.text == "<>";
    }
    if (t.kind == TokenKind::kName) {
      if (t.text == "in" || t.text == "is") return true;
      if (t.text == "not") {
        const Token& n = Peek(1);
        return n.kind == TokenKind::kName && n.text == "in";
      }
    }
    return false;
  }

  ExprPtr ParseComparison() {
    const Token& at = Peek();
    ExprPtr lhs = ParseBitOr();
    while (AtComparisonOp()) {
      if (AtName("not") || AtName("is")) {
        Advance();
        if (AtName("not") || AtName("in")) Advance();
      } else {
        Advance();
      }
      lhs = Binary(at, std::move(lhs), ParseBitOr());
    }
    return lhs;
  }

  template <typename Next>
  ExprPtr ParseLeftAssoc(std::initializer_list<std::string_view> ops, Next next) {
    const Token& at = Peek();
    ExprPtr lhs = (this->*next)();
    while (true) {
      bool matched = false;
      for (std::string_view op : ops) {
        if (AtOp(op)) {
          matched = true;
          break;
        }
      }
      if (!matched) return lhs;
      Advance();
      lhs = Binary(at, std::move(lhs), (this->*next)());
    }
  }

  ExprPtr ParseBitOr() { return ParseLeftAssoc({"|"}, &Parser::ParseBitXor); }
  ExprPtr ParseBitXor() { return ParseLeftAssoc({"^"}, &Parser::ParseBitAnd); }
  ExprPtr ParseBitAnd() { return ParseLeftAssoc({"&"}, &Parser::ParseShift); }
  ExprPtr ParseShift() { return ParseLeftAssoc({"<<", ">>"}, &Parser::ParseArith); }
  ExprPtr ParseArith() { return ParseLeftAssoc({"+", "-"}, &Parser::ParseTerm); }
  ExprPtr ParseTerm() {
    return ParseLeftAssoc({"*", "/", "%", "//", "@"}, &Parser::ParseFactor);
  }

  ExprPtr ParseFactor() {
    if (AtOp("+") || AtOp("-") || AtOp("~")) {
      const Token& at = Advance();
      ExprPtr operand = ParseFactor();
      if (operand->kind == Expr::Kind::kLiteral && at.text != "~") {
        Literal& lit = operand->literal;
        bool negate = at.text == "-";
        if (auto* i = std::get_if<std::int64_t>(&lit)) {
          if (negate) *i = -*i;
          operand->line = at.line;
          operand->column = at.column;
          return operand;
        }
        if (auto* d = std::get_if<double>(&lit)) {
          if (negate) *d = -*d;
          operand->line = at.line;
          operand->column = at.column;
          return operand;
        }
      }
      auto e = MakeExpr(Expr::Kind::kOther, at);
      e->children.push_back(std::move(operand));
      return e;
    }
    return ParsePower();
  }

  ExprPtr ParsePower() {
    const Token& at = Peek();
    ExprPtr base;
    if (AtName("await")) {
      Advance();
      auto e = MakeExpr(Expr::Kind::kOther, at);
      e->children.push_back(ParsePrimary());
      base = std::move(e);
    } else {
      base = ParsePrimary();
    }
    if (AtOp("**")) {
      Advance();
      return Binary(at, std::move(base), ParseFactor());
    }
    return base;
  }

  ExprPtr ParsePrimary() {
    const Token& start = Peek();
    ExprPtr e = ParseAtom();
    while (true) {
      if (AtOp(".")) {
        Advance();
        auto attr = MakeExpr(Expr::Kind::kAttribute, start);
        attr->name = ExpectIdentifier();
        attr->base = std::move(e);
        e = std::move(attr);
      } else if (AtOp("(")) {
        Advance();
        auto call = MakeExpr(Expr::Kind::kCall, start);
        call->base = std::move(e);
        ParseArguments(*call);
        ExpectOp(")");
        e = std::move(call);
      } else if (AtOp("[")) {
        Advance();
        auto sub = MakeExpr(Expr::Kind::kSubscript, start);
        sub->base = std::move(e);
        sub->children.push_back(ParseSubscriptList());
        ExpectOp("]");
        e = std::move(sub);
      } else {
        return e;
      }
    }
  }

  void ParseArguments(Expr& call) {
    while (!AtOp(")")) {
      const Token& at = Peek();
      if (AtOp("**")) {
        Advance();
        call.keywords.push_back({"", ParseTest(), at.line, at.column});
      } else if (AtOp("*")) {
        Advance();
        auto star = MakeExpr(Expr::Kind::kStarred, at);
        star->base = ParseTest();
        call.children.push_back(std::move(star));
      } else if (at.kind == TokenKind::kName && AtOpAhead(1, "=")) {
        std::string name = ExpectIdentifier();
        Advance();  // =
        call.keywords.push_back({std::move(name), ParseTest(), at.line, at.column});
      } else {
        ExprPtr arg = ParseNamedExpr();
        if (AtName("for") || AtName("async")) {
          arg = ParseComprehension(at, std::move(arg));
        }
        call.children.push_back(std::move(arg));
      }
      if (!AtOp(",")) break;
      Advance();
    }
  }

  ExprPtr ParseSubscriptList() {
    const Token& at = Peek();
    std::vector<ExprPtr> parts;
    while (true) {
      parts.push_back(ParseSubscript());
      if (!AtOp(",")) break;
      Advance();
      if (AtOp("]")) break;
    }
    if (parts.size() == 1) return std::move(parts.front());
    return MakeSequence(at, std::move(parts));
  }

  ExprPtr ParseSubscript() {
    const Token& at = Peek();
    ExprPtr lower;
    if (!AtOp(":")) {
      lower = ParseStarOrNamed();
      if (!AtOp(":")) return lower;
    }
    auto slice = MakeExpr(Expr::Kind::kOther, at);
    if (lower) slice->children.push_back(std::move(lower));
    for (int part = 0; part < 2 && AtOp(":"); ++part) {
      Advance();
      if (!AtOp(":") && !AtOp("]") && !AtOp(",")) {
        slice->children.push_back(ParseTest());
      }
    }
    return slice;
  }

  // `element for target in iter [if cond]...` after the element.
  ExprPtr ParseComprehension(const Token& at, ExprPtr element) {
    auto comp = MakeExpr(Expr::Kind::kOther, at);
    comp->children.push_back(std::move(element));
    while (AtName("for") || AtName("async")) {
      if (AtName("async")) Advance();
      ExpectName("for");
      comp->children.push_back(ParseTargetList());
      ExpectName("in");
      comp->children.push_back(ParseOrTest());
      while (AtName("if")) {
        Advance();
        comp->children.push_back(ParseOrTestOrLambda());
      }
    }
    return comp;
  }

  ExprPtr ParseOrTestOrLambda() {
    if (AtName("lambda")) return ParseLambda();
    return ParseOrTest();
  }

  ExprPtr ParseAtom() {
    const Token& t = Peek();
    switch (t.kind) {
      case TokenKind::kName: {
        if (t.text == "None" || t.text == "True" || t.text == "False") {
          Advance();
          auto lit = MakeExpr(Expr::Kind::kLiteral, t);
          if (t.text == "None") {
            lit->literal = NoneLiteral{};
          } else {
            lit->literal = t.text == "True";
          }
          return lit;
        }
        if (ReservedWords().count(t.text) > 0) {
          Fail("unexpected keyword '" + t.text + "'");
        }
        Advance();
        auto name = MakeExpr(Expr::Kind::kName, t);
        name->name = t.text;
        return name;
      }
      case TokenKind::kNumber: {
        Advance();
        std::optional<Literal> value = ParseNumber(t.text);
        if (!value) return MakeExpr(Expr::Kind::kOther, t);
        auto lit = MakeExpr(Expr::Kind::kLiteral, t);
        lit->literal = std::move(*value);
        return lit;
      }
      case TokenKind::kString: {
        std::string text;
        bool fstring = false;
        while (At(TokenKind::kString)) {
          const Token& s = Advance();
          fstring |= s.is_fstring;
          text += s.text;
        }
        if (fstring) return MakeExpr(Expr::Kind::kFString, t);
        auto lit = MakeExpr(Expr::Kind::kLiteral, t);
        lit->literal = std::move(text);
        return lit;
      }
      case TokenKind::kOp:
        if (t.text == "(") return ParseParenthesized();
        if (t.text == "[") return ParseListDisplay();
        if (t.text == "{") return ParseBraceDisplay();
        if (t.text == "...") {
          Advance();
          return MakeExpr(Expr::Kind::kOther, t);
        }
        break;
      default:
        break;
    }
    Fail("unexpected " + Describe(t));
  }

  ExprPtr ParseParenthesized() {
    const Token& at = Advance();  // (
    if (AtOp(")")) {
      Advance();
      return MakeSequence(at, {});
    }
    if (AtName("yield")) {
      ExprPtr y = ParseYield();
      ExpectOp(")");
      return y;
    }
    ExprPtr first = ParseStarOrNamed();
    if (AtName("for") || AtName("async")) {
      ExprPtr comp = ParseComprehension(at, std::move(first));
      ExpectOp(")");
      return comp;
    }
    if (AtOp(")")) {
      Advance();
      return first;
    }
    std::vector<ExprPtr> elements;
    elements.push_back(std::move(first));
    while (AtOp(",")) {
      Advance();
      if (AtOp(")")) break;
      elements.push_back(ParseStarOrNamed());
    }
    ExpectOp(")");
    return MakeSequence(at, std::move(elements));
  }

  ExprPtr ParseListDisplay() {
    const Token& at = Advance();  // [
    std::vector<ExprPtr> elements;
    if (!AtOp("]")) {
      ExprPtr first = ParseStarOrNamed();
      if (AtName("for") || AtName("async")) {
        ExprPtr comp = ParseComprehension(at, std::move(first));
        ExpectOp("]");
        return comp;
      }
      elements.push_back(std::move(first));
      while (AtOp(",")) {
        Advance();
        if (AtOp("]")) break;
        elements.push_back(ParseStarOrNamed());
      }
    }
    ExpectOp("]");
    return MakeSequence(at, std::move(elements));
  }

  ExprPtr ParseBraceDisplay() {
    const Token& at = Advance();  // {
    auto dict = MakeExpr(Expr::Kind::kDict, at);
    if (AtOp("}")) {
      Advance();
      return dict;
    }
    // Dict display or comprehension.
    if (AtOp("**")) {
      ParseDictItems(*dict);
      ExpectOp("}");
      return dict;
    }
    ExprPtr first = ParseStarOrNamed();
    if (AtOp(":")) {
      Advance();
      ExprPtr value = ParseTest();
      if (AtName("for") || AtName("async")) {
        auto pair = MakeExpr(Expr::Kind::kOther, at);
        pair->children.push_back(std::move(first));
        pair->children.push_back(std::move(value));
        ExprPtr comp = ParseComprehension(at, std::move(pair));
        ExpectOp("}");
        return comp;
      }
      dict->items.push_back({std::move(first), std::move(value)});
      if (AtOp(",")) {
        Advance();
        ParseDictItems(*dict);
      }
      ExpectOp("}");
      return dict;
    }
    // Set display or comprehension.
    if (AtName("for") || AtName("async")) {
      ExprPtr comp = ParseComprehension(at, std::move(first));
      ExpectOp("}");
      return comp;
    }
    std::vector<ExprPtr> elements;
    elements.push_back(std::move(first));
    while (AtOp(",")) {
      Advance();
      if (AtOp("}")) break;
      elements.push_back(ParseStarOrNamed());
    }
    ExpectOp("}");
    auto set = MakeExpr(Expr::Kind::kOther, at);
    set->children = std::move(elements);
    return set;
  }

  void ParseDictItems(Expr& dict) {
    while (!AtOp("}")) {
      if (AtOp("**")) {
        Advance();
        dict.items.push_back({nullptr, ParseBitOr()});
      } else {
        ExprPtr key = ParseTest();
        ExpectOp(":");
        dict.items.push_back({std::move(key), ParseTest()});
      }
      if (!AtOp(",")) break;
      Advance();
    }
  }

  std::vector<Token> toks_;
  std::size_t pos_ = 0;
  Module module_;
};

}  // namespace

Module Parse(std::string_view source) { return Parser(Tokenize(source)).Run(); }

std::optional<std::string> DottedName(const Expr& expr) {
  if (expr.kind == Expr::Kind::kName) return expr.name;
  if (expr.kind == Expr::Kind::kAttribute && expr.base) {
    std::optional<std::string> base = DottedName(*expr.base);
    if (!base) return std::nullopt;
    return *base + "." + expr.name;
  }
  return std::nullopt;
}

}  // namespace detml::python
