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

#ifndef DETML_SRC_FACTS_PARSER_H_
#define DETML_SRC_FACTS_PARSER_H_

#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "detml/facts.h"

namespace detml::python {

struct Expr;
using ExprPtr = std::unique_ptr<Expr>;

struct Keyword {
  std::string name;  // empty for **kwargs
  ExprPtr value;
  int line = 1;
  int column = 1;
};

struct DictItem {
  ExprPtr key;  // null for **mapping
  ExprPtr value;
};

// Expression tree reduced to what fact extraction needs. Everything the
// extractor does not inspect structurally is kOther with its operands kept
// in `children` so nested calls are still visited.
struct Expr {
  enum class Kind {
    kName,
    kAttribute,
    kCall,
    kSubscript,
    kLiteral,
    kFString,
    kDict,
    kSequence,  // tuple or list display
    kStarred,
    kOther,
  };

  Kind kind = Kind::kOther;
  int line = 1;
  int column = 1;
  std::string name;        // kName: identifier; kAttribute: attribute name
  Literal literal;         // kLiteral
  ExprPtr base;            // kAttribute/kSubscript value, kCall callee
  std::vector<ExprPtr> children;  // call args, subscript index, operands
  std::vector<Keyword> keywords;  // kCall
  std::vector<DictItem> items;    // kDict
};

struct ImportClause {
  std::string module;                // "a.b" or, for from-imports, "pkg.name"
  std::optional<std::string> binding;  // local name bound, none for '*'
  std::string target;                  // path the binding denotes
  int line = 1;
  int column = 1;
};

// Statements are flattened: compound statement headers become kExpr entries
// and bodies are appended in source order. Analysis is flow-insensitive so
// nesting is not retained.
struct Stmt {
  enum class Kind { kImport, kAssign, kExpr };
  Kind kind = Kind::kExpr;
  int line = 1;
  std::vector<ImportClause> imports;
  // kAssign: every target of `t1 = t2 = value`; annotated assignments too.
  std::vector<ExprPtr> targets;
  ExprPtr value;
  // kExpr (and augmented assignment): expressions to scan for calls.
  std::vector<ExprPtr> exprs;
};

struct SyntaxError {
  std::string message;
  int line = 1;
  int column = 1;
};

struct Module {
  std::vector<Stmt> statements;
  std::vector<SyntaxError> errors;
};

// Parses Python source. Statements that fail to parse are skipped up to the
// next logical line and reported in Module::errors.
Module Parse(std::string_view source);

// "a.b.c" for a Name/Attribute chain, nullopt otherwise.
std::optional<std::string> DottedName(const Expr& expr);

}  // namespace detml::python

#endif  // DETML_SRC_FACTS_PARSER_H_
