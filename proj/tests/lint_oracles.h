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

#ifndef DETML_TESTS_LINT_ORACLES_H_
#define DETML_TESTS_LINT_ORACLES_H_

#include <algorithm>
#include <cctype>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "detml/lint.h"

namespace detml::testing {

inline std::multiset<std::string> Ids(const std::vector<Violation>& violations) {
  std::multiset<std::string> ids;
  for (const Violation& v : violations) ids.insert(v.rule_id);
  return ids;
}

inline std::string DeleteLine(const std::string& text, int line) {
  std::istringstream in(text);
  std::string out;
  int n = 0;
  for (std::string l; std::getline(in, l);) {
    if (++n != line) out += l + "\n";
  }
  return out;
}

inline int LineCount(const std::string& text) {
  return static_cast<int>(std::count(text.begin(), text.end(), '\n'));
}

// Deletion oracle: for each line whose deletion changes the outcome, the
// exact rule ids the mutant must report. Other lines must leave the baseline.
struct MutationTable {
  const char* fixture;
  std::multiset<std::string> baseline;
  std::map<int, std::multiset<std::string>> mapped;
};

inline const MutationTable kMutationTables[] = {
    {"recipes/pytorch_recipe.py",
     {"pytorch-set-deterministic"},
     {{2, {}},
      {6, {"pytorch-set-deterministic", "general-pythonhashseed"}},
      {7, {"pytorch-set-deterministic", "general-random-seed"}},
      {8, {"pytorch-set-deterministic", "general-numpy-seed"}},
      {9, {"pytorch-set-deterministic", "pytorch-manual-seed"}},
      {10, {"pytorch-set-deterministic", "pytorch-cudnn-deterministic"}},
      {11, {"pytorch-set-deterministic", "pytorch-cudnn-benchmark"}}}},
    {"recipes/tensorflow_recipe.py",
     {},
     {{6, {"general-pythonhashseed"}},
      {7, {"general-random-seed"}},
      {8, {"general-numpy-seed"}},
      {9, {"tensorflow-random-seed"}},
      {10, {"tensorflow-deterministic-ops"}},
      {11, {"tensorflow-intra-op-threads"}},
      {12, {"tensorflow-inter-op-threads"}}}},
    // No xgboost import in the listing, so neither the xgboost rules nor
    // the PYTHONHASHSEED rule are active.
    {"recipes/xgboost_recipe.py",
     {},
     {{6, {"general-random-seed"}}, {7, {"general-numpy-seed"}}}},
    // Either half of the two-line dict literal breaks the statement, which
    // removes the seed key and the histogram key together.
    {"recipes/xgboost_recipe_with_import.py",
     {"xgboost-single-precision"},
     {{4, {}},
      {6, {"xgboost-single-precision", "general-pythonhashseed"}},
      {7, {"xgboost-single-precision", "general-random-seed"}},
      {8, {"xgboost-single-precision", "general-numpy-seed"}},
      {9, {"xgboost-param-seed"}},
      {10, {"xgboost-param-seed"}}}},
};

// Renames every use of the top-level name `from` to `to` outside import
// lines: an occurrence counts when it is not preceded by '.' or an
// identifier character and is followed by '.'.
inline std::string RenameRoot(const std::string& text, const std::string& from, const std::string& to) {
  std::istringstream in(text);
  std::string out;
  for (std::string line; std::getline(in, line);) {
    if (line.rfind("import ", 0) == 0 || line.rfind("from ", 0) == 0) {
      out += line + "\n";
      continue;
    }
    std::string renamed;
    for (std::size_t i = 0; i < line.size();) {
      bool boundary = i == 0 || !(std::isalnum(static_cast<unsigned char>(line[i - 1])) ||
                                  line[i - 1] == '_' || line[i - 1] == '.');
      if (boundary && line.compare(i, from.size(), from) == 0 &&
          i + from.size() < line.size() && line[i + from.size()] == '.') {
        renamed += to;
        i += from.size();
      } else {
        renamed += line[i++];
      }
    }
    out += renamed + "\n";
  }
  return out;
}

inline std::string ReplaceLine(const std::string& text, const std::string& from, const std::string& to) {
  std::istringstream in(text);
  std::string out;
  for (std::string line; std::getline(in, line);) out += (line == from ? to : line) + "\n";
  return out;
}

inline std::string AliasVariant(std::string text) {
  struct Alias {
    const char* import_line;
    const char* new_import;
    const char* root;
    const char* new_root;
  };
  const Alias aliases[] = {
      {"import torch", "import torch as T", "torch", "T"},
      {"import numpy as np", "import numpy as n_p", "np", "n_p"},
      {"import tensorflow as tf", "import tensorflow as TF", "tf", "TF"},
      {"import os", "import os as o_s", "os", "o_s"},
      {"import random", "import random as rnd", "random", "rnd"},
      {"import xgboost", "import xgboost as X", "xgboost", "X"},
      {"import xgboost as xgb", "import xgboost as boost", "xgb", "boost"},
  };
  for (const Alias& a : aliases) {
    if (text.find(std::string(a.import_line) + "\n") == std::string::npos) continue;
    text = ReplaceLine(text, a.import_line, a.new_import);
    text = RenameRoot(text, a.root, a.new_root);
  }
  return text;
}

}  // namespace detml::testing

#endif  // DETML_TESTS_LINT_ORACLES_H_
