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

#include <algorithm>
#include <set>
#include <string>
#include <tuple>
#include <vector>

#include "detml/facts.h"
#include "gtest/gtest.h"
#include "test_util.h"

namespace detml {
namespace {

FactSet ParseOrDie(const std::string& text) {
  absl::StatusOr<FactSet> facts = ParseSource(text, "snippet.py");
  EXPECT_TRUE(facts.ok()) << facts.status();
  return facts.ok() ? *facts : FactSet{};
}

// (kind, path, line) for every non-import fact.
using Key = std::tuple<std::string, std::string, int>;

std::multiset<Key> NonImportKeys(const FactSet& facts) {
  std::multiset<Key> keys;
  for (const Fact& f : facts.facts) {
    if (f.kind == FactKind::kImport) continue;
    keys.emplace(std::string(FactKindName(f.kind)), f.canonical_path, f.location.line);
  }
  return keys;
}

const Fact* FindFact(const FactSet& facts, FactKind kind, const std::string& path) {
  for (const Fact& f : facts.facts) {
    if (f.kind == kind && f.canonical_path == path) return &f;
  }
  return nullptr;
}

struct AliasCase {
  const char* source;
  std::vector<Key> expected;
};

// Each snippet's canonical paths were resolved by hand from Python's import
// semantics.
const AliasCase kAliasCorpus[] = {
    {"import torch as T\nT.manual_seed(0)\n", {{"Call", "torch.manual_seed", 2}}},
    {"import numpy as n_p\nn_p.random.seed(1)\n", {{"Call", "numpy.random.seed", 2}}},
    {"from torch import nn\nnn.MaxPool3d(2)\n", {{"Call", "torch.nn.MaxPool3d", 2}}},
    {"from torch.nn import MaxPool3d as MP\nMP(2)\n", {{"Call", "torch.nn.MaxPool3d", 2}}},
    {"import torch.nn as tnn\ntnn.ConvTranspose3d(1, 1, 3)\n",
     {{"Call", "torch.nn.ConvTranspose3d", 2}}},
    {"import tensorflow as tf\ntf.random.set_seed(3)\n",
     {{"Call", "tensorflow.random.set_seed", 2}}},
    {"import os as operating_system\noperating_system.environ['PYTHONHASHSEED'] = '0'\n",
     {{"EnvSet", "env:PYTHONHASHSEED", 2}}},
    {"from os import environ\nenviron['A'] = '1'\n", {{"EnvSet", "env:A", 2}}},
    {"import random as rnd\nrnd.seed(4)\n", {{"Call", "random.seed", 2}}},
    {"from random import seed\nseed(5)\n", {{"Call", "random.seed", 2}}},
    {"from random import seed as s\ns(6)\n", {{"Call", "random.seed", 2}}},
    {"import torch\ntorch.backends.cudnn.benchmark = False\n",
     {{"Assign", "torch.backends.cudnn.benchmark", 2}}},
    {"from torch.backends import cudnn\ncudnn.deterministic = True\n",
     {{"Assign", "torch.backends.cudnn.deterministic", 2}}},
    {"import torch.backends.cudnn as cd\ncd.benchmark = False\n",
     {{"Assign", "torch.backends.cudnn.benchmark", 2}}},
    {"import xgboost as xgb\nxgb.train(params, dtrain, num_boost_round=10)\n",
     {{"Call", "xgboost.train", 2}, {"KeywordArg", "xgboost.train#num_boost_round", 2}}},
    {"from xgboost import rabit\nrabit.allreduce(x, op)\n",
     {{"Call", "xgboost.rabit.allreduce", 2}}},
    {"import numpy as np, torch as th\nth.manual_seed(0)\nnp.random.seed(0)\n",
     {{"Call", "torch.manual_seed", 2}, {"Call", "numpy.random.seed", 3}}},
    {"from tensorflow.compat import v1 as tf1\ntf1.set_random_seed(1)\n",
     {{"Call", "tensorflow.compat.v1.set_random_seed", 2}}},
    {"import torch\nimport torch as T\nT.use_deterministic_algorithms(True)\n",
     {{"Call", "torch.use_deterministic_algorithms", 3}}},
    {"import a.b.c\na.b.c.d()\n", {{"Call", "a.b.c.d", 2}}},
};

TEST(AliasResolution, CorpusMatchesHandResolvedPaths) {
  int index = 0;
  for (const AliasCase& c : kAliasCorpus) {
    SCOPED_TRACE("corpus entry " + std::to_string(index++) + ":\n" + c.source);
    FactSet facts = ParseOrDie(c.source);
    std::multiset<Key> expected(c.expected.begin(), c.expected.end());
    EXPECT_EQ(NonImportKeys(facts), expected);
    for (const Fact& f : facts.facts) EXPECT_TRUE(f.resolved) << f.canonical_path;
  }
}

TEST(AliasResolution, UnboundRootIsKeptAndFlagged) {
  FactSet facts = ParseOrDie("session_config.intra_op_parallelism_threads = 1\n");
  const Fact* f = FindFact(facts, FactKind::kAssign, "session_config.intra_op_parallelism_threads");
  ASSERT_NE(f, nullptr);
  EXPECT_FALSE(f->resolved);
}

TEST(AliasResolution, RawParseKeepsWrittenPaths) {
  absl::StatusOr<FactSet> raw = ParseSourceRaw("import torch as T\nT.manual_seed(0)\n", "x.py");
  ASSERT_TRUE(raw.ok());
  EXPECT_NE(FindFact(*raw, FactKind::kCall, "T.manual_seed"), nullptr);
  FactSet resolved = ResolveAliases(*raw);
  EXPECT_NE(FindFact(resolved, FactKind::kCall, "torch.manual_seed"), nullptr);
}

TEST(Imports, OneFactPerImportedName) {
  const std::string source =
      "import os\n"
      "import numpy as np, random\n"
      "from torch import (nn,\n"
      "                   optim as o)\n"
      "from . import sibling\n"
      "import a.b.c\n";
  FactSet facts = ParseOrDie(source);
  int imports = static_cast<int>(std::count_if(facts.facts.begin(), facts.facts.end(),
                                               [](const Fact& f) { return f.kind == FactKind::kImport; }));
  // os, numpy, random, nn, optim, sibling, a.b.c
  EXPECT_EQ(imports, 7);
  EXPECT_EQ(facts.imported_libraries,
            (std::set<std::string>{"a", "numpy", "os", "random", "torch"}));
  const Fact* optim = FindFact(facts, FactKind::kImport, "torch.optim");
  ASSERT_NE(optim, nullptr);
  EXPECT_EQ(optim->binding, "o");
  EXPECT_EQ(optim->location.line, 4);
}

TEST(Literals, ValuesAreEvaluated) {
  FactSet facts = ParseOrDie(
      "import os, torch\n"
      "os.environ['TF_DETERMINISTIC_OPS'] = '1'\n"
      "torch.backends.cudnn.benchmark = False\n"
      "torch.manual_seed(-3)\n"
      "torch.backends.cudnn.deterministic = flag\n");
  const Fact* env = FindFact(facts, FactKind::kEnvSet, "env:TF_DETERMINISTIC_OPS");
  ASSERT_NE(env, nullptr);
  EXPECT_EQ(env->value, FactValue(Literal(std::string("1"))));
  const Fact* bench = FindFact(facts, FactKind::kAssign, "torch.backends.cudnn.benchmark");
  ASSERT_NE(bench, nullptr);
  EXPECT_EQ(bench->value, FactValue(Literal(false)));
  const Fact* seed = FindFact(facts, FactKind::kCall, "torch.manual_seed");
  ASSERT_NE(seed, nullptr);
  EXPECT_EQ(seed->value, FactValue(Literal(std::int64_t{-3})));
  const Fact* det = FindFact(facts, FactKind::kAssign, "torch.backends.cudnn.deterministic");
  ASSERT_NE(det, nullptr);
  EXPECT_EQ(det->value, FactValue(NonLiteral{}));
}

TEST(Literals, PythonEqualitySemantics) {
  EXPECT_TRUE(LiteralEquals(Literal(std::int64_t{1}), Literal(1.0)));
  EXPECT_FALSE(LiteralEquals(Literal(true), Literal(std::int64_t{1})));
  EXPECT_FALSE(LiteralEquals(Literal(std::string("1")), Literal(std::int64_t{1})));
  EXPECT_TRUE(LiteralEquals(Literal(NoneLiteral{}), Literal(NoneLiteral{})));
}

TEST(Parser, DictLiteralKeysBecomeKeywordArgs) {
  FactSet facts = ParseOrDie(
      "param = {'seed': SEED,\n"
      "         'single_precision_histogram': True}\n");
  const Fact* seed = FindFact(facts, FactKind::kKeywordArg, "dict#seed");
  ASSERT_NE(seed, nullptr);
  EXPECT_EQ(seed->location.line, 1);
  const Fact* hist = FindFact(facts, FactKind::kKeywordArg, "dict#single_precision_histogram");
  ASSERT_NE(hist, nullptr);
  EXPECT_EQ(hist->location.line, 2);
  EXPECT_EQ(hist->value, FactValue(Literal(true)));
}

TEST(Parser, StringsAndCommentsProduceNoFacts) {
  FactSet facts = ParseOrDie(
      "import torch\n"
      "# torch.set_deterministic(True)\n"
      "doc = \"\"\"\n"
      "torch.manual_seed(1)\n"
      "\"\"\"\n"
      "s = 'torch.nn.MaxPool3d(2)  # not code'\n");
  EXPECT_EQ(FindFact(facts, FactKind::kCall, "torch.set_deterministic"), nullptr);
  EXPECT_EQ(FindFact(facts, FactKind::kCall, "torch.manual_seed"), nullptr);
  EXPECT_EQ(FindFact(facts, FactKind::kCall, "torch.nn.MaxPool3d"), nullptr);
}

TEST(Parser, NestedBlocksAndContinuations) {
  FactSet facts = ParseOrDie(
      "import torch\n"
      "class Net(torch.nn.Module):\n"
      "    def __init__(self):\n"
      "        super().__init__()\n"
      "        self.pool = torch.nn.MaxPool3d(\n"
      "            kernel_size=2)\n"
      "\n"
      "if __name__ == '__main__':\n"
      "    torch.manual_seed(0); torch.backends.cudnn.benchmark \\\n"
      "        = False\n");
  const Fact* pool = FindFact(facts, FactKind::kCall, "torch.nn.MaxPool3d");
  ASSERT_NE(pool, nullptr);
  EXPECT_EQ(pool->location.line, 5);
  EXPECT_NE(FindFact(facts, FactKind::kKeywordArg, "torch.nn.MaxPool3d#kernel_size"), nullptr);
  const Fact* seed = FindFact(facts, FactKind::kCall, "torch.manual_seed");
  ASSERT_NE(seed, nullptr);
  EXPECT_EQ(seed->location.line, 9);
  EXPECT_NE(FindFact(facts, FactKind::kAssign, "torch.backends.cudnn.benchmark"), nullptr);
  EXPECT_TRUE(facts.parse_diagnostics.empty());
}

TEST(Parser, SyntaxErrorsAreDiagnosedAndParsingContinues) {
  FactSet facts = ParseOrDie(
      "import torch\n"
      "x = = 1\n"
      "torch.manual_seed(0)\n");
  ASSERT_FALSE(facts.parse_diagnostics.empty());
  EXPECT_EQ(facts.parse_diagnostics.front().location.line, 2);
  EXPECT_NE(FindFact(facts, FactKind::kCall, "torch.manual_seed"), nullptr);
}

TEST(Parser, InvalidUtf8IsAnError) {
  absl::StatusOr<FactSet> facts = ParseSource("import torch\n\xff\n", "bad.py");
  EXPECT_FALSE(facts.ok());
}

TEST(Parser, EmptyInputYieldsNothing) {
  FactSet facts = ParseOrDie("");
  EXPECT_TRUE(facts.facts.empty());
  EXPECT_TRUE(facts.imported_libraries.empty());
  EXPECT_TRUE(facts.parse_diagnostics.empty());
}

TEST(Parser, TopLevelModule) {
  EXPECT_EQ(TopLevelModule("torch.nn.functional"), "torch");
  EXPECT_EQ(TopLevelModule("os"), "os");
}

TEST(FactJson, RoundTripsRecipes) {
  for (const char* name : {"pytorch_recipe.py", "tensorflow_recipe.py", "xgboost_recipe.py"}) {
    std::string text = testing::ReadFileOrDie(testing::FixturePath(std::string("recipes/") + name));
    FactSet facts = ParseOrDie(text);
    absl::StatusOr<FactSet> back = FactSetFromJson(FactSetToJson(facts));
    ASSERT_TRUE(back.ok()) << back.status();
    EXPECT_EQ(*back, facts) << name;
  }
}

}  // namespace
}  // namespace detml
