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

#include <random>
#include <string>
#include <vector>

#include "detml/facts.h"
#include "detml/rules.h"
#include "gtest/gtest.h"

namespace detml {
namespace {

// The rule ids that form the external contract, in sorted order.
const std::vector<std::string> kGoldenIds = {
    "dask-multi-gpu-warning",
    "general-numpy-seed",
    "general-pythonhashseed",
    "general-random-seed",
    "pytorch-cudnn-benchmark",
    "pytorch-cudnn-deterministic",
    "pytorch-forbidden-convtranspose3d",
    "pytorch-forbidden-maxpool3d",
    "pytorch-manual-seed",
    "pytorch-set-deterministic",
    "tensorflow-deterministic-ops",
    "tensorflow-inter-op-threads",
    "tensorflow-intra-op-threads",
    "tensorflow-random-seed",
    "xgboost-forbidden-allreduce",
    "xgboost-param-seed",
    "xgboost-single-precision",
};

Fact MakeFact(FactKind kind, std::string path, FactValue value = NoValue{}) {
  Fact f;
  f.kind = kind;
  f.canonical_path = std::move(path);
  f.value = std::move(value);
  return f;
}

TEST(BuiltinRules, IdsMatchGoldenList) {
  EXPECT_EQ(BuiltinRuleIds(), kGoldenIds);
  EXPECT_EQ(BuiltinRules().size(), kGoldenIds.size());
  EXPECT_EQ(BuiltinRules().version(), kCatalogVersion);
}

TEST(BuiltinRules, EveryRuleIsComplete) {
  for (const auto& [id, rule] : BuiltinRules().rules()) {
    EXPECT_EQ(rule.id, id);
    EXPECT_FALSE(rule.message.empty()) << id;
    EXPECT_FALSE(rule.fix_hint.empty()) << id;
    EXPECT_FALSE(rule.paper_anchor.empty()) << id;
    EXPECT_FALSE(rule.matcher.patterns.empty()) << id;
  }
}

TEST(BuiltinRules, CudnnBenchmarkMatcher) {
  const Rule* rule = BuiltinRules().Lookup("pytorch-cudnn-benchmark");
  ASSERT_NE(rule, nullptr);
  EXPECT_EQ(rule->kind, RuleKind::kRequiredAssign);
  ASSERT_EQ(rule->matcher.patterns.size(), 1u);
  EXPECT_EQ(rule->matcher.patterns[0].text, "torch.backends.cudnn.benchmark");
  ASSERT_TRUE(rule->matcher.required_value.has_value());
  EXPECT_TRUE(LiteralEquals(*rule->matcher.required_value, Literal(false)));
  EXPECT_EQ(rule->severity, Severity::kError);
}

TEST(BuiltinRules, TfDeterministicOpsMatcher) {
  const Rule* rule = BuiltinRules().Lookup("tensorflow-deterministic-ops");
  ASSERT_NE(rule, nullptr);
  EXPECT_EQ(rule->kind, RuleKind::kRequiredEnv);
  EXPECT_TRUE(rule->matcher.Matches(
      MakeFact(FactKind::kEnvSet, "env:TF_DETERMINISTIC_OPS", Literal(std::string("1")))));
  EXPECT_FALSE(rule->matcher.Matches(
      MakeFact(FactKind::kEnvSet, "env:TF_DETERMINISTIC_OPS", Literal(std::string("0")))));
  EXPECT_FALSE(rule->matcher.Matches(
      MakeFact(FactKind::kEnvSet, "env:TF_DETERMINISTIC_OPS", NonLiteral{})));
}

TEST(BuiltinRules, SeveritiesOfWarnings) {
  for (const char* id : {"pytorch-set-deterministic", "tensorflow-intra-op-threads",
                         "tensorflow-inter-op-threads", "xgboost-single-precision",
                         "dask-multi-gpu-warning"}) {
    EXPECT_EQ(BuiltinRules().Lookup(id)->severity, Severity::kWarning) << id;
  }
}

TEST(PathPatterns, PrefixRespectsSegments) {
  PathPattern prefix{MatchMode::kPrefix, "torch.nn.MaxPool3d"};
  EXPECT_TRUE(prefix.Matches("torch.nn.MaxPool3d"));
  EXPECT_TRUE(prefix.Matches("torch.nn.MaxPool3d.forward"));
  EXPECT_FALSE(prefix.Matches("torch.nn.MaxPool3dX"));
  PathPattern suffix{MatchMode::kSuffix, "intra_op_parallelism_threads"};
  EXPECT_TRUE(suffix.Matches("session_config.intra_op_parallelism_threads"));
  EXPECT_FALSE(suffix.Matches("session_config.xintra_op_parallelism_threads"));
  PathPattern glob{MatchMode::kGlob, "xgboost.*#seed"};
  EXPECT_TRUE(glob.Matches("xgboost.train#seed"));
  EXPECT_FALSE(glob.Matches("xgboost.train#seeds"));
}

TEST(Overlay, EmptyAndCommentOnlyDocumentsAreIdentity) {
  for (const char* doc : {"", "\n\n", "# only a comment\n   # another\n"}) {
    absl::StatusOr<RuleCatalog> catalog = LoadRules(doc);
    ASSERT_TRUE(catalog.ok()) << catalog.status();
    EXPECT_EQ(*catalog, BuiltinRules());
  }
}

// Builds a random overlay and the catalog it must produce. The expectation
// is computed on the id-keyed map directly: overridden rules copy the base
// rule and change the fields the document sets, new rules are inserted.
struct OverlayCase {
  std::string document;
  RuleCatalog expected;
};

OverlayCase RandomOverlay(std::mt19937& rng) {
  OverlayCase c;
  c.expected = BuiltinRules();
  c.document = "catalog_format = 1\n";
  std::bernoulli_distribution coin(0.4);
  for (const std::string& id : kGoldenIds) {
    if (!coin(rng)) continue;
    Rule rule = *BuiltinRules().Lookup(id);
    rule.severity = rule.severity == Severity::kError ? Severity::kWarning : Severity::kError;
    c.document += "\n[[rule]]\nid = \"" + id + "\"\nseverity = \"" +
                  std::string(SeverityName(rule.severity)) + "\"\n";
    if (coin(rng)) {
      rule.message = "custom message for " + id;
      c.document += "message = \"" + rule.message + "\"\n";
    }
    c.expected.Put(rule);
  }
  std::uniform_int_distribution<int> extra(0, 3);
  int count = extra(rng);
  for (int i = 0; i < count; ++i) {
    Rule rule;
    rule.id = "team-rule-" + std::to_string(i);
    rule.library = Library::kPytorch;
    rule.kind = RuleKind::kForbiddenCall;
    rule.matcher.patterns = {{MatchMode::kPrefix, "torch.cuda.graph" + std::to_string(i)}};
    rule.severity = Severity::kError;
    rule.message = "no graphs " + std::to_string(i);
    rule.fix_hint = "run eagerly";
    rule.activation = {ActivationKind::kLibraryImported, {"torch"}};
    rule.paper_anchor = "";
    c.document += "\n[[rule]]\nid = \"" + rule.id +
                  "\"\nlibrary = \"pytorch\"\nkind = \"ForbiddenCall\"\npath = \"" +
                  rule.matcher.patterns[0].text +
                  "\"\nmatch = \"prefix\"\nseverity = \"error\"\nmessage = \"" + rule.message +
                  "\"\nfix_hint = \"run eagerly\"\nactivation = \"library-imported\"\n";
    c.expected.Put(rule);
  }
  return c;
}

TEST(Overlay, MatchesMapMergeOracle) {
  std::mt19937 rng(20210115);
  for (int trial = 0; trial < 200; ++trial) {
    OverlayCase c = RandomOverlay(rng);
    absl::StatusOr<RuleCatalog> catalog = LoadRules(c.document);
    ASSERT_TRUE(catalog.ok()) << catalog.status() << "\n" << c.document;
    EXPECT_EQ(*catalog, c.expected) << c.document;
  }
}

TEST(Overlay, IsIdempotent) {
  std::mt19937 rng(7);
  for (int trial = 0; trial < 50; ++trial) {
    OverlayCase c = RandomOverlay(rng);
    absl::StatusOr<RuleCatalog> once = OverlayRules(BuiltinRules(), c.document);
    ASSERT_TRUE(once.ok());
    absl::StatusOr<RuleCatalog> twice = OverlayRules(*once, c.document);
    ASSERT_TRUE(twice.ok());
    EXPECT_EQ(*once, *twice);
  }
}

TEST(Overlay, MatchWithoutPathRetargetsInheritedPatterns) {
  absl::StatusOr<RuleCatalog> catalog = LoadRules(
      "catalog_format = 1\n[[rule]]\nid = \"pytorch-manual-seed\"\nmatch = \"suffix\"\n");
  ASSERT_TRUE(catalog.ok()) << catalog.status();
  const Rule* rule = catalog->Lookup("pytorch-manual-seed");
  for (const PathPattern& p : rule->matcher.patterns) EXPECT_EQ(p.mode, MatchMode::kSuffix);
}

struct ErrorCase {
  const char* document;
  const char* expected_fragment;
};

TEST(Overlay, ErrorsNameTheLine) {
  const ErrorCase cases[] = {
      {"[[rule]]\nid = \"x\"\n", "line 1: 'catalog_format = 1' must come first"},
      {"catalog_format = 2\n", "line 1: unsupported catalog_format"},
      {"catalog_format = 1\nid = \"x\"\n", "line 2: key 'id' outside a [[rule]] table"},
      {"catalog_format = 1\n[[rule]]\nid = \"pytorch-manual-seed\"\ncolour = \"red\"\n",
       "line 4: unknown key 'colour'"},
      {"catalog_format = 1\n[[rule]]\nid = \"pytorch-manual-seed\"\nseverity = \"error\"\n"
       "severity = \"warning\"\n",
       "line 5: duplicate key 'severity'"},
      {"catalog_format = 1\n[[rule]]\nid = \"pytorch-manual-seed\"\nseverity = \"fatal\"\n",
       "line 4: unknown severity 'fatal'"},
      {"catalog_format = 1\n[[rule]]\nid = \"Bad_Id\"\n", "line 3: rule id 'Bad_Id' is not kebab-case"},
      {"catalog_format = 1\n[[rule]]\nid = \"brand-new\"\nseverity = \"error\"\n",
       "line 2: rule 'brand-new' is missing required key"},
      {"catalog_format = 1\n[[rule]]\nid = \"pytorch-manual-seed\"\n\n[[rule]]\n"
       "id = \"pytorch-manual-seed\"\n",
       "line 6: duplicate rule id 'pytorch-manual-seed' (first defined on line 3)"},
      {"catalog_format = 1\n[[rule]]\nid = \"pytorch-manual-seed\"\nmessage = \"open\n",
       "line 4: unterminated string"},
      {"catalog_format = 1\n[[rule]]\nid = \"pytorch-forbidden-maxpool3d\"\nvalue = 1\n",
       "line 2: rule 'pytorch-forbidden-maxpool3d': 'value' is only valid for"},
  };
  for (const ErrorCase& c : cases) {
    absl::StatusOr<RuleCatalog> catalog = LoadRules(c.document);
    ASSERT_FALSE(catalog.ok()) << c.document;
    EXPECT_NE(std::string(catalog.status().message()).find(c.expected_fragment),
              std::string::npos)
        << "got: " << catalog.status().message() << "\nwant: " << c.expected_fragment;
  }
}

TEST(Activation, LibraryImported) {
  const Rule* rule = BuiltinRules().Lookup("general-pythonhashseed");
  ASSERT_NE(rule, nullptr);
  EXPECT_FALSE(rule->activation.IsActive({"numpy", "os", "random"}));
  EXPECT_TRUE(rule->activation.IsActive({"torch"}));
  EXPECT_TRUE(rule->activation.IsActive({"tensorflow"}));
  EXPECT_TRUE(rule->activation.IsActive({"xgboost"}));
}

}  // namespace
}  // namespace detml
