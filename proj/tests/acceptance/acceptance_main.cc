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

// Acceptance suite: prints one PASS/FAIL line per criterion and exits
// non-zero when any criterion fails.

#include <algorithm>
#include <chrono>
#include <functional>
#include <iostream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "detml/cli.h"
#include "detml/facts.h"
#include "detml/lint.h"
#include "detml/rules.h"
#include "detml/scaffold.h"
#include "detml/sysintel.h"
#include "lint/project_checks.h"
#include "lint_oracles.h"
#include "test_util.h"

namespace detml {
namespace {

using testing::FixturePath;
using testing::ReadFileOrDie;
using testing::TempDir;
using testing::WriteFileOrDie;

// Collects failure reasons for one criterion.
class Check {
 public:
  void Expect(bool condition, const std::string& what) {
    if (!condition) failures_.push_back(what);
  }
  bool ok() const { return failures_.empty(); }
  const std::vector<std::string>& failures() const { return failures_; }
  std::string detail;

 private:
  std::vector<std::string> failures_;
};

std::vector<Violation> LintText(const std::string& text, const std::string& file) {
  absl::StatusOr<FactSet> facts = ParseSource(text, file);
  if (!facts.ok()) {
    Violation failure;
    failure.rule_id = "parse-failure";
    failure.message = std::string(facts.status().message());
    return {failure};
  }
  return LintFacts(*facts, BuiltinRules());
}

int CountErrors(const std::vector<Violation>& violations) {
  int n = 0;
  for (const Violation& v : violations) n += v.severity == Severity::kError;
  return n;
}

const char* const kRecipes[] = {"recipes/pytorch_recipe.py", "recipes/tensorflow_recipe.py",
                                "recipes/xgboost_recipe.py"};

void RecipeCompliance(Check& check) {
  auto start = std::chrono::steady_clock::now();
  for (const char* recipe : kRecipes) {
    std::vector<Violation> v = LintText(ReadFileOrDie(FixturePath(recipe)), recipe);
    check.Expect(CountErrors(v) == 0, std::string(recipe) + " has error violations");
    if (std::string(recipe).find("pytorch") != std::string::npos) {
      check.Expect(v.size() == 1 && v[0].rule_id == "pytorch-set-deterministic" &&
                       v[0].severity == Severity::kWarning,
                   "7a does not yield exactly the pytorch-set-deterministic warning");
    } else {
      check.Expect(v.empty(), std::string(recipe) + " has violations");
    }
  }
  double ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  check.Expect(ms < 1000.0, "took " + std::to_string(ms) + " ms");
  check.detail = "3 listings, " + std::to_string(static_cast<int>(ms)) + " ms";
}

void MutationTable(Check& check) {
  int mutants = 0, single = 0, matched = 0;
  for (const testing::MutationTable& table : testing::kMutationTables) {
    std::string text = ReadFileOrDie(FixturePath(table.fixture));
    for (int line = 1; line <= testing::LineCount(text); ++line) {
      auto it = table.mapped.find(line);
      const std::multiset<std::string>& want =
          it == table.mapped.end() ? table.baseline : it->second;
      std::multiset<std::string> got =
          testing::Ids(LintText(testing::DeleteLine(text, line), table.fixture));
      ++mutants;
      if (got == want) {
        ++matched;
        if (want.size() == table.baseline.size() + 1) ++single;
      } else {
        check.Expect(false, std::string(table.fixture) + " line " + std::to_string(line));
      }
    }
  }
  check.Expect(single >= 9, "only " + std::to_string(single) + " mandatory-line mutants");
  check.detail = std::to_string(matched) + "/" + std::to_string(mutants) +
                 " mutants match the oracle, " + std::to_string(single) +
                 " single-violation mandatory-line mutants";
}

void ForbiddenOps(Check& check) {
  struct Case {
    const char* fixture;
    const char* rule;
    int line;
  };
  for (const Case& c : {Case{"forbidden/maxpool3d.py", "pytorch-forbidden-maxpool3d", 20},
                        Case{"forbidden/convtranspose3d.py", "pytorch-forbidden-convtranspose3d", 19},
                        Case{"forbidden/allreduce.py", "xgboost-forbidden-allreduce", 14}}) {
    std::vector<Violation> v = LintText(ReadFileOrDie(FixturePath(c.fixture)), c.fixture);
    check.Expect(CountErrors(v) == 1 && v.size() == 1 && v[0].rule_id == c.rule &&
                     v[0].location && v[0].location->line == c.line,
                 std::string(c.fixture) + " does not yield exactly " + c.rule + " at line " +
                     std::to_string(c.line));
  }
  check.detail = "MaxPool3d, ConvTranspose3d, rabit allreduce";
}

void AliasInvariance(Check& check) {
  const char* const fixtures[] = {"recipes/pytorch_recipe.py",
                                  "recipes/tensorflow_recipe.py",
                                  "recipes/xgboost_recipe.py",
                                  "recipes/xgboost_recipe_with_import.py",
                                  "forbidden/maxpool3d.py",
                                  "forbidden/convtranspose3d.py",
                                  "forbidden/allreduce.py"};
  int pairs = 0;
  auto key = [](const std::vector<Violation>& vs) {
    std::multiset<std::string> out;
    for (const Violation& v : vs) {
      out.insert(v.rule_id + "|" + std::string(SeverityName(v.severity)) + "|" +
                 (v.location ? std::to_string(v.location->line) : "-"));
    }
    return out;
  };
  for (const char* name : fixtures) {
    std::string text = ReadFileOrDie(FixturePath(name));
    std::string variant = testing::AliasVariant(text);
    check.Expect(variant != text, std::string(name) + " was not rewritten");
    for (int line = 0; line <= testing::LineCount(text); ++line) {
      std::string a = line == 0 ? text : testing::DeleteLine(text, line);
      std::string b = testing::AliasVariant(a);
      check.Expect(key(LintText(a, name)) == key(LintText(b, name)),
                   std::string(name) + " mutant " + std::to_string(line));
      ++pairs;
    }
  }
  check.detail = std::to_string(pairs) + " original/alias pairs";
}

void TemplateRoundTrip(Check& check) {
  TempDir dir;
  for (const char* name : {"pytorch", "tensorflow", "xgboost"}) {
    std::string dest = (dir / name).string();
    testing::CliRun created = testing::RunDetml({"create", "--template", name, "--no-input", dest});
    check.Expect(created.exit_code == 0, std::string("create ") + name + ": " + created.err);
    testing::CliRun lint =
        testing::RunDetml({"lint", "--require-stamp", "--format", "json", dest});
    check.Expect(lint.exit_code == 0, std::string("lint ") + name + " exit " +
                                          std::to_string(lint.exit_code) + "\n" + lint.out);
    nlohmann::json j = nlohmann::json::parse(lint.out, nullptr, false);
    check.Expect(!j.is_discarded() && j["counts"]["errors"] == 0,
                 std::string(name) + " has errors");
  }
  check.detail = "pytorch, tensorflow, xgboost";
}

TemplateDescriptor NextVersion(const TemplateDescriptor& base) {
  TemplateDescriptor t = base;
  t.version = "1.1.0";
  t.files.at("train.py") += "# template 1.1.0\n";
  t.files["CHANGELOG.md"] = "# {{ project_name }}\n\n- 1.1.0\n";
  t.files.erase("docs/index.md");
  return t;
}

void SyncConvergence(Check& check) {
  constexpr char kCreated[] = "2021-01-15T12:00:00Z";
  for (const TemplateDescriptor& v1 : BuiltinTemplates()) {
    TemplateDescriptor v2 = NextVersion(v1);
    TempDir dir;
    std::map<std::string, std::string> answers = {{"seed", "11"}};
    check.Expect(CreateProject(v1, answers, dir / "synced", kCreated).ok(), "create v1");
    check.Expect(CreateProject(v2, answers, dir / "fresh", kCreated).ok(), "create v2");

    // Equal versions: empty diff and an untouched tree.
    auto before = testing::ReadTree(dir / "synced");
    absl::StatusOr<SyncDiff> same = ComputeSync(dir / "synced", v1);
    check.Expect(same.ok() && same->empty(), v1.name + ": equal-version diff not empty");
    if (same.ok()) check.Expect(ApplySync(dir / "synced", *same).ok(), "no-op apply");
    check.Expect(testing::ReadTree(dir / "synced") == before, v1.name + ": no-op changed tree");

    absl::StatusOr<SyncDiff> diff = ComputeSync(dir / "synced", v2);
    check.Expect(diff.ok(), v1.name + ": compute sync");
    if (!diff.ok()) continue;
    absl::StatusOr<ApplyResult> result = ApplySync(dir / "synced", *diff);
    check.Expect(result.ok() && result->conflicted.empty(), v1.name + ": apply sync");
    check.Expect(testing::ReadTree(dir / "synced") == testing::ReadTree(dir / "fresh"),
                 v1.name + ": synced tree differs from fresh v2");

    // A user edit on the changed hunk.
    check.Expect(CreateProject(v1, answers, dir / "edited", kCreated).ok(), "create edited");
    std::string train = ReadFileOrDie(dir / "edited" / "train.py");
    WriteFileOrDie(dir / "edited" / "train.py", train + "# user footer\n");
    absl::StatusOr<SyncDiff> diff2 = ComputeSync(dir / "edited", v2);
    absl::StatusOr<ApplyResult> result2 =
        diff2.ok() ? ApplySync(dir / "edited", *diff2) : absl::StatusOr<ApplyResult>(diff2.status());
    check.Expect(result2.ok() && result2->conflicted == std::vector<std::string>{"train.py"},
                 v1.name + ": edited project does not conflict on exactly train.py");
    std::string merged = ReadFileOrDie(dir / "edited" / "train.py");
    check.Expect(merged.find("<<<<<<< ") != std::string::npos &&
                     merged.find("=======\n") != std::string::npos &&
                     merged.find(">>>>>>> ") != std::string::npos,
                 v1.name + ": conflict markers missing");
  }
  check.detail = "3 templates: converge, no-op, one conflict";
}

template <typename F>
bool StableOver10Runs(F produce) {
  std::string first = produce();
  for (int i = 1; i < 10; ++i) {
    if (produce() != first) return false;
  }
  return !first.empty();
}

void ReportDeterminism(Check& check) {
  TempDir dir;
  for (const char* recipe : kRecipes) {
    std::string rel = std::string(recipe).substr(std::string(recipe).find('/') + 1);
    WriteFileOrDie(dir / "src" / rel, ReadFileOrDie(FixturePath(recipe)));
  }
  for (int i = 0; i < 20; ++i) {
    WriteFileOrDie(dir / "pkg" / ("m" + std::to_string(i) + ".py"),
                   "import torch\nlayer = torch.nn.MaxPool3d(2)\n");
  }
  check.Expect(StableOver10Runs([&] {
                 LintOptions options;
                 options.jobs = 4;
                 absl::StatusOr<LintReport> r = LintProject(dir.path(), BuiltinRules(), options);
                 return r.ok() ? LintReportToJson(*r).dump(2) : std::string();
               }),
               "lint JSON differs between runs");
  check.Expect(StableOver10Runs([] {
                 FixtureProbe probe = FixtureProbe::DualV100Server();
                 return CanonicalJson(HardwareReportToJson(CollectReport(probe)));
               }),
               "HardwareReport JSON differs between runs");
  check.Expect(StableOver10Runs([] {
                 FixtureProbe probe = FixtureProbe::DualV100Server();
                 absl::StatusOr<RunManifest> m = BuildManifest(
                     CollectReport(probe), {{"lr", 0.001}, {"epochs", 20}},
                     {{"dice", 0.87}}, std::string("0123abcd"), "dependencies: []\n");
                 return m.ok() ? CanonicalJson(RunManifestToJson(*m)) : std::string();
               }),
               "RunManifest JSON differs between runs");
  FixtureProbe probe = FixtureProbe::DualV100Server();
  HardwareReport report = CollectReport(probe);
  std::string html = RenderHardwareHtml(report);
  check.Expect(report.cpu.physical_cores == 24 && report.gpus.size() == 2,
               "fixture is not 24 cores and 2 GPUs");
  check.Expect(html.find("V100") != std::string::npos, "HTML lacks V100");
  check.Expect(html.find("24") != std::string::npos, "HTML lacks 24");
  check.Expect(html.find("http") == std::string::npos, "HTML references http");
  check.detail = "lint, hardware and manifest JSON stable over 10 runs; HTML shows V100 and 24";
}

void AnchorIntegrity(Check& check) {
  std::string excerpts = ReadFileOrDie(testing::SourcePath("data/reference_excerpts.txt"));
  int found = 0, total = 0;
  for (const auto& [id, rule] : BuiltinRules().rules()) {
    ++total;
    bool ok = !rule.paper_anchor.empty() && excerpts.find(rule.paper_anchor) != std::string::npos;
    check.Expect(ok, id + " anchor not found");
    found += ok;
  }
  for (const std::string& id : ProjectCheckIds()) {
    ++total;
    std::string anchor(ProjectCheckAnchor(id));
    bool ok = !anchor.empty() && excerpts.find(anchor) != std::string::npos;
    check.Expect(ok, id + " anchor not found");
    found += ok;
  }
  check.detail = std::to_string(found) + "/" + std::to_string(total) + " anchors found";
}

std::string SyntheticModule(int index) {
  std::ostringstream out;
  out << "\"\"\"Synthetic module " << index << ".\"\"\"\n"
      << "import os\nimport random\nimport numpy as np\nimport torch\n"
      << "from torch import nn\n\n\n";
  int line = 7;
  for (int c = 0; line < 95; ++c) {
    out << "class Block" << c << "(nn.Module):\n"
        << "    def __init__(self, channels=" << c + 1 << "):\n"
        << "        super().__init__()\n"
        << "        self.conv = nn.Conv3d(channels, channels, kernel_size=3, padding=1)\n"
        << "        self.act = nn.ReLU(inplace=True)\n"
        << "        self.scale = {'alpha': 0.5, 'beta': [1, 2, 3]}\n\n"
        << "    def forward(self, x):\n"
        << "        # residual connection\n"
        << "        y = self.act(self.conv(x))\n"
        << "        return x + y * self.scale['alpha']\n\n\n";
    line += 13;
  }
  out << "def seed_everything(seed=" << index << "):\n"
      << "    os.environ['PYTHONHASHSEED'] = str(seed)\n"
      << "    random.seed(seed)\n"
      << "    np.random.seed(seed)\n"
      << "    torch.manual_seed(seed)\n";
  return out.str();
}

void Performance(Check& check) {
  TempDir dir;
  int lines = 0;
  for (int i = 0; i < 500; ++i) {
    std::string text = SyntheticModule(i);
    lines += static_cast<int>(std::count(text.begin(), text.end(), '\n'));
    WriteFileOrDie(dir / ("pkg" + std::to_string(i / 50)) / ("mod" + std::to_string(i) + ".py"),
                   text);
  }
  auto start = std::chrono::steady_clock::now();
  absl::StatusOr<LintReport> report = LintProject(dir.path(), BuiltinRules());
  double seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  check.Expect(report.ok() && report->files.size() == 500, "lint did not cover 500 files");
  check.Expect(lines >= 45000, "synthetic project has only " + std::to_string(lines) + " lines");
  check.Expect(seconds < 5.0, "took " + std::to_string(seconds) + " s");
  std::ostringstream detail;
  detail.precision(2);
  detail << std::fixed << "500 files, " << lines << " lines in " << seconds << " s ("
         << std::thread::hardware_concurrency() << " hardware threads)";
  check.detail = detail.str();
}

}  // namespace
}  // namespace detml

int main() {
  using detml::Check;
  struct Criterion {
    int number;
    const char* name;
    std::function<void(Check&)> run;
  };
  const Criterion criteria[] = {
      {1, "recipe compliance", detml::RecipeCompliance},
      {2, "mutation table", detml::MutationTable},
      {3, "forbidden-op detection", detml::ForbiddenOps},
      {4, "alias invariance", detml::AliasInvariance},
      {5, "template self-compliance round-trip", detml::TemplateRoundTrip},
      {6, "sync convergence", detml::SyncConvergence},
      {7, "report determinism", detml::ReportDeterminism},
      {8, "anchor integrity", detml::AnchorIntegrity},
      {9, "performance sanity", detml::Performance},
  };
  int failed = 0;
  for (const Criterion& c : criteria) {
    Check check;
    try {
      c.run(check);
    } catch (const std::exception& e) {
      check.Expect(false, std::string("exception: ") + e.what());
    }
    std::cout << (check.ok() ? "PASS" : "FAIL") << " criterion " << c.number << " (" << c.name
              << "): " << check.detail << "\n";
    for (const std::string& f : check.failures()) std::cout << "    " << f << "\n";
    failed += !check.ok();
  }
  std::cout << (9 - failed) << "/9 criteria passed\n";
  return failed == 0 ? 0 : 1;
}
