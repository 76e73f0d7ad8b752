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

#include <cstdio>
#include <string>

#include "detml/sysintel.h"
#include "gtest/gtest.h"
#include "test_util.h"

namespace detml {
namespace {

using nlohmann::json;

TEST(Probe, DualV100Server) {
  FixtureProbe probe = FixtureProbe::DualV100Server();
  HardwareReport report = CollectReport(probe);
  EXPECT_TRUE(report.probe_errors.empty());
  EXPECT_EQ(report.cpu.model, "Intel(R) Xeon(R) CPU E5-2650 v4 @ 2.20GHz");
  EXPECT_EQ(report.cpu.physical_cores, 24);
  EXPECT_EQ(report.cpu.logical_cores, 48);
  EXPECT_EQ(report.memory_total_bytes, 263855260LL * 1024);
  ASSERT_EQ(report.gpus.size(), 2u);
  for (const GpuInfo& gpu : report.gpus) {
    EXPECT_EQ(gpu.vendor, "NVIDIA");
    EXPECT_EQ(gpu.model, "V100");
    EXPECT_EQ(gpu.name, "Tesla V100-SXM2-32GB");
    EXPECT_EQ(gpu.memory_bytes, 32510LL * 1024 * 1024);
    EXPECT_EQ(gpu.driver_version, "450.80.02");
  }
  EXPECT_EQ(report.os.name, "Ubuntu");
  EXPECT_EQ(report.os.version, "18.04");
  EXPECT_EQ(report.os.kernel, "4.15.0-112-generic");
  EXPECT_EQ(report.collected_at, "2021-01-15T12:00:00Z");
}

TEST(Probe, NoGpuToolMeansEmptyListWithoutError) {
  FixtureProbe probe = FixtureProbe::DualV100Server();
  probe.gpu_query = std::optional<std::string>();
  HardwareReport report = CollectReport(probe);
  EXPECT_TRUE(report.gpus.empty());
  EXPECT_TRUE(report.probe_errors.empty());
}

TEST(Probe, FailingQueriesAreRecorded) {
  FixtureProbe probe = FixtureProbe::DualV100Server();
  probe.gpu_query = absl::InternalError("nvidia-smi exited with status 9");
  probe.meminfo = absl::NotFoundError("no meminfo");
  HardwareReport report = CollectReport(probe);
  EXPECT_TRUE(report.gpus.empty());
  EXPECT_EQ(report.memory_total_bytes, 0);
  ASSERT_EQ(report.probe_errors.size(), 2u);
  std::string all = report.probe_errors[0] + "\n" + report.probe_errors[1];
  EXPECT_NE(all.find("gpu: nvidia-smi exited with status 9"), std::string::npos) << all;
  EXPECT_NE(all.find("no meminfo"), std::string::npos) << all;
  EXPECT_EQ(report.cpu.physical_cores, 24);
}

TEST(Probe, CpuWithoutTopologyFallsBackToLogicalCount) {
  FixtureProbe probe;
  probe.cpuinfo = std::string(
      "processor\t: 0\nmodel name\t: Some CPU\n\nprocessor\t: 1\nmodel name\t: Some CPU\n\n");
  HardwareReport report = CollectReport(probe);
  EXPECT_EQ(report.cpu.logical_cores, 2);
  EXPECT_EQ(report.cpu.physical_cores, 2);
}

TEST(Probe, GpuModelNormalisation) {
  EXPECT_EQ(NormalizeGpuModel("Tesla V100-SXM2-32GB"), "V100");
  EXPECT_EQ(NormalizeGpuModel("NVIDIA A100-PCIE-40GB"), "A100");
  EXPECT_EQ(NormalizeGpuModel("GeForce RTX 2080 Ti"), "RTX 2080 Ti");
}

TEST(Probe, LiveProbeNeverThrows) {
  std::unique_ptr<SystemProbe> probe = MakeLinuxProbe();
  HardwareReport report = CollectReport(*probe);
  EXPECT_GT(report.cpu.logical_cores, 0);
  EXPECT_FALSE(report.collected_at.empty());
}

TEST(Json, HardwareReportRoundTripAndFixpoint) {
  FixtureProbe probe = FixtureProbe::DualV100Server();
  HardwareReport report = CollectReport(probe);
  json j = HardwareReportToJson(report);
  for (const char* key : {"cpu", "memory_total_bytes", "gpus", "os", "collected_at", "probe_errors"}) {
    EXPECT_TRUE(j.contains(key)) << key;
  }
  absl::StatusOr<HardwareReport> back = HardwareReportFromJson(j);
  ASSERT_TRUE(back.ok()) << back.status();
  EXPECT_EQ(*back, report);
  std::string text = CanonicalJson(j);
  EXPECT_EQ(CanonicalJson(json::parse(text)), text);
  EXPECT_EQ(text.back(), '\n');
}

RunManifest FixtureManifest() {
  FixtureProbe probe = FixtureProbe::DualV100Server();
  absl::StatusOr<RunManifest> manifest =
      BuildManifest(CollectReport(probe),
                    {{"lr", json(0.001)}, {"epochs", json(20)}, {"arch", json("unet")},
                     {"amp", json(false)}},
                    {{"dice", json(0.87)}, {"loss", json(0.12)}}, std::string("0123abcd"),
                    "name: x\ndependencies:\n  - python=3.8.5\n");
  EXPECT_TRUE(manifest.ok()) << manifest.status();
  return *manifest;
}

TEST(Json, RunManifestRoundTripAndFixpoint) {
  RunManifest manifest = FixtureManifest();
  json j = RunManifestToJson(manifest);
  for (const char* key : {"hardware", "hyperparameters", "metrics", "source_revision",
                          "environment_digest", "tool_version"}) {
    EXPECT_TRUE(j.contains(key)) << key;
  }
  absl::StatusOr<RunManifest> back = RunManifestFromJson(j);
  ASSERT_TRUE(back.ok()) << back.status();
  EXPECT_EQ(*back, manifest);
  std::string text = CanonicalJson(j);
  EXPECT_EQ(CanonicalJson(json::parse(text)), text);
  EXPECT_EQ(j["hyperparameters"]["epochs"], 20);
  EXPECT_EQ(j["hyperparameters"]["amp"], false);
}

TEST(Manifest, RejectsNonLiteralsAndNonFiniteMetrics) {
  HardwareReport hw;
  absl::StatusOr<RunManifest> m = BuildManifest(hw, {{"layers", json::array({1, 2})}}, {}, {}, "");
  ASSERT_FALSE(m.ok());
  EXPECT_NE(std::string(m.status().message()).find("layers"), std::string::npos);
  m = BuildManifest(hw, {}, {{"acc", json("high")}}, {}, "");
  ASSERT_FALSE(m.ok());
  EXPECT_NE(std::string(m.status().message()).find("acc"), std::string::npos);
}

TEST(Digest, MatchesReferenceVectors) {
  // FIPS 180-2 test vectors.
  EXPECT_EQ(Sha256Digest("abc"),
            "sha256:ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
  EXPECT_EQ(Sha256Digest(""),
            "sha256:e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
}

TEST(Digest, MatchesSha256sum) {
  if (std::system("sha256sum --version >/dev/null 2>&1") != 0) GTEST_SKIP();
  testing::TempDir dir;
  std::string bytes = "name: x\ndependencies:\n  - python=3.8.5\n  - numpy=1.19.2\n";
  testing::WriteFileOrDie(dir / "env.yml", bytes);
  std::string cmd = "sha256sum '" + (dir / "env.yml").string() + "'";
  FILE* pipe = popen(cmd.c_str(), "r");
  ASSERT_NE(pipe, nullptr);
  char hex[65] = {};
  ASSERT_EQ(fread(hex, 1, 64, pipe), 64u);
  pclose(pipe);
  EXPECT_EQ(Sha256Digest(bytes), "sha256:" + std::string(hex));
}

TEST(Html, SelfContainedAndMentionsHardware) {
  FixtureProbe probe = FixtureProbe::DualV100Server();
  for (const std::string& html :
       {RenderHardwareHtml(CollectReport(probe)), RenderManifestHtml(FixtureManifest())}) {
    EXPECT_EQ(html.find("http:"), std::string::npos);
    EXPECT_EQ(html.find("https:"), std::string::npos);
    EXPECT_EQ(html.find("<script"), std::string::npos);
    EXPECT_NE(html.find("V100"), std::string::npos);
    EXPECT_NE(html.find("24"), std::string::npos);
    EXPECT_EQ(html.rfind("<!DOCTYPE html>", 0), 0u);
  }
}

TEST(Html, EscapesMarkup) {
  HardwareReport report;
  report.cpu.model = "<b>&\"cpu\"";
  std::string html = RenderHardwareHtml(report);
  EXPECT_EQ(html.find("<b>&"), std::string::npos);
  EXPECT_NE(html.find("&lt;b&gt;&amp;"), std::string::npos);
}

TEST(KeyValueFile, Typing) {
  absl::StatusOr<std::map<std::string, json>> kv = ParseKeyValueFile(
      "# comment\nlr = 0.01\nepochs=10\nname=resnet\nflag=true\nquoted=\"0.5\"\n\n");
  ASSERT_TRUE(kv.ok()) << kv.status();
  EXPECT_EQ(kv->at("lr"), json(0.01));
  EXPECT_EQ(kv->at("epochs"), json(10));
  EXPECT_EQ(kv->at("name"), json("resnet"));
  EXPECT_EQ(kv->at("flag"), json(true));
  EXPECT_EQ(kv->at("quoted"), json("0.5"));
  EXPECT_FALSE(ParseKeyValueFile("no equals sign\n").ok());
}

}  // namespace
}  // namespace detml
