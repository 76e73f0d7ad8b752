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

#ifndef DETML_SYSINTEL_H_
#define DETML_SYSINTEL_H_

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "absl/status/statusor.h"
#include "detml/facts.h"
#include "nlohmann/json.hpp"

namespace detml {

// Raw system queries. Each method returns the text of one OS inventory so
// the parsing below is shared by the live and fixture probes.
class SystemProbe {
 public:
  virtual ~SystemProbe() = default;

  virtual absl::StatusOr<std::string> ReadCpuInfo() = 0;    // /proc/cpuinfo format
  virtual absl::StatusOr<std::string> ReadMemInfo() = 0;    // /proc/meminfo format
  virtual absl::StatusOr<std::string> ReadOsRelease() = 0;  // /etc/os-release format
  virtual absl::StatusOr<std::string> ReadKernelRelease() = 0;
  // CSV rows "name, memory.total [MiB], driver_version" as printed by
  // `nvidia-smi --query-gpu=name,memory.total,driver_version
  // --format=csv,noheader,nounits`. nullopt when no GPU tool is installed.
  virtual absl::StatusOr<std::optional<std::string>> QueryGpus() = 0;
  virtual std::string Now() = 0;
};

// Reads /proc, /etc/os-release and uname, and runs nvidia-smi when present.
std::unique_ptr<SystemProbe> MakeLinuxProbe();

// A probe answering from fixed strings; any field may hold an error.
class FixtureProbe : public SystemProbe {
 public:
  absl::StatusOr<std::string> cpuinfo = std::string();
  absl::StatusOr<std::string> meminfo = std::string();
  absl::StatusOr<std::string> os_release = std::string();
  absl::StatusOr<std::string> kernel = std::string();
  absl::StatusOr<std::optional<std::string>> gpu_query = std::optional<std::string>();
  std::string timestamp = "1970-01-01T00:00:00Z";

  absl::StatusOr<std::string> ReadCpuInfo() override { return cpuinfo; }
  absl::StatusOr<std::string> ReadMemInfo() override { return meminfo; }
  absl::StatusOr<std::string> ReadOsRelease() override { return os_release; }
  absl::StatusOr<std::string> ReadKernelRelease() override { return kernel; }
  absl::StatusOr<std::optional<std::string>> QueryGpus() override { return gpu_query; }
  std::string Now() override { return timestamp; }

  // Two 12-core hyper-threaded Intel Xeon sockets (24 physical cores) and two
  // Tesla V100 GPUs.
  static FixtureProbe DualV100Server();
};

struct CpuInfo {
  std::string model;
  std::int64_t physical_cores = 0;
  std::int64_t logical_cores = 0;
  friend bool operator==(const CpuInfo&, const CpuInfo&) = default;
};

struct GpuInfo {
  std::string vendor;
  std::string model;  // normalised, e.g. "V100"
  std::string name;   // as reported, e.g. "Tesla V100-SXM2-32GB"
  std::int64_t memory_bytes = 0;
  std::string driver_version;
  friend bool operator==(const GpuInfo&, const GpuInfo&) = default;
};

struct OsInfo {
  std::string name;
  std::string version;
  std::string kernel;
  friend bool operator==(const OsInfo&, const OsInfo&) = default;
};

struct HardwareReport {
  CpuInfo cpu;
  std::int64_t memory_total_bytes = 0;
  std::vector<GpuInfo> gpus;
  OsInfo os;
  std::string collected_at;
  std::vector<std::string> probe_errors;
  friend bool operator==(const HardwareReport&, const HardwareReport&) = default;
};

// "Tesla V100-SXM2-32GB" -> "V100", "NVIDIA GeForce RTX 3090" -> "RTX 3090".
std::string NormalizeGpuModel(std::string_view name);

// Never fails: a query that errors leaves its fields empty and adds an entry
// to probe_errors.
HardwareReport CollectReport(SystemProbe& probe);

struct RunManifest {
  HardwareReport hardware;
  std::map<std::string, Literal> hyperparameters;
  std::map<std::string, double> metrics;
  std::optional<std::string> source_revision;
  std::string environment_digest;  // "sha256:<hex>"
  std::string tool_version;
  friend bool operator==(const RunManifest&, const RunManifest&) = default;
};

// "sha256:" followed by the lowercase hex SHA-256 of `bytes`.
std::string Sha256Digest(std::string_view bytes);

// Hyperparameter values must be JSON strings, numbers or booleans; metrics
// must be numbers. Errors name the offending key.
absl::StatusOr<RunManifest> BuildManifest(
    const HardwareReport& report,
    const std::map<std::string, nlohmann::json>& hyperparameters,
    const std::map<std::string, nlohmann::json>& metrics,
    std::optional<std::string> source_revision, std::string_view env_manifest_bytes);

nlohmann::json HardwareReportToJson(const HardwareReport& report);
absl::StatusOr<HardwareReport> HardwareReportFromJson(const nlohmann::json& json);
nlohmann::json RunManifestToJson(const RunManifest& manifest);
absl::StatusOr<RunManifest> RunManifestFromJson(const nlohmann::json& json);

// Canonical JSON text: sorted keys, two-space indent, trailing newline.
std::string CanonicalJson(const nlohmann::json& json);

// Self-contained HTML documents (inline CSS, no external references).
std::string RenderHardwareHtml(const HardwareReport& report);
std::string RenderManifestHtml(const RunManifest& manifest);

// Parses a flat "key=value" file. Blank lines and lines starting with '#'
// are skipped. Values that parse as JSON scalars keep that type ("0.1" is a
// number, "true" a boolean, "\"x\"" a string); anything else is a JSON value
// if it parses as one and a plain string otherwise.
absl::StatusOr<std::map<std::string, nlohmann::json>> ParseKeyValueFile(
    std::string_view text);

}  // namespace detml

#endif  // DETML_SYSINTEL_H_
