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

#include "detml/sysintel.h"

#include <openssl/evp.h>
#include <sys/utsname.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>
#include <utility>

#include "absl/status/status.h"
#include "detml/scaffold.h"
#include "detml/version.h"

namespace detml {
namespace {

using nlohmann::json;

std::string_view Trim(std::string_view s) {
  std::size_t b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  std::size_t e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::vector<std::string_view> Lines(std::string_view text) {
  std::vector<std::string_view> lines;
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t nl = text.find('\n', pos);
    if (nl == std::string_view::npos) nl = text.size();
    lines.push_back(text.substr(pos, nl - pos));
    pos = nl + 1;
  }
  return lines;
}

// "key<sep>value" -> trimmed pair; nullopt when `sep` is absent.
std::optional<std::pair<std::string, std::string>> SplitField(std::string_view line,
                                                              char sep) {
  std::size_t at = line.find(sep);
  if (at == std::string_view::npos) return std::nullopt;
  return std::make_pair(std::string(Trim(line.substr(0, at))),
                        std::string(Trim(line.substr(at + 1))));
}

std::optional<std::int64_t> ParseInt64(std::string_view text) {
  text = Trim(text);
  if (text.empty()) return std::nullopt;
  std::int64_t value = 0;
  for (char c : text) {
    if (c < '0' || c > '9') return std::nullopt;
    value = value * 10 + (c - '0');
  }
  return value;
}

absl::StatusOr<std::string> ReadWholeFile(const char* path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return absl::UnavailableError(std::string("cannot read ") + path);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

class LinuxProbe : public SystemProbe {
 public:
  absl::StatusOr<std::string> ReadCpuInfo() override { return ReadWholeFile("/proc/cpuinfo"); }
  absl::StatusOr<std::string> ReadMemInfo() override { return ReadWholeFile("/proc/meminfo"); }
  absl::StatusOr<std::string> ReadOsRelease() override {
    absl::StatusOr<std::string> text = ReadWholeFile("/etc/os-release");
    return text.ok() ? text : ReadWholeFile("/usr/lib/os-release");
  }
  absl::StatusOr<std::string> ReadKernelRelease() override {
    utsname info{};
    if (uname(&info) != 0) return absl::UnavailableError("uname failed");
    return std::string(info.release);
  }
  absl::StatusOr<std::optional<std::string>> QueryGpus() override {
    // Absence of the tool means no NVIDIA driver, which is not an error.
    if (std::system("command -v nvidia-smi >/dev/null 2>&1") != 0) {
      return std::optional<std::string>();
    }
    FILE* pipe = popen(
        "nvidia-smi --query-gpu=name,memory.total,driver_version "
        "--format=csv,noheader,nounits 2>/dev/null",
        "r");
    if (pipe == nullptr) return absl::UnavailableError("cannot start nvidia-smi");
    std::string output;
    char buffer[4096];
    for (std::size_t n; (n = fread(buffer, 1, sizeof(buffer), pipe)) > 0;) {
      output.append(buffer, n);
    }
    int status = pclose(pipe);
    if (status != 0) {
      return absl::UnavailableError("nvidia-smi exited with status " + std::to_string(status));
    }
    return std::optional<std::string>(std::move(output));
  }
  std::string Now() override { return UtcTimestamp(); }
};

void ParseCpu(std::string_view text, CpuInfo& cpu) {
  std::set<std::pair<std::string, std::string>> cores;  // (physical id, core id)
  std::string physical_id, core_id;
  bool has_topology = false;
  auto flush = [&] {
    if (!core_id.empty()) {
      cores.emplace(physical_id, core_id);
      has_topology = true;
    }
    physical_id.clear();
    core_id.clear();
  };
  for (std::string_view line : Lines(text)) {
    if (Trim(line).empty()) {
      flush();
      continue;
    }
    auto field = SplitField(line, ':');
    if (!field) continue;
    const auto& [key, value] = *field;
    if (key == "processor") {
      ++cpu.logical_cores;
    } else if (key == "model name" && cpu.model.empty()) {
      cpu.model = value;
    } else if (key == "physical id") {
      physical_id = value;
    } else if (key == "core id") {
      core_id = value;
    }
  }
  flush();
  cpu.physical_cores = has_topology ? static_cast<std::int64_t>(cores.size())
                                    : cpu.logical_cores;
}

std::optional<std::int64_t> ParseMemTotal(std::string_view text) {
  for (std::string_view line : Lines(text)) {
    auto field = SplitField(line, ':');
    if (!field || field->first != "MemTotal") continue;
    std::string_view value = field->second;
    std::int64_t scale = 1;
    if (value.size() > 3 && value.substr(value.size() - 3) == " kB") {
      value.remove_suffix(3);
      scale = 1024;
    }
    if (std::optional<std::int64_t> n = ParseInt64(value)) return *n * scale;
  }
  return std::nullopt;
}

void ParseOsRelease(std::string_view text, OsInfo& os) {
  std::string version_fallback;
  for (std::string_view line : Lines(text)) {
    auto field = SplitField(line, '=');
    if (!field) continue;
    std::string value = field->second;
    if (value.size() >= 2 && (value.front() == '"' || value.front() == '\'') &&
        value.back() == value.front()) {
      value = value.substr(1, value.size() - 2);
    }
    if (field->first == "NAME") os.name = value;
    if (field->first == "VERSION_ID") os.version = value;
    if (field->first == "VERSION") version_fallback = value;
  }
  if (os.version.empty()) os.version = version_fallback;
}

absl::Status ParseGpus(std::string_view csv, std::vector<GpuInfo>& gpus) {
  int row = 0;
  for (std::string_view line : Lines(csv)) {
    ++row;
    if (Trim(line).empty()) continue;
    std::vector<std::string> cells;
    std::stringstream in{std::string(line)};
    for (std::string cell; std::getline(in, cell, ',');) cells.emplace_back(Trim(cell));
    if (cells.size() != 3) {
      return absl::InvalidArgumentError("GPU query row " + std::to_string(row) +
                                        " has " + std::to_string(cells.size()) +
                                        " fields, expected 3");
    }
    GpuInfo gpu;
    gpu.vendor = "NVIDIA";
    gpu.name = cells[0];
    gpu.model = NormalizeGpuModel(cells[0]);
    std::optional<std::int64_t> mib = ParseInt64(cells[1]);
    if (!mib) {
      return absl::InvalidArgumentError("GPU query row " + std::to_string(row) +
                                        ": memory '" + cells[1] + "' is not a number");
    }
    gpu.memory_bytes = *mib * 1024 * 1024;
    gpu.driver_version = cells[2];
    gpus.push_back(std::move(gpu));
  }
  return absl::OkStatus();
}

json GpuToJson(const GpuInfo& gpu) {
  return {{"vendor", gpu.vendor},
          {"model", gpu.model},
          {"name", gpu.name},
          {"memory_bytes", gpu.memory_bytes},
          {"driver_version", gpu.driver_version}};
}

// Typed field access for the FromJson functions.
class Reader {
 public:
  explicit Reader(const json& object, std::string where)
      : object_(object), where_(std::move(where)) {}

  bool ok() const { return error_.empty(); }
  absl::Status status() const { return absl::InvalidArgumentError(error_); }

  const json* Field(const char* key, json::value_t type) {
    if (!object_.is_object()) return Fail(where_ + " is not an object");
    auto it = object_.find(key);
    if (it == object_.end()) return Fail(where_ + "." + key + " is missing");
    bool matches = it->type() == type ||
                   (type == json::value_t::number_integer &&
                    it->type() == json::value_t::number_unsigned);
    if (!matches) return Fail(where_ + "." + key + " has the wrong type");
    return &*it;
  }
  std::string String(const char* key) {
    const json* v = Field(key, json::value_t::string);
    return v ? v->get<std::string>() : std::string();
  }
  std::int64_t Int(const char* key) {
    const json* v = Field(key, json::value_t::number_integer);
    return v ? v->get<std::int64_t>() : 0;
  }

 private:
  const json* Fail(std::string message) {
    if (error_.empty()) error_ = std::move(message);
    return nullptr;
  }
  const json& object_;
  std::string where_;
  std::string error_;
};

std::string Escape(std::string_view text) {
  std::string out;
  for (char c : text) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      case '\'': out += "&#39;"; break;
      default: out.push_back(c);
    }
  }
  return out;
}

std::string GiB(std::int64_t bytes) {
  char buffer[64];
  std::snprintf(buffer, sizeof(buffer), "%.1f GiB",
                static_cast<double>(bytes) / (1024.0 * 1024.0 * 1024.0));
  return buffer;
}

constexpr std::string_view kStyle =
    "body{font-family:sans-serif;margin:2em;color:#222}"
    "table{border-collapse:collapse;margin-bottom:1.5em}"
    "th,td{border:1px solid #bbb;padding:4px 10px;text-align:left}"
    "th{background:#eee}.err{color:#a00}";

std::string Row(std::string_view label, std::string_view value) {
  return "<tr><th>" + Escape(label) + "</th><td>" + Escape(value) + "</td></tr>\n";
}

std::string HardwareSections(const HardwareReport& r) {
  std::string out = "<h2>Machine</h2>\n<table>\n";
  out += Row("CPU", r.cpu.model);
  out += Row("Physical cores", std::to_string(r.cpu.physical_cores));
  out += Row("Logical cores", std::to_string(r.cpu.logical_cores));
  out += Row("Memory", GiB(r.memory_total_bytes) + " (" +
                           std::to_string(r.memory_total_bytes) + " bytes)");
  out += Row("Operating system", r.os.name + " " + r.os.version);
  out += Row("Kernel", r.os.kernel);
  out += Row("Collected at", r.collected_at);
  out += "</table>\n<h2>GPUs (" + std::to_string(r.gpus.size()) + ")</h2>\n";
  if (r.gpus.empty()) {
    out += "<p>No GPU detected.</p>\n";
  } else {
    out += "<table>\n<tr><th>#</th><th>Vendor</th><th>Model</th><th>Name</th>"
           "<th>Memory</th><th>Driver</th></tr>\n";
    for (std::size_t i = 0; i < r.gpus.size(); ++i) {
      const GpuInfo& g = r.gpus[i];
      out += "<tr><td>" + std::to_string(i) + "</td><td>" + Escape(g.vendor) + "</td><td>" +
             Escape(g.model) + "</td><td>" + Escape(g.name) + "</td><td>" +
             GiB(g.memory_bytes) + "</td><td>" + Escape(g.driver_version) + "</td></tr>\n";
    }
    out += "</table>\n";
  }
  if (!r.probe_errors.empty()) {
    out += "<h2>Probe errors</h2>\n<ul>\n";
    for (const std::string& e : r.probe_errors) out += "<li class=\"err\">" + Escape(e) + "</li>\n";
    out += "</ul>\n";
  }
  return out;
}

std::string Page(std::string_view title, std::string_view body) {
  return "<!DOCTYPE html>\n<html lang=\"en\">\n<head>\n<meta charset=\"utf-8\">\n<title>" +
         Escape(title) + "</title>\n<style>" + std::string(kStyle) +
         "</style>\n</head>\n<body>\n<h1>" + Escape(title) + "</h1>\n" + std::string(body) +
         "</body>\n</html>\n";
}

}  // namespace

std::unique_ptr<SystemProbe> MakeLinuxProbe() { return std::make_unique<LinuxProbe>(); }

FixtureProbe FixtureProbe::DualV100Server() {
  FixtureProbe probe;
  std::string cpuinfo;
  int processor = 0;
  // Linux numbers the first hardware thread of every core before the
  // hyper-thread siblings.
  for (int thread = 0; thread < 2; ++thread) {
    for (int socket = 0; socket < 2; ++socket) {
      for (int core = 0; core < 12; ++core) {
        cpuinfo += "processor\t: " + std::to_string(processor++) + "\n";
        cpuinfo += "vendor_id\t: GenuineIntel\n";
        cpuinfo += "model name\t: Intel(R) Xeon(R) CPU E5-2650 v4 @ 2.20GHz\n";
        cpuinfo += "physical id\t: " + std::to_string(socket) + "\n";
        cpuinfo += "siblings\t: 24\n";
        cpuinfo += "core id\t\t: " + std::to_string(core) + "\n";
        cpuinfo += "cpu cores\t: 12\n\n";
      }
    }
  }
  probe.cpuinfo = cpuinfo;
  probe.meminfo =
      std::string("MemTotal:       263855260 kB\nMemFree:        201245012 kB\n");
  probe.os_release = std::string(
      "NAME=\"Ubuntu\"\nVERSION=\"18.04.5 LTS (Bionic Beaver)\"\nID=ubuntu\n"
      "VERSION_ID=\"18.04\"\n");
  probe.kernel = std::string("4.15.0-112-generic");
  probe.gpu_query = std::optional<std::string>(
      "Tesla V100-SXM2-32GB, 32510, 450.80.02\n"
      "Tesla V100-SXM2-32GB, 32510, 450.80.02\n");
  probe.timestamp = "2021-01-15T12:00:00Z";
  return probe;
}

std::string NormalizeGpuModel(std::string_view name) {
  std::string_view model = Trim(name);
  for (std::string_view prefix : {"NVIDIA ", "Tesla ", "GeForce ", "Quadro "}) {
    if (model.substr(0, prefix.size()) == prefix) model.remove_prefix(prefix.size());
  }
  std::size_t dash = model.find('-');
  if (dash != std::string_view::npos && dash > 0) model = model.substr(0, dash);
  return std::string(Trim(model));
}

HardwareReport CollectReport(SystemProbe& probe) {
  HardwareReport report;
  auto record = [&](std::string_view what, const absl::Status& status) {
    report.probe_errors.push_back(std::string(what) + ": " + std::string(status.message()));
  };
  if (absl::StatusOr<std::string> cpu = probe.ReadCpuInfo(); cpu.ok()) {
    ParseCpu(*cpu, report.cpu);
    if (report.cpu.logical_cores == 0) {
      record("cpu", absl::InvalidArgumentError("no processor entries"));
    }
  } else {
    record("cpu", cpu.status());
  }
  if (absl::StatusOr<std::string> mem = probe.ReadMemInfo(); mem.ok()) {
    std::optional<std::int64_t> total = ParseMemTotal(*mem);
    if (total) {
      report.memory_total_bytes = *total;
    } else {
      record("memory", absl::InvalidArgumentError("MemTotal not found"));
    }
  } else {
    record("memory", mem.status());
  }
  if (absl::StatusOr<std::optional<std::string>> gpus = probe.QueryGpus(); gpus.ok()) {
    if (gpus->has_value()) {
      if (absl::Status s = ParseGpus(**gpus, report.gpus); !s.ok()) {
        report.gpus.clear();
        record("gpu", s);
      }
    }
  } else {
    record("gpu", gpus.status());
  }
  if (absl::StatusOr<std::string> os = probe.ReadOsRelease(); os.ok()) {
    ParseOsRelease(*os, report.os);
  } else {
    record("os", os.status());
  }
  if (absl::StatusOr<std::string> kernel = probe.ReadKernelRelease(); kernel.ok()) {
    report.os.kernel = std::string(Trim(*kernel));
  } else {
    record("kernel", kernel.status());
  }
  report.collected_at = probe.Now();
  return report;
}

std::string Sha256Digest(std::string_view bytes) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int length = 0;
  EVP_Digest(bytes.data(), bytes.size(), digest, &length, EVP_sha256(), nullptr);
  static constexpr char kHex[] = "0123456789abcdef";
  std::string out = "sha256:";
  for (unsigned int i = 0; i < length; ++i) {
    out.push_back(kHex[digest[i] >> 4]);
    out.push_back(kHex[digest[i] & 0xf]);
  }
  return out;
}

absl::StatusOr<RunManifest> BuildManifest(const HardwareReport& report,
                                          const std::map<std::string, json>& hyperparameters,
                                          const std::map<std::string, json>& metrics,
                                          std::optional<std::string> source_revision,
                                          std::string_view env_manifest_bytes) {
  RunManifest manifest;
  manifest.hardware = report;
  for (const auto& [key, value] : hyperparameters) {
    std::optional<Literal> literal;
    if (value.is_string() || value.is_boolean() || value.is_number()) {
      literal = LiteralFromJson(value);
    }
    if (!literal) {
      return absl::InvalidArgumentError("hyperparameter '" + key +
                                        "' is not a literal (string, number or boolean)");
    }
    if (const double* d = std::get_if<double>(&*literal); d && !std::isfinite(*d)) {
      return absl::InvalidArgumentError("hyperparameter '" + key + "' is not finite");
    }
    manifest.hyperparameters.emplace(key, *std::move(literal));
  }
  for (const auto& [key, value] : metrics) {
    if (!value.is_number() || !std::isfinite(value.get<double>())) {
      return absl::InvalidArgumentError("metric '" + key + "' is not a finite number");
    }
    manifest.metrics.emplace(key, value.get<double>());
  }
  manifest.source_revision = std::move(source_revision);
  manifest.environment_digest = Sha256Digest(env_manifest_bytes);
  manifest.tool_version = std::string(kToolVersion);
  return manifest;
}

json HardwareReportToJson(const HardwareReport& r) {
  json gpus = json::array();
  for (const GpuInfo& gpu : r.gpus) gpus.push_back(GpuToJson(gpu));
  return {{"cpu",
           {{"model", r.cpu.model},
            {"physical_cores", r.cpu.physical_cores},
            {"logical_cores", r.cpu.logical_cores}}},
          {"memory_total_bytes", r.memory_total_bytes},
          {"gpus", gpus},
          {"os", {{"name", r.os.name}, {"version", r.os.version}, {"kernel", r.os.kernel}}},
          {"collected_at", r.collected_at},
          {"probe_errors", r.probe_errors}};
}

absl::StatusOr<HardwareReport> HardwareReportFromJson(const json& j) {
  HardwareReport r;
  Reader top(j, "report");
  if (const json* cpu = top.Field("cpu", json::value_t::object)) {
    Reader c(*cpu, "report.cpu");
    r.cpu.model = c.String("model");
    r.cpu.physical_cores = c.Int("physical_cores");
    r.cpu.logical_cores = c.Int("logical_cores");
    if (!c.ok()) return c.status();
  }
  r.memory_total_bytes = top.Int("memory_total_bytes");
  if (const json* gpus = top.Field("gpus", json::value_t::array)) {
    for (const json& entry : *gpus) {
      Reader g(entry, "report.gpus[]");
      GpuInfo gpu{g.String("vendor"), g.String("model"), g.String("name"),
                  g.Int("memory_bytes"), g.String("driver_version")};
      if (!g.ok()) return g.status();
      r.gpus.push_back(std::move(gpu));
    }
  }
  if (const json* os = top.Field("os", json::value_t::object)) {
    Reader o(*os, "report.os");
    r.os = {o.String("name"), o.String("version"), o.String("kernel")};
    if (!o.ok()) return o.status();
  }
  r.collected_at = top.String("collected_at");
  if (const json* errors = top.Field("probe_errors", json::value_t::array)) {
    for (const json& e : *errors) {
      if (!e.is_string()) return absl::InvalidArgumentError("report.probe_errors[] not a string");
      r.probe_errors.push_back(e.get<std::string>());
    }
  }
  if (!top.ok()) return top.status();
  return r;
}

json RunManifestToJson(const RunManifest& m) {
  json hyper = json::object();
  for (const auto& [key, value] : m.hyperparameters) hyper[key] = LiteralToJson(value);
  json metrics = json::object();
  for (const auto& [key, value] : m.metrics) metrics[key] = value;
  return {{"hardware", HardwareReportToJson(m.hardware)},
          {"hyperparameters", hyper},
          {"metrics", metrics},
          {"source_revision", m.source_revision ? json(*m.source_revision) : json(nullptr)},
          {"environment_digest", m.environment_digest},
          {"tool_version", m.tool_version}};
}

absl::StatusOr<RunManifest> RunManifestFromJson(const json& j) {
  RunManifest m;
  Reader top(j, "manifest");
  if (const json* hw = top.Field("hardware", json::value_t::object)) {
    absl::StatusOr<HardwareReport> report = HardwareReportFromJson(*hw);
    if (!report.ok()) return report.status();
    m.hardware = *std::move(report);
  }
  if (const json* hyper = top.Field("hyperparameters", json::value_t::object)) {
    for (const auto& [key, value] : hyper->items()) {
      std::optional<Literal> literal = LiteralFromJson(value);
      if (!literal || value.is_null()) {
        return absl::InvalidArgumentError("hyperparameter '" + key + "' is not a literal");
      }
      m.hyperparameters.emplace(key, *std::move(literal));
    }
  }
  if (const json* metrics = top.Field("metrics", json::value_t::object)) {
    for (const auto& [key, value] : metrics->items()) {
      if (!value.is_number()) {
        return absl::InvalidArgumentError("metric '" + key + "' is not a number");
      }
      m.metrics.emplace(key, value.get<double>());
    }
  }
  if (j.is_object() && j.contains("source_revision") && !j["source_revision"].is_null()) {
    m.source_revision = top.String("source_revision");
  }
  m.environment_digest = top.String("environment_digest");
  m.tool_version = top.String("tool_version");
  if (!top.ok()) return top.status();
  return m;
}

std::string CanonicalJson(const json& j) { return j.dump(2) + "\n"; }

std::string RenderHardwareHtml(const HardwareReport& report) {
  return Page("Hardware report", HardwareSections(report));
}

std::string RenderManifestHtml(const RunManifest& m) {
  std::string body = "<h2>Run</h2>\n<table>\n";
  body += Row("Source revision", m.source_revision.value_or("(none)"));
  body += Row("Environment digest", m.environment_digest);
  body += Row("Tool version", m.tool_version);
  body += "</table>\n<h2>Hyperparameters</h2>\n<table>\n";
  for (const auto& [key, value] : m.hyperparameters) {
    body += Row(key, LiteralToJson(value).dump());
  }
  body += "</table>\n<h2>Metrics</h2>\n<table>\n";
  for (const auto& [key, value] : m.metrics) body += Row(key, json(value).dump());
  body += "</table>\n";
  body += HardwareSections(m.hardware);
  return Page("Run manifest", body);
}

absl::StatusOr<std::map<std::string, json>> ParseKeyValueFile(std::string_view text) {
  std::map<std::string, json> values;
  int line_no = 0;
  for (std::string_view raw : Lines(text)) {
    ++line_no;
    std::string_view line = Trim(raw);
    if (line.empty() || line.front() == '#') continue;
    std::size_t eq = line.find('=');
    if (eq == std::string_view::npos) {
      return absl::InvalidArgumentError("line " + std::to_string(line_no) +
                                        ": expected key=value");
    }
    std::string key(Trim(line.substr(0, eq)));
    std::string_view value = Trim(line.substr(eq + 1));
    if (key.empty()) {
      return absl::InvalidArgumentError("line " + std::to_string(line_no) + ": empty key");
    }
    if (values.count(key)) {
      return absl::InvalidArgumentError("line " + std::to_string(line_no) +
                                        ": duplicate key '" + key + "'");
    }
    json parsed = json::parse(value, nullptr, /*allow_exceptions=*/false);
    if (parsed.is_discarded()) parsed = std::string(value);
    values.emplace(std::move(key), std::move(parsed));
  }
  return values;
}

}  // namespace detml
