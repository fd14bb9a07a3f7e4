#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "xfer/domain.hpp"
#include "xfer/metrics.hpp"
#include "xfer/regression.hpp"

namespace xfer {

inline constexpr const char* kToolVersion = "1.0.0";

// Provenance embedded in every report. Holds no timestamps, so identical
// inputs give byte-identical reports.
struct RunManifest {
  std::string subcommand;
  std::map<std::string, std::string> arguments;
  std::map<std::string, std::string> input_digests;  // path -> sha256 hex
  std::vector<std::uint64_t> seeds;
  std::string tool_version = kToolVersion;

  void add_input(const std::filesystem::path& path);
};

std::string sha256_file(const std::filesystem::path& path);
std::string sha256_hex(const std::string& bytes);

nlohmann::json to_json(const RunManifest& m);
nlohmann::json to_json(const TransferabilityReport& r);
nlohmann::json to_json(const FitResult& f);
nlohmann::json to_json(const DomainMetrics& m);

TransferabilityReport report_from_json(const nlohmann::json& j);

// Pretty-printed (2 spaces), keys sorted, trailing newline.
std::string dump_report(const nlohmann::json& j);
void write_text(const std::filesystem::path& path, const std::string& text);

}  // namespace xfer
