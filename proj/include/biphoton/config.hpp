#pragma once

// Run configuration for the command-line front end: a sectioned key-value
// file (INI syntax). Missing keys take the calibrated defaults.

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "biphoton/detection.hpp"
#include "biphoton/lock.hpp"
#include "biphoton/source.hpp"

namespace biphoton::cli {

/// Raised for unreadable, malformed or invalid configuration; maps to exit 1.
class ConfigError : public Error {
 public:
  using Error::Error;
};

struct ScanSpec {
  double start_deg = 0.0;
  double stop_deg = 90.0;
  std::size_t count = 37;

  std::vector<double> angles_rad() const;
};

struct LockSection {
  lock::PiGains gains;
  lock::DriftModel drift;
  lock::LockOptions options;
  double duration_s = 10.0;
  double settle_s = 1.0;
  double band_rad = 0.05;
};

struct RunSpec {
  double duration_s = 100.0;  ///< per scan point
  double dt_s = 1e-3;         ///< lock control period
  std::uint64_t seed = 1;
};

struct OutputSpec {
  std::filesystem::path directory = ".";
  bool emit_svg = false;
};

struct RunConfig {
  source::SourceConfig source;
  detection::DetectorConfig detector;
  LockSection lock;
  ScanSpec scan;
  RunSpec run;
  OutputSpec output;
};

/// Reads and validates a config file.
RunConfig parse_config(const std::filesystem::path& path);
/// Same, from text already in memory; `origin` names it in messages.
RunConfig parse_config_text(const std::string& text, const std::string& origin = "<config>");

/// Throws ConfigError if any section violates its invariants.
void validate(const RunConfig& cfg);

/// "section.key" names accepted in a config file, in documentation order.
std::vector<std::string> config_keys();

}  // namespace biphoton::cli
