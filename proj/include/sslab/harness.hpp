#pragma once

#include <filesystem>
#include <cstdint>
#include <string>
#include <string_view>

#include "json.hpp"
#include "sslab/config.hpp"
#include "sslab/superselection.hpp"

namespace sslab {

inline constexpr const char* kToolName = "sslab";
inline constexpr const char* kToolVersion = "0.1.0";

/// Exit-code contract of the command-line front end.
enum ExitCode : int { kExitPass = 0, kExitConfig = 1, kExitNumerical = 2, kExitInvariant = 3 };

struct RunResult {
  nlohmann::json report;
  int exit_code = kExitPass;  // kExitPass or kExitInvariant
};

/// Runs a validated scenario and writes the outputs it declares (CSV,
/// fringe series, report). Numerical failures propagate as exceptions.
RunResult run_scenario(const ScenarioConfig& cfg);

/// Same computation without touching the filesystem.
RunResult evaluate_scenario(const ScenarioConfig& cfg);

/// Band table as CSV `l,k,band,energy`, numbers at 17 significant digits.
std::string bands_csv(const BandStructure& bands);

/// `lambda,average` at 17 significant digits.
std::string fringe_csv(const FringeScan& scan);
void emit_fringe_series(const FringeScan& scan, const std::filesystem::path& path);

/// Writes through a sibling temporary file and renames it into place.
void write_file_atomic(const std::filesystem::path& path, const std::string& contents);

/// Report text; keys sorted, two-space indent, trailing newline.
std::string render_report(const nlohmann::json& report);

std::uint64_t fnv1a64(std::string_view bytes);

/// fnv1a64 of the compact config dump, as 16 hex digits.
std::string config_hash(const nlohmann::json& config);

}  // namespace sslab
