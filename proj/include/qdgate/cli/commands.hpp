#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "qdgate/cli/config.hpp"
#include "qdgate/cli/csv.hpp"

namespace qdgate::cli {

inline constexpr int exit_ok = 0;
inline constexpr int exit_config_error = 2;
inline constexpr int exit_numeric_failure = 3;

struct RunOptions {
  std::filesystem::path config;
  std::filesystem::path out;
  std::optional<std::uint64_t> seed;
  int jobs = 1;
  bool verbose = false;
};

std::vector<std::string> command_names();
std::vector<ParamSpec> command_schema(const std::string& command);
bool command_sweeps(const std::string& command);

// Pure computation: tables for a resolved config. Diagnostics go to the log lines.
struct CommandOutput {
  std::vector<CsvTable> tables;
  std::vector<std::string> log;
};

CommandOutput cmd_gate(const ResolvedConfig& cfg, const RunOptions& opts);
CommandOutput cmd_fidelity_sweep(const ResolvedConfig& cfg, const RunOptions& opts);
CommandOutput cmd_readout(const ResolvedConfig& cfg, const RunOptions& opts);
CommandOutput cmd_spectral(const ResolvedConfig& cfg, const RunOptions& opts);

// Loads, runs and writes; maps failures to exit codes with a message on stderr.
int run_command(const std::string& command, const RunOptions& opts);

}  // namespace qdgate::cli
