#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include "tlsdd_cli/config.hpp"

namespace tlsdd::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitRuntime = 3;

struct CommandOptions {
  std::filesystem::path config;
  std::optional<std::uint64_t> seed;
  std::optional<unsigned> threads;
  std::optional<std::filesystem::path> out;
};

/// Loads, validates and applies the command-line overrides.
ExperimentConfig load_config(const CommandOptions& opts, std::string* raw = nullptr);

/// Runs the configured protocol and writes <protocol>.csv, metadata.json and
/// plot_<protocol>.py (plus fits and a model report for cp_sequence) into the
/// output directory. Returns the written files.
std::vector<std::filesystem::path> run(const CommandOptions& opts, std::ostream& log);

/// Analytic table over the predict grid, written to predict.csv and echoed to `log`.
std::vector<std::filesystem::path> predict(const CommandOptions& opts, std::ostream& log);

/// Parses and validates only.
void validate(const CommandOptions& opts, std::ostream& log);

struct FigureInfo {
  std::string name;
  std::string protocol;
  std::string description;
};
const std::vector<FigureInfo>& figures();
void list_figures(std::ostream& log, const std::filesystem::path& config_dir);

/// Directory holding the bundled figure configs.
std::filesystem::path bundled_config_dir();

/// git-style content hash: SHA-1 of "blob <size>\0" followed by the bytes.
std::string git_blob_sha1(std::string_view content);

/// Full command-line entry point; maps exceptions to exit codes 2 and 3.
int main_entry(int argc, char** argv, std::ostream& out, std::ostream& err);

}  // namespace tlsdd::cli
