#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include <nlohmann/json.hpp>

#include "tlsdd/protocols.hpp"
#include "tlsdd/serialization.hpp"

namespace tlsdd::cli {

struct SwapSpectroscopyParams {
  std::vector<double> dphi;  ///< µPhi0
  std::vector<double> tau1;  ///< ns
};

struct EchoParams {
  double dphi = -72.0;
  double tau1 = 100.0;
  std::vector<double> tau2;
  std::vector<int> n_refocus{0, 1};
};

struct CalibrationParams {
  double dphi = -72.0;
  double tau1 = 97.0;
  double detune = 0.55;  ///< GHz
  std::vector<double> tau_refocus;
  std::vector<double> tau2;
};

/// Total-time grid for a CP trace: explicit, or scaled to the predicted T_e.
struct CpTimeGrid {
  std::vector<double> explicit_grid;
  int points = 15;
  double start = 0.2;  ///< fraction of the predicted T_e
  double stop = 2.0;
};

struct CpParams {
  std::vector<double> dphi;
  std::vector<int> n_pulses{0, 1, 2, 4};
  CpTimeGrid t;
  /// Fixed T̃₁ used by the decay fits and the model comparison; absent = free.
  std::optional<double> fix_t1;
};

using ProtocolParams = std::variant<SwapSpectroscopyParams, EchoParams, CalibrationParams, CpParams>;

/// Grid tabulated by `predict`.
struct PredictGrid {
  std::vector<double> dphi;
  std::vector<int> n_pulses{0, 1, 2, 4};
  double total_time = 0.0;  ///< ns, sets the low-frequency cutoff; 0 = self-consistent
};

struct ExperimentConfig {
  std::string name;
  DeviceParams device = DeviceParams::defaults();
  NoiseConfig noise{};
  ReadoutModel readout{};
  ProtocolParams protocol = SwapSpectroscopyParams{};
  EvolutionOptions evolution{};
  SequenceSettings settings{};
  std::uint64_t seed = 0;
  std::filesystem::path output_dir = "out";
  PredictGrid predict{};
};

/// Name used in the config's protocol.type field.
std::string protocol_name(const ProtocolParams& p);

/// Grids are arrays of numbers or {"start", "stop", "step"} objects.
std::vector<double> grid_from_json(const nlohmann::json& j, const std::string& path);

/// Parses and validates a full config. Throws ConfigError with a dotted path.
ExperimentConfig config_from_json(const nlohmann::json& j);

/// Reads a file and parses it as strict JSON (comments rejected).
/// Throws ConfigError("config", ...) when unreadable or malformed.
nlohmann::json read_json_file(const std::filesystem::path& path, std::string* raw = nullptr);

/// Normalized echo of a parsed config (all defaults filled in).
nlohmann::json to_json(const ExperimentConfig& c);

SimulationContext context_for(const ExperimentConfig& c);

}  // namespace tlsdd::cli
