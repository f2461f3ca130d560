#pragma once

#include <string>

#include <nlohmann/json.hpp>

#include "tlsdd/dynamics.hpp"
#include "tlsdd/model.hpp"
#include "tlsdd/noise.hpp"
#include "tlsdd/protocols.hpp"
#include "tlsdd/pulse.hpp"

namespace tlsdd {

// JSON (de)serialization of the domain types. Readers are strict: unknown
// keys, wrong types and invariant violations throw ConfigError carrying the
// dotted path of the offending field (e.g. "device.t1_qb").
//
// Units: device fields are SI (delta, f_tls, s in Hz; ip in A; t1_* in s)
// except phi_star, which is in units of Phi0. Noise: a_phi in (µPhi0)²,
// angular frequencies in rad/s. Sequence and evolution times in ns.

nlohmann::json to_json(const DeviceParams& p);
DeviceParams device_from_json(const nlohmann::json& j, const std::string& path = "device");

struct NoiseConfig {
  OneOverFSpectrum spectrum{};
  WhiteTransverseChannel transverse{};
};
nlohmann::json to_json(const NoiseConfig& n);
NoiseConfig noise_from_json(const nlohmann::json& j, const std::string& path = "noise");

nlohmann::json to_json(const ReadoutModel& r);
ReadoutModel readout_from_json(const nlohmann::json& j, const std::string& path = "readout");

nlohmann::json to_json(const EvolutionOptions& o);
EvolutionOptions evolution_from_json(const nlohmann::json& j, const std::string& path = "evolution");

nlohmann::json to_json(const SequenceSettings& s);
SequenceSettings settings_from_json(const nlohmann::json& j, const std::string& path = "sequence");

nlohmann::json to_json(const PulseSequence& seq);
PulseSequence sequence_from_json(const nlohmann::json& j, const std::string& path = "sequence");

namespace json_detail {
/// Throws ConfigError naming the first key of `j` not in `allowed`.
void reject_unknown(const nlohmann::json& j, std::initializer_list<const char*> allowed,
                    const std::string& path);
/// Object-typed check.
void require_object(const nlohmann::json& j, const std::string& path);
double number(const nlohmann::json& j, const char* key, const std::string& path, double fallback);
double required_number(const nlohmann::json& j, const char* key, const std::string& path);
bool boolean(const nlohmann::json& j, const char* key, const std::string& path, bool fallback);
std::string string(const nlohmann::json& j, const char* key, const std::string& path,
                   const std::string& fallback);
long long integer(const nlohmann::json& j, const char* key, const std::string& path, long long fallback);
std::string join(const std::string& path, const std::string& key);
}  // namespace json_detail

}  // namespace tlsdd
