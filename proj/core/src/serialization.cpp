#include "tlsdd/serialization.hpp"

#include <algorithm>
#include <cmath>

#include "tlsdd/errors.hpp"

namespace tlsdd {

using nlohmann::json;

namespace json_detail {

std::string join(const std::string& path, const std::string& key) {
  return path.empty() ? key : path + "." + key;
}

void require_object(const json& j, const std::string& path) {
  if (!j.is_object()) throw ConfigError(path, "expected an object");
}

void reject_unknown(const json& j, std::initializer_list<const char*> allowed, const std::string& path) {
  require_object(j, path);
  for (const auto& [key, value] : j.items()) {
    const bool known = std::any_of(allowed.begin(), allowed.end(), [&](const char* a) { return key == a; });
    if (!known) throw ConfigError(join(path, key), "unknown field");
  }
}

double number(const json& j, const char* key, const std::string& path, double fallback) {
  if (!j.contains(key)) return fallback;
  const auto& v = j.at(key);
  if (!v.is_number()) throw ConfigError(join(path, key), "expected a number");
  const double d = v.get<double>();
  if (!std::isfinite(d)) throw ConfigError(join(path, key), "must be finite");
  return d;
}

double required_number(const json& j, const char* key, const std::string& path) {
  if (!j.contains(key)) throw ConfigError(join(path, key), "missing required field");
  return number(j, key, path, 0.0);
}

bool boolean(const json& j, const char* key, const std::string& path, bool fallback) {
  if (!j.contains(key)) return fallback;
  if (!j.at(key).is_boolean()) throw ConfigError(join(path, key), "expected a boolean");
  return j.at(key).get<bool>();
}

std::string string(const json& j, const char* key, const std::string& path, const std::string& fallback) {
  if (!j.contains(key)) return fallback;
  if (!j.at(key).is_string()) throw ConfigError(join(path, key), "expected a string");
  return j.at(key).get<std::string>();
}

long long integer(const json& j, const char* key, const std::string& path, long long fallback) {
  if (!j.contains(key)) return fallback;
  const auto& v = j.at(key);
  if (!v.is_number_integer()) throw ConfigError(join(path, key), "expected an integer");
  return v.get<long long>();
}

namespace {

// Re-raises an enum parse failure under the caller's path.
template <class F>
auto parse_enum(F&& f, const std::string& full_path) {
  try {
    return f();
  } catch (const ConfigError& e) {
    throw ConfigError(full_path, std::string(e.what()).substr(e.path().size() + 2));
  } catch (const ScheduleError& e) {
    throw ConfigError(full_path, e.what());
  }
}

}  // namespace
}  // namespace json_detail

using namespace json_detail;

json to_json(const DeviceParams& p) {
  return {{"delta", p.delta * 1e9}, {"ip", p.ip},         {"f_tls", p.f_tls * 1e9},
          {"s", p.s * 1e9},         {"phi_star", p.phi_star * 1e-3},
          {"t1_qb", p.t1_qb},       {"t1_tls", p.t1_tls}};
}

DeviceParams device_from_json(const json& j, const std::string& path) {
  reject_unknown(j, {"delta", "ip", "f_tls", "s", "phi_star", "t1_qb", "t1_tls"}, path);
  DeviceParams d = DeviceParams::defaults();
  d.delta = number(j, "delta", path, d.delta * 1e9) * 1e-9;
  d.ip = number(j, "ip", path, d.ip);
  d.s = number(j, "s", path, d.s * 1e9) * 1e-9;
  d.phi_star = number(j, "phi_star", path, d.phi_star * 1e-3) * 1e3;
  d.t1_qb = number(j, "t1_qb", path, d.t1_qb);
  d.t1_tls = number(j, "t1_tls", path, d.t1_tls);
  // Without an explicit TLS frequency, resonance is pinned to phi_star.
  d.f_tls = j.contains("f_tls") ? number(j, "f_tls", path, 0.0) * 1e-9 : qubit_frequency(d.phi_star, d);
  try {
    d.validate();
  } catch (const ConfigError& e) {
    // validate() reports "device.<field>"; re-root it under `path`.
    const auto dot = e.path().find('.');
    throw ConfigError(join(path, dot == std::string::npos ? e.path() : e.path().substr(dot + 1)),
                      std::string(e.what()).substr(e.path().size() + 2));
  }
  return d;
}

json to_json(const NoiseConfig& n) {
  return {{"a_phi", n.spectrum.a_phi},
          {"omega_low", n.spectrum.omega_low},
          {"omega_high", n.spectrum.omega_high},
          {"s_perp", n.transverse.s_perp}};
}

NoiseConfig noise_from_json(const json& j, const std::string& path) {
  reject_unknown(j, {"a_phi", "omega_low", "omega_high", "s_perp"}, path);
  NoiseConfig n;
  n.spectrum.a_phi = number(j, "a_phi", path, n.spectrum.a_phi);
  n.spectrum.omega_low = number(j, "omega_low", path, n.spectrum.omega_low);
  n.spectrum.omega_high = number(j, "omega_high", path, n.spectrum.omega_high);
  n.transverse.s_perp = number(j, "s_perp", path, n.transverse.s_perp);
  if (n.spectrum.a_phi < 0.0) throw ConfigError(join(path, "a_phi"), "must be >= 0");
  if (!(n.spectrum.omega_low > 0.0)) throw ConfigError(join(path, "omega_low"), "must be > 0");
  if (!(n.spectrum.omega_high > n.spectrum.omega_low))
    throw ConfigError(join(path, "omega_high"), "must exceed omega_low");
  if (n.transverse.s_perp < 0.0) throw ConfigError(join(path, "s_perp"), "must be >= 0");
  return n;
}

json to_json(const ReadoutModel& r) {
  return {{"p_sw_ground", r.p_sw_ground}, {"p_sw_excited", r.p_sw_excited}};
}

ReadoutModel readout_from_json(const json& j, const std::string& path) {
  reject_unknown(j, {"p_sw_ground", "p_sw_excited"}, path);
  ReadoutModel r;
  r.p_sw_ground = number(j, "p_sw_ground", path, r.p_sw_ground);
  r.p_sw_excited = number(j, "p_sw_excited", path, r.p_sw_excited);
  if (!(r.p_sw_ground >= 0.0 && r.p_sw_ground <= 1.0))
    throw ConfigError(join(path, "p_sw_ground"), "must be in [0, 1]");
  if (!(r.p_sw_excited >= 0.0 && r.p_sw_excited <= 1.0))
    throw ConfigError(join(path, "p_sw_excited"), "must be in [0, 1]");
  if (!(r.p_sw_ground > r.p_sw_excited))
    throw ConfigError(join(path, "p_sw_excited"), "must be below p_sw_ground");
  return r;
}

json to_json(const EvolutionOptions& o) {
  return {{"dt", o.dt},
          {"mode", to_string(o.mode)},
          {"n_traj", o.n_traj},
          {"frame", to_string(o.frame)},
          {"ideal_pi", o.ideal_pi},
          {"relaxation", o.relaxation},
          {"sampling", to_string(o.sampling)},
          {"noise_dt", o.noise_dt},
          {"noise_window", o.noise_window},
          {"qs_cutoff", o.qs_cutoff},
          {"experiment_time", o.experiment_time},
          {"threads", o.threads}};
}

EvolutionOptions evolution_from_json(const json& j, const std::string& path) {
  reject_unknown(j,
                 {"dt", "mode", "n_traj", "frame", "ideal_pi", "relaxation", "sampling", "noise_dt",
                  "noise_window", "qs_cutoff", "experiment_time", "threads"},
                 path);
  EvolutionOptions o;
  o.dt = number(j, "dt", path, o.dt);
  o.mode = parse_enum([&] { return evolution_mode_from_string(string(j, "mode", path, "unitary")); },
                      join(path, "mode"));
  const auto n_traj = integer(j, "n_traj", path, o.n_traj);
  if (n_traj < 1 || n_traj > 100000000) throw ConfigError(join(path, "n_traj"), "must be in [1, 1e8]");
  o.n_traj = static_cast<int>(n_traj);
  o.frame = parse_enum([&] { return frame_from_string(string(j, "frame", path, "tls_rotating")); },
                       join(path, "frame"));
  o.ideal_pi = boolean(j, "ideal_pi", path, o.ideal_pi);
  o.relaxation = boolean(j, "relaxation", path, o.relaxation);
  o.sampling = parse_enum([&] { return noise_sampling_from_string(string(j, "sampling", path, "auto")); },
                          join(path, "sampling"));
  o.noise_dt = number(j, "noise_dt", path, o.noise_dt);
  o.noise_window = number(j, "noise_window", path, o.noise_window);
  o.qs_cutoff = number(j, "qs_cutoff", path, o.qs_cutoff);
  o.experiment_time = number(j, "experiment_time", path, o.experiment_time);
  const auto threads = integer(j, "threads", path, 0);
  if (threads < 0 || threads > 4096) throw ConfigError(join(path, "threads"), "must be in [0, 4096]");
  o.threads = static_cast<unsigned>(threads);
  try {
    o.validate();
  } catch (const ConfigError& e) {
    const auto dot = e.path().find('.');
    throw ConfigError(join(path, e.path().substr(dot + 1)), std::string(e.what()).substr(e.path().size() + 2));
  }
  return o;
}

json to_json(const SequenceSettings& s) {
  return {{"prep_dphi", s.prep_dphi},     {"prep_hold", s.prep_hold},       {"rise_time", s.rise_time},
          {"detune", s.detune},           {"tau_refocus", s.tau_refocus},   {"readout_hold", s.readout_hold},
          {"pi_duration", s.pi_duration}, {"demod_samples", s.demod_samples},
          {"phase_cycle", s.phase_cycle}};
}

SequenceSettings settings_from_json(const json& j, const std::string& path) {
  reject_unknown(j,
                 {"prep_dphi", "prep_hold", "rise_time", "detune", "tau_refocus", "readout_hold",
                  "pi_duration", "demod_samples", "phase_cycle"},
                 path);
  SequenceSettings s;
  s.prep_dphi = number(j, "prep_dphi", path, s.prep_dphi);
  s.prep_hold = number(j, "prep_hold", path, s.prep_hold);
  s.rise_time = number(j, "rise_time", path, s.rise_time);
  s.detune = number(j, "detune", path, s.detune);
  s.tau_refocus = number(j, "tau_refocus", path, s.tau_refocus);
  s.readout_hold = number(j, "readout_hold", path, s.readout_hold);
  s.pi_duration = number(j, "pi_duration", path, s.pi_duration);
  const auto k = integer(j, "demod_samples", path, s.demod_samples);
  if (k < 4 || k > 1024) throw ConfigError(join(path, "demod_samples"), "must be in [4, 1024]");
  s.demod_samples = static_cast<int>(k);
  s.phase_cycle = boolean(j, "phase_cycle", path, s.phase_cycle);
  try {
    s.validate();
  } catch (const ConfigError& e) {
    const auto last = e.path().rfind('.');
    throw ConfigError(join(path, e.path().substr(last + 1)), std::string(e.what()).substr(e.path().size() + 2));
  }
  return s;
}

json to_json(const PulseSequence& seq) {
  json segs = json::array();
  for (const auto& s : seq.segments()) {
    json e = {{"kind", to_string(s.kind)}, {"duration", s.duration}};
    if (s.kind == SegmentKind::FluxHold || s.kind == SegmentKind::FluxRamp) e["dphi"] = s.dphi_target;
    if (s.edge.shape == Edge::Shape::Gaussian)
      e["edge"] = {{"shape", "gaussian"}, {"rise_time", s.edge.rise_time}};
    segs.push_back(e);
  }
  return {{"segments", segs}};
}

PulseSequence sequence_from_json(const json& j, const std::string& path) {
  reject_unknown(j, {"segments"}, path);
  if (!j.contains("segments") || !j.at("segments").is_array())
    throw ConfigError(join(path, "segments"), "expected an array");
  std::vector<PulseSegment> segs;
  const auto& arr = j.at("segments");
  for (std::size_t i = 0; i < arr.size(); ++i) {
    const std::string p = join(path, "segments[" + std::to_string(i) + "]");
    const auto& e = arr[i];
    reject_unknown(e, {"kind", "dphi", "duration", "edge"}, p);
    PulseSegment s;
    s.kind = parse_enum([&] { return segment_kind_from_string(string(e, "kind", p, "")); }, join(p, "kind"));
    s.dphi_target = number(e, "dphi", p, 0.0);
    s.duration = number(e, "duration", p, 0.0);
    if (s.duration < 0.0) throw ConfigError(join(p, "duration"), "must be >= 0");
    if (e.contains("edge")) {
      const auto& ed = e.at("edge");
      reject_unknown(ed, {"shape", "rise_time"}, join(p, "edge"));
      const auto shape = string(ed, "shape", join(p, "edge"), "instantaneous");
      if (shape == "gaussian") {
        s.edge = Edge::gaussian(number(ed, "rise_time", join(p, "edge"), 1.5));
        if (!(s.edge.rise_time > 0.0)) throw ConfigError(join(p, "edge.rise_time"), "must be > 0");
      } else if (shape != "instantaneous") {
        throw ConfigError(join(p, "edge.shape"), "unknown edge shape '" + shape + "'");
      }
    }
    segs.push_back(s);
  }
  PulseSequence seq(std::move(segs));
  try {
    seq.validate();
  } catch (const ScheduleError& e) {
    throw ConfigError(join(path, "segments"), e.what());
  }
  return seq;
}

}  // namespace tlsdd
