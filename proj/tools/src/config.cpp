#include "tlsdd_cli/config.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "tlsdd/errors.hpp"

namespace tlsdd::cli {

using nlohmann::json;
using namespace tlsdd::json_detail;

namespace {

std::vector<int> int_list(const json& j, const char* key, const std::string& path, std::vector<int> fallback,
                          int lo, int hi) {
  if (!j.contains(key)) return fallback;
  const auto p = join(path, key);
  const auto& v = j.at(key);
  if (!v.is_array() || v.empty()) throw ConfigError(p, "expected a non-empty array of integers");
  std::vector<int> out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    const auto ip = p + "[" + std::to_string(i) + "]";
    if (!v[i].is_number_integer()) throw ConfigError(ip, "expected an integer");
    const auto n = v[i].get<long long>();
    if (n < lo || n > hi) throw ConfigError(ip, "must be in [" + std::to_string(lo) + ", " + std::to_string(hi) + "]");
    out.push_back(static_cast<int>(n));
  }
  return out;
}

std::vector<double> required_grid(const json& j, const char* key, const std::string& path) {
  if (!j.contains(key)) throw ConfigError(join(path, key), "missing required field");
  return grid_from_json(j.at(key), join(path, key));
}

void require_nonnegative(const std::vector<double>& g, const std::string& path) {
  for (double v : g)
    if (v < 0.0) throw ConfigError(path, "values must be >= 0");
}

SwapSpectroscopyParams swap_from_json(const json& j, const std::string& path) {
  reject_unknown(j, {"type", "dphi", "tau1"}, path);
  SwapSpectroscopyParams p;
  p.dphi = required_grid(j, "dphi", path);
  p.tau1 = required_grid(j, "tau1", path);
  require_nonnegative(p.tau1, join(path, "tau1"));
  return p;
}

EchoParams echo_from_json(const json& j, const std::string& path) {
  reject_unknown(j, {"type", "dphi", "tau1", "tau2", "n_refocus"}, path);
  EchoParams p;
  p.dphi = number(j, "dphi", path, p.dphi);
  p.tau1 = number(j, "tau1", path, p.tau1);
  if (p.tau1 < 0.0) throw ConfigError(join(path, "tau1"), "must be >= 0");
  p.tau2 = required_grid(j, "tau2", path);
  require_nonnegative(p.tau2, join(path, "tau2"));
  p.n_refocus = int_list(j, "n_refocus", path, p.n_refocus, 0, 1);
  return p;
}

CalibrationParams calibration_from_json(const json& j, const std::string& path) {
  reject_unknown(j, {"type", "dphi", "tau1", "detune", "tau_refocus", "tau2"}, path);
  CalibrationParams p;
  p.dphi = number(j, "dphi", path, p.dphi);
  p.tau1 = number(j, "tau1", path, p.tau1);
  if (p.tau1 < 0.0) throw ConfigError(join(path, "tau1"), "must be >= 0");
  p.detune = number(j, "detune", path, p.detune);
  if (!(p.detune > 0.0)) throw ConfigError(join(path, "detune"), "must be > 0");
  p.tau_refocus = required_grid(j, "tau_refocus", path);
  require_nonnegative(p.tau_refocus, join(path, "tau_refocus"));
  p.tau2 = required_grid(j, "tau2", path);
  require_nonnegative(p.tau2, join(path, "tau2"));
  return p;
}

CpParams cp_from_json(const json& j, const std::string& path) {
  reject_unknown(j, {"type", "dphi", "n_pulses", "t", "fix_t1"}, path);
  CpParams p;
  p.dphi = required_grid(j, "dphi", path);
  p.n_pulses = int_list(j, "n_pulses", path, p.n_pulses, 0, 1000);
  const auto tp = join(path, "t");
  if (!j.contains("t")) throw ConfigError(tp, "missing required field");
  const auto& t = j.at("t");
  if (t.is_object() && t.contains("points")) {
    reject_unknown(t, {"points", "start", "stop"}, tp);
    const auto n = integer(t, "points", tp, p.t.points);
    if (n < 6 || n > 10000) throw ConfigError(join(tp, "points"), "must be in [6, 10000]");
    p.t.points = static_cast<int>(n);
    p.t.start = number(t, "start", tp, p.t.start);
    p.t.stop = number(t, "stop", tp, p.t.stop);
    if (!(p.t.start > 0.0)) throw ConfigError(join(tp, "start"), "must be > 0");
    if (!(p.t.stop > p.t.start)) throw ConfigError(join(tp, "stop"), "must exceed start");
  } else {
    p.t.explicit_grid = grid_from_json(t, tp);
    require_nonnegative(p.t.explicit_grid, tp);
  }
  if (j.contains("fix_t1")) {
    const auto& v = j.at("fix_t1");
    if (v.is_string() && v.get<std::string>() == "inf") {
      p.fix_t1 = std::numeric_limits<double>::infinity();
    } else {
      const double f = number(j, "fix_t1", path, 0.0);
      if (!(f > 0.0)) throw ConfigError(join(path, "fix_t1"), "must be > 0 or \"inf\"");
      p.fix_t1 = f;
    }
  }
  return p;
}

ProtocolParams protocol_from_json(const json& j, const std::string& path) {
  require_object(j, path);
  const auto type = string(j, "type", path, "");
  if (type.empty()) throw ConfigError(join(path, "type"), "missing required field");
  if (type == "swap_spectroscopy") return swap_from_json(j, path);
  if (type == "echo") return echo_from_json(j, path);
  if (type == "calibrate_refocus") return calibration_from_json(j, path);
  if (type == "cp_sequence") return cp_from_json(j, path);
  throw ConfigError(join(path, "type"), "unknown protocol '" + type +
                                            "' (expected swap_spectroscopy, echo, calibrate_refocus or cp_sequence)");
}

PredictGrid predict_from_json(const json& j, const std::string& path) {
  reject_unknown(j, {"dphi", "n_pulses", "total_time"}, path);
  PredictGrid g;
  g.dphi = required_grid(j, "dphi", path);
  g.n_pulses = int_list(j, "n_pulses", path, g.n_pulses, 0, 1000);
  g.total_time = number(j, "total_time", path, g.total_time);
  if (g.total_time < 0.0) throw ConfigError(join(path, "total_time"), "must be >= 0");
  return g;
}

json grid_to_json(const std::vector<double>& g) { return json(g); }

}  // namespace

std::string protocol_name(const ProtocolParams& p) {
  struct Visitor {
    std::string operator()(const SwapSpectroscopyParams&) const { return "swap_spectroscopy"; }
    std::string operator()(const EchoParams&) const { return "echo"; }
    std::string operator()(const CalibrationParams&) const { return "calibrate_refocus"; }
    std::string operator()(const CpParams&) const { return "cp_sequence"; }
  };
  return std::visit(Visitor{}, p);
}

std::vector<double> grid_from_json(const json& j, const std::string& path) {
  std::vector<double> out;
  if (j.is_array()) {
    if (j.empty()) throw ConfigError(path, "grid must be non-empty");
    for (std::size_t i = 0; i < j.size(); ++i) {
      const auto ip = path + "[" + std::to_string(i) + "]";
      if (!j[i].is_number()) throw ConfigError(ip, "expected a number");
      const double v = j[i].get<double>();
      if (!std::isfinite(v)) throw ConfigError(ip, "must be finite");
      out.push_back(v);
    }
    return out;
  }
  if (!j.is_object()) throw ConfigError(path, "expected an array or a {start, stop, step} object");
  reject_unknown(j, {"start", "stop", "step"}, path);
  const double start = required_number(j, "start", path);
  const double stop = required_number(j, "stop", path);
  const double step = required_number(j, "step", path);
  if (!(step > 0.0)) throw ConfigError(join(path, "step"), "must be > 0");
  if (stop < start) throw ConfigError(join(path, "stop"), "must be >= start");
  const double span = (stop - start) / step;
  if (span > 1e6) throw ConfigError(path, "more than 1e6 grid points");
  // Index-based so the grid does not accumulate rounding drift.
  const auto n = static_cast<long long>(std::floor(span + 1e-9));
  for (long long i = 0; i <= n; ++i) out.push_back(start + static_cast<double>(i) * step);
  return out;
}

json read_json_file(const std::filesystem::path& path, std::string* raw) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("config", "cannot read '" + path.string() + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  const std::string text = ss.str();
  if (raw) *raw = text;
  try {
    return json::parse(text, nullptr, true, /*ignore_comments=*/false);
  } catch (const json::parse_error& e) {
    throw ConfigError("config", std::string("malformed JSON: ") + e.what());
  }
}

ExperimentConfig config_from_json(const json& j) {
  reject_unknown(j,
                 {"$schema", "name", "device", "noise", "readout", "protocol", "evolution", "sequence", "seed",
                  "output_dir", "predict"},
                 "");
  ExperimentConfig c;
  c.name = string(j, "name", "", "");
  if (j.contains("device")) c.device = device_from_json(j.at("device"), "device");
  if (j.contains("noise")) c.noise = noise_from_json(j.at("noise"), "noise");
  if (j.contains("readout")) c.readout = readout_from_json(j.at("readout"), "readout");
  if (j.contains("evolution")) c.evolution = evolution_from_json(j.at("evolution"), "evolution");
  if (j.contains("sequence")) c.settings = settings_from_json(j.at("sequence"), "sequence");
  if (!j.contains("protocol")) throw ConfigError("protocol", "missing required field");
  c.protocol = protocol_from_json(j.at("protocol"), "protocol");
  if (j.contains("seed")) {
    const auto& s = j.at("seed");
    if (!s.is_number_unsigned()) throw ConfigError("seed", "expected a non-negative 64-bit integer");
    c.seed = s.get<std::uint64_t>();
  }
  c.output_dir = string(j, "output_dir", "", c.output_dir.string());
  if (c.output_dir.empty()) throw ConfigError("output_dir", "must be non-empty");
  if (j.contains("predict")) {
    c.predict = predict_from_json(j.at("predict"), "predict");
  } else if (const auto* cp = std::get_if<CpParams>(&c.protocol)) {
    c.predict.dphi = cp->dphi;
    c.predict.n_pulses = cp->n_pulses;
  } else {
    c.predict.dphi = {0.0};
  }
  return c;
}

json to_json(const ExperimentConfig& c) {
  json proto;
  std::visit(
      [&](const auto& p) {
        using T = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<T, SwapSpectroscopyParams>) {
          proto = {{"dphi", grid_to_json(p.dphi)}, {"tau1", grid_to_json(p.tau1)}};
        } else if constexpr (std::is_same_v<T, EchoParams>) {
          proto = {{"dphi", p.dphi}, {"tau1", p.tau1}, {"tau2", grid_to_json(p.tau2)}, {"n_refocus", p.n_refocus}};
        } else if constexpr (std::is_same_v<T, CalibrationParams>) {
          proto = {{"dphi", p.dphi},
                   {"tau1", p.tau1},
                   {"detune", p.detune},
                   {"tau_refocus", grid_to_json(p.tau_refocus)},
                   {"tau2", grid_to_json(p.tau2)}};
        } else {
          json t;
          if (!p.t.explicit_grid.empty()) {
            t = grid_to_json(p.t.explicit_grid);
          } else {
            t = {{"points", p.t.points}, {"start", p.t.start}, {"stop", p.t.stop}};
          }
          proto = {{"dphi", grid_to_json(p.dphi)}, {"n_pulses", p.n_pulses}, {"t", t}};
          if (p.fix_t1) {
            if (std::isinf(*p.fix_t1)) {
              proto["fix_t1"] = "inf";
            } else {
              proto["fix_t1"] = *p.fix_t1;
            }
          }
        }
      },
      c.protocol);
  proto["type"] = protocol_name(c.protocol);
  json out = {{"device", tlsdd::to_json(c.device)},
              {"noise", tlsdd::to_json(c.noise)},
              {"readout", tlsdd::to_json(c.readout)},
              {"protocol", proto},
              {"evolution", tlsdd::to_json(c.evolution)},
              {"sequence", tlsdd::to_json(c.settings)},
              {"seed", c.seed},
              {"output_dir", c.output_dir.string()},
              {"predict",
               {{"dphi", grid_to_json(c.predict.dphi)},
                {"n_pulses", c.predict.n_pulses},
                {"total_time", c.predict.total_time}}}};
  if (!c.name.empty()) out["name"] = c.name;
  return out;
}

SimulationContext context_for(const ExperimentConfig& c) {
  SimulationContext ctx;
  ctx.device = c.device;
  ctx.noise = c.noise.spectrum;
  ctx.transverse = c.noise.transverse;
  ctx.evolution = c.evolution;
  ctx.evolution.seed = c.seed;
  ctx.settings = c.settings;
  return ctx;
}

}  // namespace tlsdd::cli
