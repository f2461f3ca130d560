#include "tlsdd/protocols.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdio>

#include "tlsdd/constants.hpp"
#include "tlsdd/errors.hpp"
#include "tlsdd/parallel.hpp"

namespace tlsdd {

namespace {

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

Edge edge_for(const SequenceSettings& s) {
  return s.rise_time > 0.0 ? Edge::gaussian(s.rise_time) : Edge::instantaneous();
}

double oscillation_period(double dphi, const DeviceParams& params) {
  return 1.0 / f_osc(detuning(dphi, params), params.s);
}

// K equally spaced record times covering one period centred on `centre`
// (shifted forward if the window would start before t = 0).
std::vector<double> window_records(double centre, double period, int k) {
  const double start = std::max(0.0, centre - 0.5 * period);
  std::vector<double> r(static_cast<std::size_t>(k));
  for (int i = 0; i < k; ++i) r[static_cast<std::size_t>(i)] = start + period * i / k;
  return r;
}

struct WindowResult {
  double visibility = 0.0;
  double stderr_visibility = 0.0;
};

// Visibility over one oscillation period centred `after_last` ns into the
// final free interval; phase-cycled when there are refocusing pulses.
WindowResult measure_window(double dphi, std::vector<double> intervals, double tau_r, double after_last,
                            double period, const SimulationContext& ctx) {
  const bool ideal = ctx.evolution.ideal_pi;
  const double t0 = interaction_start(ctx.settings, ideal);
  const int k = ctx.settings.demod_samples;
  intervals.back() += 0.5 * period;
  auto run = [&](const std::vector<double>& iv) {
    const auto seq = build_sequence(dphi, iv, tau_r, ctx.device, ctx.settings, ideal);
    double last_start = t0;
    for (std::size_t i = 0; i + 1 < iv.size(); ++i) last_start += iv[i] + tau_r;
    return simulate(seq, ctx, window_records(last_start + after_last, period, k));
  };
  const auto a = run(intervals);
  WindowResult w;
  if (ctx.settings.phase_cycle && intervals.size() > 1) {
    auto shifted = intervals;
    shifted.front() += 0.5 * period;
    const auto b = run(shifted);
    std::vector<double> diff(a.qubit_excited.size());
    double s2 = 0.0;
    for (std::size_t i = 0; i < diff.size(); ++i) {
      diff[i] = 0.5 * (a.qubit_excited[i] - b.qubit_excited[i]);
      s2 += 0.25 * (a.qubit_excited_stderr[i] * a.qubit_excited_stderr[i] +
                    b.qubit_excited_stderr[i] * b.qubit_excited_stderr[i]);
    }
    w.visibility = demodulated_visibility(diff);
    w.stderr_visibility = std::sqrt(2.0 / k * s2 / k);
    return w;
  }
  w.visibility = demodulated_visibility(a.qubit_excited);
  double s2 = 0.0;
  for (double s : a.qubit_excited_stderr) s2 += s * s;
  w.stderr_visibility = std::sqrt(2.0 / k * s2 / k);
  return w;
}

// Options for a single grid point run from an outer parallel loop.
EvolutionOptions point_options(const SimulationContext& ctx, double t_exp, double window,
                               std::uint64_t seed) {
  EvolutionOptions o = ctx.evolution;
  if (o.experiment_time == 0.0) o.experiment_time = std::max(t_exp, 1.0);
  if (o.noise_window == 0.0) o.noise_window = window;
  o.seed = seed;
  o.threads = 1;
  return o;
}

unsigned outer_threads(const SimulationContext& ctx) { return ctx.evolution.threads; }

}  // namespace

void ReadoutModel::validate() const {
  if (!(p_sw_ground >= 0.0 && p_sw_ground <= 1.0))
    throw ConfigError("readout.p_sw_ground", "must be in [0, 1]");
  if (!(p_sw_excited >= 0.0 && p_sw_excited <= 1.0))
    throw ConfigError("readout.p_sw_excited", "must be in [0, 1]");
  if (!(p_sw_ground > p_sw_excited))
    throw ConfigError("readout.p_sw_excited", "must be below p_sw_ground");
}

double apply_readout(double p_excited, const ReadoutModel& model) {
  if (!(p_excited >= 0.0 && p_excited <= 1.0))
    throw DomainError("apply_readout: p_excited must be in [0, 1], got " + fmt(p_excited));
  return model.p_sw_ground + (model.p_sw_excited - model.p_sw_ground) * p_excited;
}

void SequenceSettings::validate() const {
  if (!(prep_hold >= 0.0)) throw ConfigError("protocol.settings.prep_hold", "must be >= 0");
  if (!(rise_time >= 0.0)) throw ConfigError("protocol.settings.rise_time", "must be >= 0");
  if (!(detune > 0.0)) throw ConfigError("protocol.settings.detune", "must be > 0");
  if (!(tau_refocus >= 0.0)) throw ConfigError("protocol.settings.tau_refocus", "must be >= 0");
  if (!(readout_hold >= 0.0)) throw ConfigError("protocol.settings.readout_hold", "must be >= 0");
  if (!(pi_duration >= 0.0)) throw ConfigError("protocol.settings.pi_duration", "must be >= 0");
  if (demod_samples < 4) throw ConfigError("protocol.settings.demod_samples", "must be >= 4");
}

double refocus_level(double dphi, double detune, const DeviceParams& params) {
  if (detune == 0.0) throw DomainError("refocus_level: detune must be non-zero");
  const double rate = std::abs(detune);
  if (rate <= params.s)
    throw DomainError("refocus_level: detune " + fmt(rate) + " GHz must exceed S = " + fmt(params.s));
  const double side = dphi > 0.0 ? 1.0 : -1.0;
  const double df = std::copysign(std::sqrt(rate * rate - params.s * params.s),
                                  detuning(side * 100.0, params));
  return dphi_for_detuning(df, params, side);
}

double interaction_start(const SequenceSettings& settings, bool ideal_pi) {
  return (ideal_pi ? 0.0 : settings.pi_duration) + settings.prep_hold;
}

PulseSequence build_sequence(double dphi, std::span<const double> free_intervals, double tau_refocus,
                             const DeviceParams& params, const SequenceSettings& settings,
                             bool ideal_pi) {
  if (free_intervals.empty()) throw ScheduleError("build_sequence: no free interval");
  for (double iv : free_intervals)
    if (!(iv >= 0.0)) throw ScheduleError("free interval " + fmt(iv) + " ns is negative");
  const Edge edge = edge_for(settings);
  PulseSequence seq;
  seq.add(PulseSegment::pi_pulse(ideal_pi ? 0.0 : settings.pi_duration));
  seq.add(PulseSegment::hold(settings.prep_dphi, settings.prep_hold));
  const double level = free_intervals.size() > 1 ? refocus_level(dphi, settings.detune, params) : 0.0;
  for (std::size_t i = 0; i < free_intervals.size(); ++i) {
    if (i > 0) seq.add(PulseSegment::hold(level, tau_refocus, edge));
    seq.add(PulseSegment::hold(dphi, free_intervals[i], edge));
  }
  seq.add(PulseSegment::hold(settings.prep_dphi, settings.readout_hold, edge));
  seq.add(PulseSegment::readout());
  seq.validate();
  return seq;
}

PopulationTrace simulate(const PulseSequence& seq, const SimulationContext& ctx,
                         std::span<const double> records) {
  const DensityMatrix4 rho0 = DensityMatrix4::basis(k0g);
  const auto channels = RelaxationChannels::from(ctx.device, ctx.transverse);
  auto wrap = [](const StateTrace& st) {
    PopulationTrace out;
    out.t = st.t;
    for (const auto& s : st.states) {
      out.mean.push_back(s.populations());
      out.stderr_mean.push_back({0.0, 0.0, 0.0, 0.0});
      out.qubit_excited.push_back(s.qubit_excited());
      out.qubit_excited_stderr.push_back(0.0);
    }
    return out;
  };
  switch (ctx.evolution.mode) {
    case EvolutionMode::Unitary:
      return wrap(propagate_piecewise(rho0, seq, ctx.device, ctx.evolution, records));
    case EvolutionMode::Lindblad:
      return wrap(evolve_lindblad(rho0, seq, ctx.device, channels, ctx.evolution, records));
    case EvolutionMode::MonteCarlo:
      return run_trajectories(rho0, seq, ctx.device, ctx.noise, channels, ctx.evolution, records);
  }
  throw DomainError("simulate: unknown evolution mode");
}

SweepResult2D swap_spectroscopy(std::span<const double> dphi_grid, std::span<const double> tau1_grid,
                                const SimulationContext& ctx) {
  if (dphi_grid.empty() || tau1_grid.empty())
    throw DomainError("swap_spectroscopy: grids must be non-empty");
  ctx.settings.validate();
  std::vector<double> taus(tau1_grid.begin(), tau1_grid.end());
  std::sort(taus.begin(), taus.end());
  if (taus.front() < 0.0) throw DomainError("swap_spectroscopy: tau1 must be >= 0");
  const double tmax = taus.back();
  const bool ideal = ctx.evolution.ideal_pi;
  const double t0 = interaction_start(ctx.settings, ideal);

  SweepResult2D res;
  res.x_name = "dphi";
  res.x_unit = "uPhi0";
  res.y_name = "tau1";
  res.y_unit = "ns";
  res.value_name = "p_excited";
  res.x_axis.assign(dphi_grid.begin(), dphi_grid.end());
  res.y_axis = taus;
  res.seed = ctx.evolution.seed;
  res.params = ctx.device;
  res.values.assign(res.x_axis.size(), std::vector<double>(taus.size()));
  res.stderr_values = res.values;

  parallel_for(res.x_axis.size(), outer_threads(ctx), [&](std::size_t ix) {
    const double dphi = res.x_axis[ix];
    const std::vector<double> intervals{tmax};
    const auto seq = build_sequence(dphi, intervals, 0.0, ctx.device, ctx.settings, ideal);
    std::vector<double> records;
    for (double tau : taus) records.push_back(t0 + tau);
    SimulationContext local = ctx;
    local.evolution = point_options(ctx, tmax, 4.0 * seq.t_total(), derive_seed(ctx.evolution.seed, ix));
    const auto tr = simulate(seq, local, records);
    for (std::size_t iy = 0; iy < taus.size(); ++iy) {
      res.values[ix][iy] = std::clamp(tr.qubit_excited[iy], 0.0, 1.0);
      res.stderr_values[ix][iy] = tr.qubit_excited_stderr[iy];
    }
  });
  return res;
}

CoherenceTrace echo_experiment(double dphi, double tau1, std::span<const double> tau2_grid,
                               int n_refocus, const SimulationContext& ctx) {
  if (!(tau1 >= 0.0)) throw DomainError("echo_experiment: tau1 must be >= 0");
  if (n_refocus != 0 && n_refocus != 1) throw DomainError("echo_experiment: n_refocus must be 0 or 1");
  ctx.settings.validate();
  const bool ideal = ctx.evolution.ideal_pi;
  const double t0 = interaction_start(ctx.settings, ideal);
  const double period = oscillation_period(dphi, ctx.device);
  const double tau_r = n_refocus == 1 ? ctx.settings.refocus_duration() : 0.0;
  double tau2_max = 0.0;
  for (double t2 : tau2_grid) {
    if (!(t2 >= 0.0)) throw DomainError("echo_experiment: tau2 must be >= 0");
    tau2_max = std::max(tau2_max, t2);
  }
  const double window = 4.0 * (t0 + tau1 + tau_r + tau2_max + period + ctx.settings.readout_hold);

  CoherenceTrace out;
  out.axis_name = "tau2";
  out.t.assign(tau2_grid.begin(), tau2_grid.end());
  out.visibility.resize(out.t.size());
  out.stderr_visibility.resize(out.t.size());
  out.seed = ctx.evolution.seed;
  parallel_for(out.t.size(), outer_threads(ctx), [&](std::size_t i) {
    const double tau2 = out.t[i];
    std::vector<double> intervals;
    if (n_refocus == 0) {
      intervals = {tau1 + tau2};
    } else {
      intervals = {tau1, tau2};
    }
    SimulationContext local = ctx;
    local.evolution = point_options(ctx, tau1 + tau_r + tau2, window, ctx.evolution.seed);
    const auto w = measure_window(dphi, intervals, tau_r, intervals.back(), period, local);
    out.visibility[i] = w.visibility;
    out.stderr_visibility[i] = w.stderr_visibility;
  });
  return out;
}

SweepResult2D calibrate_refocus(double dphi, double tau1, std::span<const double> tau_refocus_grid,
                                std::span<const double> tau2_grid, double detune,
                                const SimulationContext& ctx) {
  if (detune == 0.0) throw DomainError("calibrate_refocus: detune must be non-zero");
  if (tau_refocus_grid.empty() || tau2_grid.empty())
    throw DomainError("calibrate_refocus: grids must be non-empty");
  if (!(tau1 >= 0.0)) throw DomainError("calibrate_refocus: tau1 must be >= 0");
  SimulationContext base = ctx;
  base.settings.detune = std::abs(detune);
  base.settings.validate();
  const bool ideal = ctx.evolution.ideal_pi;
  const double t0 = interaction_start(base.settings, ideal);
  const double period = oscillation_period(dphi, ctx.device);
  const double rmax = *std::max_element(tau_refocus_grid.begin(), tau_refocus_grid.end());
  const double t2max = *std::max_element(tau2_grid.begin(), tau2_grid.end());
  const double window = 4.0 * (t0 + tau1 + rmax + t2max + period + base.settings.readout_hold);

  SweepResult2D res;
  res.x_name = "tau_refocus";
  res.x_unit = "ns";
  res.y_name = "tau2";
  res.y_unit = "ns";
  res.value_name = "visibility";
  res.x_axis.assign(tau_refocus_grid.begin(), tau_refocus_grid.end());
  res.y_axis.assign(tau2_grid.begin(), tau2_grid.end());
  res.seed = ctx.evolution.seed;
  res.params = ctx.device;
  res.values.assign(res.x_axis.size(), std::vector<double>(res.y_axis.size()));
  res.stderr_values = res.values;

  const std::size_t ny = res.y_axis.size();
  parallel_for(res.x_axis.size() * ny, outer_threads(ctx), [&](std::size_t k) {
    const std::size_t ix = k / ny;
    const std::size_t iy = k % ny;
    const double tau_r = res.x_axis[ix];
    const double tau2 = res.y_axis[iy];
    if (!(tau_r >= 0.0) || !(tau2 >= 0.0))
      throw DomainError("calibrate_refocus: durations must be >= 0");
    SimulationContext local = base;
    local.evolution = point_options(base, tau1 + tau_r + tau2, window, ctx.evolution.seed);
    const auto w = measure_window(dphi, {tau1, tau2}, tau_r, tau2, period, local);
    res.values[ix][iy] = w.visibility;
    res.stderr_values[ix][iy] = w.stderr_visibility;
  });
  return res;
}

std::vector<double> cp_free_intervals(int n_pulses, double total_time, double tau_refocus) {
  if (n_pulses < 0) throw DomainError("cp_free_intervals: n_pulses must be >= 0");
  if (!(total_time >= 0.0)) throw DomainError("cp_free_intervals: total time must be >= 0");
  if (n_pulses == 0) return {total_time};
  const double n = n_pulses;
  const double spacing = total_time / n;
  const double edge = 0.5 * spacing - 0.5 * tau_refocus;
  const double inner = spacing - tau_refocus;
  if (edge < 0.0 || inner < 0.0)
    throw ScheduleError("pulse spacing t/N = " + fmt(spacing) + " ns is shorter than the refocusing pulse (" +
                        fmt(tau_refocus) + " ns)");
  std::vector<double> out;
  out.push_back(edge);
  for (int k = 1; k < n_pulses; ++k) out.push_back(inner);
  out.push_back(edge);
  return out;
}

std::vector<double> cp_commensurate_times(int n_pulses, double dphi, double t_min, double t_max, int points,
                                          const DeviceParams& params, const SequenceSettings& settings) {
  if (n_pulses < 0) throw DomainError("cp_commensurate_times: n_pulses must be >= 0");
  if (points < 2) throw DomainError("cp_commensurate_times: need at least 2 points");
  if (!(t_max > t_min)) throw DomainError("cp_commensurate_times: t_max must exceed t_min");
  const double period = oscillation_period(dphi, params);
  const double n = n_pulses;
  const double offset = n_pulses == 0 ? 0.0 : n * settings.refocus_duration();
  const double step = n_pulses == 0 ? period : 2.0 * n * period;
  const auto m_lo = static_cast<long long>(std::max(1.0, std::ceil((t_min - offset) / step)));
  const auto m_hi = static_cast<long long>(std::floor((t_max - offset) / step));
  if (m_hi - m_lo + 1 < 2)
    throw ScheduleError("fewer than two commensurate CP times between " + fmt(t_min) + " and " + fmt(t_max) +
                        " ns (lattice step " + fmt(step) + " ns)");
  std::vector<double> out;
  const long long span = m_hi - m_lo;
  const int count = static_cast<int>(std::min<long long>(points, span + 1));
  long long last = -1;
  for (int i = 0; i < count; ++i) {
    const long long m = m_lo + (span * i + (count - 1) / 2) / std::max(count - 1, 1);
    if (m == last) continue;
    last = m;
    out.push_back(offset + static_cast<double>(m) * step);
  }
  return out;
}

CoherenceTrace cp_sequence(double dphi, int n_pulses, std::span<const double> total_time_grid,
                           const SimulationContext& ctx) {
  if (n_pulses < 0) throw DomainError("cp_sequence: n_pulses must be >= 0");
  ctx.settings.validate();
  const bool ideal = ctx.evolution.ideal_pi;
  const double t0 = interaction_start(ctx.settings, ideal);
  const double period = oscillation_period(dphi, ctx.device);
  const double tau_r = ctx.settings.refocus_duration();
  double tmax = 0.0;
  for (double t : total_time_grid) tmax = std::max(tmax, t);
  const double window = 4.0 * (t0 + tmax + period + ctx.settings.readout_hold);
  // Schedules are checked up front so an infeasible grid fails before any simulation.
  for (double t : total_time_grid) cp_free_intervals(n_pulses, t, tau_r);

  CoherenceTrace out;
  out.axis_name = "t";
  out.t.assign(total_time_grid.begin(), total_time_grid.end());
  out.visibility.resize(out.t.size());
  out.stderr_visibility.resize(out.t.size());
  out.seed = ctx.evolution.seed;
  parallel_for(out.t.size(), outer_threads(ctx), [&](std::size_t i) {
    const double t = out.t[i];
    const auto intervals = cp_free_intervals(n_pulses, t, tau_r);
    SimulationContext local = ctx;
    local.evolution = point_options(ctx, t, window, ctx.evolution.seed);
    const auto w = measure_window(dphi, intervals, tau_r, intervals.back(), period, local);
    out.visibility[i] = w.visibility;
    out.stderr_visibility[i] = w.stderr_visibility;
  });
  return out;
}

double demodulated_visibility(std::span<const double> samples) {
  const std::size_t k = samples.size();
  if (k < 3) throw DomainError("demodulated_visibility: need at least 3 samples");
  std::complex<double> acc = 0.0;
  for (std::size_t i = 0; i < k; ++i)
    acc += samples[i] * std::polar(1.0, -constants::two_pi * static_cast<double>(i) / static_cast<double>(k));
  return 2.0 * std::abs(acc) / static_cast<double>(k);
}

}  // namespace tlsdd
