#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "tlsdd/dynamics.hpp"
#include "tlsdd/model.hpp"
#include "tlsdd/noise.hpp"
#include "tlsdd/pulse.hpp"

namespace tlsdd {

/// Linear map from qubit excited population to SQUID switching probability.
struct ReadoutModel {
  double p_sw_ground = 0.9;
  double p_sw_excited = 0.1;

  /// Both in [0, 1] and p_sw_ground > p_sw_excited; throws ConfigError.
  void validate() const;
};

/// P_SW = p_sw_ground + (p_sw_excited − p_sw_ground) p_excited.
/// Throws DomainError unless p_excited ∈ [0, 1].
double apply_readout(double p_excited, const ReadoutModel& model);

/// Timing conventions shared by the protocol sequence builders.
struct SequenceSettings {
  double prep_dphi = 1200.0;   ///< µPhi0, flux during the preparation π pulse
  double prep_hold = 5.0;      ///< ns between the π pulse and the ramp to the working point
  double rise_time = 1.5;      ///< ns, 10–90 % of every flux edge; 0 = instantaneous
  double detune = 0.55;        ///< GHz, rotation frequency during a refocusing pulse
  double tau_refocus = 0.0;    ///< ns, refocusing pulse length; 0 = 0.5/detune
  double readout_hold = 5.0;   ///< ns at the preparation flux before the readout marker
  double pi_duration = 0.0;    ///< ns, used when the evolution is non-ideal
  int demod_samples = 8;       ///< records per oscillation period for visibility estimates
  /// With refocusing pulses, also run the first interval half an oscillation
  /// period longer and demodulate the difference of the two signals. This
  /// keeps only components that remember the first interval's phase.
  bool phase_cycle = true;

  double refocus_duration() const { return tau_refocus > 0.0 ? tau_refocus : 0.5 / detune; }
  void validate() const;
};

/// The environment every protocol runs in.
struct SimulationContext {
  DeviceParams device = DeviceParams::defaults();
  OneOverFSpectrum noise{};
  WhiteTransverseChannel transverse{};
  EvolutionOptions evolution{};
  SequenceSettings settings{};
};

struct SweepResult2D {
  std::string x_name, x_unit, y_name, y_unit, value_name;
  std::vector<double> x_axis;
  std::vector<double> y_axis;
  /// values[ix][iy]
  std::vector<std::vector<double>> values;
  std::vector<std::vector<double>> stderr_values;
  std::uint64_t seed = 0;
  DeviceParams params{};
};

/// Oscillation visibility h versus a time axis.
struct CoherenceTrace {
  std::string axis_name;
  std::vector<double> t;           ///< ns
  std::vector<double> visibility;  ///< qubit-population oscillation amplitude
  std::vector<double> stderr_visibility;
  std::uint64_t seed = 0;
};

/// Flux offset (µPhi0) of a refocusing pulse for a working point: the level on
/// the working point's side of resonance where sqrt(δf² + S²) = detune.
double refocus_level(double dphi, double detune, const DeviceParams& params);

/// Preparation π pulse at prep_dphi, then the working-point holds in
/// `free_intervals` separated by refocusing pulses of length `tau_refocus`,
/// then a return to prep_dphi and the readout marker. The interaction clock
/// starts at interaction_start(settings).
PulseSequence build_sequence(double dphi, std::span<const double> free_intervals, double tau_refocus,
                             const DeviceParams& params, const SequenceSettings& settings,
                             bool ideal_pi = true);

/// Time at which the first working-point hold begins.
double interaction_start(const SequenceSettings& settings, bool ideal_pi = true);

/// Populations at `records` (absolute times) using the evolution mode of the
/// context: a single deterministic run for unitary/lindblad, a trajectory
/// average for monte_carlo.
PopulationTrace simulate(const PulseSequence& seq, const SimulationContext& ctx,
                         std::span<const double> records);

/// Chevron: P(qubit excited) after holding τ₁ at δΦ, x = δΦ, y = τ₁.
SweepResult2D swap_spectroscopy(std::span<const double> dphi_grid, std::span<const double> tau1_grid,
                                const SimulationContext& ctx);

/// Echo trace versus τ₂ (visibility over one f_osc period centred on τ₂ after
/// the refocusing pulse). n_refocus = 0 is free evolution for τ₁ + τ₂.
CoherenceTrace echo_experiment(double dphi, double tau1, std::span<const double> tau2_grid,
                               int n_refocus, const SimulationContext& ctx);

/// Visibility versus (τ_refocus, τ₂) for refocusing pulses at rotation
/// frequency `detune`. x = τ_refocus, y = τ₂.
SweepResult2D calibrate_refocus(double dphi, double tau1, std::span<const double> tau_refocus_grid,
                                std::span<const double> tau2_grid, double detune,
                                const SimulationContext& ctx);

/// Free intervals of an N-pulse Carr–Purcell schedule of total time t with
/// pulses of length tau_refocus centred at t(2k−1)/(2N). Throws ScheduleError
/// when a pulse does not fit.
std::vector<double> cp_free_intervals(int n_pulses, double total_time, double tau_refocus);

/// Up to `points` total times in [t_min, t_max] at which every free interval
/// of an N-pulse CP schedule holds a whole number of oscillation periods
/// (edges m·P, inner intervals 2m·P): t = N(2mP + τ_r), or multiples of P for
/// N = 0. On this lattice the noiseless visibility is independent of t, so a
/// decay fit sees only decoherence. Throws ScheduleError if fewer than two fit.
std::vector<double> cp_commensurate_times(int n_pulses, double dphi, double t_min, double t_max, int points,
                                          const DeviceParams& params, const SequenceSettings& settings);

/// Visibility at total time t for each t in the grid, N equally spaced refocusing pulses.
CoherenceTrace cp_sequence(double dphi, int n_pulses, std::span<const double> total_time_grid,
                           const SimulationContext& ctx);

/// Amplitude of the first harmonic of equally spaced samples over one period.
double demodulated_visibility(std::span<const double> samples);

}  // namespace tlsdd
