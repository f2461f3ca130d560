#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "tlsdd/model.hpp"

namespace tlsdd {

/// Band-limited 1/f flux noise, S_Φ(ω) = A_Φ/|ω| for ω_low ≤ |ω| ≤ ω_high.
///
/// Normalization: the variance of the flux is the integral of S_Φ over both
/// signs of ω, so a band [ω1, ω2] contributes 2 A_Φ ln(ω2/ω1). This is the
/// convention under which 1/T_φ,N = 2π sqrt(c_N A_Φ) |∂f_osc/∂Φ| holds.
struct OneOverFSpectrum {
  double a_phi = 1.96;                       ///< (µPhi0)²
  double omega_low = 6.283185307179586;      ///< rad/s (1 Hz)
  double omega_high = 6.283185307179586e10;  ///< rad/s (10 GHz)

  void validate() const;
};

/// Frequency-flat transverse noise near f_osc, entering the relaxation budget.
struct WhiteTransverseChannel {
  double s_perp = 2.8e6;  ///< rad/s

  void validate() const;
};

/// Flux offsets sampled on a uniform grid starting at t = 0.
struct NoiseTrajectory {
  double dt = 0.0;                ///< ns
  std::vector<double> samples;    ///< µPhi0

  double duration() const { return dt * static_cast<double>(samples.size()); }
  /// Zero-order hold: samples[k] covers [k dt, (k+1) dt).
  double at(double t) const;
};

/// Power spectral density, (µPhi0)² s/rad. Throws DomainError at ω = 0.
double psd(const OneOverFSpectrum& spec, double omega);

/// Standard deviation (µPhi0) of the quasi-static flux offset for noise below `omega_cut`:
/// σ² = 2 A_Φ ln(ω_cut/ω_low).
double quasistatic_sigma(const OneOverFSpectrum& spec, double omega_cut);

/// Default quasi-static cutoff 2π/(2 t) for a sequence of duration t (ns), rad/s.
double quasistatic_cutoff(double total_time_ns);

/// One Gaussian draw with σ = quasistatic_sigma; deterministic in `seed`.
double sample_quasistatic(const OneOverFSpectrum& spec, double omega_cut, std::uint64_t seed);

/// Spectral synthesis of a real, mean-zero 1/f trajectory on [0, duration)
/// covering the discrete band 2π/duration ... π/dt (clipped to the spectrum band).
NoiseTrajectory synthesize_trajectory(const OneOverFSpectrum& spec, double duration, double dt,
                                      std::uint64_t seed);

/// Periodogram of a uniformly sampled series as a two-sided density: summing
/// power * d_omega over the positive and negative bins gives the sample
/// variance, so its mean matches psd(). Returns angular frequencies (rad/s)
/// and power ((µPhi0)² s/rad) for the positive bins 1 .. n/2-1.
struct Periodogram {
  std::vector<double> omega;
  std::vector<double> power;
};
Periodogram periodogram(std::span<const double> samples, double dt_ns);

/// Filter coefficient c_N for N equally spaced (Carr–Purcell) π pulses over
/// total time t (ns). N = 0: ln(1/(ω_low t)); N = 1: ln 2; N ≥ 2: numerical
/// filter integral. Throws DomainError for t ≤ 0.
double filter_coefficient(int n_pulses, double total_time, const OneOverFSpectrum& spec);

/// Numerical filter integral ∫_{ω_low t}^∞ |Y_N(x)|²/x dx (x = ω t) for any N ≥ 0,
/// where Y_N is the Fourier transform of the ±1 switching function on [0, 1].
double filter_integral(int n_pulses, double total_time, const OneOverFSpectrum& spec);

/// |Y_N(x)|² for the switching function of N CP pulses on the unit interval.
double switching_filter(int n_pulses, double x);

/// Dephasing time T_φ,N (ns) from 1/T_φ = 2π sqrt(c_N A_Φ)|∂f_osc/∂Φ|. For N = 0
/// the time inside c_0 is solved self-consistently. Returns +infinity when the
/// sensitivity or the noise amplitude vanishes.
double predicted_tphi(int n_pulses, double dphi, double total_time, const OneOverFSpectrum& spec,
                      const DeviceParams& params);

/// Independent per-index seed: splitmix64 of the master seed mixed with i.
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index);

}  // namespace tlsdd
