#pragma once

#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "tlsdd/model.hpp"
#include "tlsdd/noise.hpp"

namespace tlsdd {

struct OscFit {
  double f_osc = 0.0;      ///< GHz
  double amplitude = 0.0;
  double phase = 0.0;      ///< rad
  double offset = 0.0;
  double decay_rate = 0.0; ///< 1/ns, exponential damping of the fitted cosine
  double residual_rms = 0.0;
  bool ok = false;
  std::string message;
};

/// Damped cosine y = offset + amplitude·exp(−γ t)·cos(2π f t + phase), seeded
/// from the peak of the zero-padded discrete spectrum. Requires ≥ 8 samples
/// spanning ≥ 1.5 periods of the detected frequency; otherwise, or when no
/// spectral peak stands above the noise floor, returns ok = false.
OscFit fit_oscillation(std::span<const double> t, std::span<const double> y);

struct Envelope {
  std::vector<double> t;
  std::vector<double> h;
};

/// Sliding quadrature demodulation at fit.f_osc over one period (with a
/// linear baseline). Throws DomainError if the fit failed or the trace is
/// sampled too coarsely for the window.
Envelope extract_envelope(std::span<const double> t, std::span<const double> y, const OscFit& fit);

struct DecayFit {
  double amplitude = 0.0;  ///< h(0)
  double t1_tilde = 0.0;   ///< ns (+inf when fixed to infinity)
  double t_phi = 0.0;      ///< ns
  double t_e = 0.0;        ///< ns, h(t_e) = h(0)/e
  bool fixed_t1 = false;
  bool converged = false;
  bool t_phi_unresolved = false;  ///< T_φ beyond the trace length
  bool t1_unresolved = false;     ///< T̃₁ beyond the trace length
  bool identifiability_warning = false;
  double residual_rms = 0.0;
  int iterations = 0;
  std::string message;
};

/// h(t) = h0·exp(−t/T̃₁)·exp(−(t/T_φ)²) by bounded Levenberg–Marquardt
/// (T̃₁ ∈ [10 ns, 100 µs], T_φ ∈ [1 ns, 100 µs]) from a log-linear start.
/// With fix_t1 only T_φ (and h0) are free; fix_t1 = +inf removes the
/// exponential factor. Requires ≥ 6 points and a positive envelope
/// (throws DomainError otherwise).
DecayFit fit_decay(std::span<const double> t, std::span<const double> h,
                   std::optional<double> fix_t1 = std::nullopt);

/// Exact root of t/T̃₁ + (t/T_φ)² = 1. Infinite times drop their factor.
double envelope_te(double t1_tilde, double t_phi);

/// 1/T̃₁ = ½(1/T₁_qb + 1/T₁_TLS) + ½·S_⊥/2, in ns. Infinite when all rates vanish.
double t1_tilde_from_rates(const DeviceParams& params, const WhiteTransverseChannel& channel);

/// Inverse of t1_tilde_from_rates for S_⊥ (rad/s). Throws DomainError when
/// the measured decay is slower than the relaxation floor.
double infer_s_perp(double t1_tilde_measured, const DeviceParams& params);

struct DecayPoint {
  double dphi = 0.0;  ///< µPhi0
  int n_pulses = 0;
  double t_e = 0.0;   ///< measured, ns
};

struct ModelRow {
  double dphi = 0.0;
  int n_pulses = 0;
  double t_e_measured = 0.0;
  double t_e_predicted = 0.0;
};

struct ModelComparison {
  double a_phi_best = 0.0;        ///< (µPhi0)²
  double a_phi_reference = 1.96;  ///< (µPhi0)²
  double relative_deviation = 0.0;
  double rms_log_residual = 0.0;
  std::vector<ModelRow> rows;     ///< predictions at a_phi_best
};

/// One-parameter least squares (in log T_e) of A_Φ against predicted_te with
/// a fixed T̃₁ (+inf: no relaxation). Needs ≥ 3 flux points per pulse number
/// (PreconditionError otherwise).
ModelComparison compare_to_model(std::span<const DecayPoint> points, const OneOverFSpectrum& spec,
                                 const DeviceParams& params,
                                 double t1_tilde = std::numeric_limits<double>::infinity());

/// predicted_tphi evaluated at its own time scale: self-consistent for N = 0,
/// at the N = 1 dephasing time for N ≥ 2 (where c_N varies only logarithmically).
double predicted_tphi_at_scale(int n_pulses, double dphi, const OneOverFSpectrum& spec,
                               const DeviceParams& params);

/// envelope_te of the predicted T_φ,N and T̃₁ for one flux point and pulse number.
double predicted_te(int n_pulses, double dphi, const OneOverFSpectrum& spec, const DeviceParams& params,
                    double t1_tilde);

}  // namespace tlsdd
