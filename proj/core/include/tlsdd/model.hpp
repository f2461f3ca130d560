#pragma once

#include <complex>

#include <Eigen/Core>

namespace tlsdd {

using Complex = std::complex<double>;
using Matrix2c = Eigen::Matrix<Complex, 2, 2>;
using Matrix4c = Eigen::Matrix<Complex, 4, 4>;
using Vector4c = Eigen::Matrix<Complex, 4, 1>;

// Basis ordering is fixed: {|0g>, |1g>, |0e>, |1e>}. Kets are written qubit-then-TLS,
// so the flat index of |q t> is q + 2 t.
enum BasisState : int { k0g = 0, k1g = 1, k0e = 2, k1e = 3 };

constexpr int basis_index(int qubit, int tls) { return qubit + 2 * tls; }

/// Qubit-TLS device. Units: GHz for frequencies, mPhi0 for absolute flux,
/// seconds for T1 (as stored in configs).
struct DeviceParams {
  double delta = 5.4;           ///< tunnel coupling, GHz
  double ip = 180e-9;           ///< persistent current, A
  double f_tls = 0.0;           ///< TLS frequency, GHz (defaults() pins it to resonance at phi_star)
  double s = 0.076;             ///< coupling splitting, GHz
  double phi_star = -4.15;      ///< resonance flux, mPhi0
  double t1_qb = 10e-6;         ///< qubit relaxation time, s
  double t1_tls = 1e-6;         ///< TLS relaxation time, s

  static DeviceParams defaults();

  /// Throws ConfigError naming the first offending field.
  void validate() const;

  double t1_qb_ns() const { return t1_qb * 1e9; }
  double t1_tls_ns() const { return t1_tls * 1e9; }
};

/// dε/dΦ = 2 I_P Φ0 / h, in GHz per mPhi0.
double flux_to_frequency_slope(const DeviceParams& params);

/// ε = 2 I_P Φ_qb / h in GHz, for Φ_qb in mPhi0.
double epsilon(double phi_qb, const DeviceParams& params);

/// f_qb = sqrt(Δ² + ε²), GHz.
double qubit_frequency(double phi_qb, const DeviceParams& params);

/// ∂f_qb/∂Φ in GHz per mPhi0.
double dqubit_frequency_dphi(double phi_qb, const DeviceParams& params);

/// δf = f_TLS − f_qb(Φ* + δΦ), GHz. `dphi` is in µPhi0.
double detuning(double dphi, const DeviceParams& params);

/// f_osc = sqrt(δf² + S²), GHz.
double f_osc(double df, double s);

/// ∂f_osc/∂Φ at Φ* + δΦ (δΦ in µPhi0), GHz per mPhi0. Zero at resonance.
double dfosc_dphi(double dphi, const DeviceParams& params);

/// Lab-frame H/h in GHz:
///   −(f_qb/2) σz⊗1 − (f_TLS/2) 1⊗σz − (S/2) σx⊗σx.
Matrix4c full_hamiltonian(double phi_qb, const DeviceParams& params);

/// H_sub/h = −½(δf σz + S σx) on {|1g>, |0e>}, GHz.
Matrix2c subspace_hamiltonian(double df, double s);

/// Four-level Hamiltonian in the frame rotating at f_TLS per excitation, after
/// dropping the counter-rotating |0g>↔|1e> coupling. Block-diagonal; the
/// {|1g>,|0e>} block equals subspace_hamiltonian(δf, S) up to a shift of −δf/2.
Matrix4c rotating_hamiltonian(double dphi, const DeviceParams& params);

/// Flux offset (µPhi0) at which detuning(dphi) equals `df`, searched on the
/// branch that contains `side_hint` (sign of δΦ).
double dphi_for_detuning(double df, const DeviceParams& params, double side_hint);

/// Pauli matrices and the qubit⊗TLS product in the fixed basis ordering.
Matrix2c pauli_x();
Matrix2c pauli_y();
Matrix2c pauli_z();
Matrix4c qubit_tls_product(const Matrix2c& qubit_op, const Matrix2c& tls_op);

/// max |H − H†|.
double hermiticity_defect(const Matrix4c& m);

}  // namespace tlsdd
