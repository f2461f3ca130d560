#include "tlsdd/model.hpp"

#include <cmath>

#include <boost/math/tools/roots.hpp>

#include "tlsdd/constants.hpp"
#include "tlsdd/errors.hpp"

namespace tlsdd {

DeviceParams DeviceParams::defaults() {
  DeviceParams p;
  p.f_tls = qubit_frequency(p.phi_star, p);
  return p;
}

void DeviceParams::validate() const {
  auto finite = [](double v) { return std::isfinite(v); };
  if (!finite(delta) || delta <= 0.0) throw ConfigError("device.delta", "must be > 0");
  if (!finite(ip) || ip <= 0.0) throw ConfigError("device.ip", "must be > 0");
  if (!finite(f_tls) || f_tls <= 0.0) throw ConfigError("device.f_tls", "must be > 0");
  if (!finite(s) || s <= 0.0) throw ConfigError("device.s", "must be > 0");
  if (!finite(phi_star)) throw ConfigError("device.phi_star", "must be finite");
  if (!finite(t1_qb) || t1_qb <= 0.0) throw ConfigError("device.t1_qb", "must be > 0");
  if (!finite(t1_tls) || t1_tls <= 0.0) throw ConfigError("device.t1_tls", "must be > 0");
}

double flux_to_frequency_slope(const DeviceParams& params) {
  // Hz per Wb -> GHz per mPhi0.
  return 2.0 * params.ip * constants::flux_quantum / constants::planck * 1e-3 * 1e-9;
}

double epsilon(double phi_qb, const DeviceParams& params) {
  return flux_to_frequency_slope(params) * phi_qb;
}

double qubit_frequency(double phi_qb, const DeviceParams& params) {
  return std::hypot(params.delta, epsilon(phi_qb, params));
}

double dqubit_frequency_dphi(double phi_qb, const DeviceParams& params) {
  const double eps = epsilon(phi_qb, params);
  return eps / std::hypot(params.delta, eps) * flux_to_frequency_slope(params);
}

double detuning(double dphi, const DeviceParams& params) {
  return params.f_tls - qubit_frequency(params.phi_star + dphi * 1e-3, params);
}

double f_osc(double df, double s) { return std::hypot(df, s); }

double dfosc_dphi(double dphi, const DeviceParams& params) {
  const double df = detuning(dphi, params);
  const double fo = f_osc(df, params.s);
  if (fo == 0.0) return 0.0;
  const double ddf = -dqubit_frequency_dphi(params.phi_star + dphi * 1e-3, params);
  return df / fo * ddf;
}

Matrix2c pauli_x() {
  Matrix2c m;
  m << 0, 1, 1, 0;
  return m;
}

Matrix2c pauli_y() {
  Matrix2c m;
  m << 0, Complex(0, -1), Complex(0, 1), 0;
  return m;
}

Matrix2c pauli_z() {
  Matrix2c m;
  m << 1, 0, 0, -1;
  return m;
}

Matrix4c qubit_tls_product(const Matrix2c& qubit_op, const Matrix2c& tls_op) {
  Matrix4c out;
  for (int q1 = 0; q1 < 2; ++q1)
    for (int t1 = 0; t1 < 2; ++t1)
      for (int q2 = 0; q2 < 2; ++q2)
        for (int t2 = 0; t2 < 2; ++t2)
          out(basis_index(q1, t1), basis_index(q2, t2)) = qubit_op(q1, q2) * tls_op(t1, t2);
  return out;
}

Matrix4c full_hamiltonian(double phi_qb, const DeviceParams& params) {
  const double fq = qubit_frequency(phi_qb, params);
  const Matrix2c id = Matrix2c::Identity();
  return -0.5 * fq * qubit_tls_product(pauli_z(), id) -
         0.5 * params.f_tls * qubit_tls_product(id, pauli_z()) -
         0.5 * params.s * qubit_tls_product(pauli_x(), pauli_x());
}

Matrix2c subspace_hamiltonian(double df, double s) {
  return -0.5 * (df * pauli_z() + s * pauli_x());
}

Matrix4c rotating_hamiltonian(double dphi, const DeviceParams& params) {
  const double df = detuning(dphi, params);
  Matrix4c h = Matrix4c::Zero();
  h(k1g, k1g) = -df;
  h(k1e, k1e) = -df;
  h(k1g, k0e) = -0.5 * params.s;
  h(k0e, k1g) = -0.5 * params.s;
  return h;
}

double dphi_for_detuning(double df, const DeviceParams& params, double side_hint) {
  if (df == 0.0) return 0.0;
  // Along the branch on the side of `side_hint`, δf is monotone in δΦ.
  const double sign = side_hint >= 0.0 ? 1.0 : -1.0;
  auto g = [&](double x) { return detuning(sign * x, params) - df; };
  double hi = 1.0;
  const double g0 = g(0.0);
  while (g(hi) * g0 > 0.0) {
    hi *= 2.0;
    if (hi > 1e6) throw DomainError("dphi_for_detuning: detuning not reachable on this branch");
  }
  boost::math::tools::eps_tolerance<double> tol(50);
  std::uintmax_t it = 200;
  auto [a, b] = boost::math::tools::toms748_solve(g, 0.0, hi, g0, g(hi), tol, it);
  return sign * 0.5 * (a + b);
}

double hermiticity_defect(const Matrix4c& m) {
  return (m - m.adjoint()).cwiseAbs().maxCoeff();
}

}  // namespace tlsdd
