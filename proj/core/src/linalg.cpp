#include "tlsdd/linalg.hpp"

#include <cmath>

#include <Eigen/Eigenvalues>
#include <unsupported/Eigen/MatrixFunctions>

#include "tlsdd/constants.hpp"

namespace tlsdd {

namespace {

// exp(−i θ (a I + b·σ)) restricted to indices (p, q) of a 4×4 matrix, where
// the 2×2 block is [[h_pp, h_pq], [h_qp, h_qq]].
void block_exponential(const Matrix4c& h, int p, int q, double theta, Matrix4c& u) {
  const double hp = h(p, p).real();
  const double hq = h(q, q).real();
  const Complex c = h(p, q);
  const double mean = 0.5 * (hp + hq);
  const double half = 0.5 * (hp - hq);
  const double r = std::sqrt(half * half + std::norm(c));
  const Complex phase = std::exp(Complex(0.0, -theta * mean));
  const double cr = std::cos(theta * r);
  // sin(θr)/r with a safe limit at r → 0
  const double sr = r > 1e-300 ? std::sin(theta * r) / r : theta;
  const Complex mi(0.0, -1.0);
  u(p, p) = phase * (cr + mi * sr * half);
  u(q, q) = phase * (cr - mi * sr * half);
  u(p, q) = phase * mi * sr * c;
  u(q, p) = phase * mi * sr * std::conj(c);
}

}  // namespace

bool is_pair_structured(const Matrix4c& h) {
  const Complex zero(0.0, 0.0);
  return h(0, 1) == zero && h(0, 2) == zero && h(1, 3) == zero && h(2, 3) == zero &&
         h(1, 0) == zero && h(2, 0) == zero && h(3, 1) == zero && h(3, 2) == zero;
}

Matrix4c expm_hermitian(const Matrix4c& h, double t) {
  const double theta = constants::two_pi * t;
  if (is_pair_structured(h)) {
    Matrix4c u = Matrix4c::Zero();
    block_exponential(h, k0g, k1e, theta, u);
    block_exponential(h, k1g, k0e, theta, u);
    return u;
  }
  Eigen::SelfAdjointEigenSolver<Matrix4c> es(h);
  const auto& v = es.eigenvectors();
  Vector4c phases;
  for (int i = 0; i < 4; ++i) phases(i) = std::exp(Complex(0.0, -theta * es.eigenvalues()(i)));
  return v * phases.asDiagonal() * v.adjoint();
}

Matrix16c expm(const Matrix16c& m) { return m.exp(); }

double pairwise_sum(std::span<const double> values) {
  if (values.size() <= 8) {
    double s = 0.0;
    for (double v : values) s += v;
    return s;
  }
  const std::size_t half = values.size() / 2;
  return pairwise_sum(values.subspan(0, half)) + pairwise_sum(values.subspan(half));
}

}  // namespace tlsdd
