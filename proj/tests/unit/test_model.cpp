#include <algorithm>
#include <cmath>
#include <random>

#include <Eigen/Eigenvalues>
#include <gtest/gtest.h>

#include "tlsdd/constants.hpp"
#include "tlsdd/errors.hpp"
#include "tlsdd/model.hpp"

using namespace tlsdd;

namespace {

const DeviceParams kDev = DeviceParams::defaults();

Eigen::Vector4d eigenvalues(const Matrix4c& h) {
  Eigen::SelfAdjointEigenSolver<Matrix4c> es(h);
  return es.eigenvalues();
}

double fd_fosc(double dphi, double step) {
  auto fo = [](double x) { return f_osc(detuning(x, kDev), kDev.s); };
  return (fo(dphi + step) - fo(dphi - step)) / (2.0 * step) * 1000.0;  // per mPhi0
}

}  // namespace

TEST(Constants, FluxQuantumIsHOverTwoE) {
  constexpr auto c = PhysicalConstants::si();
  EXPECT_NEAR(c.phi0, 2.067833848e-15, 1e-24);
  EXPECT_NEAR(c.phi0 / (c.h / (2.0 * constants::elementary_charge)), 1.0, 1e-12);
}

TEST(DeviceParams, DefaultsPinTlsToResonance) {
  EXPECT_DOUBLE_EQ(kDev.f_tls, qubit_frequency(kDev.phi_star, kDev));
  EXPECT_NO_THROW(kDev.validate());
}

TEST(DeviceParams, ValidateNamesField) {
  auto p = kDev;
  p.t1_qb = -1.0;
  try {
    p.validate();
    FAIL() << "expected ConfigError";
  } catch (const ConfigError& e) {
    EXPECT_EQ(e.path(), "device.t1_qb");
  }
  p = kDev;
  p.s = 0.0;
  EXPECT_THROW(p.validate(), ConfigError);
}

TEST(Epsilon, Examples) {
  EXPECT_EQ(epsilon(0.0, kDev), 0.0);
  EXPECT_NEAR(epsilon(-4.15, kDev), -4.66, 0.01);
  EXPECT_NEAR(epsilon(-2.95, kDev), -3.31, 0.01);
  EXPECT_DOUBLE_EQ(epsilon(1.3, kDev), -epsilon(-1.3, kDev));
}

TEST(QubitFrequency, Examples) {
  EXPECT_DOUBLE_EQ(qubit_frequency(0.0, kDev), 5.4);
  EXPECT_NEAR(qubit_frequency(-4.15, kDev) / 7.08, 1.0, 0.01);
  EXPECT_NEAR(qubit_frequency(-2.95, kDev) / 6.3, 1.0, 0.01);
  EXPECT_DOUBLE_EQ(qubit_frequency(2.2, kDev), qubit_frequency(-2.2, kDev));
  for (double phi : {-3.0, -0.5, 0.7, 4.0}) EXPECT_GT(qubit_frequency(phi, kDev), 5.4);
}

TEST(Detuning, Examples) {
  EXPECT_EQ(detuning(0.0, kDev), 0.0);
  // Φ* < 0: δΦ > 0 moves towards zero flux, lowers f_qb and gives δf > 0.
  EXPECT_NEAR(detuning(-60.0, kDev), -0.0444, 0.0444 * 0.03);
  EXPECT_NEAR(detuning(1200.0, kDev), 0.798, 0.798 * 0.03);
  const double slope = (detuning(0.05, kDev) - detuning(-0.05, kDev)) / 0.1;
  EXPECT_NEAR(slope * 1000.0, 0.739, 0.01);
}

TEST(FOsc, Examples) {
  EXPECT_DOUBLE_EQ(f_osc(0.0, 0.076), 0.076);
  EXPECT_DOUBLE_EQ(f_osc(-0.3, 0.0), 0.3);
  EXPECT_NEAR(f_osc(0.0444, 0.076), 0.0880, 1e-4);
}

TEST(Sensitivity, ZeroAtResonance) { EXPECT_EQ(dfosc_dphi(0.0, kDev), 0.0); }

TEST(Sensitivity, MagnitudeAtMinus60) { EXPECT_NEAR(std::abs(dfosc_dphi(-60.0, kDev)), 0.373, 0.004); }

TEST(Sensitivity, AnalyticMatchesFiniteDifference) {
  for (double dphi = -200.0; dphi <= 200.0; dphi += 2.5) {
    if (std::abs(dphi) < 1.0) continue;
    const double analytic = dfosc_dphi(dphi, kDev);
    const double numeric = fd_fosc(dphi, 0.1);
    EXPECT_NEAR(analytic / numeric, 1.0, 1e-6) << "dphi=" << dphi;
  }
}

TEST(FullHamiltonian, Hermitian) {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> phi(-8.0, 8.0);
  for (int i = 0; i < 200; ++i) {
    EXPECT_LT(hermiticity_defect(full_hamiltonian(phi(rng), kDev)), 1e-12);
  }
}

TEST(FullHamiltonian, UncoupledSpectrumIsTensorSum) {
  auto p = kDev;
  p.s = 0.0;
  const double fq = qubit_frequency(-3.1, p);
  const double ft = p.f_tls;
  auto ev = eigenvalues(full_hamiltonian(-3.1, p));
  std::vector<double> expected{(-fq - ft) / 2, (fq - ft) / 2, (-fq + ft) / 2, (fq + ft) / 2};
  std::sort(expected.begin(), expected.end());
  for (int i = 0; i < 4; ++i) EXPECT_NEAR(ev[i], expected[static_cast<std::size_t>(i)], 1e-12);
}

TEST(FullHamiltonian, SplittingAtResonance) {
  auto ev = eigenvalues(full_hamiltonian(kDev.phi_star, kDev));
  EXPECT_NEAR((ev[2] - ev[1]) / 0.076, 1.0, 1e-3);
}

TEST(FullHamiltonian, ProjectionReproducesSubspaceModel) {
  // Middle doublet of the lab Hamiltonian vs the rotating-frame two-level gap.
  for (double dphi = -800.0; dphi <= 800.0; dphi += 50.0) {
    const double df = detuning(dphi, kDev);
    if (std::abs(df) > 0.6) continue;
    auto ev = eigenvalues(full_hamiltonian(kDev.phi_star + dphi * 1e-3, kDev));
    EXPECT_NEAR((ev[2] - ev[1]) / f_osc(df, kDev.s), 1.0, 0.01) << "dphi=" << dphi;
  }
}

TEST(SubspaceHamiltonian, ResonantEigenvectorsAreSymmetricAndAntisymmetric) {
  Eigen::SelfAdjointEigenSolver<Matrix2c> es(subspace_hamiltonian(0.0, 0.076));
  for (int k = 0; k < 2; ++k) {
    auto v = es.eigenvectors().col(k);
    EXPECT_NEAR(std::abs(v[0]), 1.0 / std::sqrt(2.0), 1e-12);
    EXPECT_NEAR(std::abs(v[1]), 1.0 / std::sqrt(2.0), 1e-12);
  }
  // Lower eigenvalue belongs to the symmetric combination for −(S/2)σx.
  auto v0 = es.eigenvectors().col(0);
  EXPECT_NEAR(std::abs(v0[0] - v0[1]), 0.0, 1e-12);
}

TEST(SubspaceHamiltonian, GapEqualsFOscRandomized) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> df(-1.0, 1.0), s(0.0, 0.3);
  for (int i = 0; i < 100; ++i) {
    const double a = df(rng), b = s(rng);
    Eigen::SelfAdjointEigenSolver<Matrix2c> es(subspace_hamiltonian(a, b));
    EXPECT_NEAR(es.eigenvalues()[1] - es.eigenvalues()[0], f_osc(a, b), 1e-12);
  }
}

TEST(SubspaceHamiltonian, LargeDetuningGap) {
  Eigen::SelfAdjointEigenSolver<Matrix2c> es(subspace_hamiltonian(0.55, 0.076));
  EXPECT_NEAR(es.eigenvalues()[1] - es.eigenvalues()[0], 0.5552, 1e-4);
}

TEST(RotatingHamiltonian, BlockMatchesSubspaceUpToShift) {
  for (double dphi : {-300.0, -72.0, 0.0, 140.0}) {
    const double df = detuning(dphi, kDev);
    Matrix4c h = rotating_hamiltonian(dphi, kDev);
    Matrix2c sub = subspace_hamiltonian(df, kDev.s);
    EXPECT_LT(hermiticity_defect(h), 1e-12);
    const int idx[2] = {k1g, k0e};
    for (int a = 0; a < 2; ++a) {
      for (int b = 0; b < 2; ++b) {
        Complex expected = sub(a, b) + (a == b ? Complex(-df / 2.0) : Complex(0.0));
        EXPECT_NEAR(std::abs(h(idx[a], idx[b]) - expected), 0.0, 1e-12);
      }
    }
  }
}

TEST(DphiForDetuning, InvertsDetuning) {
  for (double df : {-0.55, -0.1, 0.05, 0.3}) {
    const double dphi = dphi_for_detuning(df, kDev, df > 0 ? 1.0 : -1.0);
    EXPECT_NEAR(detuning(dphi, kDev), df, 1e-9);
    EXPECT_GT(dphi * df, 0.0);
  }
}
