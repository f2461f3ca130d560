#include <cmath>
#include <random>

#include <Eigen/Eigenvalues>
#include <gtest/gtest.h>

#include "tlsdd/constants.hpp"
#include "tlsdd/dynamics.hpp"
#include "tlsdd/errors.hpp"
#include "tlsdd/linalg.hpp"

using namespace tlsdd;

namespace {

const DeviceParams kDev = DeviceParams::defaults();

PulseSequence hold(double dphi, double duration) {
  return PulseSequence({PulseSegment::hold(dphi, duration), PulseSegment::readout()});
}

// Random flux program around resonance with Gaussian edges, linear ramps and π pulses.
PulseSequence random_sequence(std::mt19937_64& rng, double total) {
  std::uniform_real_distribution<double> level(-300.0, 300.0), len(5.0, 60.0), coin(0.0, 1.0);
  std::vector<PulseSegment> segs{PulseSegment::hold(level(rng), len(rng))};
  double t = segs[0].duration;
  while (t < total) {
    const double c = coin(rng);
    PulseSegment s = c < 0.15   ? PulseSegment::pi_pulse()
                     : c < 0.3  ? PulseSegment::ramp(level(rng), len(rng))
                                : PulseSegment::hold(level(rng), len(rng), Edge::gaussian(1.5));
    t += s.duration;
    segs.push_back(s);
  }
  segs.push_back(PulseSegment::readout());
  return PulseSequence(segs);
}

DensityMatrix4 random_pure(std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  Vector4c psi;
  for (int i = 0; i < 4; ++i) psi[i] = Complex(g(rng), g(rng));
  return DensityMatrix4::from_ket(psi.normalized());
}

double max_abs_diff(const DensityMatrix4& a, const DensityMatrix4& b) {
  return (a.matrix() - b.matrix()).cwiseAbs().maxCoeff();
}

double min_eigenvalue(const DensityMatrix4& r) {
  Eigen::SelfAdjointEigenSolver<Matrix4c> es(r.matrix());
  return es.eigenvalues().minCoeff();
}

}  // namespace

TEST(DensityMatrix, ValidateRejectsBadStates) {
  EXPECT_NO_THROW(DensityMatrix4::basis(k1g).validate());
  Matrix4c m = Matrix4c::Zero();
  m(0, 0) = 0.5;
  EXPECT_THROW(DensityMatrix4(m).validate(), PreconditionError);
  m(0, 0) = 1.2;
  m(1, 1) = -0.2;
  EXPECT_THROW(DensityMatrix4(m).validate(), PreconditionError);
}

TEST(Expm, HermitianMatchesGeneralExponential) {
  std::mt19937_64 rng(3);
  std::normal_distribution<double> g;
  for (int rep = 0; rep < 20; ++rep) {
    Matrix4c h;
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j < 4; ++j) h(i, j) = Complex(g(rng), g(rng));
    h = (0.5 * (h + h.adjoint())).eval();
    Matrix4c u = expm_hermitian(h, 0.37);
    Eigen::SelfAdjointEigenSolver<Matrix4c> es(h);
    Eigen::Vector4cd phase;
    for (int i = 0; i < 4; ++i) phase[i] = std::exp(Complex(0.0, -constants::two_pi * es.eigenvalues()[i] * 0.37));
    Matrix4c ref = es.eigenvectors() * phase.asDiagonal() * es.eigenvectors().adjoint();
    EXPECT_LT((u - ref).cwiseAbs().maxCoeff(), 1e-12);
    EXPECT_LT((u * u.adjoint() - Matrix4c::Identity()).cwiseAbs().maxCoeff(), 1e-12);
  }
}

TEST(Propagate, ISwapOnResonance) {
  EvolutionOptions o;
  auto tr = propagate_piecewise(DensityMatrix4::basis(k1g), hold(0.0, 1.0 / (2.0 * kDev.s)), kDev, o);
  EXPECT_GE(tr.states.back().population(k0e), 0.999);
}

TEST(Propagate, ZeroDurationIsIdentity) {
  std::mt19937_64 rng(1);
  auto rho = random_pure(rng);
  EvolutionOptions o;
  auto tr = propagate_piecewise(rho, hold(-50.0, 0.0), kDev, o);
  EXPECT_LT(max_abs_diff(tr.states.back(), rho), 1e-15);
}

TEST(Propagate, ResonantRabiFollowsClosedForm) {
  EvolutionOptions o;
  auto rec = time_grid(0.0, 40.0, 0.37);
  auto tr = propagate_piecewise(DensityMatrix4::basis(k1g), hold(0.0, 40.0), kDev, o, rec);
  ASSERT_EQ(tr.states.size(), rec.size());
  for (std::size_t i = 0; i < rec.size(); ++i) {
    const double expected = std::pow(std::sin(constants::pi * kDev.s * rec[i]), 2);
    EXPECT_NEAR(tr.states[i].population(k0e), expected, 1e-6) << rec[i];
  }
}

TEST(Propagate, CoarseStepReportsBound) {
  EvolutionOptions o;
  o.frame = Frame::Lab;
  o.dt = 0.01;
  try {
    propagate_piecewise(DensityMatrix4::basis(k1g), hold(0.0, 5.0), kDev, o);
    FAIL() << "expected PreconditionError";
  } catch (const PreconditionError& e) {
    EXPECT_NE(std::string(e.what()).find("0.1/f_max"), std::string::npos) << e.what();
  }
}

TEST(Propagate, LabAndRotatingFramesAgree) {
  EvolutionOptions rot;
  EvolutionOptions lab;
  lab.frame = Frame::Lab;
  lab.dt = 0.005;
  for (double df : {-0.6, -0.2, 0.0, 0.1, 0.6}) {
    const double dphi = dphi_for_detuning(df, kDev, df >= 0 ? 1.0 : -1.0);
    auto rec = time_grid(0.0, 30.0, 0.5);
    auto a = propagate_piecewise(DensityMatrix4::basis(k1g), hold(dphi, 30.0), kDev, rot, rec);
    auto b = propagate_piecewise(DensityMatrix4::basis(k1g), hold(dphi, 30.0), kDev, lab, rec);
    for (std::size_t i = 0; i < rec.size(); ++i)
      EXPECT_NEAR(a.states[i].population(k0e), b.states[i].population(k0e), 0.01) << df << " " << rec[i];
  }
}

TEST(Propagate, UnitarityOverOneMicrosecond) {
  std::mt19937_64 rng(21);
  EvolutionOptions o;
  for (int rep = 0; rep < 3; ++rep) {
    auto seq = random_sequence(rng, 1000.0);
    auto rho = random_pure(rng);
    auto tr = propagate_piecewise(rho, seq, kDev, o);
    const auto& m = tr.states.back().matrix();
    EXPECT_LT(std::abs(m.trace() - 1.0), 1e-9);
    EXPECT_LT(std::abs((m * m).trace() - 1.0), 1e-9);
  }
}

TEST(Propagate, StepHalvingConverges) {
  std::mt19937_64 rng(5);
  EvolutionOptions o;
  EvolutionOptions half = o;
  half.dt = o.dt / 2.0;
  for (int rep = 0; rep < 3; ++rep) {
    auto seq = random_sequence(rng, 200.0);
    auto rec = time_grid(0.0, seq.t_total(), 7.3);
    auto a = propagate_piecewise(DensityMatrix4::basis(k1g), seq, kDev, o, rec);
    auto b = propagate_piecewise(DensityMatrix4::basis(k1g), seq, kDev, half, rec);
    for (std::size_t i = 0; i < rec.size(); ++i) {
      for (int s = 0; s < 4; ++s) {
        EXPECT_LT(std::abs(a.states[i].population(static_cast<BasisState>(s)) -
                           b.states[i].population(static_cast<BasisState>(s))),
                  1e-6);
      }
    }
  }
}

TEST(PiPulse, IdealSwapsQubit) {
  auto r = apply_pi_pulse(DensityMatrix4::basis(k0g), true);
  EXPECT_NEAR(r.population(k1g), 1.0, 1e-15);
  auto twice = apply_pi_pulse(apply_pi_pulse(DensityMatrix4::basis(k0e), true), true);
  EXPECT_NEAR(twice.population(k0e), 1.0, 1e-15);
  std::mt19937_64 rng(2);
  auto rho = random_pure(rng);
  auto back = apply_pi_pulse(apply_pi_pulse(rho, true), true);
  for (int s = 0; s < 4; ++s)
    EXPECT_NEAR(back.population(static_cast<BasisState>(s)), rho.population(static_cast<BasisState>(s)), 1e-14);
}

TEST(PiPulse, NonIdealMatchesIdealWithoutRelaxation) {
  std::mt19937_64 rng(4);
  for (int rep = 0; rep < 5; ++rep) {
    auto rho = random_pure(rng);
    auto a = apply_pi_pulse(rho, true);
    auto b = apply_pi_pulse(rho, false, 10.0);
    for (int s = 0; s < 4; ++s)
      EXPECT_NEAR(a.population(static_cast<BasisState>(s)), b.population(static_cast<BasisState>(s)), 1e-4);
  }
}

TEST(PiPulse, NonIdealWithRealisticRelaxationStaysClose) {
  auto ch = RelaxationChannels::from(kDev, {});
  auto b = apply_pi_pulse(DensityMatrix4::basis(k0g), false, 10.0, ch);
  EXPECT_NEAR(b.population(k1g), 1.0, 1e-2);
  EXPECT_NO_THROW(b.validate());
}

TEST(Lindblad, ZeroRatesMatchUnitary) {
  std::mt19937_64 rng(8);
  EvolutionOptions o;
  auto seq = random_sequence(rng, 150.0);
  auto rec = time_grid(0.0, seq.t_total(), 5.0);
  auto rho = random_pure(rng);
  auto a = propagate_piecewise(rho, seq, kDev, o, rec);
  auto b = evolve_lindblad(rho, seq, kDev, RelaxationChannels::none(), o, rec);
  for (std::size_t i = 0; i < rec.size(); ++i) EXPECT_LT(max_abs_diff(a.states[i], b.states[i]), 1e-9);
}

TEST(Lindblad, TracePreservedOverTwoMicroseconds) {
  EvolutionOptions o;
  auto rec = time_grid(0.0, 2000.0, 50.0);
  auto tr = evolve_lindblad(DensityMatrix4::basis(k1g), hold(0.0, 2000.0), kDev, RelaxationChannels::from(kDev, {}),
                            o, rec);
  for (const auto& s : tr.states) {
    EXPECT_LT(std::abs(s.trace() - 1.0), 1e-9);
    EXPECT_GT(min_eigenvalue(s), -1e-9);
  }
}

TEST(Lindblad, CptpOnRandomSequences) {
  std::mt19937_64 rng(13);
  EvolutionOptions o;
  RelaxationChannels strong{50.0, 20.0, 5e7};
  for (int rep = 0; rep < 4; ++rep) {
    auto seq = random_sequence(rng, 300.0);
    auto rec = time_grid(0.0, seq.t_total(), 11.0);
    auto tr = evolve_lindblad(random_pure(rng), seq, kDev, rep % 2 ? strong : RelaxationChannels::from(kDev, {}), o,
                              rec);
    for (const auto& s : tr.states) {
      EXPECT_LT(std::abs(s.trace() - 1.0), 1e-9);
      EXPECT_LT(hermiticity_defect(s.matrix()), 1e-10);
      EXPECT_GT(min_eigenvalue(s), -1e-9);
    }
  }
}

TEST(Lindblad, NegativeRateThrows) {
  EvolutionOptions o;
  RelaxationChannels bad{-1.0, 0.0, 0.0};
  EXPECT_THROW(evolve_lindblad(DensityMatrix4::basis(k1g), hold(0.0, 10.0), kDev, bad, o), DomainError);
  RelaxationChannels bad_perp{0.0, 0.0, -5.0};
  EXPECT_THROW(bad_perp.validate(), DomainError);
}

TEST(Lindblad, RelaxationDrivesToGround) {
  EvolutionOptions o;
  RelaxationChannels fast{20.0, 20.0, 0.0};
  auto tr = evolve_lindblad(DensityMatrix4::basis(k1e), hold(-300.0, 500.0), kDev, fast, o);
  EXPECT_NEAR(tr.states.back().population(k0g), 1.0, 1e-6);
}

TEST(Trajectories, NoiselessEqualsSingleRun) {
  OneOverFSpectrum quiet;
  quiet.a_phi = 0.0;
  EvolutionOptions o;
  o.mode = EvolutionMode::MonteCarlo;
  o.n_traj = 5;
  auto rec = time_grid(0.0, 40.0, 1.0);
  auto seq = hold(-60.0, 40.0);
  auto mc = run_trajectories(DensityMatrix4::basis(k1g), seq, kDev, quiet, RelaxationChannels::none(), o, rec);
  auto single = propagate_piecewise(DensityMatrix4::basis(k1g), seq, kDev, o, rec);
  for (std::size_t i = 0; i < rec.size(); ++i) {
    EXPECT_NEAR(mc.qubit_excited[i], single.states[i].qubit_excited(), 1e-12);
    EXPECT_NEAR(mc.qubit_excited_stderr[i], 0.0, 1e-12);
  }
}

TEST(Trajectories, DeterministicPerSeedAndThreadCount) {
  EvolutionOptions o;
  o.mode = EvolutionMode::MonteCarlo;
  o.n_traj = 24;
  o.seed = 77;
  auto rec = time_grid(0.0, 60.0, 3.0);
  auto seq = hold(-60.0, 60.0);
  OneOverFSpectrum spec;
  for (auto sampling : {NoiseSampling::Quasistatic, NoiseSampling::Synthesized}) {
    o.sampling = sampling;
    o.threads = 1;
    auto a = run_trajectories(DensityMatrix4::basis(k1g), seq, kDev, spec, RelaxationChannels::none(), o, rec);
    o.threads = 3;
    auto b = run_trajectories(DensityMatrix4::basis(k1g), seq, kDev, spec, RelaxationChannels::none(), o, rec);
    EXPECT_EQ(a.qubit_excited, b.qubit_excited);
    EXPECT_EQ(a.qubit_excited_stderr, b.qubit_excited_stderr);
    o.seed = 78;
    auto c = run_trajectories(DensityMatrix4::basis(k1g), seq, kDev, spec, RelaxationChannels::none(), o, rec);
    EXPECT_NE(a.qubit_excited, c.qubit_excited);
    o.seed = 77;
  }
}

TEST(Trajectories, StandardErrorScalesAsInverseRoot) {
  EvolutionOptions o;
  o.mode = EvolutionMode::MonteCarlo;
  o.sampling = NoiseSampling::Quasistatic;
  auto rec = time_grid(40.0, 80.0, 4.0);
  auto seq = hold(-60.0, 80.0);
  OneOverFSpectrum spec;
  double ratio_sum = 0.0;
  o.n_traj = 400;
  auto a = run_trajectories(DensityMatrix4::basis(k1g), seq, kDev, spec, RelaxationChannels::none(), o, rec);
  o.n_traj = 800;
  auto b = run_trajectories(DensityMatrix4::basis(k1g), seq, kDev, spec, RelaxationChannels::none(), o, rec);
  for (std::size_t i = 0; i < rec.size(); ++i) ratio_sum += a.qubit_excited_stderr[i] / b.qubit_excited_stderr[i];
  EXPECT_NEAR(ratio_sum / static_cast<double>(rec.size()), std::sqrt(2.0), 0.1);
}

TEST(Trajectories, RelaxationModeUsesChannels) {
  EvolutionOptions o;
  o.mode = EvolutionMode::MonteCarlo;
  o.n_traj = 2;
  o.relaxation = true;
  OneOverFSpectrum quiet;
  quiet.a_phi = 0.0;
  RelaxationChannels fast{30.0, 30.0, 0.0};
  auto rec = std::vector<double>{300.0};
  auto mc = run_trajectories(DensityMatrix4::basis(k1g), hold(0.0, 300.0), kDev, quiet, fast, o, rec);
  EXPECT_LT(mc.qubit_excited[0], 1e-3);
}
