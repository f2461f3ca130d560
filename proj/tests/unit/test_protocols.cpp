#include <algorithm>
#include <cmath>

#include <gtest/gtest.h>

#include "tlsdd/analysis.hpp"
#include "tlsdd/constants.hpp"
#include "tlsdd/errors.hpp"
#include "tlsdd/protocols.hpp"

using namespace tlsdd;

namespace {

SimulationContext unitary_context() {
  SimulationContext ctx;
  ctx.evolution.mode = EvolutionMode::Unitary;
  return ctx;
}

SimulationContext mc_context(int n_traj, double a_phi = 1.96) {
  SimulationContext ctx;
  ctx.evolution.mode = EvolutionMode::MonteCarlo;
  ctx.evolution.sampling = NoiseSampling::Quasistatic;
  ctx.evolution.n_traj = n_traj;
  ctx.evolution.seed = 12;
  ctx.noise.a_phi = a_phi;
  return ctx;
}

double chevron_frequency(double dphi, const SimulationContext& ctx, double t_max, double step) {
  auto taus = time_grid(0.0, t_max, step);
  std::vector<double> x{dphi};
  auto sweep = swap_spectroscopy(x, taus, ctx);
  auto fit = fit_oscillation(taus, sweep.values[0]);
  EXPECT_TRUE(fit.ok) << fit.message;
  return fit.f_osc;
}

}  // namespace

TEST(Readout, AffineMap) {
  ReadoutModel m;
  EXPECT_DOUBLE_EQ(apply_readout(0.0, m), 0.9);
  EXPECT_DOUBLE_EQ(apply_readout(1.0, m), 0.1);
  EXPECT_DOUBLE_EQ(apply_readout(0.5, m), 0.5);
  double prev = 2.0;
  for (double p = 0.0; p <= 1.0; p += 0.05) {
    const double v = apply_readout(p, m);
    EXPECT_LE(v, prev);
    prev = v;
  }
  EXPECT_THROW(apply_readout(-0.01, m), DomainError);
  EXPECT_THROW(apply_readout(1.01, m), DomainError);
}

TEST(Readout, ValidateOrdering) {
  ReadoutModel m{0.2, 0.8};
  EXPECT_THROW(m.validate(), ConfigError);
  ReadoutModel out{1.2, 0.1};
  EXPECT_THROW(out.validate(), ConfigError);
}

TEST(Sequence, BuildAndTiming) {
  SequenceSettings s;
  auto p = DeviceParams::defaults();
  std::vector<double> iv{40.0, 40.0};
  auto seq = build_sequence(-72.0, iv, s.refocus_duration(), p, s);
  EXPECT_NO_THROW(seq.validate());
  const double t0 = interaction_start(s);
  EXPECT_EQ(flux_profile(seq, t0 + 20.0), -72.0);
  // The pulse is shorter than the rise time, so the level is only approached.
  const double level = refocus_level(-72.0, 0.55, p);
  const double mid = flux_profile(seq, t0 + 40.0 + 0.5 * s.refocus_duration());
  EXPECT_LT(mid, 0.5 * (-72.0 + level));
  EXPECT_GT(mid, level);
  EXPECT_NEAR(f_osc(detuning(refocus_level(-72.0, 0.55, p), p), p.s), 0.55, 1e-9);
  EXPECT_LT(refocus_level(-72.0, 0.55, p), 0.0);
  EXPECT_EQ(flux_profile(seq, seq.t_total()), s.prep_dphi);
}

TEST(Chevron, ResonantColumnOscillatesAtSplitting) {
  auto ctx = unitary_context();
  EXPECT_NEAR(chevron_frequency(0.0, ctx, 60.0, 0.5) / 0.076, 1.0, 0.01);
}

TEST(Chevron, FrequencyFollowsCouplingLaw) {
  auto ctx = unitary_context();
  auto p = ctx.device;
  for (double dphi : {-500.0, -250.0, -100.0, 120.0, 300.0, 500.0}) {
    const double expected = f_osc(detuning(dphi, p), p.s);
    const double step = 0.1 / expected;
    EXPECT_NEAR(chevron_frequency(dphi, ctx, 12.0 / expected, step) / expected, 1.0, 0.02) << dphi;
  }
}

TEST(Chevron, ZeroHoldLeavesQubitExcited) {
  auto ctx = unitary_context();
  ctx.settings.rise_time = 0.0;
  std::vector<double> x{-300.0, 0.0, 200.0}, y{0.0};
  auto sweep = swap_spectroscopy(x, y, ctx);
  for (const auto& col : sweep.values) EXPECT_NEAR(col[0], 1.0, 1e-4);
}

TEST(Chevron, SymmetricUnderDetuningSignWithInstantEdges) {
  auto ctx = unitary_context();
  ctx.settings.rise_time = 0.0;
  auto p = ctx.device;
  auto taus = time_grid(0.0, 30.0, 1.0);
  for (double df : {0.03, 0.1, 0.25}) {
    std::vector<double> x{dphi_for_detuning(-df, p, -1.0), dphi_for_detuning(df, p, 1.0)};
    auto sweep = swap_spectroscopy(x, taus, ctx);
    for (std::size_t i = 0; i < taus.size(); ++i) EXPECT_NEAR(sweep.values[0][i], sweep.values[1][i], 1e-3);
  }
}

TEST(Chevron, GaussianEdgesBreakSymmetryNearResonance) {
  auto ctx = unitary_context();
  auto p = ctx.device;
  auto taus = time_grid(0.0, 30.0, 1.0);
  std::vector<double> x{dphi_for_detuning(-0.03, p, -1.0), dphi_for_detuning(0.03, p, 1.0)};
  auto sweep = swap_spectroscopy(x, taus, ctx);
  double diff = 0.0;
  for (std::size_t i = 0; i < taus.size(); ++i) diff = std::max(diff, std::abs(sweep.values[0][i] - sweep.values[1][i]));
  EXPECT_GT(diff, 0.01);
}

TEST(Echo, NoiselessTracesAreFlat) {
  auto ctx = mc_context(1, 0.0);
  auto t2 = time_grid(20.0, 140.0, 10.0);
  for (int n : {0, 1}) {
    auto tr = echo_experiment(-72.0, 100.0, t2, n, ctx);
    auto [lo, hi] = std::minmax_element(tr.visibility.begin(), tr.visibility.end());
    EXPECT_GT(*lo, 0.05);
    EXPECT_LT((*hi - *lo) / *hi, 0.01) << "N=" << n;
  }
}

TEST(Echo, FreeContrastDecreasesWithNoise) {
  std::vector<double> t2{80.0};
  double prev = 2.0;
  for (double a : {0.0, 0.1, 0.3, 1.0}) {
    auto tr = echo_experiment(-72.0, 80.0, t2, 0, mc_context(a > 0 ? 200 : 1, a));
    EXPECT_LT(tr.visibility[0], prev) << "A=" << a;
    prev = tr.visibility[0];
  }
}

TEST(Echo, StrongNoiseErodesEcho) {
  std::vector<double> t2{80.0};
  const double weak = echo_experiment(-72.0, 80.0, t2, 1, mc_context(200, 0.5)).visibility[0];
  const double strong = echo_experiment(-72.0, 80.0, t2, 1, mc_context(200, 16.0)).visibility[0];
  EXPECT_LT(strong, weak);
}

TEST(Echo, RevivesWhereFreeEvolutionHasDecayed) {
  // With the tilted precession axis away from resonance the echo keeps roughly
  // s^4 of the s^2 free contrast, so only a revival ratio is asserted.
  auto ctx = mc_context(200);
  std::vector<double> at{100.0}, free_total{100.0};
  const double echo = echo_experiment(-72.0, 100.0, at, 1, ctx).visibility[0];
  const double free = echo_experiment(-72.0, 100.0, free_total, 0, ctx).visibility[0];
  EXPECT_GT(echo, 3.0 * free);
  std::vector<double> off{40.0, 160.0};
  auto early_late = echo_experiment(-72.0, 100.0, off, 1, ctx);
  EXPECT_GT(echo, early_late.visibility[0]);
  EXPECT_GT(echo, early_late.visibility[1]);
}

TEST(Echo, RejectsBadArguments) {
  auto ctx = mc_context(1, 0.0);
  std::vector<double> t2{10.0};
  EXPECT_THROW(echo_experiment(-72.0, -1.0, t2, 1, ctx), DomainError);
  EXPECT_THROW(echo_experiment(-72.0, 10.0, t2, 2, ctx), DomainError);
}

TEST(Calibration, OddHalfTurnsBeatFullTurns) {
  // Needs noise: without it the non-echo terms interfere with the echo.
  auto ctx = mc_context(100);
  std::vector<double> tr{0.5 / 0.55, 1.0 / 0.55, 1.5 / 0.55, 2.0 / 0.55}, t2{97.0};
  auto res = calibrate_refocus(-72.0, 97.0, tr, t2, 0.55, ctx);
  EXPECT_GT(res.values[0][0], 2.0 * res.values[1][0]);
  EXPECT_GT(res.values[2][0], 2.0 * res.values[3][0]);
  EXPECT_THROW(calibrate_refocus(-72.0, 97.0, tr, t2, 0.0, ctx), DomainError);
}

TEST(CarrPurcell, FreeIntervals) {
  auto iv = cp_free_intervals(2, 100.0, 1.0);
  ASSERT_EQ(iv.size(), 3u);
  EXPECT_NEAR(iv[0], 24.5, 1e-12);
  EXPECT_NEAR(iv[1], 49.0, 1e-12);
  EXPECT_NEAR(iv[2], 24.5, 1e-12);
  auto none = cp_free_intervals(0, 50.0, 1.0);
  ASSERT_EQ(none.size(), 1u);
  EXPECT_EQ(none[0], 50.0);
  try {
    cp_free_intervals(4, 3.0, 1.0);
    FAIL() << "expected ScheduleError";
  } catch (const ScheduleError& e) {
    EXPECT_NE(std::string(e.what()).find("spacing"), std::string::npos) << e.what();
  }
}

TEST(CarrPurcell, SinglePulseEqualsEcho) {
  auto ctx = mc_context(20);
  const double t = 150.0;
  const double tr = ctx.settings.refocus_duration();
  std::vector<double> grid{t}, t2{(t - tr) / 2.0};
  auto cp = cp_sequence(-72.0, 1, grid, ctx);
  auto echo = echo_experiment(-72.0, (t - tr) / 2.0, t2, 1, ctx);
  EXPECT_NEAR(cp.visibility[0], echo.visibility[0], 1e-12);
}

TEST(CarrPurcell, CommensurateLattice) {
  auto p = DeviceParams::defaults();
  SequenceSettings s;
  const double period = 1.0 / f_osc(detuning(-84.0, p), p.s);
  const double tr = s.refocus_duration();
  for (int n : {0, 1, 2, 4}) {
    auto ts = cp_commensurate_times(n, -84.0, 40.0, 600.0, 10, p, s);
    ASSERT_GE(ts.size(), 2u);
    EXPECT_LE(ts.size(), 10u);
    EXPECT_TRUE(std::is_sorted(ts.begin(), ts.end()));
    for (double t : ts) {
      EXPECT_GE(t, 40.0);
      EXPECT_LE(t, 600.0);
      const double m = n == 0 ? t / period : (t / n - tr) / (2.0 * period);
      EXPECT_NEAR(m, std::round(m), 1e-9) << "N=" << n << " t=" << t;
    }
  }
  EXPECT_THROW(cp_commensurate_times(4, -84.0, 10.0, 12.0, 10, p, s), ScheduleError);
  EXPECT_THROW(cp_commensurate_times(1, -84.0, 10.0, 5.0, 10, p, s), DomainError);
}

TEST(CarrPurcell, NoiselessVisibilityConstantOnLattice) {
  auto ctx = mc_context(1, 0.0);
  for (int n : {1, 2}) {
    auto ts = cp_commensurate_times(n, -84.0, 30.0, 400.0, 6, ctx.device, ctx.settings);
    auto tr = cp_sequence(-84.0, n, ts, ctx);
    auto [lo, hi] = std::minmax_element(tr.visibility.begin(), tr.visibility.end());
    EXPECT_LT((*hi - *lo) / *hi, 0.02) << "N=" << n;
  }
}

TEST(Visibility, DemodulationOfSampledCosine) {
  std::vector<double> s;
  for (int k = 0; k < 8; ++k) s.push_back(0.4 + 0.3 * std::cos(constants::two_pi * k / 8.0 + 0.7));
  EXPECT_NEAR(demodulated_visibility(s), 0.3, 1e-12);
}
