#include "tlsdd/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <memory>
#include <numeric>

#include <Eigen/Dense>
#include <boost/math/tools/minima.hpp>
#include <unsupported/Eigen/NonLinearOptimization>
#include <unsupported/Eigen/NumericalDiff>

#include "tlsdd/constants.hpp"
#include "tlsdd/errors.hpp"
#include "fft.hpp"

namespace tlsdd {

namespace {

constexpr double kT1Lo = 10.0;
constexpr double kT1Hi = 1e5;
constexpr double kTphiLo = 1.0;
constexpr double kTphiHi = 1e5;

// Functor adaptor for Eigen's Levenberg–Marquardt with numerical Jacobians.
template <class Residual>
struct LmFunctor {
  using Scalar = double;
  using InputType = Eigen::VectorXd;
  using ValueType = Eigen::VectorXd;
  using JacobianType = Eigen::MatrixXd;
  enum { InputsAtCompileTime = Eigen::Dynamic, ValuesAtCompileTime = Eigen::Dynamic };

  Residual residual;
  int n_inputs;
  int n_values;

  int inputs() const { return n_inputs; }
  int values() const { return n_values; }
  int operator()(const Eigen::VectorXd& x, Eigen::VectorXd& fvec) const {
    residual(x, fvec);
    return 0;
  }
};

struct LmOutcome {
  Eigen::VectorXd x;
  double rms = 0.0;
  int iterations = 0;
  bool converged = false;
};

template <class Residual>
LmOutcome least_squares(Residual residual, Eigen::VectorXd x0, int n_values) {
  using F = LmFunctor<Residual>;
  F functor{residual, static_cast<int>(x0.size()), n_values};
  Eigen::NumericalDiff<F> numdiff(functor);
  Eigen::LevenbergMarquardt<Eigen::NumericalDiff<F>> lm(numdiff);
  lm.parameters.maxfev = 4000;
  lm.parameters.xtol = 1e-12;
  lm.parameters.ftol = 1e-12;
  const auto status = lm.minimize(x0);
  LmOutcome out;
  out.x = x0;
  Eigen::VectorXd f(n_values);
  residual(x0, f);
  out.rms = std::sqrt(f.squaredNorm() / n_values);
  out.iterations = static_cast<int>(lm.iter);
  out.converged = status == Eigen::LevenbergMarquardtSpace::RelativeReductionTooSmall ||
                  status == Eigen::LevenbergMarquardtSpace::RelativeErrorTooSmall ||
                  status == Eigen::LevenbergMarquardtSpace::RelativeErrorAndReductionTooSmall ||
                  status == Eigen::LevenbergMarquardtSpace::CosinusTooSmall ||
                  status == Eigen::LevenbergMarquardtSpace::XtolTooSmall ||
                  status == Eigen::LevenbergMarquardtSpace::FtolTooSmall ||
                  status == Eigen::LevenbergMarquardtSpace::GtolTooSmall;
  return out;
}

// Bounded reparametrization T = lo·(hi/lo)^σ(p).
double bounded(double p, double lo, double hi) {
  const double s = 1.0 / (1.0 + std::exp(-p));
  return lo * std::pow(hi / lo, s);
}

double unbounded(double t, double lo, double hi) {
  double s = std::log(std::clamp(t, lo, hi) / lo) / std::log(hi / lo);
  s = std::clamp(s, 1e-6, 1.0 - 1e-6);
  return std::log(s / (1.0 - s));
}

bool uniform_spacing(std::span<const double> t) {
  const double dt = (t.back() - t.front()) / static_cast<double>(t.size() - 1);
  if (!(dt > 0.0)) return false;
  for (std::size_t i = 1; i < t.size(); ++i)
    if (std::abs(t[i] - t[i - 1] - dt) > 1e-6 * dt) return false;
  return true;
}

struct Peak {
  double freq = 0.0;
  double amplitude = 0.0;
  double phase = 0.0;
  double floor = 0.0;
};

// Zero-padded spectrum of the mean-removed signal; the strongest bin above DC.
Peak spectral_peak(std::span<const double> t, std::span<const double> y, double mean) {
  const int n = static_cast<int>(y.size());
  const int padded = 8 * n;
  const double dt = (t.back() - t.front()) / (n - 1);
  std::unique_ptr<detail::RealToComplex> fft;
  {
    std::lock_guard lock(detail::fftw_planner_mutex());
    fft = std::make_unique<detail::RealToComplex>(padded);
  }
  for (int i = 0; i < padded; ++i) fft->input()[i] = i < n ? y[static_cast<std::size_t>(i)] - mean : 0.0;
  fft->execute();
  std::vector<std::complex<double>> spec(static_cast<std::size_t>(padded / 2 + 1));
  for (std::size_t k = 0; k < spec.size(); ++k) spec[k] = fft->output(static_cast<int>(k));
  {
    std::lock_guard lock(detail::fftw_planner_mutex());
    fft.reset();
  }

  std::vector<double> mag(static_cast<std::size_t>(padded / 2 + 1));
  for (std::size_t k = 0; k < mag.size(); ++k) mag[k] = std::abs(spec[k]);
  // Skip the DC lobe (first 8 padded bins).
  std::size_t best = 8;
  for (std::size_t k = 8; k < mag.size(); ++k)
    if (mag[k] > mag[best]) best = k;
  std::vector<double> sorted(mag.begin() + 8, mag.end());
  std::nth_element(sorted.begin(), sorted.begin() + sorted.size() / 2, sorted.end());
  Peak p;
  p.freq = static_cast<double>(best) / (padded * dt);
  p.amplitude = 2.0 * mag[best] / n;
  // Phase referred to t = 0 rather than t.front().
  p.phase = std::arg(spec[best]) - constants::two_pi * p.freq * t.front();
  p.floor = 2.0 * sorted[sorted.size() / 2] / n;
  return p;
}

}  // namespace

OscFit fit_oscillation(std::span<const double> t, std::span<const double> y) {
  OscFit fit;
  if (t.size() != y.size()) throw DomainError("fit_oscillation: t and y differ in length");
  if (t.size() < 8) {
    fit.message = "need at least 8 samples";
    return fit;
  }
  if (!uniform_spacing(t)) {
    fit.message = "samples must be uniformly spaced";
    return fit;
  }
  const double n = static_cast<double>(y.size());
  const double mean = std::accumulate(y.begin(), y.end(), 0.0) / n;
  double var = 0.0;
  for (double v : y) var += (v - mean) * (v - mean);
  var /= n;
  if (!(var > 1e-20)) {
    fit.message = "no spectral peak: constant trace";
    return fit;
  }
  const Peak peak = spectral_peak(t, y, mean);
  if (!(peak.amplitude > 4.0 * peak.floor)) {
    fit.message = "no spectral peak above the noise floor";
    return fit;
  }
  const double span = t.back() - t.front();
  if (span * peak.freq < 1.5) {
    fit.message = "trace spans fewer than 1.5 oscillation periods";
    return fit;
  }

  const int m = static_cast<int>(y.size());
  auto residual = [&](const Eigen::VectorXd& x, Eigen::VectorXd& f) {
    for (int i = 0; i < m; ++i) {
      const double ti = t[static_cast<std::size_t>(i)];
      f(i) = x(0) + x(1) * std::exp(-x(2) * ti) * std::cos(constants::two_pi * x(3) * ti + x(4)) -
             y[static_cast<std::size_t>(i)];
    }
  };
  Eigen::VectorXd x0(5);
  x0 << mean, peak.amplitude, 0.0, peak.freq, peak.phase;
  const auto res = least_squares(residual, x0, m);
  Eigen::VectorXd x = res.x;
  if (x(1) < 0.0) {
    x(1) = -x(1);
    x(4) += constants::pi;
  }
  if (x(3) < 0.0) {
    x(3) = -x(3);
    x(4) = -x(4);
  }
  fit.offset = x(0);
  fit.amplitude = x(1);
  fit.decay_rate = x(2);
  fit.f_osc = x(3);
  fit.phase = std::remainder(x(4), constants::two_pi);
  fit.residual_rms = res.rms;
  fit.ok = std::isfinite(res.rms) && fit.f_osc > 0.0;
  fit.message = fit.ok ? "ok" : "least squares diverged";
  return fit;
}

Envelope extract_envelope(std::span<const double> t, std::span<const double> y, const OscFit& fit) {
  if (!fit.ok) throw DomainError("extract_envelope: oscillation fit failed (" + fit.message + ")");
  if (t.size() != y.size()) throw DomainError("extract_envelope: t and y differ in length");
  const double period = 1.0 / fit.f_osc;
  const double half = 0.5 * period;
  Envelope env;
  std::size_t lo = 0;
  std::size_t hi = 0;
  for (std::size_t i = 0; i < t.size(); ++i) {
    const double c = t[i];
    if (c - half < t.front() - 1e-12 || c + half > t.back() + 1e-12) continue;
    while (lo < t.size() && t[lo] < c - half - 1e-12) ++lo;
    if (hi < lo) hi = lo;
    while (hi < t.size() && t[hi] <= c + half + 1e-12) ++hi;
    const auto count = static_cast<Eigen::Index>(hi - lo);
    if (count < 5) throw DomainError("extract_envelope: fewer than 5 samples per oscillation period");
    Eigen::MatrixXd a(count, 4);
    Eigen::VectorXd b(count);
    for (Eigen::Index k = 0; k < count; ++k) {
      const double dtk = t[lo + static_cast<std::size_t>(k)] - c;
      const double ph = constants::two_pi * fit.f_osc * dtk;
      a(k, 0) = 1.0;
      a(k, 1) = dtk;
      a(k, 2) = std::cos(ph);
      a(k, 3) = std::sin(ph);
      b(k) = y[lo + static_cast<std::size_t>(k)];
    }
    const Eigen::VectorXd coef = a.colPivHouseholderQr().solve(b);
    env.t.push_back(c);
    env.h.push_back(std::hypot(coef(2), coef(3)));
  }
  return env;
}

double envelope_te(double t1_tilde, double t_phi) {
  const double b = std::isfinite(t1_tilde) ? 1.0 / t1_tilde : 0.0;
  const double a = std::isfinite(t_phi) ? 1.0 / (t_phi * t_phi) : 0.0;
  if (a == 0.0 && b == 0.0) return std::numeric_limits<double>::infinity();
  return 2.0 / (b + std::sqrt(b * b + 4.0 * a));
}

DecayFit fit_decay(std::span<const double> t, std::span<const double> h, std::optional<double> fix_t1) {
  if (t.size() != h.size()) throw DomainError("fit_decay: t and h differ in length");
  if (t.size() < 6) throw DomainError("fit_decay: need at least 6 envelope points");
  for (double v : h)
    if (!(v > 0.0)) throw DomainError("fit_decay: envelope must be positive");
  if (fix_t1 && !(*fix_t1 > 0.0)) throw DomainError("fit_decay: fixed T1 must be > 0");

  const int m = static_cast<int>(t.size());
  const double t_max = *std::max_element(t.begin(), t.end());
  const bool fixed = fix_t1.has_value();
  const double u_fixed = fixed && std::isfinite(*fix_t1) ? 1.0 / *fix_t1 : 0.0;

  // Log-linear initializer: ln h = c − u t − v t².
  Eigen::MatrixXd a(m, fixed ? 2 : 3);
  Eigen::VectorXd b(m);
  for (int i = 0; i < m; ++i) {
    const double ti = t[static_cast<std::size_t>(i)];
    a(i, 0) = 1.0;
    if (fixed) {
      a(i, 1) = -ti * ti;
      b(i) = std::log(h[static_cast<std::size_t>(i)]) + u_fixed * ti;
    } else {
      a(i, 1) = -ti;
      a(i, 2) = -ti * ti;
      b(i) = std::log(h[static_cast<std::size_t>(i)]);
    }
  }
  const Eigen::VectorXd lin = a.colPivHouseholderQr().solve(b);
  const double amp0 = std::exp(lin(0));
  const double u0 = fixed ? u_fixed : lin(1);
  const double v0 = fixed ? lin(1) : lin(2);
  const double t1_0 = u0 > 1.0 / kT1Hi ? 1.0 / u0 : kT1Hi;
  const double tphi_0 = v0 > 1.0 / (kTphiHi * kTphiHi) ? 1.0 / std::sqrt(v0) : kTphiHi;

  auto model = [&](double amp, double t1, double tphi, double ti) {
    const double e = (fixed ? u_fixed * ti : ti / t1) + (ti / tphi) * (ti / tphi);
    return amp * std::exp(-e);
  };
  auto residual = [&](const Eigen::VectorXd& x, Eigen::VectorXd& f) {
    const double amp = std::exp(x(0));
    const double tphi = bounded(x(1), kTphiLo, kTphiHi);
    const double t1 = fixed ? 0.0 : bounded(x(2), kT1Lo, kT1Hi);
    for (int i = 0; i < m; ++i)
      f(i) = model(amp, t1, tphi, t[static_cast<std::size_t>(i)]) - h[static_cast<std::size_t>(i)];
  };

  // Several starts (log-linear, pure exponential, pure Gaussian); best residual wins.
  std::vector<std::pair<double, double>> starts{{tphi_0, t1_0}};
  if (!fixed) {
    starts.emplace_back(kTphiHi * 0.5, std::clamp(t_max, kT1Lo, kT1Hi));
    starts.emplace_back(std::clamp(0.5 * t_max, kTphiLo, kTphiHi), kT1Hi * 0.5);
  }
  LmOutcome best;
  best.rms = std::numeric_limits<double>::infinity();
  for (const auto& [tp, t1] : starts) {
    Eigen::VectorXd x0(fixed ? 2 : 3);
    x0(0) = std::log(amp0);
    x0(1) = unbounded(tp, kTphiLo, kTphiHi);
    if (!fixed) x0(2) = unbounded(t1, kT1Lo, kT1Hi);
    auto res = least_squares(residual, x0, m);
    if (res.rms < best.rms) best = res;
  }

  DecayFit fit;
  fit.fixed_t1 = fixed;
  fit.amplitude = std::exp(best.x(0));
  fit.t_phi = bounded(best.x(1), kTphiLo, kTphiHi);
  fit.t1_tilde = fixed ? *fix_t1 : bounded(best.x(2), kT1Lo, kT1Hi);
  fit.t_e = envelope_te(fit.t1_tilde, fit.t_phi);
  fit.residual_rms = best.rms;
  fit.iterations = best.iterations;
  fit.converged = best.converged && std::isfinite(best.rms);
  fit.t_phi_unresolved = fit.t_phi > t_max;
  fit.t1_unresolved = !fixed && fit.t1_tilde > t_max;
  fit.identifiability_warning = !fixed && t_max < 0.5 * std::min(fit.t1_tilde, fit.t_phi);
  if (!fit.converged) {
    fit.message = "least squares did not converge after " + std::to_string(best.iterations) +
                  " iterations (rms " + std::to_string(best.rms) + ")";
  } else if (fit.identifiability_warning) {
    fit.message = "trace shorter than half of min(T1, Tphi): factors poorly identifiable";
  } else {
    fit.message = "ok";
  }
  return fit;
}

double t1_tilde_from_rates(const DeviceParams& params, const WhiteTransverseChannel& channel) {
  if (params.t1_qb < 0.0 || params.t1_tls < 0.0 || channel.s_perp < 0.0)
    throw DomainError("t1_tilde_from_rates: rates must be >= 0");
  const double rate = 0.5 * (1.0 / params.t1_qb + 1.0 / params.t1_tls) + 0.5 * (0.5 * channel.s_perp);
  if (rate == 0.0) return std::numeric_limits<double>::infinity();
  return 1e9 / rate;
}

double infer_s_perp(double t1_tilde_measured, const DeviceParams& params) {
  if (!(t1_tilde_measured > 0.0)) throw DomainError("infer_s_perp: T1 must be > 0");
  const double rate = 1e9 / t1_tilde_measured;
  const double floor = 0.5 * (1.0 / params.t1_qb + 1.0 / params.t1_tls);
  if (rate < floor * (1.0 - 1e-12))
    throw DomainError("infer_s_perp: measured decay is slower than the relaxation floor");
  return std::max(0.0, 4.0 * (rate - floor));
}

double predicted_tphi_at_scale(int n_pulses, double dphi, const OneOverFSpectrum& spec,
                               const DeviceParams& params) {
  // c_N for N ≥ 2 depends on t only through ω_low t; the N = 1 time is a fine proxy.
  const double t_ref = n_pulses >= 2 ? predicted_tphi(1, dphi, 100.0, spec, params) : 100.0;
  return predicted_tphi(n_pulses, dphi, std::isfinite(t_ref) ? t_ref : 100.0, spec, params);
}

double predicted_te(int n_pulses, double dphi, const OneOverFSpectrum& spec, const DeviceParams& params,
                    double t1_tilde) {
  return envelope_te(t1_tilde, predicted_tphi_at_scale(n_pulses, dphi, spec, params));
}

ModelComparison compare_to_model(std::span<const DecayPoint> points, const OneOverFSpectrum& spec,
                                 const DeviceParams& params, double t1_tilde) {
  std::map<int, std::vector<double>> per_n;
  for (const auto& p : points) {
    if (!(p.t_e > 0.0)) throw DomainError("compare_to_model: measured T_e must be > 0");
    auto& v = per_n[p.n_pulses];
    if (std::find(v.begin(), v.end(), p.dphi) == v.end()) v.push_back(p.dphi);
  }
  if (per_n.empty()) throw PreconditionError("compare_to_model: no fit points");
  for (const auto& [n, v] : per_n)
    if (v.size() < 3)
      throw PreconditionError("compare_to_model: N = " + std::to_string(n) + " has fewer than 3 flux points");

  auto predict = [&](double a_phi, const DecayPoint& p) {
    OneOverFSpectrum s = spec;
    s.a_phi = a_phi;
    return predicted_te(p.n_pulses, p.dphi, s, params, t1_tilde);
  };
  auto cost = [&](double root_a) {
    double c = 0.0;
    for (const auto& p : points) {
      const double pred = predict(root_a * root_a, p);
      if (!std::isfinite(pred)) return 1e300;
      const double d = std::log(p.t_e) - std::log(pred);
      c += d * d;
    }
    return c;
  };
  const double lo = std::isfinite(t1_tilde) ? 0.0 : 1e-6;
  std::uintmax_t iters = 200;
  const auto [root_best, c_best] = boost::math::tools::brent_find_minima(cost, lo, 20.0, 40, iters);

  ModelComparison out;
  out.a_phi_reference = 1.96;
  out.a_phi_best = root_best * root_best;
  out.relative_deviation = (out.a_phi_best - out.a_phi_reference) / out.a_phi_reference;
  out.rms_log_residual = std::sqrt(c_best / static_cast<double>(points.size()));
  for (const auto& p : points) out.rows.push_back({p.dphi, p.n_pulses, p.t_e, predict(out.a_phi_best, p)});
  return out;
}

}  // namespace tlsdd
