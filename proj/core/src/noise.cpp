#include "tlsdd/noise.hpp"

#include <cmath>
#include <complex>
#include <algorithm>
#include <limits>
#include <memory>
#include <mutex>
#include <random>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "tlsdd/constants.hpp"
#include "tlsdd/errors.hpp"
#include "fft.hpp"

namespace tlsdd {

using detail::ComplexToReal;
using detail::RealToComplex;
using detail::fftw_planner_mutex;

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Trajectories of one run share a length; keep the last plan per thread.
struct PlanSlot {
  int n = 0;
  std::unique_ptr<ComplexToReal> plan;
  ~PlanSlot() {
    std::lock_guard lock(fftw_planner_mutex());
    plan.reset();
  }
};

ComplexToReal* cached_c2r(int n) {
  thread_local PlanSlot slot;
  if (slot.n != n || !slot.plan) {
    std::lock_guard lock(fftw_planner_mutex());
    slot.plan = std::make_unique<ComplexToReal>(n);
    slot.n = n;
  }
  return slot.plan.get();
}

}  // namespace

void OneOverFSpectrum::validate() const {
  if (!std::isfinite(a_phi) || a_phi < 0.0) throw ConfigError("noise.a_phi", "must be >= 0");
  if (!(omega_low > 0.0)) throw ConfigError("noise.omega_low", "must be > 0");
  if (!(omega_high > omega_low))
    throw ConfigError("noise.omega_high", "must exceed omega_low");
}

void WhiteTransverseChannel::validate() const {
  if (!std::isfinite(s_perp) || s_perp < 0.0) throw ConfigError("noise.s_perp", "must be >= 0");
}

double NoiseTrajectory::at(double t) const {
  if (samples.empty()) return 0.0;
  auto k = static_cast<long>(std::floor(t / dt));
  k = std::clamp<long>(k, 0, static_cast<long>(samples.size()) - 1);
  return samples[static_cast<std::size_t>(k)];
}

double psd(const OneOverFSpectrum& spec, double omega) {
  if (omega == 0.0) throw DomainError("psd: omega must be non-zero");
  const double w = std::abs(omega);
  if (w < spec.omega_low || w > spec.omega_high) return 0.0;
  return spec.a_phi / w;
}

double quasistatic_sigma(const OneOverFSpectrum& spec, double omega_cut) {
  if (!(omega_cut > spec.omega_low) || omega_cut > spec.omega_high)
    throw DomainError("quasistatic_sigma: requires omega_low < omega_cut <= omega_high");
  return std::sqrt(2.0 * spec.a_phi * std::log(omega_cut / spec.omega_low));
}

double quasistatic_cutoff(double total_time_ns) {
  if (!(total_time_ns > 0.0)) throw DomainError("quasistatic_cutoff: time must be > 0");
  return constants::two_pi / (2.0 * total_time_ns * 1e-9);
}

double sample_quasistatic(const OneOverFSpectrum& spec, double omega_cut, std::uint64_t seed) {
  const double sigma = quasistatic_sigma(spec, omega_cut);
  if (sigma == 0.0) return 0.0;
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  return sigma * normal(rng);
}

NoiseTrajectory synthesize_trajectory(const OneOverFSpectrum& spec, double duration, double dt,
                                      std::uint64_t seed) {
  if (!(dt > 0.0) || !(duration >= dt))
    throw DomainError("synthesize_trajectory: requires duration >= dt > 0");
  int n = static_cast<int>(std::llround(duration / dt));
  if (n < 2) n = 2;
  NoiseTrajectory traj;
  traj.dt = dt;
  traj.samples.assign(static_cast<std::size_t>(n), 0.0);
  if (spec.a_phi == 0.0) return traj;

  const double domega = constants::two_pi / (n * dt * 1e-9);
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);

  ComplexToReal* fft = cached_c2r(n);
  fftw_complex* in = fft->input();
  for (int k = 0; k <= n / 2; ++k) {
    in[k][0] = 0.0;
    in[k][1] = 0.0;
  }
  // x_j = sum_k a_k cos(w_k t_j) + b_k sin(w_k t_j), var(a_k) = var(b_k) = 2 S(w_k) dw.
  // Bin n/2 (Nyquist) carries no sine component and is left empty.
  for (int k = 1; k < (n + 1) / 2; ++k) {
    const double a = normal(rng);
    const double b = normal(rng);
    const double w = k * domega;
    if (w < spec.omega_low || w > spec.omega_high) continue;
    const double sd = std::sqrt(2.0 * spec.a_phi / w * domega);
    in[k][0] = 0.5 * sd * a;
    in[k][1] = -0.5 * sd * b;
  }
  fft->execute();
  const double* out = fft->output();
  for (int j = 0; j < n; ++j) traj.samples[static_cast<std::size_t>(j)] = out[j];
  return traj;
}

Periodogram periodogram(std::span<const double> samples, double dt_ns) {
  const int n = static_cast<int>(samples.size());
  if (n < 4 || !(dt_ns > 0.0)) throw DomainError("periodogram: need >= 4 samples and dt > 0");
  std::unique_ptr<RealToComplex> fft;
  {
    std::lock_guard lock(fftw_planner_mutex());
    fft = std::make_unique<RealToComplex>(n);
  }
  double mean = 0.0;
  for (double v : samples) mean += v;
  mean /= n;
  for (int j = 0; j < n; ++j) fft->input()[j] = samples[static_cast<std::size_t>(j)] - mean;
  fft->execute();
  const double domega = constants::two_pi / (n * dt_ns * 1e-9);
  Periodogram p;
  for (int k = 1; k < (n + 1) / 2; ++k) {
    p.omega.push_back(k * domega);
    p.power.push_back(std::norm(fft->output(k)) / (static_cast<double>(n) * n * domega));
  }
  {
    std::lock_guard lock(fftw_planner_mutex());
    fft.reset();
  }
  return p;
}

double switching_filter(int n_pulses, double x) {
  if (n_pulses < 0) throw DomainError("switching_filter: n_pulses must be >= 0");
  // Boundaries 0, 1/(2N), 3/(2N), ..., 1; the sign flips at every pulse.
  const int segments = n_pulses + 1;
  auto boundary = [&](int k) {
    if (k == 0) return 0.0;
    if (k == segments) return 1.0;
    return (2.0 * k - 1.0) / (2.0 * n_pulses);
  };
  std::complex<double> y = 0.0;
  for (int k = 0; k < segments; ++k) {
    const double a = boundary(k);
    const double b = boundary(k + 1);
    const double half = 0.5 * (b - a);
    // ∫_a^b e^{ixs} ds = e^{ix(a+b)/2} (b - a) sinc(x (b-a)/2)
    const double arg = x * half;
    const double sinc = std::abs(arg) < 1e-8 ? 1.0 - arg * arg / 6.0 : std::sin(arg) / arg;
    const double sign = (k % 2 == 0) ? 1.0 : -1.0;
    y += sign * std::polar(2.0 * half * sinc, x * 0.5 * (a + b));
  }
  return std::norm(y);
}

double filter_integral(int n_pulses, double total_time, const OneOverFSpectrum& spec) {
  if (n_pulses < 0) throw DomainError("filter_integral: n_pulses must be >= 0");
  if (!(total_time > 0.0)) throw DomainError("filter_integral: total_time must be > 0");
  using boost::math::quadrature::gauss_kronrod;
  const double lo = spec.omega_low * total_time * 1e-9;
  auto integrand = [&](double x) { return switching_filter(n_pulses, x) / x; };

  double sum = 0.0;
  double start = lo;
  if (lo < 1.0) {
    // Logarithmic substitution resolves the 1/x behaviour of the N = 0 filter.
    auto in_log = [&](double u) {
      const double x = std::exp(u);
      return integrand(x) * x;
    };
    sum += gauss_kronrod<double, 31>::integrate(in_log, std::log(lo), 0.0, 15, 1e-12);
    start = 1.0;
  }
  constexpr int kPeriods = 4000;
  const double x_max = kPeriods * constants::pi;
  for (int k = static_cast<int>(std::floor(start / constants::pi)); k < kPeriods; ++k) {
    const double a = std::max(start, k * constants::pi);
    const double b = (k + 1) * constants::pi;
    if (b > a) sum += gauss_kronrod<double, 21>::integrate(integrand, a, b, 8, 1e-12);
  }
  // Oscillation-averaged tail: |Y|² → (2 + 4N)/x² for large x.
  sum += (1.0 + 2.0 * n_pulses) / (x_max * x_max);
  return sum;
}

double filter_coefficient(int n_pulses, double total_time, const OneOverFSpectrum& spec) {
  if (!(total_time > 0.0)) throw DomainError("filter_coefficient: total_time must be > 0");
  if (n_pulses < 0) throw DomainError("filter_coefficient: n_pulses must be >= 0");
  if (n_pulses == 0) return std::log(1.0 / (spec.omega_low * total_time * 1e-9));
  if (n_pulses == 1) return std::log(2.0);
  return filter_integral(n_pulses, total_time, spec);
}

double predicted_tphi(int n_pulses, double dphi, double total_time, const OneOverFSpectrum& spec,
                      const DeviceParams& params) {
  const double inf = std::numeric_limits<double>::infinity();
  const double sensitivity = std::abs(dfosc_dphi(dphi, params));  // GHz per mPhi0
  if (sensitivity == 0.0 || spec.a_phi == 0.0) return inf;
  const double amplitude = std::sqrt(spec.a_phi) * 1e-3;  // mPhi0
  auto tphi_for = [&](double c) { return 1.0 / (constants::two_pi * std::sqrt(c) * amplitude * sensitivity); };

  if (n_pulses != 0) return tphi_for(filter_coefficient(n_pulses, total_time, spec));

  double t = total_time > 0.0 ? total_time : 100.0;
  for (int it = 0; it < 200; ++it) {
    const double c = filter_coefficient(0, t, spec);
    if (!(c > 0.0)) throw DomainError("predicted_tphi: c_0 is not positive; t exceeds 1/omega_low");
    const double next = tphi_for(c);
    if (std::abs(next - t) <= 1e-10 * next) return next;
    t = next;
  }
  return t;
}

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index) {
  return splitmix64(master ^ splitmix64(index + 0x632be59bd9b4e019ULL));
}

}  // namespace tlsdd
