#include "tlsdd/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <optional>
#include <utility>

#include <Eigen/Eigenvalues>

#include "tlsdd/constants.hpp"
#include "tlsdd/errors.hpp"
#include "tlsdd/linalg.hpp"
#include "tlsdd/parallel.hpp"

namespace tlsdd {

namespace {

constexpr double kGaussOffset = 0.28867513459481287;  // √3/6, two-point Gauss–Legendre nodes
constexpr double kTimeEps = 1e-12;

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

Matrix4c commutator(const Matrix4c& a, const Matrix4c& b) {
  if (!is_pair_structured(a) || !is_pair_structured(b)) return a * b - b * a;
  Matrix4c out = Matrix4c::Zero();
  for (const auto& [p, q] : {std::pair{k0g, k1e}, std::pair{k1g, k0e}}) {
    Matrix2c x, y;
    x << a(p, p), a(p, q), a(q, p), a(q, q);
    y << b(p, p), b(p, q), b(q, p), b(q, q);
    const Matrix2c c = x * y - y * x;
    out(p, p) = c(0, 0);
    out(p, q) = c(0, 1);
    out(q, p) = c(1, 0);
    out(q, q) = c(1, 1);
  }
  return out;
}

// Fourth-order Magnus: exp(−i2π Heff dt) with Heff = (H1+H2)/2 − i(√3 π dt/6)[H2, H1].
Matrix4c magnus_hamiltonian(const Matrix4c& h1, const Matrix4c& h2, double dt) {
  const Complex k(0.0, -std::sqrt(3.0) * constants::pi * dt / 6.0);
  return 0.5 * (h1 + h2) + k * commutator(h2, h1);
}

Matrix4c drive_hamiltonian(double t_pi) {
  // Rabi frequency Ω = 1/(2 t_π) GHz: a π rotation in t_π.
  const double omega = 0.5 / t_pi;
  return 0.5 * omega * qubit_tls_product(pauli_x(), Matrix2c::Identity());
}

Matrix4c sigma_minus_qubit() {
  Matrix2c lower = Matrix2c::Zero();
  lower(0, 1) = 1.0;
  return qubit_tls_product(lower, Matrix2c::Identity());
}

Matrix4c sigma_minus_tls() {
  Matrix2c lower = Matrix2c::Zero();
  lower(0, 1) = 1.0;
  return qubit_tls_product(Matrix2c::Identity(), lower);
}

Matrix4c sigma_z_subspace() {
  Matrix4c m = Matrix4c::Zero();
  m(k1g, k1g) = 1.0;
  m(k0e, k0e) = -1.0;
  return m;
}

// vec(A X B) = (Bᵀ ⊗ A) vec(X), column-major vec.
Matrix16c kron(const Matrix4c& a, const Matrix4c& b) {
  Matrix16c out;
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) out.block<4, 4>(4 * i, 4 * j) = a(i, j) * b;
  return out;
}

Vector16c vec(const Matrix4c& m) { return Eigen::Map<const Vector16c>(m.data()); }

Matrix4c unvec(const Vector16c& v) { return Eigen::Map<const Matrix4c>(v.data()); }

class Dissipator {
 public:
  explicit Dissipator(const RelaxationChannels& ch) {
    const Matrix4c id = Matrix4c::Identity();
    d_ = Matrix16c::Zero();
    auto add = [&](const Matrix4c& l, double rate) {
      if (rate <= 0.0) return;
      const Matrix4c lr = std::sqrt(rate) * l;
      const Matrix4c ldl = lr.adjoint() * lr;
      d_ += kron(lr.conjugate(), lr) - 0.5 * kron(id, ldl) - 0.5 * kron(ldl.transpose(), id);
      active_ = true;
    };
    add(sigma_minus_qubit(), ch.gamma_qb());
    add(sigma_minus_tls(), ch.gamma_tls());
    add(sigma_z_subspace(), ch.gamma_perp());
  }
  const Matrix16c& matrix() const { return d_; }
  bool active() const { return active_; }

 private:
  Matrix16c d_;
  bool active_ = false;
};

Matrix16c liouvillian(const Matrix4c& h, const Matrix16c& dissipator) {
  const Matrix4c id = Matrix4c::Identity();
  const Complex mi(0.0, -constants::two_pi);
  return mi * (kron(id, h) - kron(h.transpose(), id)) + dissipator;
}

// Closed-system stepper. Carries V with ρ = V V†, so a step costs one product;
// a pure state keeps a single column.
class UnitaryStepper {
 public:
  using Factor = Eigen::Matrix<Complex, 4, Eigen::Dynamic, 0, 4, 4>;

  explicit UnitaryStepper(const DensityMatrix4& rho) {
    Eigen::SelfAdjointEigenSolver<Matrix4c> es(rho.matrix());
    const auto& w = es.eigenvalues();
    const double floor = 1e-14 * w.maxCoeff();
    int keep = 0;
    for (int i = 0; i < 4; ++i) keep += w(i) > floor ? 1 : 0;
    v_.resize(4, keep);
    for (int i = 3, c = 0; i >= 0 && c < keep; --i) {
      if (w(i) <= floor) continue;
      v_.col(c++) = std::sqrt(w(i)) * es.eigenvectors().col(i);
    }
  }

  void constant(const Matrix4c& h, double dt) { apply(expm_hermitian(h, dt)); }
  void magnus(const Matrix4c& h1, const Matrix4c& h2, double dt) {
    apply(expm_hermitian(magnus_hamiltonian(h1, h2, dt), dt));
  }
  void pi_ideal() { apply(qubit_tls_product(pauli_x(), Matrix2c::Identity())); }
  void pi_drive(double t_pi, double dt) { constant(drive_hamiltonian(t_pi), dt); }
  Matrix4c rho() const { return v_ * v_.adjoint(); }

 private:
  void apply(const Matrix4c& u) {
    Factor next(4, v_.cols());
    next.noalias() = u * v_;
    v_ = next;
  }
  Factor v_;
};

class LindbladStepper {
 public:
  LindbladStepper(const DensityMatrix4& rho, const RelaxationChannels& ch)
      : v_(vec(rho.matrix())), diss_(ch) {}

  void constant(const Matrix4c& h, double dt) {
    if (cached_ && dt == cached_dt_ && h == cached_h_) {
      v_ = cached_prop_ * v_;
      return;
    }
    cached_prop_ = expm(liouvillian(h, diss_.matrix()) * dt);
    cached_h_ = h;
    cached_dt_ = dt;
    cached_ = true;
    v_ = cached_prop_ * v_;
  }
  void magnus(const Matrix4c& h1, const Matrix4c& h2, double dt) {
    const Matrix16c l1 = liouvillian(h1, diss_.matrix());
    const Matrix16c l2 = liouvillian(h2, diss_.matrix());
    const Matrix16c omega =
        0.5 * dt * (l1 + l2) + (std::sqrt(3.0) * dt * dt / 12.0) * (l2 * l1 - l1 * l2);
    v_ = expm(omega) * v_;
  }
  void pi_ideal() {
    const Matrix4c x = qubit_tls_product(pauli_x(), Matrix2c::Identity());
    v_ = vec(x * unvec(v_) * x);
  }
  void pi_drive(double t_pi, double dt) { constant(drive_hamiltonian(t_pi), dt); }
  Matrix4c rho() const { return unvec(v_); }

 private:
  Vector16c v_;
  Dissipator diss_;
  bool cached_ = false;
  Matrix4c cached_h_;
  double cached_dt_ = 0.0;
  Matrix16c cached_prop_;
};

struct PiEvent {
  double start;
  double duration;
};

// Flux seen by one run: the sequence profile plus a constant offset and an
// optional zero-order-hold noise trajectory.
struct FluxShift {
  double offset = 0.0;
  const NoiseTrajectory* noise = nullptr;

  double at(double t) const { return offset + (noise ? noise->at(t) : 0.0); }
};

void check_records(std::span<const double> records, double total) {
  for (std::size_t i = 0; i < records.size(); ++i) {
    if (!(records[i] >= 0.0 && records[i] <= total + kTimeEps))
      throw DomainError("record time " + format_double(records[i]) + " ns outside [0, " +
                        format_double(total) + "]");
    if (i > 0 && records[i] < records[i - 1])
      throw DomainError("record times must be sorted");
  }
}

void check_step(const PulseSequence& seq, const DeviceParams& params, const EvolutionOptions& opts) {
  const double fmax = max_frequency(seq, params, opts.frame);
  const double bound = 0.1 / fmax;
  if (opts.dt > bound)
    throw PreconditionError("dt = " + format_double(opts.dt) + " ns exceeds 0.1/f_max = " +
                            format_double(bound) + " ns (f_max = " + format_double(fmax) +
                            " GHz)");
}

// Walks the sequence, calling on_record(i, stepper) at each record time.
template <class Stepper, class OnRecord>
void run_timeline(Stepper& st, const PulseSequence& seq, const DeviceParams& params,
                  const EvolutionOptions& opts, const FluxShift& shift,
                  std::span<const double> records, OnRecord&& on_record) {
  const double t_end = records.empty() ? 0.0 : records.back();
  const auto& segs = seq.segments();
  const auto varying = seq.varying_intervals();

  std::vector<PiEvent> pulses;
  std::vector<double> cuts{0.0, t_end};
  double t = 0.0;
  for (const auto& s : segs) {
    if (s.kind == SegmentKind::QubitPiPulse) pulses.push_back({t, opts.ideal_pi ? 0.0 : s.duration});
    t += s.duration;
    if (t < t_end) cuts.push_back(t);
  }
  for (const auto& [a, b] : varying) {
    if (a < t_end) cuts.push_back(a);
    if (b < t_end) cuts.push_back(b);
  }
  for (double r : records) cuts.push_back(r);
  if (shift.noise) {
    const double ndt = shift.noise->dt;
    for (double c = ndt; c < t_end; c += ndt) cuts.push_back(c);
  }
  std::sort(cuts.begin(), cuts.end());
  std::vector<double> points;
  for (double c : cuts)
    if (points.empty() || c - points.back() > kTimeEps) points.push_back(c);

  std::size_t next_pulse = 0;
  std::size_t next_record = 0;
  auto events_at = [&](double now) {
    while (next_pulse < pulses.size() && pulses[next_pulse].start <= now + kTimeEps) {
      if (pulses[next_pulse].duration == 0.0) st.pi_ideal();
      ++next_pulse;
    }
    while (next_record < records.size() && records[next_record] <= now + kTimeEps) {
      on_record(next_record, st);
      ++next_record;
    }
  };
  auto in_drive = [&](double mid) -> const PiEvent* {
    for (const auto& p : pulses)
      if (p.duration > 0.0 && mid > p.start && mid < p.start + p.duration) return &p;
    return nullptr;
  };
  auto in_varying = [&](double mid) {
    for (const auto& [a, b] : varying)
      if (mid > a && mid < b) return true;
    return false;
  };
  auto hamiltonian = [&](double time) {
    return frame_hamiltonian(flux_profile(seq, time) + shift.at(time), params, opts.frame);
  };

  events_at(0.0);
  for (std::size_t i = 0; i + 1 < points.size(); ++i) {
    const double a = points[i];
    const double b = points[i + 1];
    const double mid = 0.5 * (a + b);
    if (const PiEvent* p = in_drive(mid)) {
      st.pi_drive(p->duration, b - a);
    } else if (in_varying(mid)) {
      const double span = b - a;
      const int n = std::max(1, static_cast<int>(std::ceil(span / opts.dt - 1e-9)));
      const double h = span / n;
      const double noise = shift.at(mid);
      for (int k = 0; k < n; ++k) {
        const double c = a + (k + 0.5) * h;
        const double t1 = c - kGaussOffset * h;
        const double t2 = c + kGaussOffset * h;
        const Matrix4c h1 = frame_hamiltonian(flux_profile(seq, t1) + noise, params, opts.frame);
        const Matrix4c h2 = frame_hamiltonian(flux_profile(seq, t2) + noise, params, opts.frame);
        st.magnus(h1, h2, h);
      }
    } else {
      st.constant(hamiltonian(mid), b - a);
    }
    events_at(b);
  }
}

std::vector<double> default_records(const PulseSequence& seq, std::span<const double> records) {
  if (!records.empty()) return {records.begin(), records.end()};
  return {0.0, seq.t_total()};
}

}  // namespace

DensityMatrix4 DensityMatrix4::basis(BasisState s) {
  Matrix4c m = Matrix4c::Zero();
  m(s, s) = 1.0;
  return DensityMatrix4(m);
}

DensityMatrix4 DensityMatrix4::from_ket(const Vector4c& psi) {
  const double n = psi.squaredNorm();
  if (!(n > 0.0)) throw DomainError("from_ket: zero vector");
  return DensityMatrix4(psi * psi.adjoint() / n);
}

std::array<double, 4> DensityMatrix4::populations() const {
  return {m_(0, 0).real(), m_(1, 1).real(), m_(2, 2).real(), m_(3, 3).real()};
}

void DensityMatrix4::validate() const {
  if (!m_.allFinite()) throw PreconditionError("density matrix has non-finite entries");
  if (hermiticity_defect(m_) > 1e-10) throw PreconditionError("density matrix is not Hermitian");
  if (std::abs(m_.trace() - 1.0) > 1e-10) throw PreconditionError("density matrix trace != 1");
  Eigen::SelfAdjointEigenSolver<Matrix4c> es(m_, Eigen::EigenvaluesOnly);
  if (es.eigenvalues().minCoeff() < -1e-9)
    throw PreconditionError("density matrix has a negative eigenvalue");
}

void EvolutionOptions::validate() const {
  if (!(dt > 0.0) || !std::isfinite(dt)) throw ConfigError("evolution.dt", "must be > 0");
  if (mode == EvolutionMode::MonteCarlo && n_traj < 1)
    throw ConfigError("evolution.n_traj", "must be >= 1");
  if (!(noise_dt > 0.0)) throw ConfigError("evolution.noise_dt", "must be > 0");
  if (noise_window < 0.0) throw ConfigError("evolution.noise_window", "must be >= 0");
  if (qs_cutoff < 0.0) throw ConfigError("evolution.qs_cutoff", "must be >= 0");
  if (experiment_time < 0.0) throw ConfigError("evolution.experiment_time", "must be >= 0");
}

RelaxationChannels RelaxationChannels::from(const DeviceParams& params,
                                            const WhiteTransverseChannel& ch) {
  return {params.t1_qb_ns(), params.t1_tls_ns(), ch.s_perp};
}

void RelaxationChannels::validate() const {
  if (t1_qb < 0.0 || t1_tls < 0.0 || s_perp < 0.0 || !std::isfinite(s_perp))
    throw DomainError("relaxation rates must be >= 0");
}

Matrix4c frame_hamiltonian(double dphi, const DeviceParams& params, Frame frame) {
  if (frame == Frame::Lab) return full_hamiltonian(params.phi_star + 1e-3 * dphi, params);
  return rotating_hamiltonian(dphi, params);
}

double max_frequency(const PulseSequence& seq, const DeviceParams& params, Frame frame) {
  double fmax = 0.0;
  auto levels = seq.levels();
  if (levels.empty()) levels.push_back(0.0);
  for (double lv : levels) {
    Eigen::SelfAdjointEigenSolver<Matrix4c> es(frame_hamiltonian(lv, params, frame),
                                               Eigen::EigenvaluesOnly);
    fmax = std::max(fmax, es.eigenvalues().maxCoeff() - es.eigenvalues().minCoeff());
  }
  return fmax;
}

std::vector<double> time_grid(double t0, double t1, double step) {
  if (!(step > 0.0)) throw DomainError("time_grid: step must be > 0");
  std::vector<double> out;
  const auto n = static_cast<long>(std::floor((t1 - t0) / step + 1e-9));
  for (long k = 0; k <= n; ++k) out.push_back(t0 + static_cast<double>(k) * step);
  return out;
}

StateTrace propagate_piecewise(const DensityMatrix4& rho0, const PulseSequence& seq,
                               const DeviceParams& params, const EvolutionOptions& opts,
                               std::span<const double> record_times) {
  rho0.validate();
  opts.validate();
  check_step(seq, params, opts);
  const auto records = default_records(seq, record_times);
  check_records(records, seq.t_total());
  StateTrace out;
  out.t = records;
  out.states.resize(records.size());
  UnitaryStepper st(rho0);
  run_timeline(st, seq, params, opts, FluxShift{}, records,
               [&](std::size_t i, const UnitaryStepper& s) { out.states[i] = DensityMatrix4(s.rho()); });
  return out;
}

DensityMatrix4 apply_pi_pulse(const DensityMatrix4& rho, bool ideal, double t_pi,
                              const RelaxationChannels& channels) {
  rho.validate();
  if (ideal) {
    UnitaryStepper st(rho);
    st.pi_ideal();
    return DensityMatrix4(st.rho());
  }
  if (!(t_pi > 0.0)) throw DomainError("apply_pi_pulse: non-ideal pulse needs t_pi > 0");
  channels.validate();
  LindbladStepper st(rho, channels);
  st.pi_drive(t_pi, t_pi);
  return DensityMatrix4(st.rho());
}

StateTrace evolve_lindblad(const DensityMatrix4& rho0, const PulseSequence& seq,
                           const DeviceParams& params, const RelaxationChannels& channels,
                           const EvolutionOptions& opts, std::span<const double> record_times) {
  channels.validate();
  rho0.validate();
  opts.validate();
  check_step(seq, params, opts);
  const auto records = default_records(seq, record_times);
  check_records(records, seq.t_total());
  StateTrace out;
  out.t = records;
  out.states.resize(records.size());
  LindbladStepper st(rho0, channels);
  run_timeline(st, seq, params, opts, FluxShift{}, records,
               [&](std::size_t i, const LindbladStepper& s) { out.states[i] = DensityMatrix4(s.rho()); });
  return out;
}

PopulationTrace run_trajectories(const DensityMatrix4& rho0, const PulseSequence& seq,
                                 const DeviceParams& params, const OneOverFSpectrum& noise,
                                 const RelaxationChannels& channels, const EvolutionOptions& opts,
                                 std::span<const double> record_times) {
  rho0.validate();
  opts.validate();
  noise.validate();
  if (opts.n_traj < 1) throw PreconditionError("run_trajectories: n_traj must be >= 1");
  if (opts.relaxation) channels.validate();
  check_step(seq, params, opts);
  const auto records = default_records(seq, record_times);
  check_records(records, seq.t_total());

  const double t_end = records.back();
  const double t_exp = opts.experiment_time > 0.0 ? opts.experiment_time : seq.t_total();
  NoiseSampling sampling = opts.sampling;
  if (sampling == NoiseSampling::Auto)
    sampling = seq.t_total() < 1000.0 ? NoiseSampling::Quasistatic : NoiseSampling::Synthesized;

  const std::size_t n_rec = records.size();
  const auto n_traj = static_cast<std::size_t>(opts.n_traj);
  constexpr std::size_t kStride = 5;  // four populations + qubit excited
  std::vector<double> samples(n_traj * n_rec * kStride, 0.0);

  auto trajectory = [&](std::size_t i) {
    const std::uint64_t seed = derive_seed(opts.seed, i);
    FluxShift shift;
    std::optional<NoiseTrajectory> traj;
    if (noise.a_phi > 0.0) {
      if (sampling == NoiseSampling::Quasistatic) {
        const double cut = opts.qs_cutoff > 0.0 ? opts.qs_cutoff : quasistatic_cutoff(t_exp);
        shift.offset = cut > noise.omega_low ? sample_quasistatic(noise, cut, seed) : 0.0;
      } else {
        const double window =
            opts.noise_window > 0.0 ? opts.noise_window : std::max(4.0 * t_end, 2.0 * opts.noise_dt);
        if (window < t_end)
          throw PreconditionError("noise_window shorter than the last record time");
        traj = synthesize_trajectory(noise, window, opts.noise_dt, derive_seed(seed, 1));
        shift.noise = &*traj;
        const double fundamental = constants::two_pi / (traj->duration() * 1e-9);
        if (fundamental > noise.omega_low)
          shift.offset = sample_quasistatic(noise, fundamental, derive_seed(seed, 2));
      }
    }
    double* row = samples.data() + i * n_rec * kStride;
    auto store = [&](std::size_t r, const auto& st) {
      const Matrix4c rho = st.rho();
      for (int k = 0; k < 4; ++k) row[r * kStride + k] = rho(k, k).real();
      row[r * kStride + 4] = rho(k1g, k1g).real() + rho(k1e, k1e).real();
    };
    if (opts.relaxation) {
      LindbladStepper st(rho0, channels);
      run_timeline(st, seq, params, opts, shift, records, store);
    } else {
      UnitaryStepper st(rho0);
      run_timeline(st, seq, params, opts, shift, records, store);
    }
  };
  parallel_for(n_traj, opts.threads, trajectory);

  PopulationTrace out;
  out.t = records;
  out.n_traj = opts.n_traj;
  out.mean.resize(n_rec);
  out.stderr_mean.resize(n_rec);
  out.qubit_excited.resize(n_rec);
  out.qubit_excited_stderr.resize(n_rec);
  std::vector<double> column(n_traj);
  const double n = static_cast<double>(n_traj);
  for (std::size_t r = 0; r < n_rec; ++r) {
    for (std::size_t k = 0; k < kStride; ++k) {
      for (std::size_t i = 0; i < n_traj; ++i) column[i] = samples[(i * n_rec + r) * kStride + k];
      const double mean = pairwise_sum(column) / n;
      for (auto& v : column) v = (v - mean) * (v - mean);
      const double se = n_traj > 1 ? std::sqrt(pairwise_sum(column) / (n - 1.0) / n) : 0.0;
      if (k < 4) {
        out.mean[r][k] = mean;
        out.stderr_mean[r][k] = se;
      } else {
        out.qubit_excited[r] = mean;
        out.qubit_excited_stderr[r] = se;
      }
    }
  }
  return out;
}

bool AdiabaticityReport::ok() const {
  return std::none_of(ramps.begin(), ramps.end(),
                      [](const RampReport& r) { return r.violates_lower || r.violates_upper; });
}

AdiabaticityReport adiabaticity_check(const PulseSequence& seq, const DeviceParams& params) {
  AdiabaticityReport rep;
  rep.lower_bound = params.s * params.s;
  rep.upper_bound = std::numeric_limits<double>::infinity();
  for (double lv : seq.levels()) {
    const double f = qubit_frequency(params.phi_star + 1e-3 * lv, params);
    rep.upper_bound = std::min(rep.upper_bound, f * f);
  }
  auto fq = [&](double dphi) { return qubit_frequency(params.phi_star + 1e-3 * dphi, params); };
  auto slope = [&](double dphi) {
    return std::abs(dqubit_frequency_dphi(params.phi_star + 1e-3 * dphi, params)) * 1e-3;
  };

  const auto& segs = seq.segments();
  bool have_level = false;
  double level = 0.0;
  double t = 0.0;
  for (std::size_t i = 0; i < segs.size(); ++i) {
    const auto& s = segs[i];
    const bool flux = s.kind == SegmentKind::FluxHold || s.kind == SegmentKind::FluxRamp;
    if (flux && have_level && s.dphi_target != level) {
      RampReport r;
      r.segment = i;
      r.from = level;
      r.to = s.dphi_target;
      const double df = std::abs(fq(r.to) - fq(r.from));
      double width = 0.0;  // time over which the level changes
      if (s.kind == SegmentKind::FluxRamp) {
        width = s.duration;
      } else if (s.edge.shape == Edge::Shape::Gaussian) {
        width = s.edge.rise_time;
      }
      if (width > 0.0) {
        r.rate_characteristic = df / width;
        // Sample the edge to find the peak instantaneous sweep rate.
        const double half = s.kind == SegmentKind::FluxRamp ? 0.0 : 6.0 * s.edge.sigma();
        const double a = std::max(0.0, t - half);
        const double b = std::min(seq.t_total(), s.kind == SegmentKind::FluxRamp ? t + width : t + half);
        constexpr int kSamples = 400;
        for (int k = 0; k <= kSamples; ++k) {
          const double tk = a + (b - a) * k / kSamples;
          const double rate = slope(flux_profile(seq, tk)) * std::abs(flux_profile_slope(seq, tk));
          r.rate_max = std::max(r.rate_max, rate);
        }
        if (s.kind == SegmentKind::FluxRamp)
          r.rate_max = std::max(r.rate_max, r.rate_characteristic);
      } else {
        r.rate_characteristic = std::numeric_limits<double>::infinity();
        r.rate_max = std::numeric_limits<double>::infinity();
      }
      r.violates_lower = r.rate_characteristic < 10.0 * rep.lower_bound;
      r.violates_upper = r.rate_max > rep.upper_bound / 10.0;
      rep.ramps.push_back(r);
    }
    if (flux) {
      level = s.dphi_target;
      have_level = true;
    }
    t += s.duration;
  }
  if (!rep.ramps.empty()) {
    rep.min_rate = std::numeric_limits<double>::infinity();
    for (const auto& r : rep.ramps) {
      rep.min_rate = std::min(rep.min_rate, r.rate_characteristic);
      rep.max_rate = std::max(rep.max_rate, r.rate_max);
    }
  }
  return rep;
}

std::string to_string(EvolutionMode m) {
  switch (m) {
    case EvolutionMode::Unitary: return "unitary";
    case EvolutionMode::Lindblad: return "lindblad";
    case EvolutionMode::MonteCarlo: return "monte_carlo";
  }
  return "unitary";
}

std::string to_string(Frame f) { return f == Frame::Lab ? "lab" : "tls_rotating"; }

std::string to_string(NoiseSampling s) {
  switch (s) {
    case NoiseSampling::Auto: return "auto";
    case NoiseSampling::Quasistatic: return "quasistatic";
    case NoiseSampling::Synthesized: return "synthesized";
  }
  return "auto";
}

EvolutionMode evolution_mode_from_string(const std::string& s) {
  if (s == "unitary") return EvolutionMode::Unitary;
  if (s == "lindblad") return EvolutionMode::Lindblad;
  if (s == "monte_carlo") return EvolutionMode::MonteCarlo;
  throw ConfigError("evolution.mode", "unknown mode '" + s + "'");
}

Frame frame_from_string(const std::string& s) {
  if (s == "lab") return Frame::Lab;
  if (s == "tls_rotating") return Frame::TlsRotating;
  throw ConfigError("evolution.frame", "unknown frame '" + s + "'");
}

NoiseSampling noise_sampling_from_string(const std::string& s) {
  if (s == "auto") return NoiseSampling::Auto;
  if (s == "quasistatic") return NoiseSampling::Quasistatic;
  if (s == "synthesized") return NoiseSampling::Synthesized;
  throw ConfigError("evolution.sampling", "unknown sampling '" + s + "'");
}

}  // namespace tlsdd
