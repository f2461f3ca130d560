#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "tlsdd/model.hpp"
#include "tlsdd/noise.hpp"
#include "tlsdd/pulse.hpp"

namespace tlsdd {

/// Density matrix over {|0g>, |1g>, |0e>, |1e>}.
class DensityMatrix4 {
 public:
  DensityMatrix4() : m_(Matrix4c::Zero()) { m_(k0g, k0g) = 1.0; }
  explicit DensityMatrix4(const Matrix4c& m) : m_(m) {}

  static DensityMatrix4 basis(BasisState s);
  static DensityMatrix4 from_ket(const Vector4c& psi);

  const Matrix4c& matrix() const { return m_; }
  Matrix4c& matrix() { return m_; }

  double population(BasisState s) const { return m_(s, s).real(); }
  std::array<double, 4> populations() const;
  /// P(qubit excited) = P(|1g>) + P(|1e>).
  double qubit_excited() const { return population(k1g) + population(k1e); }
  Complex trace() const { return m_.trace(); }

  /// Hermitian to 1e-10, unit trace to 1e-10, eigenvalues ≥ −1e-9.
  /// Throws PreconditionError describing the first violation.
  void validate() const;

 private:
  Matrix4c m_;
};

enum class EvolutionMode { Unitary, Lindblad, MonteCarlo };
enum class Frame { Lab, TlsRotating };
enum class NoiseSampling { Auto, Quasistatic, Synthesized };

struct EvolutionOptions {
  double dt = 0.01;  ///< ns, step inside edges and ramps
  EvolutionMode mode = EvolutionMode::Unitary;
  int n_traj = 200;
  Frame frame = Frame::TlsRotating;
  bool ideal_pi = true;

  // Monte Carlo settings
  bool relaxation = false;  ///< evolve each trajectory with the Lindblad channels
  NoiseSampling sampling = NoiseSampling::Auto;
  double noise_dt = 0.5;          ///< ns, hold time of synthesized noise samples
  double noise_window = 0.0;      ///< ns, synthesized window (0: 4× the last record time)
  double qs_cutoff = 0.0;         ///< rad/s, quasi-static cutoff (0: 2π/(2 t_exp))
  double experiment_time = 0.0;   ///< ns, t_exp for the cutoff (0: sequence duration)
  std::uint64_t seed = 0;
  unsigned threads = 0;           ///< 0 = hardware concurrency

  void validate() const;
};

/// Collapse channels. Times in ns; s_perp in rad/s. A zero time means the
/// channel is off (infinite T1).
struct RelaxationChannels {
  double t1_qb = 0.0;
  double t1_tls = 0.0;
  double s_perp = 0.0;

  static RelaxationChannels from(const DeviceParams& params, const WhiteTransverseChannel& ch);
  static RelaxationChannels none() { return {}; }

  double gamma_qb() const { return t1_qb > 0.0 ? 1.0 / t1_qb : 0.0; }
  double gamma_tls() const { return t1_tls > 0.0 ? 1.0 / t1_tls : 0.0; }
  /// Rate of the subspace transverse jump operator, 1/ns: S_⊥/4.
  double gamma_perp() const { return 0.25 * s_perp * 1e-9; }

  /// Throws DomainError for negative entries.
  void validate() const;
};

struct StateTrace {
  std::vector<double> t;
  std::vector<DensityMatrix4> states;
};

struct PopulationTrace {
  std::vector<double> t;
  std::vector<std::array<double, 4>> mean;
  std::vector<std::array<double, 4>> stderr_mean;
  int n_traj = 1;

  /// P(qubit excited) at index i, and its standard error (populations of
  /// |1g> and |1e> summed per trajectory before averaging).
  std::vector<double> qubit_excited;
  std::vector<double> qubit_excited_stderr;
};

/// Largest transition frequency (GHz) of the frame Hamiltonian over every
/// flux level the sequence visits.
double max_frequency(const PulseSequence& seq, const DeviceParams& params, Frame frame);

/// Frame Hamiltonian at flux offset δΦ (µPhi0).
Matrix4c frame_hamiltonian(double dphi, const DeviceParams& params, Frame frame);

/// Times t0, t0+step, ... ≤ t1.
std::vector<double> time_grid(double t0, double t1, double step);

/// Closed-system evolution through `seq`, recording the state at each of
/// `record_times` (sorted, within [0, t_total]; empty = start and end).
/// Requires dt ≤ 0.1/f_max; otherwise throws PreconditionError naming the bound.
StateTrace propagate_piecewise(const DensityMatrix4& rho0, const PulseSequence& seq,
                               const DeviceParams& params, const EvolutionOptions& opts,
                               std::span<const double> record_times = {});

/// Ideal: σx on the qubit. Non-ideal: resonant RWA drive of Rabi frequency
/// 1/(2 t_pi) for t_pi ns, with the given relaxation acting meanwhile.
DensityMatrix4 apply_pi_pulse(const DensityMatrix4& rho, bool ideal, double t_pi = 0.0,
                              const RelaxationChannels& channels = RelaxationChannels::none());

/// Master-equation evolution with qubit and TLS lowering plus the subspace
/// transverse channel. Throws DomainError for negative rates.
StateTrace evolve_lindblad(const DensityMatrix4& rho0, const PulseSequence& seq,
                           const DeviceParams& params, const RelaxationChannels& channels,
                           const EvolutionOptions& opts, std::span<const double> record_times = {});

/// Noise-averaged populations. Each trajectory shifts the flux profile by a
/// quasi-static offset or a synthesized 1/f trajectory (plus a quasi-static
/// part below its fundamental), then evolves unitarily or, with
/// opts.relaxation, under `channels`. Trajectory i uses derive_seed(opts.seed, i).
PopulationTrace run_trajectories(const DensityMatrix4& rho0, const PulseSequence& seq,
                                 const DeviceParams& params, const OneOverFSpectrum& noise,
                                 const RelaxationChannels& channels, const EvolutionOptions& opts,
                                 std::span<const double> record_times);

struct RampReport {
  std::size_t segment = 0;      ///< index of the segment entering the new level
  double from = 0.0;            ///< µPhi0
  double to = 0.0;              ///< µPhi0
  double rate_max = 0.0;        ///< GHz/ns, peak |d f_qb/dt| (infinite for instantaneous edges)
  double rate_characteristic = 0.0;  ///< GHz/ns, |Δf_qb| / rise time
  bool violates_lower = false;  ///< within 10× of S² (or below): adiabatic
  bool violates_upper = false;  ///< within 10× of f_qb² (or above): diabatic beyond the two-level picture
};

struct AdiabaticityReport {
  double lower_bound = 0.0;  ///< S², GHz/ns
  double upper_bound = 0.0;  ///< min f_qb² over the levels, GHz/ns
  std::vector<RampReport> ramps;
  double min_rate = 0.0;
  double max_rate = 0.0;
  bool ok() const;
};

/// Frequency sweep rates of every flux transition, compared with S² ≪ df/dt ≪ f_qb².
AdiabaticityReport adiabaticity_check(const PulseSequence& seq, const DeviceParams& params);

std::string to_string(EvolutionMode m);
std::string to_string(Frame f);
std::string to_string(NoiseSampling s);
EvolutionMode evolution_mode_from_string(const std::string& s);
Frame frame_from_string(const std::string& s);
NoiseSampling noise_sampling_from_string(const std::string& s);

}  // namespace tlsdd
