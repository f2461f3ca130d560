#pragma once

#include <string>
#include <utility>
#include <vector>

namespace tlsdd {

enum class SegmentKind { FluxHold, FluxRamp, QubitPiPulse, ReadoutMarker };

/// Shape of the transition into a segment's flux level.
struct Edge {
  enum class Shape { Instantaneous, Gaussian };
  Shape shape = Shape::Instantaneous;
  double rise_time = 0.0;  ///< 10–90 % rise time, ns (Gaussian only)

  static Edge instantaneous() { return {}; }
  static Edge gaussian(double rise_time_ns) { return {Shape::Gaussian, rise_time_ns}; }

  /// Width of the error-function step: 10–90 % = 2·1.2815516·σ.
  double sigma() const;
};

struct PulseSegment {
  SegmentKind kind = SegmentKind::FluxHold;
  double dphi_target = 0.0;  ///< µPhi0, flux kinds only
  double duration = 0.0;     ///< ns
  Edge edge{};

  static PulseSegment hold(double dphi, double duration, Edge edge = {});
  static PulseSegment ramp(double dphi, double duration);
  static PulseSegment pi_pulse(double duration = 0.0);
  static PulseSegment readout();
};

/// A control program: flux levels are held, ramped, or stepped (with the
/// entering segment's edge); π pulses act on the qubit at the current level.
///
/// Flux holds switch level at their start time with an error-function step
/// centred on that time; ramps interpolate linearly from the level reached at
/// their start. The profile before the first flux segment is that segment's level.
class PulseSequence {
 public:
  PulseSequence() = default;
  explicit PulseSequence(std::vector<PulseSegment> segments);

  /// Appends before the readout marker if one is already present.
  PulseSequence& add(const PulseSegment& segment);

  const std::vector<PulseSegment>& segments() const { return segments_; }
  double t_total() const;

  /// Exactly one readout marker, positioned last; non-negative durations;
  /// Gaussian edges with rise_time > 0; at least one flux segment.
  /// Throws ScheduleError.
  void validate() const;

  /// Start time of segment i.
  double start_time(std::size_t i) const;

  /// Times of the π pulses (their start times).
  std::vector<double> pi_pulse_times() const;

  /// Time intervals where the profile is not piecewise constant (edges and
  /// ramps), merged and sorted.
  std::vector<std::pair<double, double>> varying_intervals() const;

  /// All flux levels visited (segment targets).
  std::vector<double> levels() const;

 private:
  struct Step {
    double time;
    double from;
    double to;
    Edge edge;
  };
  struct Ramp {
    double t0, t1, from, to;
  };
  void rebuild();

  std::vector<PulseSegment> segments_;
  double base_level_ = 0.0;
  std::vector<Step> steps_;
  std::vector<Ramp> ramps_;

  friend double flux_profile(const PulseSequence& seq, double t);
  friend double flux_profile_slope(const PulseSequence& seq, double t);
};

/// δΦ(t) in µPhi0. Throws DomainError outside [0, t_total].
double flux_profile(const PulseSequence& seq, double t);

/// dδΦ/dt in µPhi0 per ns (analytic).
double flux_profile_slope(const PulseSequence& seq, double t);

std::string to_string(SegmentKind kind);
SegmentKind segment_kind_from_string(const std::string& name);

}  // namespace tlsdd
