#include "tlsdd/pulse.hpp"

#include <algorithm>
#include <cmath>

#include "tlsdd/constants.hpp"
#include "tlsdd/errors.hpp"

namespace tlsdd {

namespace {

// Gaussian edges are truncated at this many σ so the profile is exactly
// piecewise constant outside the edge windows (residual step < 1e-9).
constexpr double kEdgeHalfWidthSigmas = 6.0;
constexpr double kTenNinetyHalfWidth = 1.2815515655446004;  // Φ⁻¹(0.9)

double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }

bool is_flux(SegmentKind k) { return k == SegmentKind::FluxHold || k == SegmentKind::FluxRamp; }

}  // namespace

double Edge::sigma() const { return rise_time / (2.0 * kTenNinetyHalfWidth); }

PulseSegment PulseSegment::hold(double dphi, double duration, Edge edge) {
  return {SegmentKind::FluxHold, dphi, duration, edge};
}

PulseSegment PulseSegment::ramp(double dphi, double duration) {
  return {SegmentKind::FluxRamp, dphi, duration, Edge::instantaneous()};
}

PulseSegment PulseSegment::pi_pulse(double duration) {
  return {SegmentKind::QubitPiPulse, 0.0, duration, Edge::instantaneous()};
}

PulseSegment PulseSegment::readout() { return {SegmentKind::ReadoutMarker, 0.0, 0.0, {}}; }

PulseSequence::PulseSequence(std::vector<PulseSegment> segments) : segments_(std::move(segments)) {
  rebuild();
}

PulseSequence& PulseSequence::add(const PulseSegment& segment) {
  if (!segments_.empty() && segments_.back().kind == SegmentKind::ReadoutMarker &&
      segment.kind != SegmentKind::ReadoutMarker) {
    segments_.insert(segments_.end() - 1, segment);
  } else {
    segments_.push_back(segment);
  }
  rebuild();
  return *this;
}

double PulseSequence::t_total() const {
  double t = 0.0;
  for (const auto& s : segments_) t += s.duration;
  return t;
}

double PulseSequence::start_time(std::size_t i) const {
  double t = 0.0;
  for (std::size_t k = 0; k < i && k < segments_.size(); ++k) t += segments_[k].duration;
  return t;
}

void PulseSequence::validate() const {
  int readouts = 0;
  bool any_flux = false;
  for (std::size_t i = 0; i < segments_.size(); ++i) {
    const auto& s = segments_[i];
    if (!std::isfinite(s.duration) || s.duration < 0.0)
      throw ScheduleError("segment " + std::to_string(i) + ": duration must be >= 0");
    if (s.edge.shape == Edge::Shape::Gaussian && !(s.edge.rise_time > 0.0))
      throw ScheduleError("segment " + std::to_string(i) + ": gaussian rise_time must be > 0");
    if (s.kind == SegmentKind::FluxRamp && s.edge.shape != Edge::Shape::Instantaneous)
      throw ScheduleError("segment " + std::to_string(i) + ": flux_ramp takes no edge shape");
    if (s.kind == SegmentKind::ReadoutMarker) {
      ++readouts;
      if (i + 1 != segments_.size())
        throw ScheduleError("readout_marker must be the last segment");
    }
    any_flux = any_flux || is_flux(s.kind);
  }
  if (readouts != 1) throw ScheduleError("sequence needs exactly one readout_marker");
  if (!any_flux) throw ScheduleError("sequence has no flux segment");
}

void PulseSequence::rebuild() {
  steps_.clear();
  ramps_.clear();
  base_level_ = 0.0;
  bool have_level = false;
  double level = 0.0;
  double t = 0.0;
  for (const auto& s : segments_) {
    if (s.kind == SegmentKind::FluxHold) {
      if (!have_level) {
        base_level_ = level = s.dphi_target;
        have_level = true;
      } else if (s.dphi_target != level) {
        steps_.push_back({t, level, s.dphi_target, s.edge});
        level = s.dphi_target;
      }
    } else if (s.kind == SegmentKind::FluxRamp) {
      if (!have_level) {
        base_level_ = level = s.dphi_target;
        have_level = true;
      } else if (s.dphi_target != level) {
        if (s.duration > 0.0) {
          ramps_.push_back({t, t + s.duration, level, s.dphi_target});
        } else {
          steps_.push_back({t, level, s.dphi_target, Edge::instantaneous()});
        }
        level = s.dphi_target;
      }
    }
    t += s.duration;
  }
}

std::vector<double> PulseSequence::pi_pulse_times() const {
  std::vector<double> out;
  double t = 0.0;
  for (const auto& s : segments_) {
    if (s.kind == SegmentKind::QubitPiPulse) out.push_back(t);
    t += s.duration;
  }
  return out;
}

std::vector<std::pair<double, double>> PulseSequence::varying_intervals() const {
  const double total = t_total();
  std::vector<std::pair<double, double>> raw;
  for (const auto& st : steps_) {
    if (st.edge.shape != Edge::Shape::Gaussian) continue;
    const double w = kEdgeHalfWidthSigmas * st.edge.sigma();
    raw.emplace_back(std::max(0.0, st.time - w), std::min(total, st.time + w));
  }
  for (const auto& r : ramps_) raw.emplace_back(r.t0, r.t1);
  std::sort(raw.begin(), raw.end());
  std::vector<std::pair<double, double>> merged;
  for (const auto& iv : raw) {
    if (iv.second <= iv.first) continue;
    if (!merged.empty() && iv.first <= merged.back().second) {
      merged.back().second = std::max(merged.back().second, iv.second);
    } else {
      merged.push_back(iv);
    }
  }
  return merged;
}

std::vector<double> PulseSequence::levels() const {
  std::vector<double> out;
  for (const auto& s : segments_)
    if (is_flux(s.kind)) out.push_back(s.dphi_target);
  return out;
}

double flux_profile(const PulseSequence& seq, double t) {
  const double total = seq.t_total();
  if (!(t >= 0.0 && t <= total)) throw DomainError("flux_profile: t outside [0, t_total]");
  double v = seq.base_level_;
  for (const auto& st : seq.steps_) {
    const double jump = st.to - st.from;
    if (st.edge.shape == Edge::Shape::Gaussian) {
      const double sigma = st.edge.sigma();
      const double z = (t - st.time) / sigma;
      if (z >= kEdgeHalfWidthSigmas) {
        v += jump;
      } else if (z > -kEdgeHalfWidthSigmas) {
        v += jump * normal_cdf(z);
      }
    } else if (t >= st.time) {
      v += jump;
    }
  }
  for (const auto& r : seq.ramps_) {
    const double frac = std::clamp((t - r.t0) / (r.t1 - r.t0), 0.0, 1.0);
    v += (r.to - r.from) * frac;
  }
  return v;
}

double flux_profile_slope(const PulseSequence& seq, double t) {
  double slope = 0.0;
  for (const auto& st : seq.steps_) {
    if (st.edge.shape != Edge::Shape::Gaussian) continue;
    const double sigma = st.edge.sigma();
    const double z = (t - st.time) / sigma;
    if (std::abs(z) < kEdgeHalfWidthSigmas)
      slope += (st.to - st.from) * std::exp(-0.5 * z * z) / (sigma * std::sqrt(constants::two_pi));
  }
  for (const auto& r : seq.ramps_)
    if (t > r.t0 && t < r.t1) slope += (r.to - r.from) / (r.t1 - r.t0);
  return slope;
}

std::string to_string(SegmentKind kind) {
  switch (kind) {
    case SegmentKind::FluxHold: return "flux_hold";
    case SegmentKind::FluxRamp: return "flux_ramp";
    case SegmentKind::QubitPiPulse: return "qubit_pi_pulse";
    case SegmentKind::ReadoutMarker: return "readout_marker";
  }
  return "unknown";
}

SegmentKind segment_kind_from_string(const std::string& name) {
  if (name == "flux_hold") return SegmentKind::FluxHold;
  if (name == "flux_ramp") return SegmentKind::FluxRamp;
  if (name == "qubit_pi_pulse") return SegmentKind::QubitPiPulse;
  if (name == "readout_marker") return SegmentKind::ReadoutMarker;
  throw ScheduleError("unknown segment kind '" + name + "'");
}

}  // namespace tlsdd
