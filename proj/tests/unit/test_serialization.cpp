#include <sstream>

#include <gtest/gtest.h>

#include "tlsdd/csv.hpp"
#include "tlsdd/errors.hpp"
#include "tlsdd/serialization.hpp"

using namespace tlsdd;
using nlohmann::json;

namespace {

std::string error_path(auto&& fn) {
  try {
    fn();
  } catch (const ConfigError& e) {
    return e.path();
  }
  return "<no error>";
}

}  // namespace

TEST(DeviceJson, RoundTrip) {
  auto p = DeviceParams::defaults();
  p.s = 0.08;
  auto q = device_from_json(to_json(p));
  EXPECT_NEAR(q.s, 0.08, 1e-15);
  EXPECT_NEAR(q.delta, p.delta, 1e-12);
  EXPECT_NEAR(q.f_tls, p.f_tls, 1e-12);
  EXPECT_NEAR(q.phi_star, p.phi_star, 1e-12);
  EXPECT_DOUBLE_EQ(q.t1_qb, p.t1_qb);
}

TEST(DeviceJson, SiUnits) {
  auto j = to_json(DeviceParams::defaults());
  EXPECT_NEAR(j.at("delta").get<double>(), 5.4e9, 1.0);
  EXPECT_NEAR(j.at("phi_star").get<double>(), -4.15e-3, 1e-15);
  EXPECT_DOUBLE_EQ(j.at("t1_qb").get<double>(), 10e-6);
}

TEST(DeviceJson, StrictReader) {
  EXPECT_EQ(error_path([] { device_from_json(json{{"t1_qb", -1.0}}); }), "device.t1_qb");
  EXPECT_EQ(error_path([] { device_from_json(json{{"bogus", 1}}); }), "device.bogus");
  EXPECT_EQ(error_path([] { device_from_json(json{{"delta", "big"}}); }), "device.delta");
  EXPECT_EQ(error_path([] { device_from_json(json::array()); }), "device");
}

TEST(NoiseJson, RoundTripAndValidation) {
  NoiseConfig n;
  n.spectrum.a_phi = 2.5;
  n.transverse.s_perp = 1e6;
  auto m = noise_from_json(to_json(n));
  EXPECT_DOUBLE_EQ(m.spectrum.a_phi, 2.5);
  EXPECT_DOUBLE_EQ(m.transverse.s_perp, 1e6);
  EXPECT_EQ(error_path([] { noise_from_json(json{{"a_phi", -1.0}}); }), "noise.a_phi");
}

TEST(EvolutionJson, EnumsAndRoundTrip) {
  EvolutionOptions o;
  o.mode = EvolutionMode::MonteCarlo;
  o.sampling = NoiseSampling::Synthesized;
  o.frame = Frame::Lab;
  o.dt = 0.002;
  auto p = evolution_from_json(to_json(o));
  EXPECT_EQ(p.mode, EvolutionMode::MonteCarlo);
  EXPECT_EQ(p.sampling, NoiseSampling::Synthesized);
  EXPECT_EQ(p.frame, Frame::Lab);
  EXPECT_DOUBLE_EQ(p.dt, 0.002);
  EXPECT_EQ(error_path([] { evolution_from_json(json{{"mode", "quantum"}}); }), "evolution.mode");
  EXPECT_EQ(error_path([] { evolution_from_json(json{{"dt", 0.0}}); }), "evolution.dt");
}

TEST(SettingsJson, PhaseCycleFlag) {
  SequenceSettings s;
  EXPECT_TRUE(s.phase_cycle);
  s.phase_cycle = false;
  s.tau_refocus = 0.9;
  auto j = to_json(s);
  EXPECT_EQ(j.at("phase_cycle"), false);
  auto t = settings_from_json(j);
  EXPECT_FALSE(t.phase_cycle);
  EXPECT_DOUBLE_EQ(t.refocus_duration(), 0.9);
  EXPECT_EQ(error_path([] { settings_from_json(json{{"phase_cycle", 3}}); }), "sequence.phase_cycle");
}

TEST(SequenceJson, RoundTrip) {
  PulseSequence seq({PulseSegment::hold(1200.0, 5.0), PulseSegment::pi_pulse(),
                     PulseSegment::hold(-72.0, 30.0, Edge::gaussian(1.5)), PulseSegment::ramp(10.0, 4.0),
                     PulseSegment::readout()});
  auto back = sequence_from_json(to_json(seq));
  ASSERT_EQ(back.segments().size(), seq.segments().size());
  for (std::size_t i = 0; i < seq.segments().size(); ++i) {
    EXPECT_EQ(back.segments()[i].kind, seq.segments()[i].kind);
    EXPECT_DOUBLE_EQ(back.segments()[i].duration, seq.segments()[i].duration);
    EXPECT_DOUBLE_EQ(back.segments()[i].dphi_target, seq.segments()[i].dphi_target);
    EXPECT_EQ(back.segments()[i].edge.shape, seq.segments()[i].edge.shape);
  }
  json bad = to_json(seq);
  bad["segments"].erase(bad["segments"].size() - 1);
  EXPECT_THROW(sequence_from_json(bad), ConfigError);
}

TEST(Csv, NoiseTrajectoryTwoColumns) {
  NoiseTrajectory tr{0.5, {1.0, -2.0, 0.25}};
  std::ostringstream os;
  csv::write_noise_trajectory(os, tr);
  std::istringstream is(os.str());
  auto table = csv::read_table(is);
  ASSERT_EQ(table.header.size(), 2u);
  EXPECT_EQ(table.header[0], "t_ns");
  EXPECT_EQ(table.header[1], "dphi_uPhi0");
  ASSERT_EQ(table.rows.size(), 3u);
  EXPECT_DOUBLE_EQ(table.rows[1][0], 0.5);
  EXPECT_DOUBLE_EQ(table.rows[1][1], -2.0);
}

TEST(Csv, NumbersKeepTenSignificantDigits) {
  for (double v : {0.1, 1.0 / 3.0, -7.25e-12, 6.02e23}) EXPECT_NEAR(std::stod(csv::format_number(v)) / v, 1.0, 1e-9);
  EXPECT_EQ(csv::format_number(0.25), "0.25");
}
