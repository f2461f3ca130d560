#pragma once

#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "tlsdd/analysis.hpp"
#include "tlsdd/dynamics.hpp"
#include "tlsdd/noise.hpp"
#include "tlsdd/protocols.hpp"

namespace tlsdd::csv {

// UTF-8, ',' delimiter, header row, '\n' line endings. Numbers use a fixed
// "%.10g" rendering so identical inputs give identical bytes.

std::string format_number(double v);

/// t_ns, p_0g, p_1g, p_0e, p_1e, stderr_0g, stderr_1g, stderr_0e, stderr_1e
void write_population_trace(std::ostream& os, const PopulationTrace& trace);

/// t_ns, dphi_uPhi0
void write_noise_trajectory(std::ostream& os, const NoiseTrajectory& traj);

/// <x_name>_<x_unit>, <y_name>_<y_unit>, <value_name>, stderr (one row per grid point)
void write_sweep(std::ostream& os, const SweepResult2D& sweep);

/// <axis>_ns, visibility, stderr
void write_coherence_trace(std::ostream& os, const CoherenceTrace& trace, const std::string& extra_header = "",
                           const std::string& extra_value = "");

struct FitRow {
  double dphi = 0.0;
  int n_pulses = 0;
  double f_osc = 0.0;
  DecayFit fit{};
};

/// dphi_uPhi0, N, f_osc_GHz, t1_tilde_ns, t_phi_ns, t_e_ns, residual_rms
void write_fit_rows(std::ostream& os, std::span<const FitRow> rows);

/// Minimal RFC 4180 reader for numeric tables: header names and rows of doubles.
struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;
  std::size_t column(const std::string& name) const;
};
Table read_table(std::istream& is);

}  // namespace tlsdd::csv
