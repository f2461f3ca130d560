#include "tlsdd/csv.hpp"

#include <cmath>
#include <cstdio>
#include <istream>
#include <sstream>

#include "tlsdd/errors.hpp"

namespace tlsdd::csv {

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

namespace {

void row(std::ostream& os, std::initializer_list<std::string> cells) {
  bool first = true;
  for (const auto& c : cells) {
    if (!first) os << ',';
    os << c;
    first = false;
  }
  os << '\n';
}

}  // namespace

void write_population_trace(std::ostream& os, const PopulationTrace& trace) {
  os << "t_ns,p_0g,p_1g,p_0e,p_1e,stderr_0g,stderr_1g,stderr_0e,stderr_1e\n";
  for (std::size_t i = 0; i < trace.t.size(); ++i) {
    const auto& m = trace.mean[i];
    const auto& s = trace.stderr_mean[i];
    row(os, {format_number(trace.t[i]), format_number(m[0]), format_number(m[1]), format_number(m[2]),
             format_number(m[3]), format_number(s[0]), format_number(s[1]), format_number(s[2]),
             format_number(s[3])});
  }
}

void write_noise_trajectory(std::ostream& os, const NoiseTrajectory& traj) {
  os << "t_ns,dphi_uPhi0\n";
  for (std::size_t i = 0; i < traj.samples.size(); ++i)
    row(os, {format_number(traj.dt * static_cast<double>(i)), format_number(traj.samples[i])});
}

void write_sweep(std::ostream& os, const SweepResult2D& sweep) {
  os << sweep.x_name << '_' << sweep.x_unit << ',' << sweep.y_name << '_' << sweep.y_unit << ','
     << sweep.value_name << ",stderr\n";
  for (std::size_t ix = 0; ix < sweep.x_axis.size(); ++ix)
    for (std::size_t iy = 0; iy < sweep.y_axis.size(); ++iy)
      row(os, {format_number(sweep.x_axis[ix]), format_number(sweep.y_axis[iy]),
               format_number(sweep.values[ix][iy]), format_number(sweep.stderr_values[ix][iy])});
}

void write_coherence_trace(std::ostream& os, const CoherenceTrace& trace, const std::string& extra_header,
                           const std::string& extra_value) {
  if (!extra_header.empty()) os << extra_header << ',';
  os << trace.axis_name << "_ns,visibility,stderr\n";
  for (std::size_t i = 0; i < trace.t.size(); ++i) {
    if (!extra_header.empty()) os << extra_value << ',';
    row(os, {format_number(trace.t[i]), format_number(trace.visibility[i]),
             format_number(trace.stderr_visibility[i])});
  }
}

void write_fit_rows(std::ostream& os, std::span<const FitRow> rows) {
  os << "dphi_uPhi0,N,f_osc_GHz,t1_tilde_ns,t_phi_ns,t_e_ns,residual_rms\n";
  for (const auto& r : rows)
    row(os, {format_number(r.dphi), std::to_string(r.n_pulses), format_number(r.f_osc),
             format_number(r.fit.t1_tilde), format_number(r.fit.t_phi), format_number(r.fit.t_e),
             format_number(r.fit.residual_rms)});
}

std::size_t Table::column(const std::string& name) const {
  for (std::size_t i = 0; i < header.size(); ++i)
    if (header[i] == name) return i;
  throw DomainError("csv: no column named '" + name + "'");
}

Table read_table(std::istream& is) {
  Table t;
  std::string line;
  auto split = [](const std::string& l) {
    std::vector<std::string> cells;
    std::stringstream ss(l);
    std::string c;
    while (std::getline(ss, c, ',')) cells.push_back(c);
    return cells;
  };
  if (!std::getline(is, line)) throw DomainError("csv: empty input");
  t.header = split(line);
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    const auto cells = split(line);
    if (cells.size() != t.header.size()) throw DomainError("csv: ragged row");
    std::vector<double> r;
    for (const auto& c : cells) r.push_back(std::stod(c));
    t.rows.push_back(std::move(r));
  }
  return t;
}

}  // namespace tlsdd::csv
