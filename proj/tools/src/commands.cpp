#include "tlsdd_cli/commands.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <memory>
#include <sstream>

#include <openssl/evp.h>

#include <CLI11.hpp>

#include "plot_scripts.hpp"
#include "tlsdd/analysis.hpp"
#include "tlsdd/csv.hpp"
#include "tlsdd/errors.hpp"

#ifndef TLSDD_VERSION
#define TLSDD_VERSION "0.0.0"
#endif
#ifndef TLSDD_CONFIG_DIR
#define TLSDD_CONFIG_DIR "configs"
#endif

namespace tlsdd::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

void write_file(const fs::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write '" + path.string() + "'");
  out << content;
  if (!out) throw std::runtime_error("write failed for '" + path.string() + "'");
}

std::string utc_timestamp() {
  const std::time_t now = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

double model_t1(const ExperimentConfig& c) {
  return c.evolution.relaxation ? t1_tilde_from_rates(c.device, c.noise.transverse)
                                : std::numeric_limits<double>::infinity();
}

struct Artifacts {
  std::vector<std::pair<std::string, std::string>> files;  // name, content
  json extra = json::object();
};

Artifacts run_swap(const ExperimentConfig& c, const SwapSpectroscopyParams& p, std::ostream& log) {
  log << "swap_spectroscopy: " << p.dphi.size() << " x " << p.tau1.size() << " points\n";
  const auto res = swap_spectroscopy(p.dphi, p.tau1, context_for(c));
  std::ostringstream os;
  csv::write_sweep(os, res);
  return {{{"swap_spectroscopy.csv", os.str()}}};
}

Artifacts run_echo(const ExperimentConfig& c, const EchoParams& p, std::ostream& log) {
  std::ostringstream os;
  bool first = true;
  for (int n : p.n_refocus) {
    log << "echo: N = " << n << ", " << p.tau2.size() << " points\n";
    const auto tr = echo_experiment(p.dphi, p.tau1, p.tau2, n, context_for(c));
    std::ostringstream one;
    csv::write_coherence_trace(one, tr, "n_refocus", std::to_string(n));
    std::string text = one.str();
    if (!first) text = text.substr(text.find('\n') + 1);
    os << text;
    first = false;
  }
  return {{{"echo.csv", os.str()}}};
}

Artifacts run_calibration(const ExperimentConfig& c, const CalibrationParams& p, std::ostream& log) {
  log << "calibrate_refocus: " << p.tau_refocus.size() << " x " << p.tau2.size() << " points\n";
  const auto res = calibrate_refocus(p.dphi, p.tau1, p.tau_refocus, p.tau2, p.detune, context_for(c));
  std::ostringstream os;
  csv::write_sweep(os, res);
  // Marginal maxima along τ_refocus (mean over τ₂), the quantity read off the calibration map.
  std::vector<double> mean(res.x_axis.size(), 0.0);
  for (std::size_t ix = 0; ix < res.x_axis.size(); ++ix) {
    for (double v : res.values[ix]) mean[ix] += v;
    mean[ix] /= static_cast<double>(res.y_axis.size());
  }
  json maxima = json::array();
  for (std::size_t i = 1; i + 1 < mean.size(); ++i)
    if (mean[i] > mean[i - 1] && mean[i] >= mean[i + 1]) maxima.push_back(res.x_axis[i]);
  Artifacts a{{{"calibrate_refocus.csv", os.str()}}};
  a.extra["visibility_maxima_ns"] = maxima;
  return a;
}

std::vector<double> cp_grid(const ExperimentConfig& c, const CpParams& p, double dphi, int n) {
  if (!p.t.explicit_grid.empty()) return p.t.explicit_grid;
  const double te = predicted_te(n, dphi, c.noise.spectrum, c.device, model_t1(c));
  if (!std::isfinite(te))
    throw ScheduleError("cp_sequence: predicted T_e is infinite at dphi = " + csv::format_number(dphi) +
                        " uPhi0; give an explicit time grid");
  return cp_commensurate_times(n, dphi, p.t.start * te, p.t.stop * te, p.t.points, c.device, c.settings);
}

Artifacts run_cp(const ExperimentConfig& c, const CpParams& p, std::ostream& log) {
  std::ostringstream traces;
  traces << "dphi_uPhi0,N,t_ns,visibility,stderr\n";
  std::vector<csv::FitRow> fit_rows;
  std::vector<DecayPoint> points;
  json failures = json::array();
  std::uint64_t index = 0;
  for (double dphi : p.dphi) {
    for (int n : p.n_pulses) {
      const auto grid = cp_grid(c, p, dphi, n);
      log << "cp_sequence: dphi = " << dphi << ", N = " << n << ", " << grid.size() << " points\n";
      auto ctx = context_for(c);
      ctx.evolution.seed = derive_seed(c.seed, index++);
      const auto tr = cp_sequence(dphi, n, grid, ctx);
      for (std::size_t i = 0; i < tr.t.size(); ++i)
        traces << csv::format_number(dphi) << ',' << n << ',' << csv::format_number(tr.t[i]) << ','
               << csv::format_number(tr.visibility[i]) << ',' << csv::format_number(tr.stderr_visibility[i])
               << '\n';
      csv::FitRow row;
      row.dphi = dphi;
      row.n_pulses = n;
      row.f_osc = f_osc(detuning(dphi, c.device), c.device.s);
      // With refocusing, early points still carry a non-refocused component
      // that dephases on the free-decay scale; the fit starts at the maximum.
      std::size_t first = 0;
      if (n > 0) {
        first = static_cast<std::size_t>(std::max_element(tr.visibility.begin(), tr.visibility.end()) -
                                         tr.visibility.begin());
        if (tr.t.size() - first < 6) first = tr.t.size() >= 6 ? tr.t.size() - 6 : 0;
      }
      const std::span<const double> ft(tr.t.data() + first, tr.t.size() - first);
      const std::span<const double> fh(tr.visibility.data() + first, tr.visibility.size() - first);
      try {
        row.fit = fit_decay(ft, fh, p.fix_t1);
      } catch (const DomainError& e) {
        row.fit.t1_tilde = row.fit.t_phi = row.fit.t_e = std::numeric_limits<double>::quiet_NaN();
        row.fit.message = e.what();
      }
      if (row.fit.converged && std::isfinite(row.fit.t_e)) {
        points.push_back({dphi, n, row.fit.t_e});
      } else {
        failures.push_back({{"dphi", dphi}, {"N", n}, {"message", row.fit.message}});
      }
      fit_rows.push_back(row);
    }
  }
  std::ostringstream fits;
  csv::write_fit_rows(fits, fit_rows);
  Artifacts a{{{"cp_sequence.csv", traces.str()}, {"cp_sequence_fits.csv", fits.str()}}};
  const double t1 = p.fix_t1 ? *p.fix_t1 : model_t1(c);
  json report = {{"t1_tilde_ns", std::isfinite(t1) ? json(t1) : json("inf")}, {"fit_failures", failures}};
  try {
    const auto cmp = compare_to_model(points, c.noise.spectrum, c.device, t1);
    report["a_phi_best"] = cmp.a_phi_best;
    report["a_phi_reference"] = cmp.a_phi_reference;
    report["relative_deviation"] = cmp.relative_deviation;
    report["rms_log_residual"] = cmp.rms_log_residual;
    json rows = json::array();
    for (const auto& r : cmp.rows)
      rows.push_back({{"dphi", r.dphi}, {"N", r.n_pulses}, {"t_e_measured", r.t_e_measured},
                      {"t_e_predicted", r.t_e_predicted}});
    report["rows"] = rows;
  } catch (const PreconditionError& e) {
    report["skipped"] = e.what();
  }
  a.files.emplace_back("model_report.json", report.dump(2) + "\n");
  return a;
}

std::string predict_table(const ExperimentConfig& c) {
  const double t1 = t1_tilde_from_rates(c.device, c.noise.transverse);
  std::ostringstream os;
  os << "dphi_uPhi0,N,f_osc_GHz,t1_tilde_ns,t_phi_ns,t_e_ns\n";
  for (double dphi : c.predict.dphi) {
    for (int n : c.predict.n_pulses) {
      const double tphi = c.predict.total_time > 0.0
                              ? predicted_tphi(n, dphi, c.predict.total_time, c.noise.spectrum, c.device)
                              : predicted_tphi_at_scale(n, dphi, c.noise.spectrum, c.device);
      os << csv::format_number(dphi) << ',' << n << ','
         << csv::format_number(f_osc(detuning(dphi, c.device), c.device.s)) << ',' << csv::format_number(t1)
         << ',' << csv::format_number(tphi) << ',' << csv::format_number(envelope_te(t1, tphi)) << '\n';
    }
  }
  return os.str();
}

fs::path output_dir(const ExperimentConfig& c) {
  fs::create_directories(c.output_dir);
  return c.output_dir;
}

}  // namespace

ExperimentConfig load_config(const CommandOptions& opts, std::string* raw) {
  if (opts.config.empty()) throw ConfigError("config", "no config file given (--config)");
  auto cfg = config_from_json(read_json_file(opts.config, raw));
  if (opts.seed) cfg.seed = *opts.seed;
  if (opts.out) cfg.output_dir = *opts.out;
  return cfg;
}

std::vector<fs::path> run(const CommandOptions& opts, std::ostream& log) {
  std::string raw;
  auto cfg = load_config(opts, &raw);
  const json echo = to_json(cfg);
  // Thread count changes wall time only, so it stays out of the echoed config.
  if (opts.threads) cfg.evolution.threads = *opts.threads;

  Artifacts a = std::visit(
      [&](const auto& p) -> Artifacts {
        using T = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<T, SwapSpectroscopyParams>) return run_swap(cfg, p, log);
        if constexpr (std::is_same_v<T, EchoParams>) return run_echo(cfg, p, log);
        if constexpr (std::is_same_v<T, CalibrationParams>) return run_calibration(cfg, p, log);
        if constexpr (std::is_same_v<T, CpParams>) return run_cp(cfg, p, log);
      },
      cfg.protocol);
  const std::string protocol = protocol_name(cfg.protocol);
  if (protocol == "cp_sequence") a.files.emplace_back("predict.csv", predict_table(cfg));
  a.files.emplace_back("plot_" + protocol + ".py", plot_script(protocol));

  json meta = {{"tool", "tlsdd"},
               {"version", TLSDD_VERSION},
               {"protocol", protocol},
               {"seed", cfg.seed},
               {"config_sha1", git_blob_sha1(raw)},
               {"config", echo},
               {"results", a.extra},
               {"timestamp_utc", utc_timestamp()}};
  json names = json::array();
  for (const auto& f : a.files) names.push_back(f.first);
  meta["outputs"] = names;

  const fs::path dir = output_dir(cfg);
  std::vector<fs::path> written;
  for (const auto& [name, content] : a.files) {
    write_file(dir / name, content);
    written.push_back(dir / name);
  }
  write_file(dir / "metadata.json", meta.dump(2) + "\n");
  written.push_back(dir / "metadata.json");
  return written;
}

std::vector<fs::path> predict(const CommandOptions& opts, std::ostream& log) {
  const auto cfg = load_config(opts);
  const std::string table = predict_table(cfg);
  log << table;
  const fs::path dir = output_dir(cfg);
  write_file(dir / "predict.csv", table);
  return {dir / "predict.csv"};
}

void validate(const CommandOptions& opts, std::ostream& log) {
  const auto cfg = load_config(opts);
  log << "ok: " << protocol_name(cfg.protocol) << " config, seed " << cfg.seed << '\n';
}

const std::vector<FigureInfo>& figures() {
  static const std::vector<FigureInfo> list{
      {"fig1_chevron", "swap_spectroscopy", "qubit-TLS swap oscillations versus flux detuning and tau1"},
      {"fig2_echo", "echo", "free decay and single-pulse echo at -72 uPhi0, tau1 = 100 ns"},
      {"fig3_calibration", "calibrate_refocus", "echo visibility versus refocusing pulse length"},
      {"fig4_cp", "cp_sequence", "Carr-Purcell decay times versus flux detuning for N = 0, 1, 2, 4"}};
  return list;
}

void list_figures(std::ostream& log, const fs::path& config_dir) {
  for (const auto& f : figures()) {
    const fs::path path = config_dir / (f.name + ".json");
    log << f.name << "  " << f.protocol << "  " << path.string() << (fs::exists(path) ? "" : " (missing)")
        << "\n    " << f.description << '\n';
  }
}

fs::path bundled_config_dir() {
  if (const char* env = std::getenv("TLSDD_CONFIG_DIR")) return env;
  return TLSDD_CONFIG_DIR;
}

std::string git_blob_sha1(std::string_view content) {
  const std::string header = "blob " + std::to_string(content.size()) + std::string(1, '\0');
  std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(), &EVP_MD_CTX_free);
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (!ctx || EVP_DigestInit_ex(ctx.get(), EVP_sha1(), nullptr) != 1 ||
      EVP_DigestUpdate(ctx.get(), header.data(), header.size()) != 1 ||
      EVP_DigestUpdate(ctx.get(), content.data(), content.size()) != 1 ||
      EVP_DigestFinal_ex(ctx.get(), digest, &len) != 1)
    throw std::runtime_error("SHA-1 digest failed");
  std::string hex;
  char buf[3];
  for (unsigned int i = 0; i < len; ++i) {
    std::snprintf(buf, sizeof buf, "%02x", digest[i]);
    hex += buf;
  }
  return hex;
}

int main_entry(int argc, char** argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Flux qubit / two-level-system coherence simulator"};
  app.require_subcommand(1);
  app.set_version_flag("--version", TLSDD_VERSION);

  CommandOptions opts;
  std::uint64_t seed = 0;
  unsigned threads = 0;
  std::string out_dir;
  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", opts.config, "experiment config (JSON)")->required();
    sub->add_option("--seed", seed, "master seed (overrides the config)");
    sub->add_option("--threads", threads, "worker threads (0 = hardware concurrency)");
    sub->add_option("--out", out_dir, "output directory (overrides the config)");
  };
  auto* run_cmd = app.add_subcommand("run", "simulate the configured protocol and write artifacts");
  auto* predict_cmd = app.add_subcommand("predict", "tabulate analytic predictions without simulation");
  auto* validate_cmd = app.add_subcommand("validate", "check a config without running it");
  auto* list_cmd = app.add_subcommand("list-figures", "list the bundled figure configs");
  for (auto* sub : {run_cmd, predict_cmd, validate_cmd}) add_common(sub);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitConfig;
  }
  for (auto* sub : {run_cmd, predict_cmd, validate_cmd}) {
    if (!sub->parsed()) continue;
    if (sub->count("--seed")) opts.seed = seed;
    if (sub->count("--threads")) opts.threads = threads;
    if (sub->count("--out")) opts.out = out_dir;
  }

  try {
    if (run_cmd->parsed()) {
      for (const auto& f : run(opts, err)) out << f.string() << '\n';
    } else if (predict_cmd->parsed()) {
      predict(opts, out);
    } else if (validate_cmd->parsed()) {
      validate(opts, out);
    } else if (list_cmd->parsed()) {
      list_figures(out, bundled_config_dir());
    }
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitRuntime;
  }
  return kExitOk;
}

}  // namespace tlsdd::cli
