#include "nfres/cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <sstream>

#include "nfres/cavity.hpp"
#include "nfres/constants.hpp"
#include "nfres/cqed.hpp"
#include "nfres/errors.hpp"
#include "nfres/fibermode.hpp"
#include "nfres/io/config_file.hpp"
#include "nfres/io/report.hpp"
#include "nfres/io/scan_file.hpp"
#include "nfres/io/svg_plot.hpp"
#include "nfres/scanforge.hpp"
#include "nfres/specfit.hpp"
#include "nfres/spectrum.hpp"
#include "nfres/thermo.hpp"

namespace nfres::cli {

namespace {

using constants::speed_of_light;

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.10g", v);
  return buf;
}

// Shared state assembled before a subcommand runs.
struct Context {
  io::ToolkitConfig config;
  std::string config_path;   // empty = built-in defaults
  std::string report_path;
  io::RunReport report;
  std::ostream* out = nullptr;
  std::chrono::steady_clock::time_point t0;

  void emit(const std::string& name, double value, const std::string& unit) {
    report.add(name, value, unit);
    *out << io::format_value_line(report.outputs.back()) << "\n";
  }
  void emit(const std::string& name, double value, double sigma, const std::string& unit) {
    report.add(name, value, sigma, unit);
    *out << io::format_value_line(report.outputs.back()) << "\n";
  }
  double elapsed() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  }
  void finish() {
    report.wall_time_s = elapsed();
    if (!report_path.empty()) {
      report.write(report_path);
    }
  }
};

void load_context(Context& ctx, const std::string& command) {
  if (ctx.config_path.empty()) {
    if (const char* env = std::getenv("NFRES_CONFIG")) {
      ctx.config_path = env;
    }
  }
  if (!ctx.config_path.empty()) {
    ctx.config = io::load_config(ctx.config_path);
  } else {
    ctx.config = io::ToolkitConfig::defaults();
  }
  ctx.report.command = command;
  ctx.report.config_digest = io::content_digest(io::serialize_config(ctx.config));
  ctx.t0 = std::chrono::steady_clock::now();
}

// ---------------------------------------------------------------- modes ---

struct ModesArgs {
  double diameter = 0.0;     // m; 0 = use config
  double lambda_at = 0.0;    // single wavelength, m
  double lambda_min = 0.0;
  double lambda_max = 0.0;
  int steps = 13;
  std::string out_path;
};

void run_modes(Context& ctx, const ModesArgs& a) {
  fibermode::FiberGeometry geom = ctx.config.fiber;
  if (a.diameter > 0.0) {
    geom.radius = 0.5 * a.diameter;
  }
  geom.validate();

  const double cutoff = fibermode::single_mode_cutoff(geom);
  ctx.emit("fiber_diameter_nm", 2.0 * geom.radius * 1e9, "nm");
  ctx.emit("single_mode_cutoff_nm", cutoff * 1e9, "nm");

  std::vector<double> lambdas;
  if (a.lambda_at > 0.0) {
    lambdas.push_back(a.lambda_at);
  } else if (a.lambda_min > 0.0 && a.lambda_max > a.lambda_min && a.steps >= 2) {
    for (int i = 0; i < a.steps; ++i) {
      lambdas.push_back(a.lambda_min +
                        (a.lambda_max - a.lambda_min) * i / (a.steps - 1));
    }
  } else {
    lambdas.push_back(ctx.config.emitter.wavelength);
  }

  std::ostringstream tsv;
  tsv << "# wavelength_nm n_eff a_eff_surf_um2\n";
  for (double lam : lambdas) {
    const auto mode = fibermode::solve_he11(geom, lam);
    tsv << fmt(lam * 1e9) << " " << fmt(mode.n_eff) << " "
        << fmt(mode.a_eff_surf * 1e12) << "\n";
    if (lambdas.size() == 1) {
      ctx.emit("n_eff", mode.n_eff, "1");
      ctx.emit("a_eff_surf_um2", mode.a_eff_surf * 1e12, "um^2");
      ctx.emit("power_fraction_outside", mode.power_fraction_outside, "1");
      if (lam > cutoff) {
        ctx.emit("single_mode", 1.0, "1");
      } else {
        ctx.emit("single_mode", 0.0, "1");
        *ctx.out << "note: wavelength below the single-mode cutoff; higher-order modes propagate\n";
      }
    }
  }
  if (!a.out_path.empty()) {
    io::atomic_write(a.out_path, tsv.str());
    *ctx.out << "wrote " << a.out_path << "\n";
  } else if (lambdas.size() > 1) {
    *ctx.out << tsv.str();
  }
}

// --------------------------------------------------------------- cavity ---

struct CavityArgs {
  double center_freq = 0.0;  // Hz; 0 = derive from band overlap
  double span = 0.0;         // Hz; 0 = 4 FSR
  int points = 2001;
  std::string out_path;
};

void run_cavity(Context& ctx, const CavityArgs& a) {
  const auto& cav = ctx.config.cavity;
  cav.validate();
  const auto derived = cavity::derive_at_center(cav);
  ctx.emit("center_wavelength_nm", derived.center_wavelength * 1e9, "nm");
  ctx.emit("finesse_at_center", derived.finesse, "1");
  ctx.emit("q_factor", derived.q_factor, "1");
  ctx.emit("linewidth_mhz", derived.linewidth / 1e6, "MHz");
  ctx.emit("optical_length_mm", cav.optical_length() * 1e3, "mm");

  const double center =
      a.center_freq > 0.0 ? a.center_freq : speed_of_light / derived.center_wavelength;
  const double span = a.span > 0.0 ? a.span : 4.0 * cav.free_spectral_range;
  if (a.points < 2) {
    throw ValidationError("cavity: need at least 2 points");
  }
  std::vector<double> grid(a.points);
  for (int i = 0; i < a.points; ++i) {
    grid[i] = center - 0.5 * span + span * i / (a.points - 1);
  }
  SpectrumScan scan = cavity::composite_spectrum(cav, grid);
  if (!a.out_path.empty()) {
    io::write_scan_file(scan, a.out_path);
    *ctx.out << "wrote " << a.out_path << "\n";
  }
}

// --------------------------------------------------------------- invert ---

struct InvertArgs {
  double finesse = 0.0;
  double peak = -1.0;
  bool assume_tc_unity = false;
};

void run_invert(Context& ctx, const InvertArgs& a) {
  if (a.assume_tc_unity) {
    const auto res = cavity::invert_finesse_transmission(a.finesse);
    ctx.emit("mirror_reflectivity", res.mirror_reflectivity, "1");
    ctx.emit("single_pass_transmission", res.single_pass_transmission, "1");
    return;
  }
  if (a.peak < 0.0) {
    throw ValidationError("invert: provide --peak (T_peak/T_c) or --assume-tc-unity");
  }
  const auto res = cavity::invert_finesse_transmission(a.finesse, a.peak);
  ctx.emit("mirror_reflectivity", res.mirror_reflectivity, "1");
  ctx.emit("single_pass_transmission", res.single_pass_transmission, "1");
}

// ------------------------------------------------------------- simulate ---

struct SimulateArgs {
  double center_freq = 0.0;
  double span = 0.0;  // default 2.2 FSR
  int points = 1024;
  std::uint64_t seed = 0;
  bool seed_set = false;
  std::string out_path;
};

void run_simulate(Context& ctx, const SimulateArgs& a) {
  auto noise = ctx.config.noise;
  if (a.seed_set) noise.seed = a.seed;
  const auto& cav = ctx.config.cavity;
  const double lambda_c = cavity::center_wavelength(cav.mirror_1, cav.mirror_2,
                                                    cav.single_pass_transmission);
  const double center = a.center_freq > 0.0 ? a.center_freq : speed_of_light / lambda_c;
  const double span = a.span > 0.0 ? a.span : 2.2 * cav.free_spectral_range;
  SpectrumScan scan = scanforge::generate_scan(cav, center - 0.5 * span, center + 0.5 * span,
                                               a.points, noise, ctx.config.birefringence);
  io::write_scan_file(scan, a.out_path);
  ctx.emit("n_points", scan.frequency.size(), "1");
  ctx.emit("seed", static_cast<double>(noise.seed), "1");
  *ctx.out << "wrote " << a.out_path << "\n";
}

// ---------------------------------------------------------------- sweep ---

struct SweepArgs {
  double band_min = 0.0;  // m
  double band_max = 0.0;
  int scans_per_fsr = 3;
  int repeats = 3;
  int points = 512;
  std::string outdir;
};

void run_sweep(Context& ctx, const SweepArgs& a) {
  const auto& cav = ctx.config.cavity;
  double lo = a.band_min, hi = a.band_max;
  if (!(lo > 0.0) || !(hi > lo)) {
    const double lambda_c = cavity::center_wavelength(cav.mirror_1, cav.mirror_2,
                                                      cav.single_pass_transmission);
    lo = lambda_c - 0.12e-9;
    hi = lambda_c + 0.12e-9;
  }
  const auto scans = scanforge::sweep_band(cav, lo, hi, a.scans_per_fsr, a.repeats,
                                           ctx.config.noise, ctx.config.birefringence,
                                           a.points);
  std::filesystem::create_directories(a.outdir);
  for (const auto& scan : scans) {
    const std::string path = a.outdir + "/" + scan.label + ".txt";
    io::write_scan_file(scan, path);
  }
  ctx.emit("n_scans", static_cast<double>(scans.size()), "1");
  *ctx.out << "wrote " << scans.size() << " scans to " << a.outdir << "\n";
}

// ------------------------------------------------------------------ fit ---

struct FitArgs {
  std::vector<std::string> inputs;
  double bin_width = 0.0;  // Hz; 0 = half the mean fitted FSR
  std::string residuals_path;
  std::string plot_path;
};

void run_fit(Context& ctx, const FitArgs& a) {
  if (a.inputs.empty()) {
    throw ValidationError("fit: provide at least one scan file with --in");
  }
  std::vector<specfit::AiryFit> fits;
  std::vector<SpectrumScan> scans;
  for (const auto& path : a.inputs) {
    SpectrumScan scan = io::read_scan_file(path);
    ctx.report.input_digests.emplace_back(path, io::file_digest(path));
    const auto seed = specfit::make_seed(scan);
    fits.push_back(specfit::fit_airy(scan, seed));
    scans.push_back(std::move(scan));
  }

  if (fits.size() == 1) {
    const auto& f = fits.front();
    ctx.emit("finesse", f.finesse, std::sqrt(std::max(f.covariance[0][0], 0.0)), "1");
    ctx.emit("fsr_ghz", f.fsr / 1e9, std::sqrt(std::max(f.covariance[1][1], 0.0)) / 1e9, "GHz");
    ctx.emit("center_thz", f.center / 1e12, std::sqrt(std::max(f.covariance[2][2], 0.0)) / 1e12,
             "THz");
    ctx.emit("amplitude", f.amplitude, "1");
    ctx.emit("baseline", f.baseline, "1");
    ctx.emit("residual_rms", f.residual_rms, "1");
    ctx.emit("n_iterations", f.n_iterations, "1");
  } else {
    double mean_fsr = 0.0;
    for (const auto& f : fits) mean_fsr += f.fsr;
    mean_fsr /= fits.size();
    const double bw = a.bin_width > 0.0 ? a.bin_width : 0.5 * mean_fsr;
    const auto curve = specfit::finesse_vs_frequency(fits, bw);
    for (const auto& p : curve.points) {
      *ctx.out << "curve " << fmt(p.center / 1e12) << " THz  F = " << fmt(p.mean_finesse)
               << " +- " << fmt(p.standard_error) << "  T_peak = "
               << fmt(p.mean_peak_transmission) << "  n = " << p.n_fits << "\n";
    }
    const auto rep = specfit::extract_peak_report(curve, mean_fsr);
    ctx.emit("lambda_c_nm", rep.lambda_c * 1e9, rep.lambda_c_uncertainty * 1e9, "nm");
    ctx.emit("nu_c_thz", rep.nu_c / 1e12, "THz");
    ctx.emit("f_max", rep.f_max, "1");
    ctx.emit("q_factor", rep.q, "1");
  }

  if (!a.residuals_path.empty()) {
    std::ostringstream os;
    os << "# frequency_Hz residual\n";
    for (size_t s = 0; s < scans.size(); ++s) {
      const auto p = fits[s].params();
      for (size_t i = 0; i < scans[s].frequency.size(); ++i) {
        const double r = scans[s].transmission[i] -
                         specfit::airy_model(p, scans[s].frequency[i]);
        os << fmt(scans[s].frequency[i]) << " " << fmt(r) << "\n";
      }
    }
    io::atomic_write(a.residuals_path, os.str());
    *ctx.out << "wrote " << a.residuals_path << "\n";
  }

  if (!a.plot_path.empty()) {
    io::Figure fig;
    fig.title = "Transmission scan and resonance fit";
    io::PlotPanel panel;
    panel.x_label = "frequency (THz)";
    panel.y_label = "transmission";
    io::PlotSeries data;
    const auto& scan = scans.front();
    for (size_t i = 0; i < scan.frequency.size(); ++i) {
      data.x.push_back(scan.frequency[i] / 1e12);
      data.y.push_back(scan.transmission[i]);
    }
    data.points_only = true;
    data.color = "#444444";
    data.label = "data";
    io::PlotSeries model;
    const auto p = fits.front().params();
    for (size_t i = 0; i < scan.frequency.size(); ++i) {
      model.x.push_back(scan.frequency[i] / 1e12);
      model.y.push_back(specfit::airy_model(p, scan.frequency[i]));
    }
    model.color = "#d62728";
    model.label = "fit";
    panel.series = {data, model};
    fig.panels = {panel};
    io::write_svg(fig, a.plot_path);
    *ctx.out << "wrote " << a.plot_path << "\n";
  }
}

// ----------------------------------------------------------------- cqed ---

struct CqedArgs {
  double q = 0.0;
  double mode_volume = 0.0;     // m^3
  double volume_lambda3 = 0.0;  // in units of lambda^3
  double a_eff = 0.0;           // m^2
  double lambda = 0.0;          // m
  double eta = -1.0;
  double p_tof = 0.0;
  double f_p = 0.0;             // direct Purcell override for channeling
};

void run_cqed(Context& ctx, const CqedArgs& a) {
  const double lambda = a.lambda > 0.0 ? a.lambda : ctx.config.emitter.wavelength;
  const double eta = a.eta >= 0.0 ? a.eta : ctx.config.emitter.eta_guided;
  const double p_tof = a.p_tof > 0.0 ? a.p_tof : ctx.config.emitter.p_tof;
  const auto& cav = ctx.config.cavity;

  double q = a.q;
  if (!(q > 0.0)) {
    const double nu_c = speed_of_light / ctx.config.measured.lambda_cold;
    q = cavity::q_factor(ctx.config.measured.finesse, cav.free_spectral_range, nu_c);
  }

  const double lam3 = lambda * lambda * lambda;
  double volume = a.mode_volume;
  if (!(volume > 0.0) && a.volume_lambda3 > 0.0) {
    volume = a.volume_lambda3 * lam3;
  }
  if (!(volume > 0.0) && a.a_eff > 0.0) {
    volume = cqed::mode_volume(a.a_eff, cav.free_spectral_range);
  }
  if (!(volume > 0.0)) {
    const auto mode = fibermode::solve_he11(ctx.config.fiber, lambda);
    volume = cqed::mode_volume(mode.a_eff_surf, cav.free_spectral_range);
  }

  ctx.emit("q_factor", q, "1");
  ctx.emit("mode_volume_m3", volume, "m^3");
  ctx.emit("mode_volume_lambda3", volume / lam3, "lambda^3");

  const double fp_aligned = a.f_p > 0.0
                                ? a.f_p
                                : cqed::purcell(q, volume, lambda, cqed::Orientation::aligned);
  const double fp_avg = a.f_p > 0.0 ? a.f_p : fp_aligned / 3.0;
  ctx.emit("purcell_aligned", fp_aligned, "1");
  ctx.emit("purcell_averaged", fp_avg, "1");

  ctx.emit("eta_c_averaged", cqed::channeling_efficiency(eta, p_tof, fp_avg), "1");
  ctx.emit("eta_c_aligned", cqed::channeling_efficiency(eta, p_tof, fp_aligned), "1");
  ctx.emit("eta_threshold_80", cqed::eta_threshold(p_tof, fp_avg, 0.8), "1");

  if (ctx.config.emitter.dipole_moment > 0.0) {
    cqed::EmitterParams em;
    em.dipole_moment = ctx.config.emitter.dipole_moment;
    em.transition_wavelength = lambda;
    em.free_space_linewidth = ctx.config.emitter.gamma0 > 0.0
                                  ? ctx.config.emitter.gamma0
                                  : cqed::free_space_gamma0(em.dipole_moment, lambda);
    const double g = cqed::coupling_g(em, volume);
    const double kappa = cqed::cavity_kappa(q, lambda);
    const double coop = cqed::cooperativity(g, em.free_space_linewidth, kappa);
    ctx.emit("coupling_g_hz", g, "1/s");
    ctx.emit("kappa_hz", kappa, "1/s");
    ctx.emit("gamma0_hz", em.free_space_linewidth, "1/s");
    ctx.emit("cooperativity", coop, "1");
    ctx.emit("two_c", 2.0 * coop, "1");
  }
}

// ---------------------------------------------------------------- thermo ---

struct ThermoArgs {
  double li = 0.0, lf = 0.0, ti = 0.0, tf = 0.0;
  double sigma_point = 0.0;
  double sigma_band = 0.0;
  double alpha = -1.0;
  double strain_shift = 0.0;  // m
  double pe = -1.0;
  std::string in_path;
};

void run_thermo(Context& ctx, const ThermoArgs& a) {
  thermo::SilicaThermoParams params = ctx.config.thermo;
  if (a.alpha >= 0.0) params.alpha = a.alpha;
  if (a.pe >= 0.0) params.photoelastic_coefficient = a.pe;

  thermo::ThermoMeasurement meas;
  if (!a.in_path.empty()) {
    std::ifstream f(a.in_path);
    if (!f) {
      throw ValidationError("thermo: cannot open " + a.in_path);
    }
    ctx.report.input_digests.emplace_back(a.in_path, io::file_digest(a.in_path));
    std::vector<std::array<double, 3>> rows;
    std::string line;
    int lineno = 0;
    while (std::getline(f, line)) {
      ++lineno;
      if (line.empty() || line[0] == '#') continue;
      std::istringstream ls(line);
      std::array<double, 3> row{0.0, 0.0, 0.0};
      if (!(ls >> row[0] >> row[1])) {
        throw ValidationError(a.in_path + ":" + std::to_string(lineno) +
                              ": expected 'temperature_K lambda_m [sigma_m]'");
      }
      ls >> row[2];
      rows.push_back(row);
    }
    if (rows.size() != 2) {
      throw ValidationError("thermo: measurement file must hold exactly 2 rows, got " +
                            std::to_string(rows.size()));
    }
    meas.t_initial = rows[0][0];
    meas.lambda_initial = rows[0][1];
    meas.t_final = rows[1][0];
    meas.lambda_final = rows[1][1];
    // Per-endpoint sigmas may differ; keep the quadrature total.
    meas.lambda_uncertainty =
        std::sqrt(0.5 * (rows[0][2] * rows[0][2] + rows[1][2] * rows[1][2]));
  } else {
    if (!(a.li > 0.0 && a.lf > 0.0)) {
      throw ValidationError("thermo: provide --li/--lf/--ti/--tf or --in FILE");
    }
    meas.lambda_initial = a.li;
    meas.lambda_final = a.lf;
    meas.t_initial = a.ti;
    meas.t_final = a.tf;
    meas.lambda_uncertainty = a.sigma_point;
  }
  meas.band_overlap_sigma = a.sigma_band;

  const auto ex = thermo::extract_thermo_optic(meas, params);
  ctx.emit("delta_lambda_nm", (meas.lambda_final - meas.lambda_initial) * 1e9, "nm");
  ctx.emit("kappa_avg_per_K", ex.kappa_avg, ex.kappa_sigma, "1/K");
  ctx.emit("dn_over_n", ex.dn_over_n, ex.dn_over_n_sigma, "1");
  ctx.emit("roundtrip_residual_m", thermo::roundtrip_consistency(meas, params), "m");

  if (a.strain_shift != 0.0) {
    const double eps = thermo::strain_from_shift(a.strain_shift, meas.lambda_initial,
                                                 params.photoelastic_coefficient);
    ctx.emit("strain", eps, "1");
  }
}

// ---------------------------------------------------------------- report ---

struct ReportArgs {
  std::string outdir;
  bool no_plots = false;
  bool no_pipeline = false;
};

void run_report(Context& ctx, const ReportArgs& a) {
  const auto& cfg = ctx.config;
  const auto& meas = cfg.measured;
  const std::string outdir = a.outdir.empty() ? cfg.output_directory : a.outdir;
  std::filesystem::create_directories(outdir);

  // Guided mode and single-mode boundary.
  const double cutoff = fibermode::single_mode_cutoff(cfg.fiber);
  ctx.emit("single_mode_cutoff_nm", cutoff * 1e9, "nm");
  const auto mode = fibermode::solve_he11(cfg.fiber, cfg.emitter.wavelength);
  ctx.emit("n_eff", mode.n_eff, "1");
  ctx.emit("a_eff_surf_um2", mode.a_eff_surf * 1e12, "um^2");

  // Mirror and loss budget from the measured finesse values.
  const auto pre = cavity::invert_finesse_transmission(meas.finesse_pretaper);
  ctx.emit("mirror_reflectivity_pretaper", pre.mirror_reflectivity, "1");
  const auto inv = cavity::invert_finesse_transmission(meas.finesse, meas.peak_over_tc);
  ctx.emit("mirror_reflectivity", inv.mirror_reflectivity, "1");
  ctx.emit("single_pass_transmission", inv.single_pass_transmission, "1");

  // Q and the coupling figures of merit.
  const double nu_c = speed_of_light / meas.lambda_cold;
  const double q = cavity::q_factor(meas.finesse, cfg.cavity.free_spectral_range, nu_c);
  ctx.emit("q_factor", q, "1");
  const double volume = cqed::mode_volume(mode.a_eff_surf, cfg.cavity.free_spectral_range);
  const double lam3 = std::pow(cfg.emitter.wavelength, 3);
  ctx.emit("mode_volume_lambda3", volume / lam3, "lambda^3");
  const double fp = cqed::purcell(q, volume, cfg.emitter.wavelength);
  ctx.emit("purcell_aligned", fp, "1");
  ctx.emit("purcell_averaged", fp / 3.0, "1");
  ctx.emit("eta_c_averaged",
           cqed::channeling_efficiency(cfg.emitter.eta_guided, cfg.emitter.p_tof, fp / 3.0),
           "1");
  ctx.emit("eta_threshold_80", cqed::eta_threshold(cfg.emitter.p_tof, fp / 3.0, 0.8), "1");

  // Cryogenic thermo-optics, both resonators.
  thermo::ThermoMeasurement tm;
  tm.lambda_initial = meas.lambda_warm;
  tm.lambda_final = meas.lambda_cold;
  tm.t_initial = meas.t_warm;
  tm.t_final = meas.t_cold;
  tm.lambda_uncertainty = meas.sigma_point;
  tm.band_overlap_sigma = meas.sigma_band;
  const auto ex1 = thermo::extract_thermo_optic(tm, cfg.thermo);
  ctx.emit("kappa_avg_per_K", ex1.kappa_avg, ex1.kappa_sigma, "1/K");
  ctx.emit("dn_over_n", ex1.dn_over_n, ex1.dn_over_n_sigma, "1");

  thermo::ThermoMeasurement tm2;
  tm2.lambda_initial = meas.lambda2_warm;
  tm2.lambda_final = meas.lambda2_warm + meas.shift2;
  tm2.t_initial = meas.t_warm;
  tm2.t_final = meas.t_cold;
  tm2.lambda_uncertainty = meas.sigma2_point;
  tm2.band_overlap_sigma = meas.sigma_band;
  const auto ex2 = thermo::extract_thermo_optic(tm2, cfg.thermo);
  ctx.emit("kappa_avg_2_per_K", ex2.kappa_avg, ex2.kappa_sigma, "1/K");

  ctx.emit("strain",
           thermo::strain_from_shift(meas.warmup_shift, meas.lambda_warm,
                                     cfg.thermo.photoelastic_coefficient),
           "1");

  if (!a.no_pipeline) {
    // Synthetic scan -> fit roundtrip (one scan; the full ensemble lives in
    // the test suite).
    const double center = speed_of_light / meas.lambda_cold;
    const double span = 2.2 * cfg.cavity.free_spectral_range;
    auto scan = scanforge::generate_scan(cfg.cavity, center - 0.5 * span, center + 0.5 * span,
                                         1024, cfg.noise, cfg.birefringence);
    io::write_scan_file(scan, outdir + "/scan_demo.txt");
    const auto fit = specfit::fit_airy(scan, specfit::make_seed(scan));
    ctx.emit("demo_fit_finesse", fit.finesse,
             std::sqrt(std::max(fit.covariance[0][0], 0.0)), "1");
    ctx.emit("demo_fit_fsr_ghz", fit.fsr / 1e9, "GHz");

    if (!a.no_plots) {
      // Transmission figure: demo scan and its fit.
      io::Figure f2;
      f2.title = "Transmission over one free spectral range";
      io::PlotPanel p2;
      p2.x_label = "frequency (THz)";
      p2.y_label = "normalized transmission";
      io::PlotSeries data;
      for (size_t i = 0; i < scan.frequency.size(); ++i) {
        data.x.push_back(scan.frequency[i] / 1e12);
        data.y.push_back(scan.transmission[i]);
      }
      data.points_only = true;
      data.color = "#444444";
      data.label = "scan";
      io::PlotSeries model;
      for (size_t i = 0; i < scan.frequency.size(); ++i) {
        model.x.push_back(scan.frequency[i] / 1e12);
        model.y.push_back(specfit::airy_model(fit.params(), scan.frequency[i]));
      }
      model.color = "#d62728";
      model.label = "Airy fit";
      p2.series = {data, model};
      f2.panels = {p2};
      io::write_svg(f2, outdir + "/transmission_fit.svg");

      // Band figure: sweep + fit, transmission and finesse vs frequency.
      const auto scans = scanforge::sweep_band(cfg.cavity, meas.lambda_cold - 0.12e-9,
                                               meas.lambda_cold + 0.12e-9, 2, 2,
                                               cfg.noise, cfg.birefringence, 384);
      std::vector<specfit::AiryFit> fits;
      for (const auto& s : scans) {
        try {
          fits.push_back(specfit::fit_airy(s, specfit::make_seed(s)));
        } catch (const NumericError&) {
          // Windows on the band edge can be featureless; skip them.
        }
      }
      const auto curve =
          specfit::finesse_vs_frequency(fits, 0.5 * cfg.cavity.free_spectral_range);
      io::Figure f3;
      f3.title = "Stop-band transmission and finesse";
      io::PlotPanel top;
      top.x_label = "frequency (THz)";
      top.y_label = "peak transmission";
      io::PlotSeries tser;
      for (const auto& p : curve.points) {
        tser.x.push_back(p.center / 1e12);
        tser.y.push_back(p.mean_peak_transmission);
      }
      tser.points_only = true;
      top.series = {tser};
      io::PlotPanel bottom;
      bottom.x_label = "frequency (THz)";
      bottom.y_label = "finesse";
      io::PlotSeries fser;
      for (const auto& p : curve.points) {
        fser.x.push_back(p.center / 1e12);
        fser.y.push_back(p.mean_finesse);
        fser.yerr.push_back(p.standard_error);
      }
      fser.points_only = true;
      fser.color = "#2ca02c";
      bottom.series = {fser};
      f3.panels = {top, bottom};
      io::write_svg(f3, outdir + "/band_finesse.svg");
      *ctx.out << "wrote " << outdir << "/transmission_fit.svg and band_finesse.svg\n";
    }
  }

  ctx.report.write(outdir + "/report.txt");
  *ctx.out << "wrote " << outdir << "/report.txt\n";
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"nanofiber Fabry-Perot resonator toolkit"};
  app.require_subcommand(1);

  Context ctx;
  ctx.out = &out;
  app.add_option("--config", ctx.config_path, "toolkit config file (or $NFRES_CONFIG)");
  app.add_option("--report", ctx.report_path, "write a machine-readable run report here");

  ModesArgs modes_args;
  auto* modes = app.add_subcommand("modes", "solve the HE11 guided mode over a wavelength grid");
  modes->add_option("--diameter", modes_args.diameter, "fiber diameter, m");
  modes->add_option("--at", modes_args.lambda_at, "single wavelength, m");
  modes->add_option("--lambda-min", modes_args.lambda_min, "grid start, m");
  modes->add_option("--lambda-max", modes_args.lambda_max, "grid end, m");
  modes->add_option("--steps", modes_args.steps, "grid size");
  modes->add_option("--out", modes_args.out_path, "tabular output file");

  CavityArgs cavity_args;
  auto* cavity_cmd = app.add_subcommand("cavity", "forward transmission spectrum of the configured cavity");
  cavity_cmd->add_option("--center-freq", cavity_args.center_freq, "grid center, Hz");
  cavity_cmd->add_option("--span", cavity_args.span, "grid span, Hz");
  cavity_cmd->add_option("--points", cavity_args.points, "grid size");
  cavity_cmd->add_option("--out", cavity_args.out_path, "scan output file");

  InvertArgs invert_args;
  auto* invert = app.add_subcommand("invert", "recover (R, T_c) from finesse and peak transmission");
  invert->add_option("--finesse", invert_args.finesse, "measured finesse")->required();
  invert->add_option("--peak", invert_args.peak, "measured T_peak / T_c");
  invert->add_flag("--assume-tc-unity", invert_args.assume_tc_unity,
                   "lossless cavity: solve the finesse relation alone");

  SimulateArgs sim_args;
  auto* simulate = app.add_subcommand("simulate", "generate one synthetic scan");
  simulate->add_option("--center-freq", sim_args.center_freq, "window center, Hz");
  simulate->add_option("--span", sim_args.span, "window span, Hz");
  simulate->add_option("--points", sim_args.points, "samples");
  simulate->add_option("--seed", sim_args.seed, "seed override")
      ->each([&](const std::string&) { sim_args.seed_set = true; });
  simulate->add_option("--out", sim_args.out_path, "scan output file")->required();

  SweepArgs sweep_args;
  auto* sweep = app.add_subcommand("sweep", "generate a scan ensemble across the stop band");
  sweep->add_option("--band-min", sweep_args.band_min, "band start, m");
  sweep->add_option("--band-max", sweep_args.band_max, "band end, m");
  sweep->add_option("--scans-per-fsr", sweep_args.scans_per_fsr, "window density");
  sweep->add_option("--repeats", sweep_args.repeats, "scans per window");
  sweep->add_option("--points", sweep_args.points, "samples per scan");
  sweep->add_option("--outdir", sweep_args.outdir, "output directory")->required();

  FitArgs fit_args;
  auto* fit = app.add_subcommand("fit", "fit Airy resonances to scan files");
  fit->add_option("--in", fit_args.inputs, "scan file(s)")->required();
  fit->add_option("--bin-width", fit_args.bin_width, "aggregation bin width, Hz");
  fit->add_option("--residuals", fit_args.residuals_path, "write per-point residuals");
  fit->add_option("--plot", fit_args.plot_path, "write an SVG of data and fit");

  CqedArgs cqed_args;
  auto* cqed_cmd = app.add_subcommand("cqed", "cavity-QED figures of merit");
  cqed_cmd->add_option("--q", cqed_args.q, "quality factor");
  cqed_cmd->add_option("--mode-volume", cqed_args.mode_volume, "mode volume, m^3");
  cqed_cmd->add_option("--volume-lambda3", cqed_args.volume_lambda3, "mode volume in lambda^3");
  cqed_cmd->add_option("--a-eff", cqed_args.a_eff, "effective area, m^2");
  cqed_cmd->add_option("--lambda", cqed_args.lambda, "wavelength, m");
  cqed_cmd->add_option("--eta", cqed_args.eta, "bare-fiber channeling efficiency");
  cqed_cmd->add_option("--p-tof", cqed_args.p_tof, "bare-fiber rate enhancement");
  cqed_cmd->add_option("--f-p", cqed_args.f_p, "Purcell factor override");

  ThermoArgs thermo_args;
  auto* thermo_cmd = app.add_subcommand("thermo", "extract the averaged thermo-optic coefficient");
  thermo_cmd->add_option("--li", thermo_args.li, "initial center wavelength, m");
  thermo_cmd->add_option("--lf", thermo_args.lf, "final center wavelength, m");
  thermo_cmd->add_option("--ti", thermo_args.ti, "initial temperature, K");
  thermo_cmd->add_option("--tf", thermo_args.tf, "final temperature, K");
  thermo_cmd->add_option("--sigma-point", thermo_args.sigma_point, "per-endpoint wavelength sigma, m");
  thermo_cmd->add_option("--sigma-band", thermo_args.sigma_band, "band-overlap sigma, m");
  thermo_cmd->add_option("--alpha", thermo_args.alpha, "thermal expansion coefficient, 1/K");
  thermo_cmd->add_option("--strain-shift", thermo_args.strain_shift, "wavelength shift for strain, m");
  thermo_cmd->add_option("--pe", thermo_args.pe, "photoelastic coefficient");
  thermo_cmd->add_option("--in", thermo_args.in_path, "two-row measurement file");

  ReportArgs report_args;
  auto* report = app.add_subcommand("report", "one-shot reproduction pipeline");
  report->add_option("--outdir", report_args.outdir, "output directory");
  report->add_flag("--no-plots", report_args.no_plots, "skip SVG output");
  report->add_flag("--no-pipeline", report_args.no_pipeline, "skip the synthetic scan/fit demo");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n" << app.help();
    return kExitValidation;
  }

  try {
    const std::string cmd = app.get_subcommands().front()->get_name();
    load_context(ctx, cmd);
    if (modes->parsed()) run_modes(ctx, modes_args);
    if (cavity_cmd->parsed()) run_cavity(ctx, cavity_args);
    if (invert->parsed()) run_invert(ctx, invert_args);
    if (simulate->parsed()) run_simulate(ctx, sim_args);
    if (sweep->parsed()) run_sweep(ctx, sweep_args);
    if (fit->parsed()) run_fit(ctx, fit_args);
    if (cqed_cmd->parsed()) run_cqed(ctx, cqed_args);
    if (thermo_cmd->parsed()) run_thermo(ctx, thermo_args);
    if (report->parsed()) run_report(ctx, report_args);
    ctx.finish();
  } catch (const ValidationError& e) {
    err << "error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const NumericError& e) {
    err << "numeric error: " << e.what() << "\n";
    return kExitNumeric;
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << "\n";
    return kExitNumeric;
  }
  return kExitOk;
}

}  // namespace nfres::cli
