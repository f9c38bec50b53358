#include "nfres/cavity.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <sstream>

#include "nfres/constants.hpp"
#include "nfres/errors.hpp"

namespace nfres::cavity {

namespace {

using constants::pi;
using constants::speed_of_light;

void check_mirror_pair(double r1, double r2, double tc) {
  if (!(r1 >= 0.0 && r1 <= 1.0) || !(r2 >= 0.0 && r2 <= 1.0)) {
    throw ValidationError("cavity: reflectivities must lie in [0, 1]");
  }
  if (!(tc > 0.0 && tc <= 1.0)) {
    throw ValidationError("cavity: single-pass transmission must lie in (0, 1]");
  }
  if (tc * std::sqrt(r1 * r2) >= 1.0) {
    throw ValidationError("cavity: Tc*sqrt(R1 R2) >= 1, finesse diverges");
  }
}

// Equal-mirror forward pair used by the inversion.
double finesse_equal(double r, double tc) {
  return pi * std::sqrt(r) * std::sqrt(tc) / (1.0 - tc * r);
}

double peak_over_tc_equal(double r, double tc) {
  const double d = 1.0 - tc * r;
  return (1.0 - r) * (1.0 - r) / (d * d);
}

}  // namespace

FbgMirror FbgMirror::gaussian_mirror(double bragg_wavelength, double peak_reflectivity,
                                     double hwhm) {
  FbgMirror m;
  m.bragg_wavelength = bragg_wavelength;
  m.peak_reflectivity = peak_reflectivity;
  m.band_model = BandModel::gaussian;
  m.hwhm = hwhm;
  m.validate();
  return m;
}

FbgMirror FbgMirror::coupled_mode_mirror(double bragg_wavelength, double kappa,
                                         double grating_length) {
  FbgMirror m;
  m.bragg_wavelength = bragg_wavelength;
  m.band_model = BandModel::coupled_mode;
  m.kappa = kappa;
  m.grating_length = grating_length;
  const double t = std::tanh(kappa * grating_length);
  m.peak_reflectivity = t * t;
  m.validate();
  return m;
}

void FbgMirror::validate() const {
  if (!(bragg_wavelength > 0.0)) {
    throw ValidationError("FbgMirror: Bragg wavelength must be positive");
  }
  if (!(peak_reflectivity >= 0.0 && peak_reflectivity <= 1.0)) {
    throw ValidationError("FbgMirror: peak reflectivity must lie in [0, 1]");
  }
  if (band_model == BandModel::gaussian) {
    if (!(hwhm > 0.0)) {
      throw ValidationError("FbgMirror: gaussian band model needs hwhm > 0");
    }
  } else {
    if (!(kappa > 0.0) || !(grating_length > 0.0)) {
      throw ValidationError("FbgMirror: coupled-mode band model needs kappa > 0 and grating length > 0");
    }
    const double peak = std::tanh(kappa * grating_length);
    if (std::abs(peak * peak - peak_reflectivity) > 1e-9) {
      throw ValidationError(
          "FbgMirror: peak_reflectivity inconsistent with tanh^2(kappa*L); "
          "use coupled_mode_mirror() to build the mirror");
    }
  }
}

void CavityConfig::validate() const {
  mirror_1.validate();
  mirror_2.validate();
  if (!(single_pass_transmission > 0.0 && single_pass_transmission <= 1.0)) {
    throw ValidationError("CavityConfig: Tc must lie in (0, 1]");
  }
  if (!(free_spectral_range > 0.0)) {
    throw ValidationError("CavityConfig: FSR must be positive");
  }
}

double CavityConfig::optical_length() const {
  return speed_of_light / (2.0 * free_spectral_range);
}

double finesse(double r1, double r2, double tc) {
  check_mirror_pair(r1, r2, tc);
  const double rr = std::sqrt(r1 * r2);
  return pi * std::sqrt(rr) * std::sqrt(tc) / (1.0 - tc * rr);
}

double transmission(double r1, double r2, double tc, double delta) {
  check_mirror_pair(r1, r2, tc);
  const double rr = std::sqrt(r1 * r2);
  const double denom = 1.0 - tc * rr;
  const double peak = (1.0 - r1) * (1.0 - r2) * tc / (denom * denom);
  const double f = pi * std::sqrt(rr) * std::sqrt(tc) / denom;
  const double sd = std::sin(0.5 * delta);
  const double coeff = 2.0 * f / pi;
  return peak / (1.0 + coeff * coeff * sd * sd);
}

InversionResult invert_finesse_transmission(double f_meas) {
  if (!(f_meas > 0.0)) {
    throw ValidationError("invert: measured finesse must be positive");
  }
  // finesse_equal(R, 1) is strictly increasing in R on (0, 1) and spans
  // (0, inf); bisect.
  double lo = 0.0, hi = 1.0 - 1e-15;
  if (finesse_equal(hi, 1.0) < f_meas) {
    throw NumericError("invert: finesse too large for any mirror reflectivity < 1");
  }
  for (int i = 0; i < 200 && hi - lo > 1e-16; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (finesse_equal(mid, 1.0) < f_meas) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  InversionResult res;
  res.mirror_reflectivity = 0.5 * (lo + hi);
  res.single_pass_transmission = 1.0;
  return res;
}

InversionResult invert_finesse_transmission(double f_meas, double t_peak_over_tc) {
  if (!(f_meas > 0.0)) {
    throw ValidationError("invert: measured finesse must be positive");
  }
  if (!(t_peak_over_tc > 0.0 && t_peak_over_tc <= 1.0)) {
    throw NumericError("invert: normalized peak transmission outside (0, 1]; infeasible measurement");
  }

  // Residuals in log space for the finesse equation keep the Newton step
  // well-scaled at high finesse.
  auto residual = [&](double r, double tc, double& g1, double& g2) {
    g1 = std::log(finesse_equal(r, tc) / f_meas);
    g2 = peak_over_tc_equal(r, tc) - t_peak_over_tc;
  };

  // 100x100 grid scan for the seed.
  double best_r = 0.5, best_tc = 0.5, best_norm = 1e300;
  constexpr int kGrid = 100;
  for (int i = 1; i <= kGrid; ++i) {
    const double r = static_cast<double>(i) / (kGrid + 1);
    for (int j = 1; j <= kGrid; ++j) {
      const double tc = static_cast<double>(j) / kGrid;
      double g1, g2;
      residual(r, tc, g1, g2);
      const double norm = g1 * g1 + g2 * g2;
      if (norm < best_norm) {
        best_norm = norm;
        best_r = r;
        best_tc = tc;
      }
    }
  }

  double r = best_r, tc = best_tc;
  double g1, g2;
  residual(r, tc, g1, g2);
  double norm = g1 * g1 + g2 * g2;

  bool converged = false;
  for (int iter = 0; iter < 200; ++iter) {
    // Analytic Jacobian.
    const double denom = 1.0 - tc * r;
    const double f = finesse_equal(r, tc);
    const double df_dr = pi * std::sqrt(tc) * (0.5 / std::sqrt(r) * denom + std::sqrt(r) * tc) / (denom * denom);
    const double df_dtc = pi * std::sqrt(r) * (0.5 / std::sqrt(tc) * denom + std::sqrt(tc) * r) / (denom * denom);
    const double j11 = df_dr / f;    // d g1 / dR
    const double j12 = df_dtc / f;   // d g1 / dTc
    const double j21 = 2.0 * (1.0 - r) * (tc - 1.0) / (denom * denom * denom);
    const double j22 = 2.0 * (1.0 - r) * (1.0 - r) * r / (denom * denom * denom);

    const double det = j11 * j22 - j12 * j21;
    if (std::abs(det) < 1e-300) break;
    double dr = -(j22 * g1 - j12 * g2) / det;
    double dtc = -(-j21 * g1 + j11 * g2) / det;

    // Damping: halve the step until the residual norm decreases.
    double scale = 1.0;
    bool accepted = false;
    for (int back = 0; back < 60; ++back) {
      const double rn = std::clamp(r + scale * dr, 1e-12, 1.0 - 1e-12);
      const double tn = std::clamp(tc + scale * dtc, 1e-12, 1.0);
      double h1, h2;
      residual(rn, tn, h1, h2);
      const double nn = h1 * h1 + h2 * h2;
      if (nn < norm) {
        r = rn;
        tc = tn;
        g1 = h1;
        g2 = h2;
        norm = nn;
        accepted = true;
        break;
      }
      scale *= 0.5;
    }
    if (!accepted) break;
    if (std::abs(dr) * scale < 1e-15 && std::abs(dtc) * scale < 1e-15) {
      converged = true;
      break;
    }
    if (norm < 1e-28) {
      converged = true;
      break;
    }
  }

  // Verify the round trip through the forward operations.
  const double f_back = finesse_equal(r, tc);
  const double t_back = peak_over_tc_equal(r, tc);
  const bool ok = converged &&
                  std::abs(f_back - f_meas) <= 1e-9 * f_meas &&
                  std::abs(t_back - t_peak_over_tc) <= 1e-9 * t_peak_over_tc;
  if (!ok) {
    std::ostringstream os;
    os << "invert: no (R, Tc) in (0,1)^2 reproduces finesse " << f_meas
       << " with T_peak/Tc " << t_peak_over_tc << "; infeasible measurement";
    throw NumericError(os.str());
  }

  InversionResult res;
  res.mirror_reflectivity = r;
  res.single_pass_transmission = tc;
  return res;
}

double q_factor(double finesse, double fsr, double nu_c) {
  if (!(finesse > 0.0) || !(fsr > 0.0) || !(nu_c > 0.0)) {
    throw ValidationError("q_factor: finesse, FSR and nu_c must be positive");
  }
  return nu_c * finesse / fsr;
}

double fbg_reflectivity(const FbgMirror& mirror, double wavelength) {
  mirror.validate();
  if (!(wavelength > 0.0)) {
    throw ValidationError("fbg_reflectivity: wavelength must be positive");
  }
  if (mirror.band_model == FbgMirror::BandModel::gaussian) {
    const double x = (wavelength - mirror.bragg_wavelength) / mirror.hwhm;
    return mirror.peak_reflectivity * std::exp(-std::log(2.0) * x * x);
  }
  // Uniform grating, coupled-mode closed form. Detuning of the propagation
  // constant from the Bragg condition, with a fixed effective index typical
  // of silica fiber around 850 nm (band shapes only; the peak value is
  // index-independent).
  constexpr double n_eff = 1.452;
  const double detune = 2.0 * pi * n_eff * (1.0 / wavelength - 1.0 / mirror.bragg_wavelength);
  const double kap = mirror.kappa;
  const double len = mirror.grating_length;
  const double d2 = detune * detune;
  const double k2 = kap * kap;
  if (d2 < k2) {
    const double g = std::sqrt(k2 - d2);
    const double sh = std::sinh(g * len);
    const double ch = std::cosh(g * len);
    return k2 * sh * sh / (d2 * sh * sh + g * g * ch * ch);
  }
  const double sg = std::sqrt(d2 - k2);
  const double sn = std::sin(sg * len);
  const double cs = std::cos(sg * len);
  return k2 * sn * sn / (d2 * sn * sn + sg * sg * cs * cs);
}

double center_wavelength(const FbgMirror& m1, const FbgMirror& m2, double tc) {
  m1.validate();
  m2.validate();
  if (!(tc > 0.0 && tc <= 1.0)) {
    throw ValidationError("center_wavelength: Tc must lie in (0, 1]");
  }
  double lo = std::min(m1.bragg_wavelength, m2.bragg_wavelength);
  double hi = std::max(m1.bragg_wavelength, m2.bragg_wavelength);

  auto fin = [&](double lam) {
    return finesse(fbg_reflectivity(m1, lam), fbg_reflectivity(m2, lam), tc);
  };

  double result;
  if (hi - lo < 1e-18) {
    result = lo;
  } else {
    // Golden-section maximization.
    const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
    double a = lo, b = hi;
    double x1 = b - gr * (b - a);
    double x2 = a + gr * (b - a);
    double f1 = fin(x1);
    double f2 = fin(x2);
    for (int i = 0; i < 300 && (b - a) > 1e-12 * hi; ++i) {
      if (f1 < f2) {
        a = x1;
        x1 = x2;
        f1 = f2;
        x2 = a + gr * (b - a);
        f2 = fin(x2);
      } else {
        b = x2;
        x2 = x1;
        f2 = f1;
        x1 = b - gr * (b - a);
        f1 = fin(x1);
      }
    }
    result = 0.5 * (a + b);
    // For equal band shapes the optimum is the exact midpoint; snap to it
    // when it is at least as good, which also makes the symmetric case
    // bit-exact.
    const double mid = 0.5 * (lo + hi);
    if (fin(mid) >= fin(result)) {
      result = mid;
    }
  }

  if (!(fin(result) > 1e-12)) {
    throw NumericError("center_wavelength: reflection bands do not overlap (no cavity)");
  }
  return result;
}

double spectrum_point(const CavityConfig& config, double nu, double resonance_offset) {
  const double lambda = speed_of_light / nu;
  const double r1 = fbg_reflectivity(config.mirror_1, lambda);
  const double r2 = fbg_reflectivity(config.mirror_2, lambda);
  const double delta = 2.0 * pi * (nu - resonance_offset) / config.free_spectral_range +
                       config.phase_offset;
  return transmission(r1, r2, config.single_pass_transmission, delta);
}

SpectrumScan composite_spectrum(const CavityConfig& config, const std::vector<double>& grid) {
  config.validate();
  if (grid.size() < 2) {
    throw ValidationError("composite_spectrum: need at least 2 grid points");
  }
  for (size_t i = 1; i < grid.size(); ++i) {
    if (!(grid[i] > grid[i - 1])) {
      throw ValidationError("composite_spectrum: grid must be strictly increasing");
    }
  }
  SpectrumScan scan;
  scan.frequency = grid;
  scan.transmission.reserve(grid.size());
  for (double nu : grid) {
    scan.transmission.push_back(spectrum_point(config, nu));
  }
  scan.normalization = SpectrumScan::Normalization::raw;
  scan.label = "composite_spectrum";
  return scan;
}

CavityDerived derive_at_center(const CavityConfig& config) {
  config.validate();
  CavityDerived d;
  d.center_wavelength =
      center_wavelength(config.mirror_1, config.mirror_2, config.single_pass_transmission);
  const double r1 = fbg_reflectivity(config.mirror_1, d.center_wavelength);
  const double r2 = fbg_reflectivity(config.mirror_2, d.center_wavelength);
  d.finesse = finesse(r1, r2, config.single_pass_transmission);
  const double nu_c = speed_of_light / d.center_wavelength;
  d.q_factor = q_factor(d.finesse, config.free_spectral_range, nu_c);
  d.linewidth = config.free_spectral_range / d.finesse;
  return d;
}

}  // namespace nfres::cavity
