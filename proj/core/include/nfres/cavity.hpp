#pragma once

#include <vector>

#include "nfres/spectrum.hpp"

namespace nfres::cavity {

// Wavelength-selective FBG mirror: peak reflectivity at the Bragg
// wavelength with either a Gaussian band profile or the uniform-grating
// coupled-mode closed form.
struct FbgMirror {
  enum class BandModel { gaussian, coupled_mode };

  double bragg_wavelength = 0.0;    // m
  double peak_reflectivity = 0.0;   // in [0, 1]
  BandModel band_model = BandModel::gaussian;

  double hwhm = 0.0;                // m (gaussian)
  double kappa = 0.0;               // 1/m (coupled_mode coupling strength)
  double grating_length = 0.0;      // m (coupled_mode)

  static FbgMirror gaussian_mirror(double bragg_wavelength, double peak_reflectivity,
                                   double hwhm);
  // Peak reflectivity is tanh^2(kappa * grating_length), filled in here.
  static FbgMirror coupled_mode_mirror(double bragg_wavelength, double kappa,
                                       double grating_length);

  void validate() const;
};

struct CavityConfig {
  FbgMirror mirror_1;
  FbgMirror mirror_2;
  double single_pass_transmission = 1.0;  // T_c in (0, 1]
  double free_spectral_range = 0.0;       // Hz
  double phase_offset = 0.0;              // rad; round-trip phase at nu = 0

  void validate() const;
  double optical_length() const;          // c / (2 FSR), m
};

struct CavityDerived {
  double finesse = 0.0;
  double q_factor = 0.0;
  double linewidth = 0.0;           // FSR / finesse, Hz
  double center_wavelength = 0.0;   // m
};

// F = pi (R1 R2)^{1/4} sqrt(Tc) / (1 - Tc sqrt(R1 R2)).
// Throws ValidationError on out-of-range inputs or a divergent
// denominator (Tc sqrt(R1 R2) >= 1).
double finesse(double r1, double r2, double tc);

// Airy transmission at round-trip phase difference delta:
// T = (1-R1)(1-R2) Tc / (1 - Tc sqrt(R1 R2))^2 * 1/(1 + (2F/pi)^2 sin^2(delta/2)).
double transmission(double r1, double r2, double tc, double delta);

struct InversionResult {
  double mirror_reflectivity = 0.0;       // R (equal mirrors)
  double single_pass_transmission = 1.0;  // T_c
};

// Recovers (R, T_c) from a measured finesse and normalized resonance peak
// T_peak / T_c, assuming equal mirrors. 2-D damped Newton seeded from a
// 100x100 grid scan; grid-refinement fallback. Throws NumericError when no
// solution exists in (0,1)^2.
InversionResult invert_finesse_transmission(double f_meas, double t_peak_over_tc);

// Same, assuming a lossless cavity: solves the finesse relation alone with
// T_c = 1.
InversionResult invert_finesse_transmission(double f_meas);

// Q = nu_c * F / FSR.
double q_factor(double finesse, double fsr, double nu_c);

// Mirror reflectivity at a given wavelength under the mirror's band model.
double fbg_reflectivity(const FbgMirror& mirror, double wavelength);

// Wavelength of best band overlap = argmax of finesse(R1(lambda),
// R2(lambda), tc), located by golden-section search between the two Bragg
// wavelengths. Equals the midpoint exactly for equal band shapes. Throws
// NumericError when the bands do not overlap (no finesse anywhere).
double center_wavelength(const FbgMirror& m1, const FbgMirror& m2, double tc);

// Single spectrum sample: Airy transmission at frequency nu with
// wavelength-dependent mirror reflectivities and round-trip phase
// delta(nu) = 2 pi (nu - resonance_offset) / FSR + phase_offset.
double spectrum_point(const CavityConfig& config, double nu, double resonance_offset = 0.0);

// Full transmission spectrum over a monotone frequency grid. Off-band the
// mirrors are transparent and the trace approaches T_c.
SpectrumScan composite_spectrum(const CavityConfig& config, const std::vector<double>& grid);

// Finesse, Q, linewidth, and center wavelength of a configured cavity,
// evaluated at the band-overlap point.
CavityDerived derive_at_center(const CavityConfig& config);

}  // namespace nfres::cavity
