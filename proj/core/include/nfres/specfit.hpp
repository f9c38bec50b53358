#pragma once

#include <array>
#include <vector>

#include "nfres/spectrum.hpp"

namespace nfres::specfit {

// Airy resonance model fitted to scans:
//   T(nu) = baseline + amplitude / (1 + (2F/pi)^2 sin^2(pi (nu - center) / FSR)).
// Parameter order everywhere: (finesse, fsr, center, amplitude, baseline).
inline constexpr int kNumParams = 5;

struct AiryParams {
  double finesse = 0.0;
  double fsr = 0.0;        // Hz
  double center = 0.0;     // Hz
  double amplitude = 0.0;
  double baseline = 0.0;

  std::array<double, kNumParams> as_array() const {
    return {finesse, fsr, center, amplitude, baseline};
  }
};

double airy_model(const AiryParams& p, double nu);

// Analytic partial derivatives of the model with respect to the external
// parameters, in the canonical order. Validated against central finite
// differences in the test suite.
std::array<double, kNumParams> airy_jacobian_row(const AiryParams& p, double nu);

struct AiryFit {
  double finesse = 0.0;
  double fsr = 0.0;
  double center = 0.0;       // canonical representative nearest the window middle
  double amplitude = 0.0;
  double baseline = 0.0;
  std::array<std::array<double, kNumParams>, kNumParams> covariance{};
  double residual_rms = 0.0;
  int n_iterations = 0;

  AiryParams params() const { return {finesse, fsr, center, amplitude, baseline}; }
};

// Divides the trace by the median transmission inside [window_lo, window_hi]
// (frequencies, Hz). Requires a raw scan and at least 8 samples in the
// window; a non-positive median is a degenerate baseline.
SpectrumScan normalize_off_band(const SpectrumScan& scan, double window_lo, double window_hi);

struct Resonance {
  double center = 0.0;  // Hz
  double height = 0.0;
  double fwhm = 0.0;    // Hz, from half-height crossings
};

// Local maxima with at least the requested prominence, sorted by frequency.
std::vector<Resonance> detect_resonances(const SpectrumScan& scan, double min_prominence);

// Seed heuristics from peak detection; falls back to window-derived guesses
// when fewer than two peaks are visible.
AiryParams make_seed(const SpectrumScan& scan);

// Weighted nonlinear least squares via damped Gauss-Newton
// (Levenberg-style multiplicative damping), internally reparameterized in
// log(finesse) and log(FSR) so positivity never needs a constraint.
// Uses the scan's sigma column as weights when present.
// Converges when the relative step drops below 1e-10; at most 200
// iterations, then throws FitFailure with the last iterate.
AiryFit fit_airy(const SpectrumScan& scan, const AiryParams& seed);

struct FinessePoint {
  double center = 0.0;             // bin center frequency, Hz
  double mean_finesse = 0.0;
  double standard_error = 0.0;     // of the mean; 0 for a single fit
  double mean_peak_transmission = 0.0;  // amplitude + baseline
  int n_fits = 0;
};

struct FinesseCurve {
  std::vector<FinessePoint> points;  // centers strictly increasing
};

// Bins fits by center frequency and aggregates per-bin statistics.
FinesseCurve finesse_vs_frequency(const std::vector<AiryFit>& fits, double bin_width);

struct PeakReport {
  double lambda_c = 0.0;              // m
  double lambda_c_uncertainty = 0.0;  // m, one FSR expressed in wavelength
  double nu_c = 0.0;                  // Hz
  double f_max = 0.0;
  double q = 0.0;
};

// Curve maximum (ties broken toward lower frequency), converted to
// wavelength with a one-FSR uncertainty, plus the Q factor.
PeakReport extract_peak_report(const FinesseCurve& curve, double fsr);

}  // namespace nfres::specfit
