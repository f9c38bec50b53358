#pragma once

namespace nfres::thermo {

// Center wavelengths of one resonator measured at two temperatures.
// Two uncertainty channels enter the extracted coefficient:
//  - lambda_uncertainty: statistical, per endpoint (e.g. one FSR of
//    wavelength resolution); combined in quadrature over both endpoints;
//  - band_overlap_sigma: the reflection-band overlap width, shared by the
//    two spectra and therefore applied once to the shift.
struct ThermoMeasurement {
  double lambda_initial = 0.0;      // m
  double lambda_final = 0.0;        // m
  double t_initial = 0.0;           // K
  double t_final = 0.0;             // K
  double lambda_uncertainty = 0.0;  // m, per endpoint
  double band_overlap_sigma = 0.0;  // m, once per shift

  void validate() const;
};

struct SilicaThermoParams {
  double alpha = 0.55e-6;                 // thermal expansion, 1/K
  double n0 = 1.4525;                     // index near the Bragg wavelength
  double photoelastic_coefficient = 0.22; // p_e

  void validate() const;
};

struct ThermoExtraction {
  double kappa_avg = 0.0;        // temperature-averaged (1/n0) dn/dT, 1/K
  double kappa_sigma = 0.0;      // propagated, 1/K
  double dn_over_n = 0.0;        // fractional index change over the ramp
  double dn_over_n_sigma = 0.0;
};

// Bragg-wavelength shift lambda0 * (alpha + kappa_avg) * dT, the
// constant-coefficient integration of the thermo-optic shift relation.
double predict_shift(double lambda0, double alpha, double kappa_avg, double delta_t);

// kappa_avg = (dlambda/lambda_i)/dT - alpha, with first-order error
// propagation from both endpoint uncertainties and the band-overlap width.
ThermoExtraction extract_thermo_optic(const ThermoMeasurement& meas,
                                      const SilicaThermoParams& params);

// Axial strain from a Bragg-wavelength shift: (dlambda/lambda0)/(1 - p_e).
double strain_from_shift(double dlambda, double lambda0, double photoelastic_coefficient);

// |predict_shift(extracted kappa) - measured shift|; an algebraic identity
// up to rounding, returned in meters.
double roundtrip_consistency(const ThermoMeasurement& meas, const SilicaThermoParams& params);

}  // namespace nfres::thermo
