#include "nfres/thermo.hpp"

#include <cmath>

#include "nfres/errors.hpp"

namespace nfres::thermo {

void ThermoMeasurement::validate() const {
  if (!(lambda_initial > 0.0) || !(lambda_final > 0.0)) {
    throw ValidationError("ThermoMeasurement: wavelengths must be positive");
  }
  if (t_initial == t_final) {
    throw ValidationError("ThermoMeasurement: temperatures must differ");
  }
  if (lambda_uncertainty < 0.0 || band_overlap_sigma < 0.0) {
    throw ValidationError("ThermoMeasurement: uncertainties must be non-negative");
  }
}

void SilicaThermoParams::validate() const {
  if (!(n0 > 1.0)) {
    throw ValidationError("SilicaThermoParams: n0 must exceed 1");
  }
  if (!(photoelastic_coefficient >= 0.0 && photoelastic_coefficient < 1.0)) {
    throw ValidationError("SilicaThermoParams: photoelastic coefficient must lie in [0, 1)");
  }
}

double predict_shift(double lambda0, double alpha, double kappa_avg, double delta_t) {
  if (!(lambda0 > 0.0)) {
    throw ValidationError("predict_shift: lambda0 must be positive");
  }
  return lambda0 * (alpha + kappa_avg) * delta_t;
}

ThermoExtraction extract_thermo_optic(const ThermoMeasurement& meas,
                                      const SilicaThermoParams& params) {
  meas.validate();
  params.validate();
  const double li = meas.lambda_initial;
  const double lf = meas.lambda_final;
  const double dt = meas.t_final - meas.t_initial;
  const double rel_shift = (lf - li) / li;

  ThermoExtraction out;
  out.kappa_avg = rel_shift / dt - params.alpha;
  out.dn_over_n = out.kappa_avg * dt;

  // First-order propagation of rel_shift = (lf - li)/li:
  //   d/dlf = 1/li, d/dli = -lf/li^2,
  // plus the band-overlap width entering once on the shift scale.
  const double sp = meas.lambda_uncertainty;
  const double sb = meas.band_overlap_sigma;
  const double var_rel = sp * sp / (li * li) + sp * sp * lf * lf / (li * li * li * li) +
                         sb * sb / (li * li);
  const double sigma_rel = std::sqrt(var_rel);
  out.kappa_sigma = sigma_rel / std::abs(dt);
  out.dn_over_n_sigma = sigma_rel;
  return out;
}

double strain_from_shift(double dlambda, double lambda0, double photoelastic_coefficient) {
  if (!(lambda0 > 0.0)) {
    throw ValidationError("strain_from_shift: lambda0 must be positive");
  }
  if (!(photoelastic_coefficient < 1.0)) {
    throw ValidationError("strain_from_shift: photoelastic coefficient must be < 1");
  }
  return (dlambda / lambda0) / (1.0 - photoelastic_coefficient);
}

double roundtrip_consistency(const ThermoMeasurement& meas, const SilicaThermoParams& params) {
  const ThermoExtraction ex = extract_thermo_optic(meas, params);
  const double dt = meas.t_final - meas.t_initial;
  const double predicted =
      predict_shift(meas.lambda_initial, params.alpha, ex.kappa_avg, dt);
  const double measured = meas.lambda_final - meas.lambda_initial;
  return std::abs(predicted - measured);
}

}  // namespace nfres::thermo
