#include "nfres/cqed.hpp"

#include <cmath>

#include "nfres/constants.hpp"
#include "nfres/errors.hpp"

namespace nfres::cqed {

namespace {
using constants::pi;
using constants::reduced_planck;
using constants::speed_of_light;
using constants::vacuum_permittivity;

double omega_of(double wavelength) { return 2.0 * pi * speed_of_light / wavelength; }
}  // namespace

void EmitterParams::validate() const {
  if (!(dipole_moment > 0.0) || !(free_space_linewidth > 0.0) ||
      !(transition_wavelength > 0.0)) {
    throw ValidationError("EmitterParams: all fields must be positive");
  }
}

double coupling_g(const EmitterParams& emitter, double mode_volume) {
  emitter.validate();
  if (!(mode_volume > 0.0)) {
    throw ValidationError("coupling_g: mode volume must be positive");
  }
  const double omega = omega_of(emitter.transition_wavelength);
  const double mu = emitter.dipole_moment;
  return 0.5 * std::sqrt(2.0 * mu * mu * omega /
                         (reduced_planck * vacuum_permittivity * mode_volume));
}

double cavity_kappa(double q_factor, double wavelength) {
  if (!(q_factor > 0.0) || !(wavelength > 0.0)) {
    throw ValidationError("cavity_kappa: inputs must be positive");
  }
  return omega_of(wavelength) / (2.0 * q_factor);
}

double cooperativity(double g, double gamma0, double kappa) {
  if (!(g > 0.0) || !(gamma0 > 0.0) || !(kappa > 0.0)) {
    throw ValidationError("cooperativity: rates must be positive");
  }
  return g * g / (2.0 * gamma0 * kappa);
}

double purcell(double q_factor, double mode_volume, double wavelength,
               Orientation orientation) {
  if (!(q_factor >= 0.0) || !(mode_volume > 0.0) || !(wavelength > 0.0)) {
    throw ValidationError("purcell: inputs must be positive");
  }
  const double lam3 = wavelength * wavelength * wavelength;
  const double aligned = 3.0 * lam3 * q_factor / (4.0 * pi * pi * mode_volume);
  return orientation == Orientation::aligned ? aligned : aligned / 3.0;
}

double mode_volume(double a_eff_surf, double fsr) {
  if (!(a_eff_surf > 0.0) || !(fsr > 0.0)) {
    throw ValidationError("mode_volume: inputs must be positive");
  }
  return a_eff_surf * speed_of_light / (2.0 * fsr);
}

double channeling_efficiency(double eta, double p_tof, double f_p) {
  if (!(eta >= 0.0 && eta <= 1.0)) {
    throw ValidationError("channeling_efficiency: eta must lie in [0, 1]");
  }
  if (!(p_tof >= 1.0)) {
    throw ValidationError("channeling_efficiency: P_tof must be >= 1");
  }
  if (!(f_p >= 0.0)) {
    throw ValidationError("channeling_efficiency: Purcell factor must be >= 0");
  }
  return (eta * p_tof + f_p) / (p_tof + f_p);
}

double eta_threshold(double p_tof, double f_p, double eta_c_target) {
  if (!(p_tof >= 1.0) || !(f_p >= 0.0)) {
    throw ValidationError("eta_threshold: P_tof must be >= 1 and F_P >= 0");
  }
  if (!(eta_c_target > 0.0 && eta_c_target <= 1.0)) {
    throw ValidationError("eta_threshold: target must lie in (0, 1]");
  }
  // eta* = target + (target - 1) F_P / P_tof, never above the target itself;
  // any target <= 1 is reachable, so only the lower clamp is needed.
  const double eta = (eta_c_target * (p_tof + f_p) - f_p) / p_tof;
  return std::max(eta, 0.0);
}

double free_space_gamma0(double dipole_moment, double wavelength) {
  if (!(dipole_moment > 0.0) || !(wavelength > 0.0)) {
    throw ValidationError("free_space_gamma0: inputs must be positive");
  }
  const double omega = omega_of(wavelength);
  const double c3 = speed_of_light * speed_of_light * speed_of_light;
  return dipole_moment * dipole_moment * omega * omega * omega /
         (6.0 * pi * vacuum_permittivity * reduced_planck * c3);
}

}  // namespace nfres::cqed
