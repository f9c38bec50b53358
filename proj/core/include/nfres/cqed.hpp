#pragma once

namespace nfres::cqed {

// Rates follow the half-width convention: gamma0 is half the free-space
// spontaneous emission rate, kappa half the cavity energy decay rate
// (kappa = omega / (2 Q)). Keeping every rate a half-width avoids
// factor-of-two drift between the coupling formulas.
struct EmitterParams {
  double dipole_moment = 0.0;         // C*m
  double free_space_linewidth = 0.0;  // gamma0, 1/s (half width)
  double transition_wavelength = 0.0; // m

  void validate() const;
};

enum class Orientation { aligned, orientation_averaged };

// Half the single-photon Rabi frequency: g = (1/2) sqrt(2 mu^2 omega / (hbar eps0 V)).
double coupling_g(const EmitterParams& emitter, double mode_volume);

// kappa = omega / (2 Q) for a resonance at the given wavelength.
double cavity_kappa(double q_factor, double wavelength);

// C = g^2 / (2 gamma0 kappa). Invariant under the cavity-length rescaling
// (g, kappa) -> (g/sqrt(s), kappa/s).
double cooperativity(double g, double gamma0, double kappa);

// F_P = 3 lambda^3 Q / (4 pi^2 V) for an aligned dipole; divided by 3 for
// an orientation-averaged one.
double purcell(double q_factor, double mode_volume, double wavelength,
               Orientation orientation = Orientation::aligned);

// V = A_eff_surf * c / (2 FSR): effective area times the optical cavity
// length inferred from the free spectral range.
double mode_volume(double a_eff_surf, double fsr);

// eta_c = (eta P_tof + F_P) / (P_tof + F_P): channeling efficiency with
// mirrors, from the bare-fiber efficiency eta, the bare-fiber rate
// enhancement P_tof, and the cavity Purcell factor.
double channeling_efficiency(double eta, double p_tof, double f_p);

// Smallest bare-fiber efficiency eta for which eta_c reaches the target;
// clamped to 0 when any eta suffices.
double eta_threshold(double p_tof, double f_p, double eta_c_target);

// gamma0 (half width) of a dipole mu radiating at the given wavelength in
// free space: mu^2 omega^3 / (6 pi eps0 hbar c^3). With this gamma0 the
// identity 2 C = F_P holds exactly.
double free_space_gamma0(double dipole_moment, double wavelength);

}  // namespace nfres::cqed
