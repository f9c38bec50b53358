#pragma once

#include <array>

#include "nfres/sellmeier.hpp"

namespace nfres::fibermode {

// A vacuum-clad (or uniformly clad) step-index nanofiber.
struct FiberGeometry {
  double radius = 0.0;             // waist radius a, m
  SellmeierModel core_model = SellmeierModel::fused_silica();
  double cladding_index = 1.0;     // n2; vacuum by default

  void validate() const;           // throws ValidationError
};

// Normalized frequency V = (2 pi a / lambda) sqrt(n1^2 - n2^2).
double v_number(const FiberGeometry& geom, double wavelength);

// Wavelength solving V(lambda) = 2.405 inside the dispersion model's
// validity window; the fiber is single-mode for all longer wavelengths.
// Throws NumericError if no root is bracketed by the window.
double single_mode_cutoff(const FiberGeometry& geom);

// Characteristic function of the l = 1 hybrid-mode dispersion relation,
// normalized so that its magnitude is O(1) away from poles:
//   g(n_eff) = X*Y / [ (beta/k)^2 (1/u^2 + 1/w^2)^2 ] - 1
// with X = J1'(u)/(u J1(u)) + K1'(w)/(w K1(w)),
//      Y = n1^2 J1'(u)/(u J1(u)) + n2^2 K1'(w)/(w K1(w)),
// u = a*sqrt(n1^2 k^2 - beta^2), w = a*sqrt(beta^2 - n2^2 k^2).
// The unique zero in (n2, n1) is the fundamental HE11 mode.
double he11_characteristic(const FiberGeometry& geom, double wavelength, double n_eff);

// A solved HE11 mode. All stored field quantities refer to the
// quasi-linearly polarized mode normalized to 1 W of guided power, with
// azimuth phi measured from the polarization axis (the axis of dominant
// transverse field, where the surface intensity is maximal).
//
// Convention for the local surface intensity entering the effective area:
//   I = (1/2) c eps0 n_eff |E|^2,
// i.e. the plane-wave intensity of a wave travelling at the mode's phase
// index. Evaluated just outside the dielectric boundary (r -> a+), where
// surface-adsorbed emitters sit.
struct GuidedMode {
  double wavelength = 0.0;         // m
  double beta = 0.0;               // propagation constant, rad/m
  double n_eff = 0.0;              // beta / k
  double radius = 0.0;             // a, m
  double core_index = 0.0;         // n1(lambda)
  double cladding_index = 1.0;     // n2
  double char_residual = 0.0;      // |g(n_eff)| at the returned root

  // Hybrid-mode polarization parameter and power-normalization amplitude
  // of the longitudinal field ansatz E_z = A J1(h r) (core side).
  double s_param = 0.0;
  double amplitude = 0.0;

  // Quasi-linear-mode field magnitudes at r = a+ on the polarization axis:
  // E = sqrt(2) (i e_r_surf, 0, e_z_surf) there, and the azimuthal
  // component reaches sqrt(2) e_phi_surf at phi = pi/2. V/m at 1 W.
  double e_r_surf = 0.0;
  double e_phi_surf = 0.0;
  double e_z_surf = 0.0;

  double surface_intensity_ratio = 0.0;  // I_surf/P at phi = 0, 1/m^2
  double a_eff_surf = 0.0;               // 1 / surface_intensity_ratio, m^2
  double power_fraction_outside = 0.0;   // evanescent share of guided power
};

// Solves the exact two-layer hybrid-mode dispersion relation for the
// fundamental HE11 mode: 64-interval bracket scan on (n2, n1) followed by
// bisection. Throws NumericError when no sign change exists (mode not
// guided / geometry outside the supported regime).
GuidedMode solve_he11(const FiberGeometry& geom, double wavelength);

// Radial profile functions of the solved mode in the quasi-circular basis,
// evaluated at radius r (either side of the boundary). Real-valued; the
// physical sigma+ fields are
//   E = (i ER, -EPhi*, EZ) e^{i phi},  H = (HR, i HPhi, ...) e^{i phi}
// up to the common propagation factor. Used by the boundary-condition
// tests and by the quadrature that normalizes the power.
struct RadialFields {
  double e_r = 0.0;
  double e_phi = 0.0;
  double e_z = 0.0;
  double h_r = 0.0;
  double h_phi = 0.0;
};
RadialFields he11_radial_fields(const GuidedMode& mode, double r);

// Emitter dipole orientation relative to the local mode field.
struct DipoleOrientation {
  enum class Kind { aligned, orientation_averaged, unit_vector };
  Kind kind = Kind::aligned;
  std::array<double, 3> d{0.0, 0.0, 0.0};  // (radial, azimuthal, axial)

  // Perfect overlap with the local polarization: projection factor 1.
  static DipoleOrientation aligned();
  // Isotropic average of the squared projection: factor 1/3.
  static DipoleOrientation orientation_averaged();
  // Explicit real unit vector in the local (r, phi, z) frame at the
  // emitter position; must have unit norm within 1e-12.
  static DipoleOrientation along(double d_r, double d_phi, double d_z);
};

// Effective surface mode area A = P / (I_surf(azimuth) * projection),
// for an emitter on the outer fiber surface at the given azimuth
// (radians from the polarization axis). Throws ValidationError when the
// dipole projection vanishes (no coupling; the area diverges).
double mode_area_surface(const GuidedMode& mode, const DipoleOrientation& orientation,
                         double azimuth);

}  // namespace nfres::fibermode
