#include "nfres/fibermode.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <vector>

#include "nfres/constants.hpp"
#include "nfres/errors.hpp"

namespace nfres::fibermode {

namespace {

using constants::pi;
using constants::speed_of_light;
using constants::vacuum_permittivity;

// Gauss-Legendre nodes/weights on [-1, 1], computed once per order by
// Newton iteration on P_n (good to machine precision for n <= 128).
struct GaussRule {
  std::vector<double> x;
  std::vector<double> w;
};

GaussRule gauss_legendre(int n) {
  GaussRule rule;
  rule.x.resize(n);
  rule.w.resize(n);
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double x = std::cos(pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-15) break;
    }
    rule.x[i] = -x;
    rule.x[n - 1 - i] = x;
    rule.w[i] = rule.w[n - 1 - i] = 2.0 / ((1.0 - x * x) * dp * dp);
  }
  return rule;
}

template <typename F>
double integrate(const F& f, double a, double b, const GaussRule& rule) {
  const double mid = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  double sum = 0.0;
  for (size_t i = 0; i < rule.x.size(); ++i) {
    sum += rule.w[i] * f(mid + half * rule.x[i]);
  }
  return sum * half;
}

struct ModeParams {
  double k = 0.0;      // vacuum wavenumber
  double beta = 0.0;
  double h = 0.0;      // core transverse wavenumber
  double q = 0.0;      // cladding decay constant
  double u = 0.0;      // h * a
  double w = 0.0;      // q * a
  double n1 = 0.0;
  double n2 = 0.0;
  double a = 0.0;
};

ModeParams mode_params(double radius, double n1, double n2, double wavelength,
                       double n_eff) {
  ModeParams p;
  p.k = 2.0 * pi / wavelength;
  p.beta = n_eff * p.k;
  p.n1 = n1;
  p.n2 = n2;
  p.a = radius;
  p.h = std::sqrt(std::max(n1 * n1 * p.k * p.k - p.beta * p.beta, 0.0));
  p.q = std::sqrt(std::max(p.beta * p.beta - n2 * n2 * p.k * p.k, 0.0));
  p.u = p.h * radius;
  p.w = p.q * radius;
  return p;
}

// g(n_eff) = X*Y / rhs - 1 with rhs = (beta/k)^2 (1/u^2 + 1/w^2)^2.
double characteristic(const ModeParams& p) {
  const double j0 = std::cyl_bessel_j(0, p.u);
  const double j1 = std::cyl_bessel_j(1, p.u);
  const double k0 = std::cyl_bessel_k(0, p.w);
  const double k1 = std::cyl_bessel_k(1, p.w);
  const double k2 = std::cyl_bessel_k(2, p.w);
  const double j1p = j0 - j1 / p.u;
  const double k1p = -0.5 * (k0 + k2);
  const double ju = j1p / (p.u * j1);
  const double kw = k1p / (p.w * k1);
  const double x = ju + kw;
  const double y = p.n1 * p.n1 * ju + p.n2 * p.n2 * kw;
  const double inv2 = 1.0 / (p.u * p.u) + 1.0 / (p.w * p.w);
  const double rhs = (p.beta / p.k) * (p.beta / p.k) * inv2 * inv2;
  return x * y / rhs - 1.0;
}

// Polarization parameter from E_phi continuity at r = a.
double s_parameter(const ModeParams& p) {
  const double j0 = std::cyl_bessel_j(0, p.u);
  const double j1 = std::cyl_bessel_j(1, p.u);
  const double k0 = std::cyl_bessel_k(0, p.w);
  const double k1 = std::cyl_bessel_k(1, p.w);
  const double k2 = std::cyl_bessel_k(2, p.w);
  const double j1p = j0 - j1 / p.u;
  const double k1p = -0.5 * (k0 + k2);
  return (1.0 / (p.u * p.u) + 1.0 / (p.w * p.w)) /
         (j1p / (p.u * j1) + k1p / (p.w * k1));
}

RadialFields fields_at(const ModeParams& p, double s, double amplitude, double r) {
  const double omega = speed_of_light * p.k;
  const double s1 = p.beta * p.beta * s / (p.n1 * p.n1 * p.k * p.k);
  const double s2 = p.beta * p.beta * s / (p.n2 * p.n2 * p.k * p.k);
  RadialFields f;
  if (r < p.a) {
    const double j0 = std::cyl_bessel_j(0, p.h * r);
    const double j2 = std::cyl_bessel_j(2, p.h * r);
    const double j1 = std::cyl_bessel_j(1, p.h * r);
    const double ce = amplitude * p.beta / (2.0 * p.h);
    const double ch = amplitude * omega * vacuum_permittivity * p.n1 * p.n1 / (2.0 * p.h);
    f.e_r = ce * ((1.0 - s) * j0 - (1.0 + s) * j2);
    f.e_phi = ce * ((1.0 - s) * j0 + (1.0 + s) * j2);
    f.e_z = amplitude * j1;
    f.h_r = ch * ((1.0 - s1) * j0 + (1.0 + s1) * j2);
    f.h_phi = ch * ((1.0 - s1) * j0 - (1.0 + s1) * j2);
  } else {
    const double j1u = std::cyl_bessel_j(1, p.u);
    const double k1w = std::cyl_bessel_k(1, p.w);
    const double rho = j1u / k1w;
    const double k0 = std::cyl_bessel_k(0, p.q * r);
    const double k2 = std::cyl_bessel_k(2, p.q * r);
    const double k1 = std::cyl_bessel_k(1, p.q * r);
    const double ce = amplitude * rho * p.beta / (2.0 * p.q);
    const double ch = amplitude * rho * omega * vacuum_permittivity * p.n2 * p.n2 / (2.0 * p.q);
    f.e_r = ce * ((1.0 - s) * k0 + (1.0 + s) * k2);
    f.e_phi = ce * ((1.0 - s) * k0 - (1.0 + s) * k2);
    f.e_z = amplitude * rho * k1;
    f.h_r = ch * ((1.0 - s2) * k0 - (1.0 + s2) * k2);
    f.h_phi = ch * ((1.0 - s2) * k0 + (1.0 + s2) * k2);
  }
  return f;
}

// Guided power of the quasi-linear mode at unit amplitude:
//   P = pi * integral (E_R H_Phi + E_Phi H_R) r dr  over [0, inf).
double guided_power(const ModeParams& p, double s) {
  static const GaussRule core_rule = gauss_legendre(64);
  static const GaussRule clad_rule = gauss_legendre(32);
  auto integrand = [&](double r) {
    const RadialFields f = fields_at(p, s, 1.0, r);
    return (f.e_r * f.h_phi + f.e_phi * f.h_r) * r;
  };
  double power = pi * integrate(integrand, 0.0, p.a, core_rule);
  // The evanescent tail decays like exp(-2 q r); 16 panels of width 5/q
  // reach exp(-160), far below double precision.
  const double panel = 5.0 / p.q;
  for (int j = 0; j < 16; ++j) {
    power += pi * integrate(integrand, p.a + j * panel, p.a + (j + 1) * panel, clad_rule);
  }
  return power;
}

}  // namespace

void FiberGeometry::validate() const {
  if (!(radius > 0.0)) {
    throw ValidationError("FiberGeometry: radius must be positive");
  }
  if (!(cladding_index >= 1.0)) {
    throw ValidationError("FiberGeometry: cladding index must be >= 1");
  }
  // Spot-check that the core guides against the cladding across the
  // model's window (clipped to the band relevant for visible/NIR work).
  const double lo = std::max(core_model.min_wavelength, 0.3e-6);
  const double hi = std::min(core_model.max_wavelength, 2.0e-6);
  for (double lam : {lo, 0.5 * (lo + hi), hi}) {
    if (refractive_index(core_model, lam) <= cladding_index) {
      throw ValidationError("FiberGeometry: core index does not exceed cladding index");
    }
  }
}

double v_number(const FiberGeometry& geom, double wavelength) {
  geom.validate();
  const double n1 = refractive_index(geom.core_model, wavelength);
  const double n2 = geom.cladding_index;
  return 2.0 * pi * geom.radius / wavelength * std::sqrt(n1 * n1 - n2 * n2);
}

double single_mode_cutoff(const FiberGeometry& geom) {
  geom.validate();
  double lo = geom.core_model.min_wavelength;
  double hi = geom.core_model.max_wavelength;
  auto f = [&](double lam) { return v_number(geom, lam) - constants::single_mode_v_limit; };
  double flo = f(lo);
  double fhi = f(hi);
  if (flo < 0.0 || fhi > 0.0) {
    std::ostringstream os;
    os << "single_mode_cutoff: V(lambda) = " << constants::single_mode_v_limit
       << " has no root inside the dispersion validity window ["
       << lo * 1e9 << ", " << hi * 1e9 << "] nm";
    throw NumericError(os.str());
  }
  // V is strictly decreasing in lambda; plain bisection to machine width.
  for (int i = 0; i < 200 && (hi - lo) > 1e-14 * hi; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (f(mid) > 0.0) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

double he11_characteristic(const FiberGeometry& geom, double wavelength, double n_eff) {
  const double n1 = refractive_index(geom.core_model, wavelength);
  const double n2 = geom.cladding_index;
  if (!(n_eff > n2 && n_eff < n1)) {
    throw ValidationError("he11_characteristic: n_eff must lie in (n2, n1)");
  }
  return characteristic(mode_params(geom.radius, n1, n2, wavelength, n_eff));
}

GuidedMode solve_he11(const FiberGeometry& geom, double wavelength) {
  geom.validate();
  const double n1 = refractive_index(geom.core_model, wavelength);
  const double n2 = geom.cladding_index;
  auto g = [&](double n_eff) {
    return characteristic(mode_params(geom.radius, n1, n2, wavelength, n_eff));
  };

  const double lo_edge = n2 + 1e-9;
  const double hi_edge = n1 - 1e-9;
  constexpr int kScan = 64;

  // Scan for sign changes; keep the one at largest n_eff (that bracket is
  // the fundamental if the geometry ever supports several l = 1 roots).
  double lo = 0.0, hi = 0.0;
  bool found = false;
  double prev_x = lo_edge;
  double prev_g = g(prev_x);
  for (int i = 1; i <= kScan; ++i) {
    const double x = lo_edge + (hi_edge - lo_edge) * i / kScan;
    const double gx = g(x);
    if (std::isfinite(prev_g) && std::isfinite(gx) && prev_g * gx < 0.0) {
      lo = prev_x;
      hi = x;
      found = true;
    }
    prev_x = x;
    prev_g = gx;
  }
  if (!found) {
    std::ostringstream os;
    os << "solve_he11: characteristic function has no sign change on (n2, n1) for "
       << "a = " << geom.radius * 1e9 << " nm, lambda = " << wavelength * 1e9 << " nm";
    throw NumericError(os.str());
  }

  double glo = g(lo);
  for (int i = 0; i < 200 && (hi - lo) > 1e-13; ++i) {
    const double mid = 0.5 * (lo + hi);
    const double gm = g(mid);
    if (gm == 0.0) {
      lo = hi = mid;
      break;
    }
    if (glo * gm < 0.0) {
      hi = mid;
    } else {
      lo = mid;
      glo = gm;
    }
  }
  const double n_eff = 0.5 * (lo + hi);

  const ModeParams p = mode_params(geom.radius, n1, n2, wavelength, n_eff);
  const double s = s_parameter(p);
  const double p_unit = guided_power(p, s);
  if (!(p_unit > 0.0) || !std::isfinite(p_unit)) {
    throw NumericError("solve_he11: power normalization integral failed");
  }
  const double amplitude = 1.0 / std::sqrt(p_unit);  // 1 W

  GuidedMode mode;
  mode.wavelength = wavelength;
  mode.n_eff = n_eff;
  mode.beta = n_eff * p.k;
  mode.radius = geom.radius;
  mode.core_index = n1;
  mode.cladding_index = n2;
  mode.char_residual = std::abs(g(n_eff));
  mode.s_param = s;
  mode.amplitude = amplitude;

  const RadialFields surf = fields_at(p, s, amplitude, geom.radius * (1.0 + 1e-12));
  mode.e_r_surf = surf.e_r;
  mode.e_phi_surf = surf.e_phi;
  mode.e_z_surf = surf.e_z;

  // Quasi-linear mode on the polarization axis: |E|^2 = 2 (E_R^2 + E_Z^2).
  const double e2 = 2.0 * (surf.e_r * surf.e_r + surf.e_z * surf.e_z);
  const double intensity =
      0.5 * speed_of_light * vacuum_permittivity * n_eff * e2;  // P = 1 W
  mode.surface_intensity_ratio = intensity;
  mode.a_eff_surf = 1.0 / intensity;

  // Evanescent share, from the same quadrature split.
  {
    ModeParams pp = p;
    auto integrand = [&](double r) {
      const RadialFields f = fields_at(pp, s, amplitude, r);
      return (f.e_r * f.h_phi + f.e_phi * f.h_r) * r;
    };
    static const GaussRule rule = gauss_legendre(32);
    double outside = 0.0;
    const double panel = 5.0 / p.q;
    for (int j = 0; j < 16; ++j) {
      outside += pi * integrate(integrand, p.a + j * panel, p.a + (j + 1) * panel, rule);
    }
    mode.power_fraction_outside = outside;  // total power is 1 W
  }

  return mode;
}

RadialFields he11_radial_fields(const GuidedMode& mode, double r) {
  if (!(r >= 0.0)) {
    throw ValidationError("he11_radial_fields: r must be non-negative");
  }
  const ModeParams p = mode_params(mode.radius, mode.core_index, mode.cladding_index,
                                   mode.wavelength, mode.n_eff);
  return fields_at(p, mode.s_param, mode.amplitude, r);
}

DipoleOrientation DipoleOrientation::aligned() {
  DipoleOrientation o;
  o.kind = Kind::aligned;
  return o;
}

DipoleOrientation DipoleOrientation::orientation_averaged() {
  DipoleOrientation o;
  o.kind = Kind::orientation_averaged;
  return o;
}

DipoleOrientation DipoleOrientation::along(double d_r, double d_phi, double d_z) {
  const double norm = std::sqrt(d_r * d_r + d_phi * d_phi + d_z * d_z);
  if (std::abs(norm - 1.0) > 1e-12) {
    throw ValidationError("DipoleOrientation: direction must be a unit vector (1e-12)");
  }
  DipoleOrientation o;
  o.kind = Kind::unit_vector;
  o.d = {d_r, d_phi, d_z};
  return o;
}

double mode_area_surface(const GuidedMode& mode, const DipoleOrientation& orientation,
                         double azimuth) {
  if (!(mode.a_eff_surf > 0.0)) {
    throw ValidationError("mode_area_surface: mode is not solved");
  }
  const double cphi = std::cos(azimuth);
  const double sphi = std::sin(azimuth);
  const double er = mode.e_r_surf * cphi;
  const double ep = mode.e_phi_surf * sphi;
  const double ez = mode.e_z_surf * cphi;
  // |E(phi)|^2 = 2 (er^2 + ep^2 + ez^2); the transverse part is in
  // quadrature with E_z, so a real dipole projects onto (er - ep) and ez
  // independently.
  const double e2 = 2.0 * (er * er + ep * ep + ez * ez);
  if (!(e2 > 0.0)) {
    throw ValidationError("mode_area_surface: vanishing surface field at this azimuth");
  }
  double projection = 1.0;
  switch (orientation.kind) {
    case DipoleOrientation::Kind::aligned:
      projection = 1.0;
      break;
    case DipoleOrientation::Kind::orientation_averaged:
      projection = 1.0 / 3.0;
      break;
    case DipoleOrientation::Kind::unit_vector: {
      const double t = orientation.d[0] * er - orientation.d[1] * ep;
      const double l = orientation.d[2] * ez;
      projection = 2.0 * (t * t + l * l) / e2;
      break;
    }
  }
  if (projection < 1e-15) {
    throw ValidationError(
        "mode_area_surface: dipole orthogonal to the local field; "
        "effective area is infinite (zero coupling)");
  }
  const double intensity = 0.5 * constants::speed_of_light *
                           constants::vacuum_permittivity * mode.n_eff * e2;
  return 1.0 / (intensity * projection);
}

}  // namespace nfres::fibermode
