#include "nfres/sellmeier.hpp"

#include <cmath>
#include <sstream>

#include "nfres/errors.hpp"

namespace nfres::fibermode {

SellmeierModel SellmeierModel::fused_silica() {
  SellmeierModel m;
  m.name = "fused_silica_malitson_1965";
  m.b = {0.6961663, 0.4079426, 0.8974794};
  m.c_um2 = {0.0684043 * 0.0684043, 0.1162414 * 0.1162414, 9.896161 * 9.896161};
  m.min_wavelength = 0.21e-6;
  m.max_wavelength = 3.71e-6;
  return m;
}

SellmeierModel SellmeierModel::constant_index(double n) {
  if (!(n > 1.0)) {
    throw ValidationError("constant_index: refractive index must exceed 1");
  }
  SellmeierModel m;
  m.name = "constant_index";
  m.b = {n * n - 1.0, 0.0, 0.0};
  m.c_um2 = {0.0, 0.0, 0.0};
  m.min_wavelength = 0.0;
  m.max_wavelength = 1.0;  // 1 m; effectively unbounded
  return m;
}

double refractive_index(const SellmeierModel& model, double wavelength) {
  if (!(wavelength >= model.min_wavelength && wavelength <= model.max_wavelength)) {
    std::ostringstream os;
    os << "refractive_index: wavelength " << wavelength * 1e9
       << " nm outside validity window [" << model.min_wavelength * 1e9 << ", "
       << model.max_wavelength * 1e9 << "] nm of model " << model.name;
    throw ValidationError(os.str());
  }
  const double l2 = wavelength * 1e6 * wavelength * 1e6;  // um^2
  double n2 = 1.0;
  for (int i = 0; i < 3; ++i) {
    n2 += model.b[i] * l2 / (l2 - model.c_um2[i]);
  }
  if (!(n2 > 0.0) || !std::isfinite(n2)) {
    throw ValidationError("refractive_index: model evaluates to a non-physical index");
  }
  return std::sqrt(n2);
}

}  // namespace nfres::fibermode
