#pragma once

#include <array>
#include <string>

namespace nfres::fibermode {

// Three-term Sellmeier dispersion model,
//   n^2(lambda) = 1 + sum_i b[i] * lambda^2 / (lambda^2 - c[i]),
// with lambda in micrometers inside the sum.
struct SellmeierModel {
  std::string name;
  std::array<double, 3> b{};       // oscillator strengths
  std::array<double, 3> c_um2{};   // resonance wavelengths squared, um^2
  double min_wavelength = 0.0;     // validity window, m
  double max_wavelength = 0.0;

  // Fused silica at room temperature, coefficients from Malitson,
  // J. Opt. Soc. Am. 55, 1205 (1965); valid 0.21-3.71 um.
  static SellmeierModel fused_silica();

  // Dispersion-free model with n(lambda) = n everywhere; used in tests
  // of scale invariance and available through the config file.
  static SellmeierModel constant_index(double n);
};

// n(lambda) for lambda in meters. Throws ValidationError outside the
// model's validity window.
double refractive_index(const SellmeierModel& model, double wavelength);

}  // namespace nfres::fibermode
