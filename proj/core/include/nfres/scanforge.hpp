#pragma once

#include <cstdint>
#include <vector>

#include "nfres/cavity.hpp"
#include "nfres/spectrum.hpp"

namespace nfres::scanforge {

// Measurement noise channels. Outputs are bit-identical for a fixed seed:
// the generator is the standardized mt19937_64 engine and the normal
// deviates come from an in-house Box-Muller transform, so no
// implementation-defined distribution code is involved.
struct NoiseModel {
  double detector_sigma = 0.0;       // additive Gaussian on transmission
  double frequency_jitter_rel = 0.0; // relative frequency error (wavemeter)
  std::uint64_t seed = 0;

  void validate() const;
};

// Birefringent splitting of the two quasi-linearly polarized cavity modes.
// A polarization-angle setting theta sends the fraction
// extinction * sin^2(theta) of the probe into the second mode.
struct BirefringenceModel {
  double mode_splitting = 0.0;      // Hz, second comb offset
  double polarization_angle = 0.0;  // rad
  double extinction = 0.0;          // in [0, 1]

  void validate() const;
};

// Sub-seed for ensemble member `index`: index 0 keeps the base seed, so a
// one-member ensemble reproduces generate_scan exactly; members are
// independent of generation order (splitmix64 finalizer on seed + index).
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t index);

// Synthetic transmission scan over [window_lo, window_hi] with n_points
// uniform samples: two Airy combs mixed by the polarization setting, the
// transmission evaluated at jittered frequencies and recorded at the
// nominal ones, then detector noise (clamped at zero transmission).
SpectrumScan generate_scan(const cavity::CavityConfig& config, double window_lo,
                           double window_hi, int n_points, const NoiseModel& noise,
                           const BirefringenceModel& biref);

// Ensemble of scans covering a wavelength band: one window per
// FSR/scans_per_fsr step, each of width ~2.2 FSR, `repeats` scans per
// window under derived sub-seeds.
std::vector<SpectrumScan> sweep_band(const cavity::CavityConfig& config,
                                     double band_lambda_lo, double band_lambda_hi,
                                     int scans_per_fsr, int repeats,
                                     const NoiseModel& noise,
                                     const BirefringenceModel& biref,
                                     int n_points = 512);

}  // namespace nfres::scanforge
