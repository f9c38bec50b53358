#include "nfres/scanforge.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include "nfres/constants.hpp"
#include "nfres/errors.hpp"

namespace nfres::scanforge {

namespace {

using constants::pi;

// One standard-normal pair per call via Box-Muller from 53-bit uniforms.
// The engine output sequence is fully standardized, so this is stable
// across platforms and standard libraries.
std::pair<double, double> normal_pair(std::mt19937_64& rng) {
  double u1;
  do {
    u1 = (rng() >> 11) * 0x1.0p-53;
  } while (u1 <= 0.0);
  const double u2 = (rng() >> 11) * 0x1.0p-53;
  const double r = std::sqrt(-2.0 * std::log(u1));
  return {r * std::cos(2.0 * pi * u2), r * std::sin(2.0 * pi * u2)};
}

}  // namespace

void NoiseModel::validate() const {
  if (detector_sigma < 0.0 || frequency_jitter_rel < 0.0) {
    throw ValidationError("NoiseModel: sigmas must be non-negative");
  }
}

void BirefringenceModel::validate() const {
  if (mode_splitting < 0.0) {
    throw ValidationError("BirefringenceModel: mode splitting must be non-negative");
  }
  if (!(extinction >= 0.0 && extinction <= 1.0)) {
    throw ValidationError("BirefringenceModel: extinction must lie in [0, 1]");
  }
}

std::uint64_t derive_seed(std::uint64_t base, std::uint64_t index) {
  if (index == 0) return base;
  // splitmix64 finalizer.
  std::uint64_t z = base + index * 0x9E3779B97F4A7C15ull;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

SpectrumScan generate_scan(const cavity::CavityConfig& config, double window_lo,
                           double window_hi, int n_points, const NoiseModel& noise,
                           const BirefringenceModel& biref) {
  config.validate();
  noise.validate();
  biref.validate();
  if (n_points < 16) {
    throw ValidationError("generate_scan: need at least 16 points");
  }
  if (!(window_hi > window_lo)) {
    throw ValidationError("generate_scan: window must have positive width");
  }

  const double sin_t = std::sin(biref.polarization_angle);
  const double mix = biref.extinction * sin_t * sin_t;  // weight of mode B

  std::mt19937_64 rng(noise.seed);
  SpectrumScan scan;
  scan.frequency.resize(n_points);
  scan.transmission.resize(n_points);
  for (int i = 0; i < n_points; ++i) {
    const double nu = window_lo + (window_hi - window_lo) * i / (n_points - 1);
    // One jitter deviate and one detector deviate per sample, drawn
    // unconditionally so the stream layout does not depend on which noise
    // channels are switched on.
    const auto [xi, zeta] = normal_pair(rng);
    const double nu_true = nu * (1.0 + noise.frequency_jitter_rel * xi);

    double t = (1.0 - mix) * cavity::spectrum_point(config, nu_true);
    if (mix > 0.0) {
      t += mix * cavity::spectrum_point(config, nu_true, biref.mode_splitting);
    }
    // Detector noise is kept as-is: clamping negative excursions at the
    // near-zero Airy floor would bias every downstream finesse fit high.
    t += noise.detector_sigma * zeta;

    scan.frequency[i] = nu;
    scan.transmission[i] = t;
  }
  scan.normalization = SpectrumScan::Normalization::raw;
  scan.label = "synthetic";
  return scan;
}

std::vector<SpectrumScan> sweep_band(const cavity::CavityConfig& config,
                                     double band_lambda_lo, double band_lambda_hi,
                                     int scans_per_fsr, int repeats,
                                     const NoiseModel& noise,
                                     const BirefringenceModel& biref, int n_points) {
  config.validate();
  if (!(band_lambda_hi > band_lambda_lo) || !(band_lambda_lo > 0.0)) {
    throw ValidationError("sweep_band: invalid wavelength band");
  }
  if (scans_per_fsr < 1 || repeats < 1) {
    throw ValidationError("sweep_band: scans_per_fsr and repeats must be >= 1");
  }

  const double nu_lo = constants::speed_of_light / band_lambda_hi;
  const double nu_hi = constants::speed_of_light / band_lambda_lo;
  const double fsr = config.free_spectral_range;
  const double step = fsr / scans_per_fsr;
  const double half_window = 1.1 * fsr;  // ~2.2 FSR per scan: 2-3 resonances

  const int n_windows = std::max(1, static_cast<int>(std::floor((nu_hi - nu_lo) / step)) + 1);

  std::vector<SpectrumScan> out;
  out.reserve(static_cast<size_t>(n_windows) * repeats);
  std::uint64_t index = 0;
  for (int w = 0; w < n_windows; ++w) {
    const double center = nu_lo + w * step;
    for (int r = 0; r < repeats; ++r, ++index) {
      NoiseModel sub = noise;
      sub.seed = derive_seed(noise.seed, index);
      SpectrumScan scan = generate_scan(config, center - half_window, center + half_window,
                                        n_points, sub, biref);
      std::ostringstream label;
      label << "sweep_w" << w << "_r" << r;
      scan.label = label.str();
      out.push_back(std::move(scan));
    }
  }
  return out;
}

}  // namespace nfres::scanforge
