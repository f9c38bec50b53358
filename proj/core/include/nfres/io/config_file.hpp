#pragma once

#include <string>

#include "nfres/cavity.hpp"
#include "nfres/cqed.hpp"
#include "nfres/fibermode.hpp"
#include "nfres/scanforge.hpp"
#include "nfres/thermo.hpp"

namespace nfres::io {

// Measured quantities feeding the inversion / thermo / report workflows.
// Defaults reproduce the reference cryogenic nanofiber resonator data set.
struct MeasuredBlock {
  double finesse = 29.4;
  double peak_over_tc = 0.14;
  double finesse_pretaper = 177.7;
  double lambda_warm = 852.5555e-9;   // m, room-temperature center
  double lambda_cold = 851.8944e-9;   // m, cold center
  double t_warm = 295.0;              // K
  double t_cold = 4.6;                // K
  double sigma_point = 0.0026e-9;     // m, per-endpoint resolution (one FSR)
  double sigma_band = 0.1e-9;         // m, reflection-band overlap width
  double warmup_shift = 0.0209e-9;    // m, room-T shift before/after cooldown
  double lambda2_warm = 852.3305e-9;  // m, second (untapered) resonator
  double shift2 = -0.7969e-9;         // m
  double sigma2_point = 0.0097e-9;    // m, two FSR of the untapered resonator
};

struct EmitterBlock {
  double wavelength = 852e-9;  // m
  double eta_guided = 0.2;     // bare-fiber channeling efficiency (not a
                               // measured value; override per emitter)
  double p_tof = 1.57;         // bare-fiber rate enhancement
  double dipole_moment = 0.0;  // C*m; 0 = unset
  double gamma0 = 0.0;         // 1/s half width; 0 = derive from the dipole
};

// Flat sectioned key=value configuration binding all modules together.
struct ToolkitConfig {
  fibermode::FiberGeometry fiber;
  cavity::CavityConfig cavity;
  EmitterBlock emitter;
  thermo::SilicaThermoParams thermo;
  scanforge::NoiseModel noise;
  scanforge::BirefringenceModel birefringence;
  MeasuredBlock measured;
  std::string output_directory = ".";

  static ToolkitConfig defaults();
  void validate() const;
};

ToolkitConfig parse_config(const std::string& text, const std::string& origin = "<string>");
ToolkitConfig load_config(const std::string& path);

// Canonical serialization; parse(serialize(c)) == c for every value, and
// the digest of this text identifies the resolved configuration in run
// reports.
std::string serialize_config(const ToolkitConfig& config);

}  // namespace nfres::io
