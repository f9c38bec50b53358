#pragma once

// Physical constants (SI, CODATA 2018 exact/recommended values).
// All library interfaces use SI units: m, s, Hz, K, C·m.

namespace nfres::constants {

inline constexpr double speed_of_light = 299792458.0;        // m/s, exact
inline constexpr double vacuum_permittivity = 8.8541878128e-12;  // F/m
inline constexpr double reduced_planck = 1.054571817e-34;    // J·s
inline constexpr double pi = 3.14159265358979323846;

// V-number at which the first higher-order mode group (TE01/TM01/HE21)
// of a two-layer step fiber is cut off; single-mode below this.
inline constexpr double single_mode_v_limit = 2.405;

}  // namespace nfres::constants
