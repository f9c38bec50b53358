#include "nfres/io/config_file.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

#include "nfres/errors.hpp"

namespace nfres::io {

namespace {

std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

const char* band_model_name(cavity::FbgMirror::BandModel m) {
  return m == cavity::FbgMirror::BandModel::gaussian ? "gaussian" : "coupled_mode";
}

struct Parser {
  const std::string& origin;
  ToolkitConfig cfg = ToolkitConfig::defaults();

  [[noreturn]] void fail(int line, const std::string& what) const {
    std::ostringstream os;
    os << origin << ":" << line << ": " << what;
    throw ValidationError(os.str());
  }

  double num(int line, const std::string& value) const {
    try {
      size_t pos = 0;
      const double v = std::stod(value, &pos);
      if (trim(value.substr(pos)).empty() && std::isfinite(v)) return v;
    } catch (const std::exception&) {
    }
    fail(line, "expected a number, got '" + value + "'");
  }

  std::uint64_t unum(int line, const std::string& value) const {
    try {
      size_t pos = 0;
      const unsigned long long v = std::stoull(value, &pos);
      if (trim(value.substr(pos)).empty()) return v;
    } catch (const std::exception&) {
    }
    fail(line, "expected an unsigned integer, got '" + value + "'");
  }

  cavity::FbgMirror& mirror(int idx) {
    return idx == 1 ? cfg.cavity.mirror_1 : cfg.cavity.mirror_2;
  }

  void set(int line, const std::string& section, const std::string& key,
           const std::string& value) {
    if (section == "fiber") {
      if (key == "diameter_nm") {
        cfg.fiber.radius = 0.5 * num(line, value) * 1e-9;
      } else if (key == "diameter_m") {
        cfg.fiber.radius = 0.5 * num(line, value);
      } else if (key == "radius_nm") {
        cfg.fiber.radius = num(line, value) * 1e-9;
      } else if (key == "radius_m") {
        cfg.fiber.radius = num(line, value);
      } else if (key == "cladding_index") {
        cfg.fiber.cladding_index = num(line, value);
      } else if (key == "sellmeier") {
        if (value == "fused_silica_malitson_1965") {
          cfg.fiber.core_model = fibermode::SellmeierModel::fused_silica();
        } else if (value.rfind("constant:", 0) == 0) {
          cfg.fiber.core_model =
              fibermode::SellmeierModel::constant_index(num(line, value.substr(9)));
        } else {
          fail(line, "unknown sellmeier model '" + value + "'");
        }
      } else if (key == "sellmeier_b") {
        std::istringstream is(value);
        if (!(is >> cfg.fiber.core_model.b[0] >> cfg.fiber.core_model.b[1] >>
              cfg.fiber.core_model.b[2])) {
          fail(line, "sellmeier_b needs 3 numbers");
        }
        cfg.fiber.core_model.name = "custom";
      } else if (key == "sellmeier_c_um2") {
        std::istringstream is(value);
        if (!(is >> cfg.fiber.core_model.c_um2[0] >> cfg.fiber.core_model.c_um2[1] >>
              cfg.fiber.core_model.c_um2[2])) {
          fail(line, "sellmeier_c_um2 needs 3 numbers");
        }
        cfg.fiber.core_model.name = "custom";
      } else if (key == "sellmeier_window_um") {
        double lo, hi;
        std::istringstream is(value);
        if (!(is >> lo >> hi)) {
          fail(line, "sellmeier_window_um needs 2 numbers");
        }
        cfg.fiber.core_model.min_wavelength = lo * 1e-6;
        cfg.fiber.core_model.max_wavelength = hi * 1e-6;
      } else {
        fail(line, "unknown key '" + key + "' in [fiber]");
      }
    } else if (section == "cavity") {
      if (key == "single_pass_transmission") {
        cfg.cavity.single_pass_transmission = num(line, value);
      } else if (key == "fsr_ghz") {
        cfg.cavity.free_spectral_range = num(line, value) * 1e9;
      } else if (key == "fsr_hz") {
        cfg.cavity.free_spectral_range = num(line, value);
      } else if (key == "phase_offset_rad") {
        cfg.cavity.phase_offset = num(line, value);
      } else if (key.size() > 2 && (key.back() == '1' || key.back() == '2')) {
        const int idx = key.back() - '0';
        const std::string base = key.substr(0, key.size() - 2);  // strip "_N"
        auto& m = mirror(idx);
        auto refresh_peak = [&m] {
          if (m.band_model == cavity::FbgMirror::BandModel::coupled_mode &&
              m.kappa > 0.0 && m.grating_length > 0.0) {
            const double t = std::tanh(m.kappa * m.grating_length);
            m.peak_reflectivity = t * t;
          }
        };
        if (base == "bragg_wavelength_nm") {
          m.bragg_wavelength = num(line, value) * 1e-9;
        } else if (base == "bragg_wavelength_m") {
          m.bragg_wavelength = num(line, value);
        } else if (base == "peak_reflectivity") {
          m.peak_reflectivity = num(line, value);
        } else if (base == "hwhm_nm") {
          m.hwhm = num(line, value) * 1e-9;
        } else if (base == "hwhm_m") {
          m.hwhm = num(line, value);
        } else if (base == "band_model") {
          if (value == "gaussian") {
            m.band_model = cavity::FbgMirror::BandModel::gaussian;
          } else if (value == "coupled_mode") {
            m.band_model = cavity::FbgMirror::BandModel::coupled_mode;
            refresh_peak();
          } else {
            fail(line, "unknown band model '" + value + "'");
          }
        } else if (base == "kappa_per_m") {
          m.kappa = num(line, value);
          refresh_peak();
        } else if (base == "grating_length_mm") {
          m.grating_length = num(line, value) * 1e-3;
          refresh_peak();
        } else if (base == "grating_length_m") {
          m.grating_length = num(line, value);
          refresh_peak();
        } else {
          fail(line, "unknown key '" + key + "' in [cavity]");
        }
      } else {
        fail(line, "unknown key '" + key + "' in [cavity]");
      }
    } else if (section == "emitter") {
      if (key == "wavelength_nm") {
        cfg.emitter.wavelength = num(line, value) * 1e-9;
      } else if (key == "wavelength_m") {
        cfg.emitter.wavelength = num(line, value);
      } else if (key == "eta_guided") {
        cfg.emitter.eta_guided = num(line, value);
      } else if (key == "p_tof") {
        cfg.emitter.p_tof = num(line, value);
      } else if (key == "dipole_moment_Cm") {
        cfg.emitter.dipole_moment = num(line, value);
      } else if (key == "gamma0_per_s") {
        cfg.emitter.gamma0 = num(line, value);
      } else {
        fail(line, "unknown key '" + key + "' in [emitter]");
      }
    } else if (section == "thermo") {
      if (key == "alpha_per_K") {
        cfg.thermo.alpha = num(line, value);
      } else if (key == "photoelastic_coefficient") {
        cfg.thermo.photoelastic_coefficient = num(line, value);
      } else if (key == "n0") {
        cfg.thermo.n0 = num(line, value);
      } else {
        fail(line, "unknown key '" + key + "' in [thermo]");
      }
    } else if (section == "noise") {
      if (key == "detector_sigma") {
        cfg.noise.detector_sigma = num(line, value);
      } else if (key == "frequency_jitter_rel") {
        cfg.noise.frequency_jitter_rel = num(line, value);
      } else if (key == "seed") {
        cfg.noise.seed = unum(line, value);
      } else if (key == "mode_splitting_ghz") {
        cfg.birefringence.mode_splitting = num(line, value) * 1e9;
      } else if (key == "mode_splitting_hz") {
        cfg.birefringence.mode_splitting = num(line, value);
      } else if (key == "polarization_angle_rad") {
        cfg.birefringence.polarization_angle = num(line, value);
      } else if (key == "extinction") {
        cfg.birefringence.extinction = num(line, value);
      } else {
        fail(line, "unknown key '" + key + "' in [noise]");
      }
    } else if (section == "measured") {
      static const std::map<std::string, double MeasuredBlock::*> length_keys = {
          {"lambda_warm", &MeasuredBlock::lambda_warm},
          {"lambda_cold", &MeasuredBlock::lambda_cold},
          {"sigma_point", &MeasuredBlock::sigma_point},
          {"sigma_band", &MeasuredBlock::sigma_band},
          {"warmup_shift", &MeasuredBlock::warmup_shift},
          {"lambda2_warm", &MeasuredBlock::lambda2_warm},
          {"shift2", &MeasuredBlock::shift2},
          {"sigma2_point", &MeasuredBlock::sigma2_point},
      };
      static const std::map<std::string, double MeasuredBlock::*> plain_keys = {
          {"finesse", &MeasuredBlock::finesse},
          {"peak_over_tc", &MeasuredBlock::peak_over_tc},
          {"finesse_pretaper", &MeasuredBlock::finesse_pretaper},
          {"t_warm_K", &MeasuredBlock::t_warm},
          {"t_cold_K", &MeasuredBlock::t_cold},
      };
      auto strip_suffix = [](const std::string& k, const char* suffix) -> std::string {
        const size_t n = std::string(suffix).size();
        if (k.size() > n && k.compare(k.size() - n, n, suffix) == 0) {
          return k.substr(0, k.size() - n);
        }
        return {};
      };
      if (const auto base = strip_suffix(key, "_nm"); !base.empty()) {
        if (auto it = length_keys.find(base); it != length_keys.end()) {
          cfg.measured.*(it->second) = num(line, value) * 1e-9;
          return;
        }
      }
      if (const auto base = strip_suffix(key, "_m"); !base.empty()) {
        if (auto it = length_keys.find(base); it != length_keys.end()) {
          cfg.measured.*(it->second) = num(line, value);
          return;
        }
      }
      if (auto it = plain_keys.find(key); it != plain_keys.end()) {
        cfg.measured.*(it->second) = num(line, value);
      } else {
        fail(line, "unknown key '" + key + "' in [measured]");
      }
    } else if (section == "output") {
      if (key == "directory") {
        cfg.output_directory = value;
      } else {
        fail(line, "unknown key '" + key + "' in [output]");
      }
    } else {
      fail(line, "unknown section [" + section + "]");
    }
  }
};

}  // namespace

ToolkitConfig ToolkitConfig::defaults() {
  ToolkitConfig c;
  c.fiber.radius = 250e-9;
  c.fiber.core_model = fibermode::SellmeierModel::fused_silica();
  c.fiber.cladding_index = 1.0;

  c.cavity.mirror_1 = cavity::FbgMirror::gaussian_mirror(851.8944e-9, 0.962, 0.1e-9);
  c.cavity.mirror_2 = c.cavity.mirror_1;
  c.cavity.single_pass_transmission = 0.934;
  c.cavity.free_spectral_range = 1.05e9;
  c.cavity.phase_offset = 0.0;

  c.noise.detector_sigma = 0.01;
  c.noise.frequency_jitter_rel = 0.0;
  c.noise.seed = 42;
  return c;
}

void ToolkitConfig::validate() const {
  fiber.validate();
  cavity.validate();
  noise.validate();
  birefringence.validate();
  thermo.validate();
  if (!(emitter.wavelength > 0.0)) {
    throw ValidationError("ToolkitConfig: emitter wavelength must be positive");
  }
  if (!(emitter.eta_guided >= 0.0 && emitter.eta_guided <= 1.0)) {
    throw ValidationError("ToolkitConfig: eta_guided must lie in [0, 1]");
  }
  if (!(emitter.p_tof >= 1.0)) {
    throw ValidationError("ToolkitConfig: p_tof must be >= 1");
  }
}

ToolkitConfig parse_config(const std::string& text, const std::string& origin) {
  Parser parser{origin};
  std::istringstream is(text);
  std::string line;
  std::string section;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    const std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    if (t.front() == '[') {
      if (t.back() != ']') {
        parser.fail(lineno, "malformed section header");
      }
      section = trim(t.substr(1, t.size() - 2));
      continue;
    }
    const auto eq = t.find('=');
    if (eq == std::string::npos) {
      parser.fail(lineno, "expected key = value");
    }
    const std::string key = trim(t.substr(0, eq));
    const std::string value = trim(t.substr(eq + 1));
    if (section.empty()) {
      parser.fail(lineno, "key outside any section");
    }
    parser.set(lineno, section, key, value);
  }
  parser.cfg.validate();
  return parser.cfg;
}

ToolkitConfig load_config(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) {
    throw ValidationError("cannot open config file: " + path);
  }
  std::ostringstream buf;
  buf << f.rdbuf();
  return parse_config(buf.str(), path);
}

// Canonical serialization sticks to SI keys: unit-converted keys like
// radius_nm are accepted on input for hand-written configs, but converting
// back and forth is not bit-exact, and the canonical text must be.
std::string serialize_config(const ToolkitConfig& c) {
  std::ostringstream os;
  os << "[fiber]\n";
  os << "radius_m = " << fmt17(c.fiber.radius) << "\n";
  if (c.fiber.core_model.name == "fused_silica_malitson_1965") {
    os << "sellmeier = fused_silica_malitson_1965\n";
  } else {
    os << "sellmeier_b = " << fmt17(c.fiber.core_model.b[0]) << " "
       << fmt17(c.fiber.core_model.b[1]) << " " << fmt17(c.fiber.core_model.b[2]) << "\n";
    os << "sellmeier_c_um2 = " << fmt17(c.fiber.core_model.c_um2[0]) << " "
       << fmt17(c.fiber.core_model.c_um2[1]) << " " << fmt17(c.fiber.core_model.c_um2[2])
       << "\n";
    os << "sellmeier_window_um = " << fmt17(c.fiber.core_model.min_wavelength * 1e6) << " "
       << fmt17(c.fiber.core_model.max_wavelength * 1e6) << "\n";
  }
  os << "cladding_index = " << fmt17(c.fiber.cladding_index) << "\n\n";

  os << "[cavity]\n";
  for (int i = 1; i <= 2; ++i) {
    const auto& m = i == 1 ? c.cavity.mirror_1 : c.cavity.mirror_2;
    os << "band_model_" << i << " = " << band_model_name(m.band_model) << "\n";
    os << "bragg_wavelength_m_" << i << " = " << fmt17(m.bragg_wavelength) << "\n";
    if (m.band_model == cavity::FbgMirror::BandModel::gaussian) {
      os << "peak_reflectivity_" << i << " = " << fmt17(m.peak_reflectivity) << "\n";
      os << "hwhm_m_" << i << " = " << fmt17(m.hwhm) << "\n";
    } else {
      os << "kappa_per_m_" << i << " = " << fmt17(m.kappa) << "\n";
      os << "grating_length_m_" << i << " = " << fmt17(m.grating_length) << "\n";
    }
  }
  os << "single_pass_transmission = " << fmt17(c.cavity.single_pass_transmission) << "\n";
  os << "fsr_hz = " << fmt17(c.cavity.free_spectral_range) << "\n";
  os << "phase_offset_rad = " << fmt17(c.cavity.phase_offset) << "\n\n";

  os << "[emitter]\n";
  os << "wavelength_m = " << fmt17(c.emitter.wavelength) << "\n";
  os << "eta_guided = " << fmt17(c.emitter.eta_guided) << "\n";
  os << "p_tof = " << fmt17(c.emitter.p_tof) << "\n";
  if (c.emitter.dipole_moment > 0.0) {
    os << "dipole_moment_Cm = " << fmt17(c.emitter.dipole_moment) << "\n";
  }
  if (c.emitter.gamma0 > 0.0) {
    os << "gamma0_per_s = " << fmt17(c.emitter.gamma0) << "\n";
  }
  os << "\n[thermo]\n";
  os << "alpha_per_K = " << fmt17(c.thermo.alpha) << "\n";
  os << "photoelastic_coefficient = " << fmt17(c.thermo.photoelastic_coefficient) << "\n";
  os << "n0 = " << fmt17(c.thermo.n0) << "\n\n";

  os << "[noise]\n";
  os << "detector_sigma = " << fmt17(c.noise.detector_sigma) << "\n";
  os << "frequency_jitter_rel = " << fmt17(c.noise.frequency_jitter_rel) << "\n";
  os << "seed = " << c.noise.seed << "\n";
  os << "mode_splitting_hz = " << fmt17(c.birefringence.mode_splitting) << "\n";
  os << "polarization_angle_rad = " << fmt17(c.birefringence.polarization_angle) << "\n";
  os << "extinction = " << fmt17(c.birefringence.extinction) << "\n\n";

  os << "[measured]\n";
  os << "finesse = " << fmt17(c.measured.finesse) << "\n";
  os << "peak_over_tc = " << fmt17(c.measured.peak_over_tc) << "\n";
  os << "finesse_pretaper = " << fmt17(c.measured.finesse_pretaper) << "\n";
  os << "lambda_warm_m = " << fmt17(c.measured.lambda_warm) << "\n";
  os << "lambda_cold_m = " << fmt17(c.measured.lambda_cold) << "\n";
  os << "t_warm_K = " << fmt17(c.measured.t_warm) << "\n";
  os << "t_cold_K = " << fmt17(c.measured.t_cold) << "\n";
  os << "sigma_point_m = " << fmt17(c.measured.sigma_point) << "\n";
  os << "sigma_band_m = " << fmt17(c.measured.sigma_band) << "\n";
  os << "warmup_shift_m = " << fmt17(c.measured.warmup_shift) << "\n";
  os << "lambda2_warm_m = " << fmt17(c.measured.lambda2_warm) << "\n";
  os << "shift2_m = " << fmt17(c.measured.shift2) << "\n";
  os << "sigma2_point_m = " << fmt17(c.measured.sigma2_point) << "\n\n";

  os << "[output]\n";
  os << "directory = " << c.output_directory << "\n";
  return os.str();
}

}  // namespace nfres::io
