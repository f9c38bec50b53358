#include "nfres/spectrum.hpp"

#include <cmath>
#include <sstream>

#include "nfres/errors.hpp"

namespace nfres {

void SpectrumScan::validate() const {
  if (frequency.size() != transmission.size()) {
    throw ValidationError("SpectrumScan: frequency/transmission length mismatch");
  }
  if (!sigma.empty() && sigma.size() != frequency.size()) {
    throw ValidationError("SpectrumScan: sigma column length mismatch");
  }
  if (frequency.size() < 8) {
    throw ValidationError("SpectrumScan: need at least 8 samples");
  }
  for (size_t i = 0; i < frequency.size(); ++i) {
    if (!std::isfinite(frequency[i]) || !std::isfinite(transmission[i])) {
      std::ostringstream os;
      os << "SpectrumScan: non-finite sample at index " << i;
      throw ValidationError(os.str());
    }
    // Additive detector noise can push samples below zero near the Airy
    // floor; clamping them would bias the fitted finesse, so mildly negative
    // samples are data, not corruption. A trace that is negative in the
    // aggregate is rejected below.
    if (i > 0 && !(frequency[i] > frequency[i - 1])) {
      std::ostringstream os;
      os << "SpectrumScan: frequency not strictly increasing at index " << i;
      throw ValidationError(os.str());
    }
  }
  double mean = 0.0;
  for (double t : transmission) mean += t;
  if (mean < 0.0) {
    throw ValidationError("SpectrumScan: transmission is negative on average");
  }
}

const char* to_string(SpectrumScan::Normalization n) {
  switch (n) {
    case SpectrumScan::Normalization::raw:
      return "raw";
    case SpectrumScan::Normalization::off_band_normalized:
      return "off_band_normalized";
  }
  return "raw";
}

}  // namespace nfres
