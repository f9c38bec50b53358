#pragma once

#include <string>
#include <vector>

namespace nfres {

// A sampled transmission trace: (frequency, transmission) plus optional
// per-point standard deviations, with provenance metadata.
struct SpectrumScan {
  enum class Normalization { raw, off_band_normalized };

  std::vector<double> frequency;     // Hz, strictly increasing
  std::vector<double> transmission;  // dimensionless, finite; individual
                                     // samples may dip below zero from
                                     // detector noise
  std::vector<double> sigma;         // optional; empty or same length

  Normalization normalization = Normalization::raw;
  double temperature = 0.0;          // K; 0 = unspecified
  std::string label;

  // Throws ValidationError on length mismatch, < 8 samples, non-monotone
  // frequency, non-finite samples, or a trace negative in the mean.
  void validate() const;
};

const char* to_string(SpectrumScan::Normalization n);

}  // namespace nfres
