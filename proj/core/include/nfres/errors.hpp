#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace nfres {

// Invalid inputs, malformed files, parameter-domain violations.
// The CLI maps these to exit code 2.
class ValidationError : public std::runtime_error {
 public:
  explicit ValidationError(const std::string& what) : std::runtime_error(what) {}
};

// A numerically well-posed request that the solvers could not satisfy
// (no bracketed root, infeasible inversion, diverged fit).
// The CLI maps these to exit code 3.
class NumericError : public std::runtime_error {
 public:
  explicit NumericError(const std::string& what) : std::runtime_error(what) {}
};

// Non-convergence of the spectrum fitter; carries the last iterate and the
// per-iteration residual RMS history for post-mortems.
class FitFailure : public NumericError {
 public:
  FitFailure(const std::string& what, std::vector<double> last_params,
             std::vector<double> residual_history)
      : NumericError(what),
        last_parameters(std::move(last_params)),
        residual_rms_history(std::move(residual_history)) {}

  std::vector<double> last_parameters;      // (finesse, fsr, center, amplitude, baseline)
  std::vector<double> residual_rms_history; // one entry per accepted iteration
};

}  // namespace nfres
