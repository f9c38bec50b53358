#pragma once

#include <string>
#include <vector>

namespace nfres::io {

// One named scalar output of a CLI run, with its unit and optional
// one-sigma uncertainty.
struct ReportValue {
  std::string name;
  double value = 0.0;
  std::string unit;       // "1" for dimensionless
  double sigma = 0.0;     // 0 = no uncertainty attached
  bool has_sigma = false;
};

// Reproducibility record for one CLI invocation: command line, resolved
// configuration digest, input file digests, scalar outputs, wall time.
// Re-running with identical inputs reproduces identical `out.` lines.
struct RunReport {
  std::string command;
  std::string config_digest;
  std::vector<std::pair<std::string, std::string>> input_digests;  // (path, digest)
  std::vector<ReportValue> outputs;
  double wall_time_s = 0.0;

  void add(const std::string& name, double value, const std::string& unit);
  void add(const std::string& name, double value, double sigma, const std::string& unit);

  std::string to_text() const;
  void write(const std::string& path) const;
};

std::string format_value_line(const ReportValue& v);

}  // namespace nfres::io
