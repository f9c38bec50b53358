#include "nfres/io/report.hpp"

#include <cstdio>
#include <sstream>

#include "nfres/io/scan_file.hpp"

namespace nfres::io {

namespace {
std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.10g", v);
  return buf;
}
}  // namespace

void RunReport::add(const std::string& name, double value, const std::string& unit) {
  outputs.push_back({name, value, unit, 0.0, false});
}

void RunReport::add(const std::string& name, double value, double sigma,
                    const std::string& unit) {
  outputs.push_back({name, value, unit, sigma, true});
}

std::string format_value_line(const ReportValue& v) {
  std::ostringstream os;
  os << "out." << v.name << " = " << fmt(v.value);
  if (v.has_sigma) {
    os << " +- " << fmt(v.sigma);
  }
  os << " " << v.unit;
  return os.str();
}

std::string RunReport::to_text() const {
  std::ostringstream os;
  os << "# nfres run report\n";
  os << "command = " << command << "\n";
  if (!config_digest.empty()) {
    os << "config_digest = " << config_digest << "\n";
  }
  for (const auto& [path, digest] : input_digests) {
    os << "input_digest = " << digest << " " << path << "\n";
  }
  for (const auto& v : outputs) {
    os << format_value_line(v) << "\n";
  }
  os << "wall_time_s = " << fmt(wall_time_s) << " s\n";
  return os.str();
}

void RunReport::write(const std::string& path) const {
  atomic_write(path, to_text());
}

}  // namespace nfres::io
