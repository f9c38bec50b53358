#include "nfres/io/scan_file.hpp"

#include <cinttypes>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "nfres/errors.hpp"

namespace nfres::io {

namespace {

std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

[[noreturn]] void parse_fail(const std::string& origin, int line, const std::string& what) {
  std::ostringstream os;
  os << origin << ":" << line << ": " << what;
  throw ValidationError(os.str());
}

}  // namespace

std::string format_scan(const SpectrumScan& scan) {
  std::ostringstream os;
  os << "# nfres scan v1\n";
  os << "# label=" << scan.label << "\n";
  os << "# normalization=" << to_string(scan.normalization) << "\n";
  if (scan.temperature > 0.0) {
    os << "# temperature_K=" << fmt17(scan.temperature) << "\n";
  }
  os << "# columns=frequency_Hz transmission" << (scan.sigma.empty() ? "" : " sigma") << "\n";
  for (size_t i = 0; i < scan.frequency.size(); ++i) {
    os << fmt17(scan.frequency[i]) << " " << fmt17(scan.transmission[i]);
    if (!scan.sigma.empty()) {
      os << " " << fmt17(scan.sigma[i]);
    }
    os << "\n";
  }
  return os.str();
}

SpectrumScan parse_scan(const std::string& text, const std::string& origin) {
  SpectrumScan scan;
  std::istringstream is(text);
  std::string line;
  int lineno = 0;
  int ncols = 0;
  while (std::getline(is, line)) {
    ++lineno;
    if (line.empty()) continue;
    if (line[0] == '#') {
      const std::string body = line.substr(1);
      const auto eq = body.find('=');
      if (eq == std::string::npos) continue;
      std::string key = body.substr(0, eq);
      std::string value = body.substr(eq + 1);
      key.erase(0, key.find_first_not_of(" \t"));
      key.erase(key.find_last_not_of(" \t") + 1);
      if (key == "label") {
        scan.label = value;
      } else if (key == "temperature_K") {
        scan.temperature = std::strtod(value.c_str(), nullptr);
      } else if (key == "normalization") {
        if (value == "off_band_normalized") {
          scan.normalization = SpectrumScan::Normalization::off_band_normalized;
        } else if (value == "raw") {
          scan.normalization = SpectrumScan::Normalization::raw;
        } else {
          parse_fail(origin, lineno, "unknown normalization tag '" + value + "'");
        }
      }
      continue;
    }
    std::istringstream ls(line);
    double cols[3];
    int got = 0;
    while (got < 3 && (ls >> cols[got])) ++got;
    ls.clear();
    std::string trailing;
    if (ls >> trailing) {
      parse_fail(origin, lineno, "expected 2 or 3 numeric columns, found '" + trailing + "'");
    }
    if (got < 2) {
      parse_fail(origin, lineno, "expected 2 or 3 numeric columns");
    }
    if (ncols == 0) {
      ncols = got;
    } else if (got != ncols) {
      parse_fail(origin, lineno, "column count changed mid-file");
    }
    if (!std::isfinite(cols[0]) || !std::isfinite(cols[1]) ||
        (got == 3 && !std::isfinite(cols[2]))) {
      parse_fail(origin, lineno, "non-finite value");
    }
    if (!scan.frequency.empty() && !(cols[0] > scan.frequency.back())) {
      parse_fail(origin, lineno, "frequency not strictly increasing");
    }
    scan.frequency.push_back(cols[0]);
    scan.transmission.push_back(cols[1]);
    if (got == 3) scan.sigma.push_back(cols[2]);
  }
  if (scan.frequency.size() < 8) {
    std::ostringstream os;
    os << origin << ": scan holds " << scan.frequency.size()
       << " samples, need at least 8";
    throw ValidationError(os.str());
  }
  scan.validate();
  return scan;
}

SpectrumScan read_scan_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) {
    throw ValidationError("cannot open scan file: " + path);
  }
  std::ostringstream buf;
  buf << f.rdbuf();
  return parse_scan(buf.str(), path);
}

void write_scan_file(const SpectrumScan& scan, const std::string& path) {
  scan.validate();
  atomic_write(path, format_scan(scan));
}

void atomic_write(const std::string& path, const std::string& content) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
    if (!f) {
      throw ValidationError("cannot open for writing: " + tmp);
    }
    f << content;
    if (!f.good()) {
      throw ValidationError("write failed: " + tmp);
    }
  }
  if (std::rename(tmp.c_str(), path.c_str()) != 0) {
    throw ValidationError("rename failed: " + tmp + " -> " + path);
  }
}

std::string content_digest(const std::string& bytes) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  char buf[20];
  std::snprintf(buf, sizeof(buf), "%016" PRIx64, h);
  return buf;
}

std::string file_digest(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) {
    throw ValidationError("cannot open for digest: " + path);
  }
  std::ostringstream buf;
  buf << f.rdbuf();
  return content_digest(buf.str());
}

}  // namespace nfres::io
