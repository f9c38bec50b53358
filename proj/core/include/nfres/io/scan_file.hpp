#pragma once

#include <string>

#include "nfres/spectrum.hpp"

namespace nfres::io {

// Scan file format: '#'-prefixed header lines carrying key=value metadata
// (temperature_K, normalization, label), then two or three whitespace-
// separated columns per line: frequency_Hz, transmission, optional sigma.
// Values are written with 17 significant digits, so write -> read is
// bit-exact. Parse errors cite the offending line number.
SpectrumScan read_scan_file(const std::string& path);
void write_scan_file(const SpectrumScan& scan, const std::string& path);

std::string format_scan(const SpectrumScan& scan);
SpectrumScan parse_scan(const std::string& text, const std::string& origin = "<string>");

// write-temp-then-rename so partially written files are never observed.
void atomic_write(const std::string& path, const std::string& content);

// FNV-1a 64-bit content digest, 16 hex characters.
std::string content_digest(const std::string& bytes);
std::string file_digest(const std::string& path);

}  // namespace nfres::io
