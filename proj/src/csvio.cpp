#include "ghostsim/csvio.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "ghostsim/errors.hpp"

namespace ghostsim {

std::string format_full(double v) {
  char buf[40];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::scientific);
  return std::string(buf, res.ptr);
}

namespace {

std::string metadata_line(const std::map<std::string, std::string>& metadata) {
  std::ostringstream os;
  os << "#";
  for (const auto& [k, v] : metadata) os << " " << k << "=" << v;
  os << "\n";
  return os.str();
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open for writing: " + path);
  out << text;
  if (!out) throw IoError("write failed: " + path);
}

}  // namespace

std::string slice_csv_text(const SliceCurve& slice, const std::vector<double>& oracle_g2,
                           const std::map<std::string, std::string>& metadata) {
  if (!oracle_g2.empty() && oracle_g2.size() != slice.g2.size())
    throw ValidationError("oracle curve length does not match the slice");
  std::ostringstream os;
  os << metadata_line(metadata);
  os << "coordinate,g2,stderr,oracle_g2,flag\n";
  for (int i = 0; i < slice.axis.n; ++i) {
    const size_t k = static_cast<size_t>(i);
    os << format_full(slice.axis.coord(i)) << ",";
    const bool dark = slice.flags[k] != static_cast<std::uint8_t>(SampleFlag::ok);
    if (!dark && std::isfinite(slice.g2[k])) {
      os << format_full(slice.g2[k]) << ",";
      os << (std::isfinite(slice.se[k]) ? format_full(slice.se[k]) : "") << ",";
    } else {
      os << ",,";
    }
    if (!oracle_g2.empty() && std::isfinite(oracle_g2[k])) os << format_full(oracle_g2[k]);
    os << "," << (dark ? "dark" : "ok") << "\n";
  }
  return os.str();
}

void emit_slice_csv(const SliceCurve& slice, const std::vector<double>& oracle_g2,
                    const std::map<std::string, std::string>& metadata,
                    const std::string& path) {
  write_file(path, slice_csv_text(slice, oracle_g2, metadata));
}

void emit_intensity_csv(const Axis& axis, const std::vector<double>& mean,
                        const std::vector<double>& se,
                        const std::map<std::string, std::string>& metadata,
                        const std::string& path) {
  std::ostringstream os;
  os << metadata_line(metadata);
  os << "coordinate,intensity,stderr\n";
  for (int i = 0; i < axis.n; ++i) {
    const size_t k = static_cast<size_t>(i);
    os << format_full(axis.coord(i)) << "," << format_full(mean[k]) << ","
       << (k < se.size() && std::isfinite(se[k]) ? format_full(se[k]) : "") << "\n";
  }
  write_file(path, os.str());
}

}  // namespace ghostsim
