#include "ghostsim/config.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "ghostsim/errors.hpp"

namespace ghostsim {

namespace {

std::string trim(const std::string& s) {
  size_t a = 0, b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  return s.substr(a, b - a);
}

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return s;
}

double parse_number(const std::string& token, int line) {
  const std::string t = trim(token);
  size_t pos = 0;
  double v = 0.0;
  try {
    v = std::stod(t, &pos);
  } catch (const std::exception&) {
    throw ConfigError("not a number: '" + token + "'", line);
  }
  if (trim(t.substr(pos)).size() != 0)
    throw ConfigError("trailing characters after number: '" + token + "'", line);
  return v;
}

std::int64_t parse_integer(const std::string& token, int line) {
  const std::string t = trim(token);
  std::int64_t v = 0;
  const auto [p, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (ec != std::errc{} || p != t.data() + t.size())
    throw ConfigError("not an integer: '" + token + "'", line);
  return v;
}

std::uint64_t parse_seed(const std::string& token, int line) {
  const std::string t = trim(token);
  std::uint64_t v = 0;
  const auto [p, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (ec != std::errc{} || p != t.data() + t.size())
    throw ConfigError("not a seed (unsigned integer): '" + token + "'", line);
  return v;
}

double parse_length_impl(const std::string& token, int line) {
  const std::string t = trim(token);
  size_t pos = 0;
  double v = 0.0;
  try {
    v = std::stod(t, &pos);
  } catch (const std::exception&) {
    throw ConfigError("not a length: '" + token + "'", line);
  }
  std::string unit = trim(t.substr(pos));
  if (unit.empty())
    throw ConfigError("length '" + token + "' needs a unit (nm, um, mm, cm, m)", line);
  if (unit == "\xc2\xb5m") unit = "um";  // micro sign
  static const std::map<std::string, double> scale = {
      {"nm", 1e-9}, {"um", 1e-6}, {"mm", 1e-3}, {"cm", 1e-2}, {"m", 1.0}};
  const auto it = scale.find(unit);
  if (it == scale.end()) throw ConfigError("unknown length unit '" + unit + "'", line);
  return v * it->second;
}

/// Inverse length (rad/m), bare or with an explicit rad/m or /m suffix.
double parse_spatial_frequency(const std::string& token, int line) {
  std::string t = trim(token);
  for (const char* suffix : {"rad/m", "/m"}) {
    const size_t n = std::string(suffix).size();
    if (t.size() > n && t.substr(t.size() - n) == suffix) {
      t = trim(t.substr(0, t.size() - n));
      break;
    }
  }
  return parse_number(t, line);
}

struct ParsedFile {
  // section -> key -> (value, line)
  std::map<std::string, std::map<std::string, std::pair<std::string, int>>> sections;
};

ParsedFile tokenize(const std::string& text) {
  ParsedFile out;
  std::istringstream in(text);
  std::string raw;
  std::string section;
  int line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    std::string line = raw;
    for (char marker : {';', '#'}) {
      const size_t c = line.find(marker);
      if (c != std::string::npos) line = line.substr(0, c);
    }
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') throw ConfigError("unterminated section header", line_no);
      section = lower(trim(line.substr(1, line.size() - 2)));
      if (section.empty()) throw ConfigError("empty section name", line_no);
      out.sections[section];
      continue;
    }
    const size_t eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError("expected key = value", line_no);
    if (section.empty()) throw ConfigError("key outside any [section]", line_no);
    const std::string key = lower(trim(line.substr(0, eq)));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty()) throw ConfigError("empty key", line_no);
    if (value.empty()) throw ConfigError("empty value for key '" + key + "'", line_no);
    if (out.sections[section].count(key))
      throw ConfigError("duplicate key '" + key + "'", line_no);
    out.sections[section][key] = {value, line_no};
  }
  return out;
}

class SectionReader {
 public:
  SectionReader(const ParsedFile& file, const std::string& section) : name_(section) {
    const auto it = file.sections.find(section);
    if (it != file.sections.end()) entries_ = &it->second;
  }

  bool has(const std::string& key) const { return entries_ && entries_->count(key); }

  std::pair<std::string, int> take(const std::string& key) {
    used_.insert(key);
    return entries_->at(key);
  }

  void check_unknown_keys() const {
    if (!entries_) return;
    for (const auto& [key, value] : *entries_)
      if (!used_.count(key))
        throw ConfigError("unknown key '" + key + "' in section [" + name_ + "]", value.second);
  }

 private:
  std::string name_;
  const std::map<std::string, std::pair<std::string, int>>* entries_ = nullptr;
  std::set<std::string> used_;
};

std::string format_double(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

std::string format_length(double meters) { return format_double(meters) + " m"; }

}  // namespace

double parse_length(const std::string& token) { return parse_length_impl(token, 0); }

ScenarioConfig parse_config(const std::string& text) {
  const ParsedFile file = tokenize(text);
  static const std::set<std::string> known = {"scheme",   "grid",     "spectrum",
                                              "ensemble", "geometry", "aperture"};
  for (const auto& [section, entries] : file.sections) {
    (void)entries;
    if (!known.count(section))
      throw ConfigError("unknown section [" + section + "]");
  }

  ScenarioConfig cfg;

  SectionReader scheme(file, "scheme");
  if (scheme.has("scheme")) {
    auto [v, ln] = scheme.take("scheme");
    const std::string s = lower(v);
    if (s == "a")
      cfg.scheme = Scheme::A;
    else if (s == "b")
      cfg.scheme = Scheme::B;
    else
      throw ConfigError("scheme must be A or B", ln);
  }
  if (cfg.scheme == Scheme::A) cfg.ensemble_size = 10000;
  if (scheme.has("wavelength")) {
    auto [v, ln] = scheme.take("wavelength");
    cfg.wavelength = parse_length_impl(v, ln);
  }
  if (scheme.has("fixed_arm")) {
    auto [v, ln] = scheme.take("fixed_arm");
    cfg.fixed_detector.arm = static_cast<int>(parse_integer(v, ln));
  }
  if (scheme.has("fixed_position")) {
    auto [v, ln] = scheme.take("fixed_position");
    cfg.fixed_detector.position = parse_length_impl(v, ln);
  }
  scheme.check_unknown_keys();

  SectionReader grid(file, "grid");
  if (grid.has("n")) {
    auto [v, ln] = grid.take("n");
    cfg.grid.n = static_cast<int>(parse_integer(v, ln));
  }
  if (grid.has("dx")) {
    auto [v, ln] = grid.take("dx");
    cfg.grid.dx = parse_length_impl(v, ln);
  }
  grid.check_unknown_keys();

  SectionReader spectrum(file, "spectrum");
  {
    SpectrumKind kind = SpectrumKind::gaussian;
    double w0 = 1.0;
    double envelope = 2e-3;
    double sigma_q = -1.0, q_max = -1.0, lc = -1.0;
    if (spectrum.has("kind")) {
      auto [v, ln] = spectrum.take("kind");
      const std::string s = lower(v);
      if (s == "gaussian")
        kind = SpectrumKind::gaussian;
      else if (s == "flat_top" || s == "flat-top")
        kind = SpectrumKind::flat_top;
      else
        throw ConfigError("spectrum kind must be gaussian or flat_top", ln);
    }
    if (spectrum.has("w0")) {
      auto [v, ln] = spectrum.take("w0");
      w0 = parse_number(v, ln);
    }
    if (spectrum.has("envelope_width")) {
      auto [v, ln] = spectrum.take("envelope_width");
      const std::string s = lower(trim(v));
      envelope = (s == "inf" || s == "unbounded")
                     ? std::numeric_limits<double>::infinity()
                     : parse_length_impl(v, ln);
    }
    if (spectrum.has("coherence_length")) {
      auto [v, ln] = spectrum.take("coherence_length");
      lc = parse_length_impl(v, ln);
    }
    if (spectrum.has("sigma_q")) {
      auto [v, ln] = spectrum.take("sigma_q");
      sigma_q = parse_spatial_frequency(v, ln);
    }
    if (spectrum.has("q_max")) {
      auto [v, ln] = spectrum.take("q_max");
      q_max = parse_spatial_frequency(v, ln);
    }
    if (lc > 0.0 && (sigma_q > 0.0 || q_max > 0.0))
      throw ConfigError("give either coherence_length or a spectral width, not both");
    if (kind == SpectrumKind::gaussian) {
      if (q_max > 0.0) throw ConfigError("q_max belongs to the flat_top kind");
      if (sigma_q <= 0.0) sigma_q = 2.0 / (lc > 0.0 ? lc : 5e-6);
      cfg.spectrum = SpectrumModel::gaussian_spectrum(w0, sigma_q, envelope);
    } else {
      if (sigma_q > 0.0) throw ConfigError("sigma_q belongs to the gaussian kind");
      if (q_max <= 0.0 && lc > 0.0) {
        // match the 1/e half-width of the flat-top correlation, |sinc(u*)| = 1/e
        cfg.spectrum = SpectrumModel::flat_top_spectrum(w0, 1.0, envelope);
        cfg.spectrum.q_max = coherence_length(cfg.spectrum) / lc;
      } else if (q_max > 0.0) {
        cfg.spectrum = SpectrumModel::flat_top_spectrum(w0, q_max, envelope);
      } else {
        throw ConfigError("flat_top spectrum needs q_max or coherence_length");
      }
    }
  }
  spectrum.check_unknown_keys();

  SectionReader ensemble(file, "ensemble");
  if (ensemble.has("size")) {
    auto [v, ln] = ensemble.take("size");
    cfg.ensemble_size = parse_integer(v, ln);
  }
  if (ensemble.has("master_seed")) {
    auto [v, ln] = ensemble.take("master_seed");
    cfg.master_seed = parse_seed(v, ln);
  }
  if (ensemble.has("block_size")) {
    auto [v, ln] = ensemble.take("block_size");
    cfg.block_size = static_cast<int>(parse_integer(v, ln));
  }
  if (ensemble.has("surface")) {
    auto [v, ln] = ensemble.take("surface");
    const std::string s = lower(v);
    if (s == "auto")
      cfg.surface = SurfacePolicy::automatic;
    else if (s == "always")
      cfg.surface = SurfacePolicy::always;
    else if (s == "never")
      cfg.surface = SurfacePolicy::never;
    else
      throw ConfigError("surface must be auto, always, or never", ln);
  }
  ensemble.check_unknown_keys();

  SectionReader geometry(file, "geometry");
  auto take_length = [&](SectionReader& r, const char* key, double& target) {
    if (r.has(key)) {
      auto [v, ln] = r.take(key);
      target = parse_length_impl(v, ln);
    }
  };
  if (geometry.has("source_to_mask")) {
    auto [v, ln] = geometry.take("source_to_mask");
    const double z = parse_length_impl(v, ln);
    (cfg.scheme == Scheme::A ? cfg.scheme_a.source_to_mask : cfg.scheme_b.source_to_mask) = z;
  }
  take_length(geometry, "mask_to_detector", cfg.scheme_b.mask_to_detector);
  take_length(geometry, "mask_to_ccd1", cfg.scheme_a.mask_to_ccd1);
  take_length(geometry, "source_to_ccd2", cfg.scheme_a.source_to_ccd2);
  take_length(geometry, "source_to_ccd3", cfg.scheme_a.source_to_ccd3);
  geometry.check_unknown_keys();

  SectionReader aperture(file, "aperture");
  take_length(aperture, "slit_width", cfg.slit_width);
  take_length(aperture, "slit_separation", cfg.slit_separation);
  if (aperture.has("ref_kind")) {
    auto [v, ln] = aperture.take("ref_kind");
    const std::string s = lower(v);
    if (s == "double")
      cfg.ref_kind = ApertureKind::double_slit;
    else if (s == "single")
      cfg.ref_kind = ApertureKind::single_slit;
    else if (s == "incomplete")
      cfg.ref_kind = ApertureKind::incomplete_double_slit;
    else
      throw ConfigError("ref_kind must be double, single, or incomplete", ln);
  }
  if (aperture.has("retained_fraction")) {
    auto [v, ln] = aperture.take("retained_fraction");
    cfg.retained_fraction = parse_number(v, ln);
  }
  aperture.check_unknown_keys();

  cfg.validate();
  return cfg;
}

ScenarioConfig load_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

std::string emit_config(const ScenarioConfig& cfg) {
  std::ostringstream os;
  os << "[scheme]\n";
  os << "scheme = " << (cfg.scheme == Scheme::A ? "A" : "B") << "\n";
  os << "wavelength = " << format_length(cfg.wavelength) << "\n";
  os << "fixed_arm = " << cfg.fixed_detector.arm << "\n";
  os << "fixed_position = " << format_length(cfg.fixed_detector.position) << "\n";
  os << "\n[grid]\n";
  os << "n = " << cfg.grid.n << "\n";
  os << "dx = " << format_length(cfg.grid.dx) << "\n";
  os << "\n[spectrum]\n";
  os << "kind = " << (cfg.spectrum.kind == SpectrumKind::gaussian ? "gaussian" : "flat_top")
     << "\n";
  os << "w0 = " << format_double(cfg.spectrum.w0) << "\n";
  if (cfg.spectrum.kind == SpectrumKind::gaussian)
    os << "sigma_q = " << format_double(cfg.spectrum.sigma_q) << " rad/m\n";
  else
    os << "q_max = " << format_double(cfg.spectrum.q_max) << " rad/m\n";
  if (std::isinf(cfg.spectrum.envelope_width))
    os << "envelope_width = inf\n";
  else
    os << "envelope_width = " << format_length(cfg.spectrum.envelope_width) << "\n";
  os << "\n[ensemble]\n";
  os << "size = " << cfg.ensemble_size << "\n";
  os << "master_seed = " << cfg.master_seed << "\n";
  os << "block_size = " << cfg.block_size << "\n";
  os << "surface = "
     << (cfg.surface == SurfacePolicy::automatic
             ? "auto"
             : (cfg.surface == SurfacePolicy::always ? "always" : "never"))
     << "\n";
  os << "\n[geometry]\n";
  os << "source_to_mask = " << format_length(cfg.scheme == Scheme::A
                                                 ? cfg.scheme_a.source_to_mask
                                                 : cfg.scheme_b.source_to_mask)
     << "\n";
  os << "mask_to_detector = " << format_length(cfg.scheme_b.mask_to_detector) << "\n";
  os << "mask_to_ccd1 = " << format_length(cfg.scheme_a.mask_to_ccd1) << "\n";
  os << "source_to_ccd2 = " << format_length(cfg.scheme_a.source_to_ccd2) << "\n";
  os << "source_to_ccd3 = " << format_length(cfg.scheme_a.source_to_ccd3) << "\n";
  os << "\n[aperture]\n";
  os << "slit_width = " << format_length(cfg.slit_width) << "\n";
  os << "slit_separation = " << format_length(cfg.slit_separation) << "\n";
  os << "ref_kind = "
     << (cfg.ref_kind == ApertureKind::double_slit
             ? "double"
             : (cfg.ref_kind == ApertureKind::single_slit ? "single" : "incomplete"))
     << "\n";
  os << "retained_fraction = " << format_double(cfg.retained_fraction) << "\n";
  return os.str();
}

std::string config_hash(const ScenarioConfig& cfg) {
  const std::string text = emit_config(cfg);
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return std::string(buf);
}

}  // namespace ghostsim
