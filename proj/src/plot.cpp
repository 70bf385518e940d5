#include "ghostsim/plot.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include "ghostsim/errors.hpp"

namespace ghostsim {

namespace {

constexpr double kWidth = 760, kHeight = 480;
constexpr double kLeft = 72, kRight = 24, kTop = 40, kBottom = 56;

struct Range {
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();
  void include(double v) {
    if (!std::isfinite(v)) return;
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  bool valid() const { return lo <= hi; }
};

std::string num(double v) {
  std::ostringstream os;
  os.precision(6);
  os << v;
  return os.str();
}

/// Round tick spacing to 1/2/5 decades.
double nice_step(double span) {
  const double raw = span / 6.0;
  const double mag = std::pow(10.0, std::floor(std::log10(raw)));
  const double r = raw / mag;
  if (r < 1.5) return mag;
  if (r < 3.5) return 2 * mag;
  if (r < 7.5) return 5 * mag;
  return 10 * mag;
}

}  // namespace

std::string render_plot_svg(const PlotSpec& spec) {
  if (spec.series.empty()) throw ValidationError("plot needs at least one series");
  Range rx, ry;
  for (const auto& s : spec.series) {
    if (s.x.size() != s.y.size()) throw ValidationError("plot series length mismatch");
    for (size_t i = 0; i < s.x.size(); ++i) {
      rx.include(s.x[i]);
      ry.include(s.y[i]);
      if (i < s.yerr.size() && std::isfinite(s.yerr[i])) {
        ry.include(s.y[i] - s.yerr[i]);
        ry.include(s.y[i] + s.yerr[i]);
      }
    }
  }
  if (!rx.valid() || !ry.valid()) throw ValidationError("plot has no finite data");
  if (rx.hi == rx.lo) {
    rx.lo -= 1.0;
    rx.hi += 1.0;
  }
  const double pad = (ry.hi == ry.lo) ? std::max(1.0, std::abs(ry.hi)) * 0.1
                                      : (ry.hi - ry.lo) * 0.08;
  ry.lo -= pad;
  ry.hi += pad;

  const double pw = kWidth - kLeft - kRight;
  const double ph = kHeight - kTop - kBottom;
  auto px = [&](double x) { return kLeft + (x - rx.lo) / (rx.hi - rx.lo) * pw; };
  auto py = [&](double y) { return kTop + (ry.hi - y) / (ry.hi - ry.lo) * ph; };

  std::ostringstream os;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\""
     << kHeight << "\" viewBox=\"0 0 " << kWidth << " " << kHeight << "\">\n";
  os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  os << "<text x=\"" << kWidth / 2 << "\" y=\"22\" text-anchor=\"middle\" font-size=\"15\" "
        "font-family=\"sans-serif\">" << spec.title << "</text>\n";

  // frame
  os << "<rect x=\"" << kLeft << "\" y=\"" << kTop << "\" width=\"" << pw << "\" height=\""
     << ph << "\" fill=\"none\" stroke=\"black\"/>\n";

  // ticks
  const double sx = nice_step(rx.hi - rx.lo);
  for (double t = std::ceil(rx.lo / sx) * sx; t <= rx.hi + 1e-12 * sx; t += sx) {
    os << "<line x1=\"" << px(t) << "\" y1=\"" << kTop + ph << "\" x2=\"" << px(t) << "\" y2=\""
       << kTop + ph + 5 << "\" stroke=\"black\"/>\n";
    os << "<text x=\"" << px(t) << "\" y=\"" << kTop + ph + 20
       << "\" text-anchor=\"middle\" font-size=\"11\" font-family=\"sans-serif\">" << num(t)
       << "</text>\n";
  }
  const double sy = nice_step(ry.hi - ry.lo);
  for (double t = std::ceil(ry.lo / sy) * sy; t <= ry.hi + 1e-12 * sy; t += sy) {
    os << "<line x1=\"" << kLeft - 5 << "\" y1=\"" << py(t) << "\" x2=\"" << kLeft << "\" y2=\""
       << py(t) << "\" stroke=\"black\"/>\n";
    os << "<text x=\"" << kLeft - 8 << "\" y=\"" << py(t) + 4
       << "\" text-anchor=\"end\" font-size=\"11\" font-family=\"sans-serif\">" << num(t)
       << "</text>\n";
  }
  os << "<text x=\"" << kLeft + pw / 2 << "\" y=\"" << kHeight - 12
     << "\" text-anchor=\"middle\" font-size=\"13\" font-family=\"sans-serif\">" << spec.x_label
     << "</text>\n";
  os << "<text x=\"18\" y=\"" << kTop + ph / 2
     << "\" text-anchor=\"middle\" font-size=\"13\" font-family=\"sans-serif\" "
        "transform=\"rotate(-90 18 " << kTop + ph / 2 << ")\">" << spec.y_label << "</text>\n";

  for (const auto& s : spec.series) {
    if (s.line) {
      os << "<polyline fill=\"none\" stroke=\"" << s.color << "\" stroke-width=\"1.5\" points=\"";
      for (size_t i = 0; i < s.x.size(); ++i) {
        if (!std::isfinite(s.y[i])) continue;
        os << px(s.x[i]) << "," << py(s.y[i]) << " ";
      }
      os << "\"/>\n";
    } else {
      for (size_t i = 0; i < s.x.size(); ++i) {
        if (!std::isfinite(s.y[i])) continue;
        const double cx = px(s.x[i]), cy = py(s.y[i]);
        if (i < s.yerr.size() && std::isfinite(s.yerr[i]) && s.yerr[i] > 0) {
          os << "<line x1=\"" << cx << "\" y1=\"" << py(s.y[i] - s.yerr[i]) << "\" x2=\"" << cx
             << "\" y2=\"" << py(s.y[i] + s.yerr[i]) << "\" stroke=\"" << s.color << "\"/>\n";
        }
        os << "<circle cx=\"" << cx << "\" cy=\"" << cy << "\" r=\"2.4\" fill=\"none\" stroke=\""
           << s.color << "\"/>\n";
      }
    }
  }

  // legend
  double ly = kTop + 14;
  for (const auto& s : spec.series) {
    const double lx = kLeft + pw - 170;
    os << "<line x1=\"" << lx << "\" y1=\"" << ly - 4 << "\" x2=\"" << lx + 22 << "\" y2=\""
       << ly - 4 << "\" stroke=\"" << s.color << "\" stroke-width=\"2\"/>\n";
    os << "<text x=\"" << lx + 28 << "\" y=\"" << ly
       << "\" font-size=\"12\" font-family=\"sans-serif\">" << s.label << "</text>\n";
    ly += 18;
  }
  os << "</svg>\n";
  return os.str();
}

void emit_plot(const PlotSpec& spec, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open for writing: " + path);
  out << render_plot_svg(spec);
  if (!out) throw IoError("write failed: " + path);
}

}  // namespace ghostsim
