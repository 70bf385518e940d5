#include "ghostsim/report.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <numbers>
#include <sstream>

#include <json.hpp>

#include "ghostsim/csvio.hpp"
#include "ghostsim/errors.hpp"
#include "ghostsim/oracle.hpp"
#include "ghostsim/plot.hpp"

namespace ghostsim {

namespace {

// Scored tolerances, fixed here once for runs, reports, and the acceptance
// suite alike.
constexpr double kExpectedVisibilityErased = 1.0 / 3.0;
constexpr double kTolVisibility = 0.02;
constexpr int kTolPeriodGridSteps = 2;
constexpr double kExpectedPeakSingle = 1.5;
constexpr double kTolPeakSingle = 0.05;
constexpr double kTolRmsSchemeB = 0.03;
constexpr double kTolRmsSchemeA = 0.05;
constexpr double kTolImagePeak = 10e-6;
constexpr double kTolPeriodSchemeA = 20e-6;
constexpr double kRouteEquivalenceTol = 1e-3;

// Previously reported visibilities for this geometry, kept for side-by-side
// comparison; the partial-cover value is not reproducible from the
// aperture-product analysis here, so it is compared but never scored.
constexpr double kReferenceVisibilityErased = 0.333;
constexpr double kReferenceVisibilityPartial = 0.238;
constexpr double kReferenceAgreementTol = 0.02;

constexpr double kRmsWindowPeriods = 2.5;

std::string fmt(double v, int prec = 6) {
  std::ostringstream os;
  os.precision(prec);
  os << v;
  return os.str();
}

CheckLine make_check(const std::string& name, double value, double se, double expected,
                     double tol, const std::string& note = "") {
  CheckLine c;
  c.name = name;
  c.value = value;
  c.se = se;
  c.expected = expected;
  c.tol = tol;
  c.pass = std::isfinite(value) && std::abs(value - expected) <= tol;
  c.note = note;
  return c;
}

CheckLine make_bool_check(const std::string& name, bool value, bool expected,
                          const std::string& note = "") {
  CheckLine c;
  c.name = name;
  c.value = value ? 1.0 : 0.0;
  c.expected = expected ? 1.0 : 0.0;
  c.tol = 0.0;
  c.pass = value == expected;
  c.note = note;
  return c;
}

CheckLine make_upper_bound_check(const std::string& name, double value, double bound,
                                 const std::string& note = "") {
  CheckLine c;
  c.name = name;
  c.value = value;
  c.expected = bound;
  c.tol = bound;
  c.pass = std::isfinite(value) && value <= bound;
  c.note = note.empty() ? "upper bound" : note;
  return c;
}

/// Measured slice reindexed as an ascending curve in delta = x1_fixed - x2.
struct DeltaCurve {
  std::vector<double> delta;
  std::vector<double> g2;
  std::vector<double> se;
  std::vector<size_t> src_index;  // into the original slice
};

DeltaCurve slice_to_delta(const SliceCurve& slice) {
  DeltaCurve c;
  const int n = slice.axis.n;
  c.delta.reserve(static_cast<size_t>(n));
  for (int i = n - 1; i >= 0; --i) {
    const size_t k = static_cast<size_t>(i);
    c.delta.push_back(slice.fixed_position - slice.axis.coord(i));
    c.g2.push_back(slice.g2[k]);
    c.se.push_back(slice.se[k]);
    c.src_index.push_back(k);
  }
  return c;
}

double se_near(const DeltaCurve& c, double delta_pos) {
  size_t best = 0;
  for (size_t i = 1; i < c.delta.size(); ++i)
    if (std::abs(c.delta[i] - delta_pos) < std::abs(c.delta[best] - delta_pos)) best = i;
  return c.se[best];
}

struct MetricErrors {
  double visibility_se = 0.0;
  double period_se = 0.0;
};

MetricErrors metric_errors(const DeltaCurve& c, const FringeMetrics& m, double step) {
  const double se_max = se_near(c, 0.0);
  const double se_l = se_near(c, m.min_left_pos);
  const double se_r = se_near(c, m.min_right_pos);
  const double min_avg = 0.5 * (m.min_left + m.min_right);
  const double denom = (m.central_max + min_avg) * (m.central_max + min_avg);
  const double dv_dmax = 2.0 * min_avg / denom;
  const double dv_dmin = -2.0 * m.central_max / denom;
  MetricErrors e;
  e.visibility_se = std::sqrt(dv_dmax * dv_dmax * se_max * se_max +
                              0.25 * dv_dmin * dv_dmin * (se_l * se_l + se_r * se_r));
  // One grid step is a conservative bound for the refined-minima spacing.
  e.period_se = step;
  return e;
}

double rms_difference(const std::vector<double>& a, const std::vector<double>& b) {
  double acc = 0.0;
  long n = 0;
  for (size_t i = 0; i < a.size(); ++i) {
    if (!std::isfinite(a[i]) || !std::isfinite(b[i])) continue;
    const double d = a[i] - b[i];
    acc += d * d;
    ++n;
  }
  if (n == 0) return std::numeric_limits<double>::quiet_NaN();
  return std::sqrt(acc / static_cast<double>(n));
}

struct PeakFind {
  double pos = 0.0;
  double height = 0.0;
  bool found = false;
};

PeakFind find_peak(const SliceCurve& slice, double lo, double hi) {
  PeakFind out;
  int best = -1;
  for (int i = 0; i < slice.axis.n; ++i) {
    const double x = slice.axis.coord(i);
    if (x < lo || x > hi) continue;
    if (!std::isfinite(slice.g2[static_cast<size_t>(i)])) continue;
    if (best < 0 || slice.g2[static_cast<size_t>(i)] > slice.g2[static_cast<size_t>(best)])
      best = i;
  }
  if (best <= 0 || best >= slice.axis.n - 1) return out;
  const double vm = slice.g2[static_cast<size_t>(best - 1)];
  const double v0 = slice.g2[static_cast<size_t>(best)];
  const double vp = slice.g2[static_cast<size_t>(best + 1)];
  out.found = true;
  out.pos = slice.axis.coord(best);
  out.height = v0;
  const double denom = vm - 2.0 * v0 + vp;
  if (denom < 0.0) {
    const double s = 0.5 * (vm - vp) / denom;
    out.pos += s * slice.axis.dx;
    out.height = v0 - 0.25 * (vm - vp) * s;
  }
  return out;
}

std::map<std::string, std::string> csv_metadata(const ScenarioConfig& cfg,
                                                const CorrelationResult& res) {
  return {{"config_hash", config_hash(cfg)},
          {"seed", std::to_string(res.master_seed)},
          {"count", std::to_string(res.count)}};
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open for writing: " + path);
  out << text;
}

std::string join_path(const std::string& dir, const std::string& name) {
  return (std::filesystem::path(dir) / name).string();
}

void emit_pairing_plot(const std::string& path, const std::string& title,
                       const SliceCurve& slice, const std::vector<double>& oracle) {
  PlotSpec plot;
  plot.title = title;
  plot.x_label = "detector position (m)";
  plot.y_label = "normalized intensity correlation";
  PlotSeries mc;
  mc.label = "Monte Carlo";
  mc.line = false;
  mc.color = "#c44536";
  const int stride = std::max(1, slice.axis.n / 160);
  for (int i = 0; i < slice.axis.n; i += stride) {
    const size_t k = static_cast<size_t>(i);
    if (!std::isfinite(slice.g2[k])) continue;
    mc.x.push_back(slice.axis.coord(i));
    mc.y.push_back(slice.g2[k]);
    mc.yerr.push_back(slice.se[k]);
  }
  plot.series.push_back(std::move(mc));
  if (!oracle.empty()) {
    PlotSeries os;
    os.label = "analytic";
    os.line = true;
    os.color = "#1f6fb4";
    for (int i = 0; i < slice.axis.n; ++i) {
      const size_t k = static_cast<size_t>(i);
      if (!std::isfinite(oracle[k])) continue;
      os.x.push_back(slice.axis.coord(i));
      os.y.push_back(oracle[k]);
    }
    plot.series.push_back(std::move(os));
  }
  emit_plot(plot, path);
}

ClosedFormCase closed_form_case(const ScenarioConfig& cfg) {
  ClosedFormCase c;
  c.test_aperture = cfg.test_aperture();
  c.ref_aperture = cfg.ref_aperture();
  c.z = cfg.scheme_b.mask_to_detector;
  c.k = cfg.wavenumber();
  c.w0 = cfg.spectrum.w0;
  return c;
}

void report_scheme_b(const ScenarioConfig& cfg, const RunOutput& run, RunReport& report,
                     const std::string& out_dir) {
  const CorrelationResult& res = run.results.front();
  PairingReport pr;
  pr.name = run.pairing_names.front();

  const ClosedFormCase oracle_case = closed_form_case(cfg);
  const double hint = fringe_period_hint(oracle_case);

  const DeltaCurve curve = slice_to_delta(res.row);
  FringeMetrics metrics = extract_fringe_metrics(curve.delta, curve.g2, hint);
  pr.has_fringe_metrics = true;
  pr.metrics = metrics;
  const MetricErrors errs = metric_errors(curve, metrics, res.row.axis.dx);
  pr.visibility_se = errs.visibility_se;
  pr.period_se = errs.period_se;

  // Analytic curve on the measured grid, plus its own fringe metrics.
  std::vector<double> oracle_row(curve.delta.size());
  std::vector<double> oracle_on_slice(static_cast<size_t>(res.row.axis.n));
  for (size_t i = 0; i < curve.delta.size(); ++i) {
    oracle_row[i] = closed_form_g2(oracle_case, curve.delta[i], 0.0);
    oracle_on_slice[curve.src_index[i]] = oracle_row[i];
  }
  const FringeMetrics oracle_metrics = predicted_visibility(oracle_case);
  pr.has_oracle = true;
  pr.oracle_visibility = oracle_metrics.visibility;
  pr.oracle_period = oracle_metrics.period;
  pr.oracle_is_fringe = oracle_metrics.is_fringe;

  // RMS against the analytic curve inside the reported window.
  {
    std::vector<double> a, b;
    for (size_t i = 0; i < curve.delta.size(); ++i) {
      if (std::abs(curve.delta[i]) > kRmsWindowPeriods * hint) continue;
      a.push_back(curve.g2[i]);
      b.push_back(oracle_row[i]);
    }
    pr.rms_vs_oracle = rms_difference(a, b);
  }

  const double step = res.row.axis.dx;
  switch (cfg.ref_kind) {
    case ApertureKind::double_slit:
      pr.checks.push_back(make_check("visibility", metrics.visibility, errs.visibility_se,
                                     kExpectedVisibilityErased, kTolVisibility));
      pr.checks.push_back(make_check("fringe_period", metrics.period, errs.period_se, hint,
                                     kTolPeriodGridSteps * step));
      pr.checks.push_back(make_bool_check("is_fringe", metrics.is_fringe, true));
      pr.references.push_back({"visibility", metrics.visibility, kReferenceVisibilityErased,
                               std::abs(metrics.visibility - kReferenceVisibilityErased) <=
                                   kReferenceAgreementTol,
                               "reported erased-path visibility"});
      break;
    case ApertureKind::single_slit: {
      pr.checks.push_back(make_bool_check("is_fringe", metrics.is_fringe, false,
                                          "modulation ratio " + fmt(metrics.modulation_ratio)));
      pr.checks.push_back(make_check("peak_g2", metrics.central_max, se_near(curve, 0.0),
                                     kExpectedPeakSingle, kTolPeakSingle));
      pr.checks.push_back(
          make_upper_bound_check("rms_vs_oracle", pr.rms_vs_oracle, kTolRmsSchemeB));
      break;
    }
    case ApertureKind::incomplete_double_slit: {
      pr.checks.push_back(make_bool_check("is_fringe", metrics.is_fringe, true));
      pr.checks.push_back(make_check("visibility_vs_oracle", metrics.visibility,
                                     errs.visibility_se, oracle_metrics.visibility,
                                     kTolVisibility));
      CheckLine between;
      between.name = "visibility_between";
      between.value = metrics.visibility;
      between.expected = kExpectedVisibilityErased;
      between.tol = 0.0;
      between.pass = metrics.visibility > 0.0 && metrics.visibility < kExpectedVisibilityErased;
      between.note = "strictly between the full and erased which-path cases";
      pr.checks.push_back(between);
      pr.references.push_back({"visibility", metrics.visibility, kReferenceVisibilityPartial,
                               std::abs(metrics.visibility - kReferenceVisibilityPartial) <=
                                   kReferenceAgreementTol,
                               "reported partial-cover visibility; analysis of the aperture "
                               "product predicts " +
                                   fmt(oracle_metrics.visibility, 4)});
      break;
    }
    case ApertureKind::custom:
      break;
  }

  if (!out_dir.empty()) {
    const auto meta = csv_metadata(cfg, res);
    const std::string row_csv = join_path(out_dir, pr.name + "_row.csv");
    emit_slice_csv(res.row, oracle_on_slice, meta, row_csv);
    pr.files.emplace_back("row_slice", row_csv);
    if (res.has_col) {
      const std::string col_csv = join_path(out_dir, pr.name + "_col.csv");
      emit_slice_csv(res.col, {}, meta, col_csv);
      pr.files.emplace_back("col_slice", col_csv);
    }
    if (res.has_delta) {
      std::vector<double> oracle_delta(static_cast<size_t>(res.delta.axis.n));
      for (int i = 0; i < res.delta.axis.n; ++i)
        oracle_delta[static_cast<size_t>(i)] =
            closed_form_g2(oracle_case, res.delta.axis.coord(i), 0.0);
      const std::string delta_csv = join_path(out_dir, pr.name + "_delta.csv");
      emit_slice_csv(res.delta, oracle_delta, meta, delta_csv);
      pr.files.emplace_back("delta_slice", delta_csv);
    }
    const std::string i_csv = join_path(out_dir, pr.name + "_intensity.csv");
    emit_intensity_csv(res.axis2, res.mean_i2, res.se_i2, meta, i_csv);
    pr.files.emplace_back("intensity", i_csv);
    const std::string svg = join_path(out_dir, pr.name + ".svg");
    emit_pairing_plot(svg, "correlation slice (" + pr.name + ")", res.row, oracle_on_slice);
    pr.files.emplace_back("plot", svg);
  }

  report.pairings.push_back(std::move(pr));
}

void report_scheme_a(const ScenarioConfig& cfg, const RunOutput& run, RunReport& report,
                     const std::string& out_dir) {
  // Shared quadrature evaluators (finite spectrum, same as the Monte Carlo).
  PathSpec test_arm;
  test_arm.elements = {PathElement::free_space(cfg.scheme_a.source_to_mask),
                       PathElement::masked(cfg.test_aperture()),
                       PathElement::free_space(cfg.scheme_a.mask_to_ccd1)};
  const double fixed_x1 = cfg.fixed_detector.arm == 1 ? cfg.fixed_detector.position : 0.0;

  for (size_t p = 0; p < run.results.size(); ++p) {
    const CorrelationResult& res = run.results[p];
    PairingReport pr;
    pr.name = run.pairing_names[p];
    const bool is_image = pr.name == "ccd1_ccd2";

    PathSpec ref_arm;
    ref_arm.elements = {PathElement::free_space(is_image ? cfg.scheme_a.source_to_ccd2
                                                         : cfg.scheme_a.source_to_ccd3)};
    CrossCorrelationEvaluator oracle(test_arm, ref_arm, cfg.spectrum, cfg.wavelength);

    const double d = cfg.slit_separation;
    const double window = is_image
                              ? 3.0 * d
                              : kRmsWindowPeriods * cfg.wavelength *
                                    (cfg.scheme_a.source_to_ccd3 - cfg.scheme_a.source_to_mask) /
                                    d;

    // Quadrature oracle on a subsampled grid inside the window.
    std::vector<double> oracle_on_slice(static_cast<size_t>(res.row.axis.n),
                                        std::numeric_limits<double>::quiet_NaN());
    std::vector<double> mc_win, oracle_win;
    const int stride = std::max(1, static_cast<int>(2.0 * window / res.row.axis.dx) / 160);
    for (int i = 0; i < res.row.axis.n; ++i) {
      const double x2 = res.row.axis.coord(i);
      if (std::abs(x2) > window || i % stride != 0) continue;
      const double g = oracle.g2(fixed_x1, x2);
      oracle_on_slice[static_cast<size_t>(i)] = g;
      if (std::isfinite(res.row.g2[static_cast<size_t>(i)])) {
        mc_win.push_back(res.row.g2[static_cast<size_t>(i)]);
        oracle_win.push_back(g);
      }
    }
    pr.has_oracle = true;
    pr.rms_vs_oracle = rms_difference(mc_win, oracle_win);

    if (is_image) {
      pr.has_image_peaks = true;
      const PeakFind neg = find_peak(res.row, -d, 0.0);
      const PeakFind pos = find_peak(res.row, 0.0, d);
      pr.peak_neg_pos = neg.pos;
      pr.peak_pos_pos = pos.pos;
      pr.peak_neg_height = neg.height;
      pr.peak_pos_height = pos.height;
      pr.checks.push_back(make_check("image_peak_neg", neg.pos, res.row.axis.dx, -0.5 * d,
                                     kTolImagePeak, "conjugate image of the -d/2 slit"));
      pr.checks.push_back(make_check("image_peak_pos", pos.pos, res.row.axis.dx, 0.5 * d,
                                     kTolImagePeak, "conjugate image of the +d/2 slit"));
      pr.checks.push_back(
          make_upper_bound_check("rms_vs_oracle", pr.rms_vs_oracle, kTolRmsSchemeA));
    } else {
      const double hint = cfg.wavelength *
                          (cfg.scheme_a.source_to_ccd3 - cfg.scheme_a.source_to_mask) / d;
      const DeltaCurve curve = slice_to_delta(res.row);
      FringeMetrics metrics = extract_fringe_metrics(curve.delta, curve.g2, hint);
      pr.has_fringe_metrics = true;
      pr.metrics = metrics;
      const MetricErrors errs = metric_errors(curve, metrics, res.row.axis.dx);
      pr.visibility_se = errs.visibility_se;
      pr.period_se = errs.period_se;
      pr.checks.push_back(
          make_check("fringe_period", metrics.period, errs.period_se, hint, kTolPeriodSchemeA));
      pr.checks.push_back(make_bool_check("is_fringe", metrics.is_fringe, true));
      pr.checks.push_back(
          make_upper_bound_check("rms_vs_oracle", pr.rms_vs_oracle, kTolRmsSchemeA));
    }

    if (!out_dir.empty()) {
      const auto meta = csv_metadata(cfg, res);
      const std::string row_csv = join_path(out_dir, pr.name + "_row.csv");
      emit_slice_csv(res.row, oracle_on_slice, meta, row_csv);
      pr.files.emplace_back("row_slice", row_csv);
      const std::string i_csv = join_path(out_dir, pr.name + "_intensity.csv");
      emit_intensity_csv(res.axis2, res.mean_i2, res.se_i2, meta, i_csv);
      pr.files.emplace_back("intensity", i_csv);
      const std::string svg = join_path(out_dir, pr.name + ".svg");
      emit_pairing_plot(svg, "correlation slice (" + pr.name + ")", res.row, oracle_on_slice);
      pr.files.emplace_back("plot", svg);
    }

    report.pairings.push_back(std::move(pr));
  }
}

}  // namespace

bool RunReport::all_checks_passed() const {
  for (const auto& p : pairings)
    for (const auto& c : p.checks)
      if (!c.pass) return false;
  return true;
}

std::string report_to_text(const RunReport& report) {
  std::ostringstream os;
  os << "ghostsim " << report.command << " report\n";
  os << "config_hash=" << report.config_hash << " seed=" << report.seed
     << " ensemble=" << report.ensemble << " workers=" << report.workers
     << " runtime_s=" << fmt(report.seconds, 4) << "\n";
  for (const auto& w : report.warnings) os << "warning: " << w << "\n";
  for (const auto& n : report.notices) os << "notice: " << n << "\n";
  for (const auto& p : report.pairings) {
    os << "[pairing " << p.name << "]\n";
    if (p.has_fringe_metrics) {
      os << "METRIC visibility value=" << fmt(p.metrics.visibility) << " stderr="
         << fmt(p.visibility_se) << "\n";
      os << "METRIC fringe_period value=" << fmt(p.metrics.period) << " stderr="
         << fmt(p.period_se) << "\n";
      os << "METRIC is_fringe value=" << (p.metrics.is_fringe ? 1 : 0) << " modulation_ratio="
         << fmt(p.metrics.modulation_ratio) << "\n";
      os << "METRIC peak_g2 value=" << fmt(p.metrics.central_max) << "\n";
    }
    if (p.has_image_peaks) {
      os << "METRIC image_peak_neg value=" << fmt(p.peak_neg_pos) << " height="
         << fmt(p.peak_neg_height) << "\n";
      os << "METRIC image_peak_pos value=" << fmt(p.peak_pos_pos) << " height="
         << fmt(p.peak_pos_height) << "\n";
    }
    if (p.has_oracle) {
      os << "METRIC oracle_visibility value=" << fmt(p.oracle_visibility) << "\n";
      os << "METRIC oracle_period value=" << fmt(p.oracle_period) << "\n";
      os << "METRIC rms_vs_oracle value=" << fmt(p.rms_vs_oracle) << "\n";
    }
    for (const auto& c : p.checks) {
      os << "CHECK " << c.name << " value=" << fmt(c.value) << " stderr=" << fmt(c.se)
         << " expected=" << fmt(c.expected) << " tol=" << fmt(c.tol) << " verdict="
         << (c.pass ? "PASS" : "FAIL");
      if (!c.note.empty()) os << " note=\"" << c.note << "\"";
      os << "\n";
    }
    for (const auto& r : p.references) {
      os << "REFERENCE " << r.name << " computed=" << fmt(r.computed) << " reported="
         << fmt(r.reference) << " agreement=" << (r.agrees ? "yes" : "NO");
      if (!r.note.empty()) os << " note=\"" << r.note << "\"";
      os << "\n";
    }
    for (const auto& [label, path] : p.files) os << "FILE " << label << " " << path << "\n";
  }
  os << "overall=" << (report.all_checks_passed() ? "PASS" : "FAIL") << "\n";
  return os.str();
}

std::string report_to_json(const RunReport& report) {
  nlohmann::json j;
  j["command"] = report.command;
  j["config_hash"] = report.config_hash;
  j["seed"] = report.seed;
  j["ensemble"] = report.ensemble;
  j["workers"] = report.workers;
  j["runtime_s"] = report.seconds;
  j["warnings"] = report.warnings;
  j["notices"] = report.notices;
  j["all_checks_passed"] = report.all_checks_passed();
  j["config"] = report.config_echo;
  j["pairings"] = nlohmann::json::array();
  for (const auto& p : report.pairings) {
    nlohmann::json jp;
    jp["name"] = p.name;
    if (p.has_fringe_metrics) {
      jp["metrics"] = {{"visibility", p.metrics.visibility},
                       {"visibility_se", p.visibility_se},
                       {"period", p.metrics.period},
                       {"period_se", p.period_se},
                       {"is_fringe", p.metrics.is_fringe},
                       {"modulation_ratio", p.metrics.modulation_ratio},
                       {"peak_g2", p.metrics.central_max}};
    }
    if (p.has_image_peaks) {
      jp["image_peaks"] = {{"neg_pos", p.peak_neg_pos},
                           {"pos_pos", p.peak_pos_pos},
                           {"neg_height", p.peak_neg_height},
                           {"pos_height", p.peak_pos_height}};
    }
    if (p.has_oracle) {
      jp["oracle"] = {{"visibility", p.oracle_visibility},
                      {"period", p.oracle_period},
                      {"is_fringe", p.oracle_is_fringe},
                      {"rms_vs_oracle", p.rms_vs_oracle}};
    }
    jp["checks"] = nlohmann::json::array();
    for (const auto& c : p.checks)
      jp["checks"].push_back({{"name", c.name},
                              {"value", c.value},
                              {"stderr", c.se},
                              {"expected", c.expected},
                              {"tol", c.tol},
                              {"pass", c.pass},
                              {"note", c.note}});
    jp["references"] = nlohmann::json::array();
    for (const auto& r : p.references)
      jp["references"].push_back({{"name", r.name},
                                  {"computed", r.computed},
                                  {"reported", r.reference},
                                  {"agreement", r.agrees},
                                  {"note", r.note}});
    jp["files"] = nlohmann::json::object();
    for (const auto& [label, path] : p.files) jp["files"][label] = path;
    j["pairings"].push_back(jp);
  }
  return j.dump(2);
}

RunReport cmd_run(ScenarioConfig cfg, const RunOptions& options) {
  if (options.seed_override) cfg.master_seed = *options.seed_override;
  cfg.validate();

  RunReport report;
  report.command = "run";
  report.config_echo = emit_config(cfg);
  report.config_hash = config_hash(cfg);
  report.seed = cfg.master_seed;
  report.ensemble = cfg.ensemble_size;
  report.workers = options.workers;

  if (!options.out_dir.empty()) std::filesystem::create_directories(options.out_dir);

  const SimulationPlan plan = build_plan(cfg);
  ProgressFn progress;
  if (!options.quiet)
    progress = [&](std::int64_t done, std::int64_t total) {
      std::cerr << "\r" << done << "/" << total << " realizations" << std::flush;
      if (done == total) std::cerr << "\n";
    };
  const RunOutput run = run_plan(plan, cfg, options.workers, progress);
  report.warnings = run.warnings;
  report.seconds = run.seconds;

  if (cfg.scheme == Scheme::B)
    report_scheme_b(cfg, run, report, options.out_dir);
  else
    report_scheme_a(cfg, run, report, options.out_dir);

  if (!options.out_dir.empty()) {
    write_text_file(join_path(options.out_dir, "config.ini"), report.config_echo);
    write_text_file(join_path(options.out_dir, "report.txt"), report_to_text(report));
    write_text_file(join_path(options.out_dir, "report.json"), report_to_json(report));
  }
  return report;
}

RunReport cmd_compare(ScenarioConfig cfg, const RunOptions& options) {
  cfg.validate();
  RunReport report;
  report.command = "compare";
  report.config_echo = emit_config(cfg);
  report.config_hash = config_hash(cfg);
  report.seed = cfg.master_seed;
  report.ensemble = 0;

  if (!options.out_dir.empty()) std::filesystem::create_directories(options.out_dir);

  if (cfg.scheme != Scheme::B) {
    report.notices.push_back(
        "closed forms cover the symmetric two-arm geometry only; quadrature predictions follow");
    PathSpec test_arm;
    test_arm.elements = {PathElement::free_space(cfg.scheme_a.source_to_mask),
                         PathElement::masked(cfg.test_aperture()),
                         PathElement::free_space(cfg.scheme_a.mask_to_ccd1)};
    PathSpec ref3;
    ref3.elements = {PathElement::free_space(cfg.scheme_a.source_to_ccd3)};
    CrossCorrelationEvaluator eval(test_arm, ref3, cfg.spectrum, cfg.wavelength);
    const double hint =
        cfg.wavelength * (cfg.scheme_a.source_to_ccd3 - cfg.scheme_a.source_to_mask) /
        cfg.slit_separation;
    PairingReport pr;
    pr.name = "ccd1_ccd3";
    std::vector<double> delta, vals;
    for (int i = -96; i <= 96; ++i) {
      const double x2 = hint * i / 32.0;
      delta.push_back(-x2);
      vals.push_back(eval.g2(0.0, x2));
    }
    std::reverse(delta.begin(), delta.end());
    std::reverse(vals.begin(), vals.end());
    pr.has_fringe_metrics = true;
    pr.metrics = extract_fringe_metrics(delta, vals, hint);
    pr.has_oracle = true;
    pr.oracle_visibility = pr.metrics.visibility;
    pr.oracle_period = pr.metrics.period;
    pr.oracle_is_fringe = pr.metrics.is_fringe;
    report.pairings.push_back(std::move(pr));
  } else {
    const ClosedFormCase base = closed_form_case(cfg);
    PairingReport pr;
    pr.name = "oracle";

    // Route equivalence: closed form vs quadrature in the delta-correlated
    // limit without an envelope, where they describe the same integral.
    SpectrumModel broadband = SpectrumModel::broadband_limit(cfg.spectrum.w0);
    PathSpec test_arm, ref_arm;
    test_arm.elements = {PathElement::free_space(cfg.scheme_b.source_to_mask),
                         PathElement::masked(cfg.test_aperture()),
                         PathElement::free_space(cfg.scheme_b.mask_to_detector)};
    ref_arm.elements = {PathElement::free_space(cfg.scheme_b.source_to_mask),
                        PathElement::masked(cfg.ref_aperture()),
                        PathElement::free_space(cfg.scheme_b.mask_to_detector)};
    CrossCorrelationEvaluator eval(test_arm, ref_arm, broadband, cfg.wavelength);
    const double hint = fringe_period_hint(base);
    double max_rel = 0.0;
    for (int i = 0; i < 20; ++i) {
      const double delta = -hint + 2.0 * hint * i / 19.0;
      const double g_closed = closed_form_g2(base, delta, 0.0);
      const double g_quad = eval.g2(delta, 0.0);
      max_rel = std::max(max_rel, std::abs(g_quad - g_closed) / g_closed);
    }
    pr.checks.push_back(make_upper_bound_check("route_equivalence_max_rel", max_rel,
                                               kRouteEquivalenceTol,
                                               "closed form vs quadrature, 20 points"));

    const FringeMetrics m = predicted_visibility(base);
    pr.has_fringe_metrics = true;
    pr.metrics = m;
    pr.has_oracle = true;
    pr.oracle_visibility = m.visibility;
    pr.oracle_period = m.period;
    pr.oracle_is_fringe = m.is_fringe;

    if (cfg.ref_kind == ApertureKind::double_slit) {
      pr.references.push_back({"visibility", m.visibility, kReferenceVisibilityErased,
                               std::abs(m.visibility - kReferenceVisibilityErased) <=
                                   kReferenceAgreementTol,
                               "reported erased-path visibility"});
    } else if (cfg.ref_kind == ApertureKind::incomplete_double_slit) {
      pr.references.push_back({"visibility", m.visibility, kReferenceVisibilityPartial,
                               std::abs(m.visibility - kReferenceVisibilityPartial) <=
                                   kReferenceAgreementTol,
                               "reported partial-cover visibility; not reproduced by the "
                               "aperture-product analysis"});
    }
    report.pairings.push_back(std::move(pr));
  }

  if (!options.out_dir.empty()) {
    write_text_file(join_path(options.out_dir, "config.ini"), report.config_echo);
    write_text_file(join_path(options.out_dir, "report.txt"), report_to_text(report));
    write_text_file(join_path(options.out_dir, "report.json"), report_to_json(report));
  }
  return report;
}

}  // namespace ghostsim
