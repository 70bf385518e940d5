#pragma once

#include <optional>
#include <string>
#include <vector>

#include "ghostsim/config.hpp"
#include "ghostsim/fringe.hpp"
#include "ghostsim/scenario.hpp"

namespace ghostsim {

/// One scored comparison: value +- se against expected +- tol.
struct CheckLine {
  std::string name;
  double value = 0.0;
  double se = 0.0;
  double expected = 0.0;
  double tol = 0.0;
  bool pass = false;
  std::string note;
};

/// Unscored side-by-side comparison (previously reported measurement values).
struct ReferenceLine {
  std::string name;
  double computed = 0.0;
  double reference = 0.0;
  bool agrees = false;
  std::string note;
};

struct PairingReport {
  std::string name;

  bool has_fringe_metrics = false;
  FringeMetrics metrics;
  double visibility_se = 0.0;
  double period_se = 0.0;

  bool has_image_peaks = false;
  double peak_neg_pos = 0.0, peak_pos_pos = 0.0;  // refined peak coordinates
  double peak_neg_height = 0.0, peak_pos_height = 0.0;

  bool has_oracle = false;
  double oracle_visibility = 0.0;
  double oracle_period = 0.0;
  bool oracle_is_fringe = false;
  double rms_vs_oracle = 0.0;

  std::vector<CheckLine> checks;
  std::vector<ReferenceLine> references;
  std::vector<std::pair<std::string, std::string>> files;  // label -> path
};

struct RunReport {
  std::string command;  // "run" or "compare"
  std::string config_echo;
  std::string config_hash;
  std::uint64_t seed = 0;
  std::int64_t ensemble = 0;
  int workers = 1;
  double seconds = 0.0;
  std::vector<std::string> warnings;
  std::vector<std::string> notices;
  std::vector<PairingReport> pairings;

  bool all_checks_passed() const;
};

std::string report_to_text(const RunReport& report);
std::string report_to_json(const RunReport& report);

struct RunOptions {
  int workers = 1;
  std::string out_dir;  // empty: no files
  std::optional<std::uint64_t> seed_override;
  bool check = false;
  bool quiet = true;  // suppress progress on stderr
};

/// Full Monte Carlo run: builds the plan, runs the ensemble, compares the
/// measured slices against the analytic curves, emits CSVs, plots, and the
/// machine-readable report.
RunReport cmd_run(ScenarioConfig cfg, const RunOptions& options);

/// Analytic layer only, no Monte Carlo: closed-form vs quadrature route
/// equivalence, predicted visibilities and periods, and the comparison table
/// against previously reported visibility values.
RunReport cmd_compare(ScenarioConfig cfg, const RunOptions& options);

}  // namespace ghostsim
