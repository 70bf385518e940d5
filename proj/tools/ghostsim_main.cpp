#include <cstdint>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "ghostsim/report.hpp"
#include "ghostsim/thread_pool.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Correlated double-slit interference and ghost imaging simulator"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir;
  int workers = ghostsim::default_worker_count();
  std::uint64_t seed = 0;
  bool have_seed = false;
  bool check = false;

  CLI::App* run = app.add_subcommand("run", "Monte Carlo ensemble run");
  run->add_option("config", config_path, "configuration file")->required();
  run->add_option("--workers", workers, "worker threads");
  run->add_option("--out", out_dir, "output directory for CSVs, plots, reports");
  run->add_option("--seed", seed, "master seed override")->each([&](const std::string&) {
    have_seed = true;
  });
  run->add_flag("--check", check, "exit nonzero when a declared check fails");

  CLI::App* compare = app.add_subcommand("compare", "analytic oracle only, no Monte Carlo");
  compare->add_option("config", config_path, "configuration file")->required();
  compare->add_option("--out", out_dir, "output directory for reports");

  CLI11_PARSE(app, argc, argv);

  try {
    ghostsim::RunOptions options;
    options.workers = workers;
    options.out_dir = out_dir;
    options.check = check;
    options.quiet = false;
    if (have_seed) options.seed_override = seed;

    ghostsim::ScenarioConfig cfg = ghostsim::load_config_file(config_path);
    ghostsim::RunReport report;
    if (run->parsed())
      report = ghostsim::cmd_run(cfg, options);
    else
      report = ghostsim::cmd_compare(cfg, options);

    std::cout << ghostsim::report_to_text(report);
    if (check && !report.all_checks_passed()) return 1;
    return 0;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
