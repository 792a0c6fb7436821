// Simulation front end: runs a configured scenario, writes the frame CSV and
// prints aggregate statistics. Exit codes: 0 success, 1 invalid configuration
// or flags, 2 runtime failure.

#include <exception>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "vslam/harness.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Equivariant visual-SLAM observer simulator"};
  std::string config_path;
  std::string out_path;
  std::optional<double> duration;
  std::optional<double> dt;
  std::optional<std::uint64_t> seed;
  bool summary = false;
  bool emit_defaults = false;

  app.add_option("--config", config_path, "Scenario config file (omit for the default scenario)");
  app.add_option("--out", out_path, "CSV output path (overrides the config's csv key)");
  app.add_option("--duration", duration, "Override the simulated duration [s]");
  app.add_option("--dt", dt, "Override the integration step [s]");
  app.add_option("--seed", seed, "Override the RNG seed");
  app.add_flag("--summary", summary, "Print the run summary to stdout");
  app.add_flag("--emit-defaults", emit_defaults, "Print the default config and exit");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (emit_defaults) {
      std::cout << vslam::config_to_string(vslam::ScenarioConfig{});
      return 0;
    }
    vslam::ScenarioConfig cfg =
        config_path.empty() ? vslam::ScenarioConfig{} : vslam::parse_config(config_path);
    if (duration) cfg.duration = *duration;
    if (dt) cfg.dt = *dt;
    if (seed) cfg.seed = *seed;
    cfg.validate();

    const vslam::SimulationRun run = vslam::run_scenario(cfg);
    const std::string csv_target = !out_path.empty() ? out_path : cfg.csv_path;
    if (!csv_target.empty()) {
      vslam::emit_csv(run.frames, csv_target);
    }
    if (summary) {
      std::cout << vslam::summary_to_string(vslam::summarize(run));
    }
    return 0;
  } catch (const vslam::ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
