// Command line front end: `kwc run <config>` executes the mode named in the
// config file, `kwc verify <config>` forces verification mode. Exit codes:
// 0 success, 1 solver failure, 2 configuration error.

#include <iostream>
#include <string>

#include "CLI11.hpp"

#include "kwc/config.hpp"

int main(int argc, char** argv) {
  CLI::App app{"1D KWC-type phase-field control solver"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_override;
  std::uint64_t seed_override = 0;
  bool seed_given = false;
  double tau_override = 0.0;
  int cells_override = 0;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("config", config_path, "experiment config file (JSON)")->required();
    sub->add_option("--out", out_override, "output directory override");
    sub->add_option("--seed", seed_override, "seed override")->each([&](const std::string&) {
      seed_given = true;
    });
    sub->add_option("--tau", tau_override, "time step override");
    sub->add_option("--cells", cells_override, "cell count override");
  };

  CLI::App* run_cmd = app.add_subcommand("run", "run the experiment mode named in the config");
  add_common(run_cmd);
  CLI::App* verify_cmd = app.add_subcommand("verify", "run the verification suite");
  add_common(verify_cmd);

  CLI11_PARSE(app, argc, argv);

  try {
    kwc::ExperimentSpec spec = kwc::parse_config(config_path);
    if (verify_cmd->parsed()) spec.mode = "verify";
    if (!out_override.empty()) spec.output_dir = out_override;
    if (seed_given) spec.seed = seed_override;
    if (tau_override > 0.0) spec.tau = tau_override;
    if (cells_override > 0) spec.cells = cells_override;
    return kwc::run(spec);
  } catch (const kwc::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
