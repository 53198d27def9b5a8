#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "commands.hpp"
#include "run_config.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Chernoff-approximation experiments for regulated Hamiltonians"};
  app.set_version_flag("--version", std::string(CHERNOFF_VERSION));
  app.require_subcommand(1);

  cli::CommonArgs args;
  std::string config_path;
  std::string out_dir = ".";

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", config_path, "JSON run configuration file")->required();
    sub->add_option("--set", args.overrides,
                    "Override a config field: dotted.path=value (repeatable; values "
                    "parse as JSON, falling back to plain strings)");
    sub->add_option("--jobs", args.jobs, "Concurrent sweep evaluations (default 1)")
        ->check(CLI::PositiveNumber);
    sub->add_option("--out", out_dir, "Output directory (default .)");
  };

  CLI::App* evolve = app.add_subcommand(
      "evolve", "Propagate the initial state to time t; emit psi0.wf, psi_t.wf, "
                "profile.csv, manifest.json");
  CLI::App* verify = app.add_subcommand(
      "verify", "Run the property suite for the configured model; emit "
                "properties.csv, manifest.json");
  CLI::App* converge = app.add_subcommand(
      "converge", "Sweep n and/or j against the reference; emit error_vs_n.csv, "
                  "error_vs_j.csv, manifest.json");
  CLI::App* compare = app.add_subcommand(
      "compare", "Chernoff vs split-step vs dense on one multi-dimensional model; "
                 "emit compare.csv, manifest.json");
  for (CLI::App* sub : {evolve, verify, converge, compare}) add_common(sub);
  verify->add_flag("--inject-broken-shift", args.inject_broken_shift,
                   "Mutation control: break the shift root exponent and expect the "
                   "tangency check to fail");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? cli::exit_ok : cli::exit_usage;
  }

  args.config_path = config_path;
  args.out_dir = out_dir;

  try {
    if (evolve->parsed()) return cli::cmd_evolve(args);
    if (verify->parsed()) return cli::cmd_verify(args);
    if (converge->parsed()) return cli::cmd_converge(args);
    return cli::cmd_compare(args);
  } catch (const cli::usage_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return cli::exit_usage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return cli::exit_numerical;
  }
}
