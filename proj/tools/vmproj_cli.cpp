// vmproj: run | stability | convergence | verify
//
// Exit codes: 0 success, 1 verification or runtime failure, 2 configuration error.

#include <cstdint>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "vmproj/config.hpp"
#include "vmproj/studies.hpp"
#include "vmproj/verify.hpp"

namespace {

struct Args {
  std::string config;
  std::string out = "out";
  std::optional<std::uint64_t> seed;
};

void addCommon(CLI::App* cmd, Args& args) {
  cmd->add_option("--config", args.config, "JSON configuration file")->required();
  cmd->add_option("--out", args.out, "output directory")->capture_default_str();
  cmd->add_option("--seed", args.seed, "override the configuration seed");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Projection time stepping for Kelvin-Voigt perfect plasticity"};
  app.require_subcommand(1);
  Args args;
  CLI::App* runCmd = app.add_subcommand("run", "run one trajectory, write norms.csv and VTK snapshots");
  CLI::App* stabCmd = app.add_subcommand("stability", "norm report over study.N_list");
  CLI::App* convCmd = app.add_subcommand("convergence", "errors against a study.N_ref reference run");
  CLI::App* verCmd = app.add_subcommand("verify", "property and oracle suites");
  for (CLI::App* c : {runCmd, stabCmd, convCmd, verCmd}) addCommon(c, args);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  vmproj::RunConfig cfg;
  try {
    cfg = vmproj::parseConfig(args.config);
    if (args.seed) cfg.seed = *args.seed;
  } catch (const vmproj::ConfigError& e) {
    std::cerr << "configuration error: " << e.what() << '\n';
    return 2;
  }

  try {
    if (runCmd->parsed()) vmproj::cmdRun(cfg, args.out);
    if (stabCmd->parsed()) vmproj::cmdStability(cfg, args.out);
    if (convCmd->parsed()) vmproj::cmdConvergence(cfg, args.out);
    if (verCmd->parsed()) return vmproj::cmdVerify(cfg, args.out, std::cout) ? 0 : 1;
  } catch (const vmproj::ConfigError& e) {
    std::cerr << "configuration error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
