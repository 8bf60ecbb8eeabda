#include <CLI11.hpp>

#include <iostream>

#include "hup/lab.hpp"

int main(int argc, char** argv) {
  CLI::App app{"hup-lab: numerical checks around the Heisenberg uniqueness problem"};
  app.require_subcommand(1);

  std::string config;
  std::string run_out;
  auto* run = app.add_subcommand("run", "run one experiment from a config file");
  run->add_option("config", config, "config file")->required();
  run->add_option("--out", run_out, "report directory (overrides [run] out)");

  std::string suite;
  std::string suite_out = "reports";
  hup::lab::SuiteOptions opt;
  int M = -1;
  auto* su = app.add_subcommand("suite", "run a named suite: identities, hup, weyl, all");
  su->add_option("name", suite, "suite name")->required();
  su->add_option("--jobs", opt.jobs, "members run concurrently")->check(CLI::PositiveNumber);
  su->add_option("--out", suite_out, "report directory");
  su->add_option("--seed", opt.seed, "base seed");
  auto* Mopt = su->add_option("--M", M, "Hermite truncation for the Weyl members")->check(CLI::NonNegativeNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (*run) {
      std::optional<std::filesystem::path> out;
      if (!run_out.empty()) out = run_out;
      return hup::lab::run_command(config, out, std::cerr);
    }
    if (Mopt->count()) opt.M = M;
    return hup::lab::suite_command(suite, opt, suite_out, std::cerr);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 3;
  }
}
