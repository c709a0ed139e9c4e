#include <CLI11.hpp>

#include <iostream>

#include "config.hpp"
#include "runner.hpp"

int main(int argc, char** argv) {
  using namespace livsic::cli;

  CLI::App app{"Livšic cohomology toolkit for interval maps"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(kToolVersion));

  std::string config_path, out_dir;
  std::uint64_t seed = 0;
  bool quiet = false;
  app.add_option("--config", config_path, "configuration file (key = value)")->check(CLI::ExistingFile);
  app.add_option("--out", out_dir, "output directory (overrides output.dir)");
  auto* seed_opt = app.add_option("--seed", seed, "master seed (overrides seed)");
  app.add_flag("--quiet", quiet, "print nothing but errors");

  const std::vector<std::pair<std::string, std::string>> help = {
      {"axioms", "check the Gibbs-Markov and tower axioms"},
      {"induce", "build the first-return partition"},
      {"livsic", "periodic-orbit obstructions"},
      {"solve", "reconstruct the transfer function along an orbit and estimate its regularity"},
      {"aperiodicity", "lattice test on the periodic data"},
      {"variance", "CLT variance of the centered observable"},
  };
  for (const auto& [name, text] : help) app.add_subcommand(name, text)->fallthrough();
  std::string scenario;
  auto* sc = app.add_subcommand("scenario", "run a builtin end-to-end scenario")->fallthrough();
  sc->add_option("name", scenario, "scenario name")->required()->check(CLI::IsMember(scenarios()));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    AnalysisConfig cfg = config_path.empty() ? AnalysisConfig() : AnalysisConfig::load(config_path);
    if (seed_opt->count() > 0) cfg.set("seed", std::to_string(seed));
    const std::string command = app.get_subcommands().front()->get_name();
    RunOptions opts;
    opts.out_dir = out_dir;
    opts.quiet = quiet;
    const json report = run(command, scenario, std::move(cfg), opts);
    if (!quiet) std::cout << report["summary"].get<std::string>() << "\n";
    return 0;
  } catch (const ConfigError& e) {
    std::cerr << "livsic: configuration error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "livsic: " << e.what() << "\n";
    return 1;
  }
}
