#include <cstdlib>
#include <iostream>
#include <string>

#include <CLI11.hpp>
#include <omp.h>

#include "qdgate/cli/commands.hpp"

namespace {

int default_jobs() {
  if (const char* env = std::getenv("SIM_JOBS")) {
    try {
      const int n = std::stoi(env);
      if (n > 0) return n;
    } catch (const std::exception&) {
    }
    std::cerr << "qdsim: ignoring invalid SIM_JOBS='" << env << "'\n";
  }
  return omp_get_max_threads();
}

}  // namespace

int main(int argc, char** argv) {
  using namespace qdgate::cli;
  CLI::App app{"Quantum-dot gate, dephasing and readout simulations"};
  app.require_subcommand(1);

  RunOptions opts;
  opts.jobs = default_jobs();
  std::string config, out;
  std::uint64_t seed = 0;
  int jobs = 0;
  bool verbose = false;
  for (const auto& name : command_names()) {
    CLI::App* sub = app.add_subcommand(name);
    sub->add_option("--config", config, "YAML config file")->required()->check(CLI::ExistingFile);
    sub->add_option("--out", out, "output directory")->required();
    sub->add_option("--seed", seed, "overrides the config seed");
    sub->add_option("--jobs", jobs, "worker threads (overrides SIM_JOBS)")
        ->check(CLI::PositiveNumber);
    sub->add_flag("--verbose", verbose, "progress on stderr");
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return exit_config_error;
  }
  CLI::App* chosen = app.get_subcommands().front();
  opts.config = config;
  opts.out = out;
  if (chosen->count("--seed") > 0) opts.seed = seed;
  if (chosen->count("--jobs") > 0) opts.jobs = jobs;
  opts.verbose = verbose;
  return run_command(chosen->get_name(), opts);
}
