// Command-line driver: pwiener <capacity|delta-profile|cascade|solve|verify> --config FILE

#include <omp.h>

#include <CLI11.hpp>
#include <cstdio>
#include <iostream>

#include "pwiener/errors.hpp"
#include "pwiener/experiments.hpp"

namespace {

enum Exit { ok = 0, config_error = 2, numeric_error = 3 };

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Capacities, Wiener envelopes and oscillation decay for the degenerate p-Laplacian"};
  app.set_version_flag("--version", PWIENER_VERSION);
  app.require_subcommand(1);

  std::string config_path;
  std::string out;
  int workers = 0;
  std::uint64_t seed = 0;

  struct Command {
    const char* name;
    const char* help;
    pwiener::io::Json (*run)(const pwiener::ExperimentConfig&, const pwiener::RunOptions&);
  };
  const Command commands[] = {
      {"capacity", "condenser capacities and delta at the configured radii", pwiener::cmd_capacity},
      {"delta-profile", "relative capacity profile on the geometric radii", pwiener::cmd_delta_profile},
      {"cascade", "oscillation cascade over synthetic profiles", pwiener::cmd_cascade},
      {"solve", "time-dependent solve with snapshots", pwiener::cmd_solve},
      {"verify", "end-to-end check of the oscillation decay estimate", pwiener::cmd_verify},
  };
  std::vector<CLI::App*> subs;
  for (const auto& c : commands) {
    CLI::App* sub = app.add_subcommand(c.name, c.help);
    sub->add_option("--config", config_path, "experiment file (YAML)")->required()->check(CLI::ExistingFile);
    sub->add_option("--out", out, "output directory (overrides output_dir)");
    sub->add_option("--workers", workers, "OpenMP threads (0: runtime default)")->check(CLI::NonNegativeNumber);
    sub->add_option("--seed", seed, "seed for synthetic profiles (overrides the config)");
    subs.push_back(sub);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    // Bad flags count as a configuration error.
    return app.exit(e) == 0 ? ok : config_error;
  }

  std::size_t which = 0;
  while (!subs[which]->parsed()) ++which;
  CLI::App* sub = subs[which];

  if (workers > 0) omp_set_num_threads(workers);
  pwiener::RunOptions opt;
  if (sub->count("--out")) opt.out_dir = out;
  if (sub->count("--seed")) opt.seed = seed;

  try {
    const pwiener::ExperimentConfig cfg = pwiener::load_config(config_path);
    const auto report = commands[which].run(cfg, opt);
    std::cout << commands[which].name << ": done, outputs in "
              << (opt.out_dir ? opt.out_dir->string() : cfg.output_dir) << "\n";
    (void)report;
    return ok;
  } catch (const pwiener::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return config_error;
  } catch (const pwiener::InvalidArgument& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return config_error;
  } catch (const pwiener::NumericError& e) {
    std::cerr << "numeric failure: " << e.what() << "\n";
    return numeric_error;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return numeric_error;
  }
}
