// homjump: quantum-jump simulations of two-photon interference.
//
//   homjump <evolve|coincidence|delays|independent|scaling> --config <path> --out <dir>
//           [--threads N] [--seed S]

#include <cstdint>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "homjump/cli/experiment.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Monte-Carlo wavefunction simulator of Hong-Ou-Mandel interference"};
  app.set_version_flag("--version", homjump::cli::artifact_version());
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir;
  std::optional<unsigned> threads;
  std::optional<std::uint64_t> seed;

  struct Command {
    const char* name;
    const char* help;
  };
  const Command commands[] = {
      {"evolve", "expectation values vs time -> expectations.csv"},
      {"coincidence", "same-detector fraction vs rate ratio -> coincidence.csv"},
      {"delays", "click-delay histogram of two sources -> delays.csv"},
      {"independent", "union of two independent single-source runs -> delays.csv"},
      {"scaling", "wall time vs trajectory count -> scaling.csv"},
  };
  for (const auto& c : commands) {
    auto* sub = app.add_subcommand(c.name, c.help);
    sub->add_option("--config", config_path, "experiment config (JSON)")->required()->check(
        CLI::ExistingFile);
    sub->add_option("--out", out_dir, "output directory (overrides config 'output')");
    sub->add_option("--threads", threads, "worker threads (default: HOMJUMP_THREADS or all cores)");
    sub->add_option("--seed", seed, "base seed (overrides config 'base_seed')");
  }

  CLI11_PARSE(app, argc, argv);
  const std::string command = app.get_subcommands().front()->get_name();

  try {
    const auto cfg = homjump::cli::load_config(config_path);
    homjump::cli::RunOptions opts;
    if (!out_dir.empty()) {
      opts.out_dir = out_dir;
    } else if (cfg.output) {
      opts.out_dir = *cfg.output;
    } else {
      std::cerr << "homjump: no output directory (use --out or config 'output')\n";
      return 2;
    }
    opts.threads = homjump::cli::threads_from_environment(threads);
    opts.seed = seed;
    const auto out = homjump::cli::run_command(command, cfg, opts);
    for (const auto& f : out.files) std::cout << f.string() << '\n';
  } catch (const std::exception& e) {
    std::cerr << "homjump " << command << ": " << e.what() << '\n';
    return 1;
  }
  return 0;
}
