#pragma once

// JSON experiment configs and the homjump subcommands.
//
// Config (schema_version 1):
//   {
//     "schema_version": 1,
//     "source_type": "two_atom" | "cavity_qed" | "single_cavity_qed",
//     "params": { ... per source type ... },
//     "n_trajectories": 10000,
//     "t_max": 10.0,
//     "base_seed": 1,
//     "t_grid": {"start": 0, "stop": 10, "step": 0.1},
//     "sweep": {"variable": "kappa_2_ratio" | "gamma_2_ratio", "ratios": [1, 2, 5]},
//     "bin_width": 0.25,
//     "n_list": [1000, 2000],
//     "repeats": 3,
//     "output": "out/"
//   }

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include <json.hpp>

#include "homjump/sources.hpp"
#include "homjump/statistics.hpp"

namespace homjump::cli {

/// Raised for malformed or inconsistent configs.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline constexpr int kSchemaVersion = 1;
inline constexpr double kDefaultBinWidth = 0.25;

struct TimeGrid {
  double start = 0.0;
  double stop = 0.0;
  double step = 0.0;

  std::vector<double> times() const;
};

struct SweepSpec {
  SweepVariable variable = SweepVariable::Kappa2Ratio;
  std::vector<double> ratios;
};

using SourceParams = std::variant<TwoAtomParams, CavityQEDParams, SingleCavityParams>;

struct ExperimentConfig {
  SourceParams params;
  std::size_t n_trajectories = 1;
  double t_max = 1.0;
  std::uint64_t base_seed = 0;
  std::optional<TimeGrid> t_grid;
  std::optional<SweepSpec> sweep;
  double bin_width = kDefaultBinWidth;
  std::vector<std::size_t> n_list;
  std::size_t repeats = 3;  // scaling: timed runs per N, fastest kept
  std::optional<std::filesystem::path> output;
  nlohmann::json raw;  // the document as given

  std::string_view source_type() const;
};

ExperimentConfig parse_config(const nlohmann::json& doc);
ExperimentConfig load_config(const std::filesystem::path& path);

SystemModel build_model(const SourceParams& params);

struct RunOptions {
  std::filesystem::path out_dir;
  unsigned threads = 0;
  std::optional<std::uint64_t> seed;  // overrides base_seed
};

struct CommandOutput {
  std::vector<std::filesystem::path> files;
};

CommandOutput cmd_evolve(const ExperimentConfig& cfg, const RunOptions& opts);
CommandOutput cmd_coincidence_sweep(const ExperimentConfig& cfg, const RunOptions& opts);
CommandOutput cmd_delay_histogram(const ExperimentConfig& cfg, const RunOptions& opts);
CommandOutput cmd_independent(const ExperimentConfig& cfg, const RunOptions& opts);
CommandOutput cmd_scaling(const ExperimentConfig& cfg, const RunOptions& opts);

/// Runs the named subcommand and then writes manifest.json. Throws on unknown
/// commands, config errors or I/O failures.
CommandOutput run_command(std::string_view name, const ExperimentConfig& cfg,
                          const RunOptions& opts);

/// "--threads" value, else HOMJUMP_THREADS, else 0 (all cores).
unsigned threads_from_environment(std::optional<unsigned> flag);

std::string artifact_version();

}  // namespace homjump::cli
