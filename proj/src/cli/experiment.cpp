#include "homjump/cli/experiment.hpp"

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <set>

#include "homjump/cli/output.hpp"
#include "homjump/jump_engine.hpp"

#ifndef HOMJUMP_VERSION
#define HOMJUMP_VERSION "0.1.0"
#endif

namespace homjump::cli {

using nlohmann::json;

namespace {

void check_keys(const json& obj, const std::set<std::string>& allowed, const std::string& where) {
  if (!obj.is_object()) throw ConfigError(where + " must be a JSON object");
  for (const auto& [key, _] : obj.items()) {
    if (!allowed.contains(key)) throw ConfigError("unknown key '" + key + "' in " + where);
  }
}

double number(const json& obj, const char* key, double fallback) {
  if (!obj.contains(key)) return fallback;
  const auto& v = obj.at(key);
  if (!v.is_number()) throw ConfigError(std::string("'") + key + "' must be a number");
  const double d = v.get<double>();
  if (!std::isfinite(d)) throw ConfigError(std::string("'") + key + "' must be finite");
  return d;
}

std::uint64_t unsigned_integer(const json& obj, const char* key, std::uint64_t fallback) {
  if (!obj.contains(key)) return fallback;
  const auto& v = obj.at(key);
  if (!v.is_number_integer() || (!v.is_number_unsigned() && v.get<std::int64_t>() < 0)) {
    throw ConfigError(std::string("'") + key + "' must be a non-negative integer");
  }
  return v.get<std::uint64_t>();
}

SourceParams parse_params(const std::string& type, const json& p) {
  if (type == "two_atom") {
    check_keys(p, {"omega_eg_1", "omega_eg_2", "gamma_1", "gamma_2"}, "params");
    TwoAtomParams out;
    out.omega_eg_1 = number(p, "omega_eg_1", out.omega_eg_1);
    out.omega_eg_2 = number(p, "omega_eg_2", out.omega_eg_2);
    out.gamma_1 = number(p, "gamma_1", out.gamma_1);
    out.gamma_2 = number(p, "gamma_2", out.gamma_2);
    return out;
  }
  if (type == "cavity_qed") {
    check_keys(p, {"g_1", "g_2", "kappa_1", "kappa_2", "gamma_1", "gamma_2", "fock_cutoff"},
               "params");
    CavityQEDParams out;
    out.g_1 = number(p, "g_1", out.g_1);
    out.g_2 = number(p, "g_2", out.g_2);
    out.kappa_1 = number(p, "kappa_1", out.kappa_1);
    out.kappa_2 = number(p, "kappa_2", out.kappa_2);
    out.gamma_1 = number(p, "gamma_1", out.gamma_1);
    out.gamma_2 = number(p, "gamma_2", out.gamma_2);
    out.fock_cutoff = unsigned_integer(p, "fock_cutoff", out.fock_cutoff);
    return out;
  }
  if (type == "single_cavity_qed") {
    check_keys(p, {"g", "kappa", "gamma", "fock_cutoff"}, "params");
    SingleCavityParams out;
    out.g = number(p, "g", out.g);
    out.kappa = number(p, "kappa", out.kappa);
    out.gamma = number(p, "gamma", out.gamma);
    out.fock_cutoff = unsigned_integer(p, "fock_cutoff", out.fock_cutoff);
    return out;
  }
  throw ConfigError("unknown source_type '" + type + "'");
}

EnsembleSpec ensemble(const ExperimentConfig& cfg, const RunOptions& opts) {
  return {cfg.n_trajectories, cfg.t_max, opts.seed.value_or(cfg.base_seed), opts.threads};
}

std::filesystem::path emit(const RunOptions& opts, const char* name, const std::string& content) {
  const auto path = opts.out_dir / name;
  write_file_atomic(path, content);
  return path;
}

const TimeGrid& require_grid(const ExperimentConfig& cfg) {
  if (!cfg.t_grid) throw ConfigError("this command requires 't_grid'");
  if (cfg.t_grid->stop > cfg.t_max * (1.0 + 1e-12)) {
    throw ConfigError("'t_grid.stop' must not exceed 't_max'");
  }
  return *cfg.t_grid;
}

void write_histogram_rows(CsvBuilder& csv, const DelayHistogram& h) {
  for (std::size_t i = 0; i < h.bin_count(); ++i) {
    csv.cell(h.edges[i]).cell(h.edges[i + 1]);
    csv.cell(static_cast<std::uint64_t>(h.coincidence[i]));
    csv.cell(static_cast<std::uint64_t>(h.anticoincidence[i])).end_row();
  }
}

}  // namespace

std::vector<double> TimeGrid::times() const {
  std::vector<double> out;
  const auto n = static_cast<std::size_t>(std::floor((stop - start) / step + 1e-9));
  out.reserve(n + 1);
  for (std::size_t i = 0; i <= n; ++i) out.push_back(start + static_cast<double>(i) * step);
  return out;
}

std::string_view ExperimentConfig::source_type() const {
  switch (params.index()) {
    case 0: return "two_atom";
    case 1: return "cavity_qed";
    default: return "single_cavity_qed";
  }
}

ExperimentConfig parse_config(const json& doc) {
  check_keys(doc,
             {"schema_version", "source_type", "params", "n_trajectories", "t_max", "base_seed",
              "t_grid", "sweep", "bin_width", "n_list", "repeats", "output"},
             "config");
  if (!doc.contains("schema_version") || doc.at("schema_version") != kSchemaVersion) {
    throw ConfigError("'schema_version' must be 1");
  }
  if (!doc.contains("source_type") || !doc.at("source_type").is_string()) {
    throw ConfigError("'source_type' is required");
  }
  ExperimentConfig cfg;
  cfg.raw = doc;
  cfg.params = parse_params(doc.at("source_type").get<std::string>(),
                            doc.contains("params") ? doc.at("params") : json::object());
  cfg.n_trajectories = unsigned_integer(doc, "n_trajectories", 1);
  if (cfg.n_trajectories < 1) throw ConfigError("'n_trajectories' must be >= 1");
  cfg.t_max = number(doc, "t_max", cfg.t_max);
  if (!(cfg.t_max > 0.0)) throw ConfigError("'t_max' must be > 0");
  cfg.base_seed = unsigned_integer(doc, "base_seed", 0);
  cfg.bin_width = number(doc, "bin_width", kDefaultBinWidth);
  if (!(cfg.bin_width > 0.0)) throw ConfigError("'bin_width' must be > 0");

  if (doc.contains("t_grid")) {
    const auto& g = doc.at("t_grid");
    check_keys(g, {"start", "stop", "step"}, "t_grid");
    TimeGrid grid{number(g, "start", 0.0), number(g, "stop", cfg.t_max), number(g, "step", 0.0)};
    if (!(grid.step > 0.0)) throw ConfigError("'t_grid.step' must be > 0");
    if (!(grid.start >= 0.0) || !(grid.stop >= grid.start)) {
      throw ConfigError("'t_grid' needs 0 <= start <= stop");
    }
    cfg.t_grid = grid;
  }
  if (doc.contains("sweep")) {
    const auto& s = doc.at("sweep");
    check_keys(s, {"variable", "ratios"}, "sweep");
    SweepSpec sweep;
    const auto var = s.value("variable", std::string("kappa_2_ratio"));
    if (var == "kappa_2_ratio") {
      sweep.variable = SweepVariable::Kappa2Ratio;
    } else if (var == "gamma_2_ratio") {
      sweep.variable = SweepVariable::Gamma2Ratio;
    } else {
      throw ConfigError("unknown sweep variable '" + var + "'");
    }
    if (!s.contains("ratios") || !s.at("ratios").is_array() || s.at("ratios").empty()) {
      throw ConfigError("'sweep.ratios' must be a non-empty array");
    }
    for (const auto& r : s.at("ratios")) {
      if (!r.is_number() || !(r.get<double>() >= 1.0)) {
        throw ConfigError("'sweep.ratios' entries must be numbers >= 1");
      }
      sweep.ratios.push_back(r.get<double>());
    }
    cfg.sweep = std::move(sweep);
  }
  if (doc.contains("n_list")) {
    const auto& l = doc.at("n_list");
    if (!l.is_array() || l.empty()) throw ConfigError("'n_list' must be a non-empty array");
    for (const auto& n : l) {
      if (!n.is_number_integer() || n.get<std::int64_t>() < 1) {
        throw ConfigError("'n_list' entries must be integers >= 1");
      }
      cfg.n_list.push_back(n.get<std::size_t>());
    }
  }
  cfg.repeats = unsigned_integer(doc, "repeats", cfg.repeats);
  if (cfg.repeats < 1) throw ConfigError("'repeats' must be >= 1");
  if (doc.contains("output")) {
    if (!doc.at("output").is_string()) throw ConfigError("'output' must be a string");
    cfg.output = doc.at("output").get<std::string>();
  }
  return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config " + path.string());
  json doc;
  try {
    in >> doc;
  } catch (const json::parse_error& e) {
    throw ConfigError("config " + path.string() + ": " + e.what());
  }
  return parse_config(doc);
}

SystemModel build_model(const SourceParams& params) {
  return std::visit(
      [](const auto& p) -> SystemModel {
        using T = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<T, TwoAtomParams>) {
          return build_two_atom_model(p);
        } else if constexpr (std::is_same_v<T, CavityQEDParams>) {
          return build_cavity_qed_model(p);
        } else {
          return build_single_cavity_model(p);
        }
      },
      params);
}

CommandOutput cmd_evolve(const ExperimentConfig& cfg, const RunOptions& opts) {
  const auto times = require_grid(cfg).times();
  const JumpEngine engine(build_model(cfg.params));
  const auto series = expectation_series(engine, ensemble(cfg, opts), times);

  CsvBuilder csv{"t",       "n1_mean", "n1_se", "n2_mean",    "n2_se",   "e1_mean",
                 "e1_se",   "e2_mean", "e2_se", "total_mean", "total_se"};
  for (std::size_t i = 0; i < times.size(); ++i) {
    csv.cell(times[i]);
    for (std::size_t o = 0; o < kObservableCount; ++o) {
      csv.cell(series.mean[o][i]).cell(series.standard_error[o][i]);
    }
    csv.end_row();
  }
  return {{emit(opts, "expectations.csv", csv.str())}};
}

CommandOutput cmd_coincidence_sweep(const ExperimentConfig& cfg, const RunOptions& opts) {
  if (!cfg.sweep) throw ConfigError("coincidence requires 'sweep'");
  const auto spec = ensemble(cfg, opts);
  std::vector<SweepPoint> points;
  if (const auto* two = std::get_if<TwoAtomParams>(&cfg.params)) {
    if (cfg.sweep->variable != SweepVariable::Gamma2Ratio) {
      throw ConfigError("two_atom sweeps must use 'gamma_2_ratio'");
    }
    points = coincidence_sweep(*two, cfg.sweep->variable, cfg.sweep->ratios, spec);
  } else if (const auto* jc = std::get_if<CavityQEDParams>(&cfg.params)) {
    points = coincidence_sweep(*jc, cfg.sweep->variable, cfg.sweep->ratios, spec);
  } else {
    throw ConfigError("coincidence sweeps need a two_atom or cavity_qed source");
  }

  CsvBuilder csv{"ratio", "n_traj", "n_two_click", "n_same", "n_diff", "n_discarded",
                 "fraction", "se"};
  for (const auto& p : points) {
    const auto& r = p.result;
    if (r.n_two_click == 0) {
      throw UndefinedFraction("no two-click trajectories at ratio " + format_double(p.ratio));
    }
    csv.cell(p.ratio)
        .cell(static_cast<std::uint64_t>(r.n_trajectories))
        .cell(static_cast<std::uint64_t>(r.n_two_click))
        .cell(static_cast<std::uint64_t>(r.n_same_detector))
        .cell(static_cast<std::uint64_t>(r.n_diff_detector))
        .cell(static_cast<std::uint64_t>(r.n_discarded))
        .cell(r.coincidence_fraction)
        .cell(r.standard_error)
        .end_row();
  }
  return {{emit(opts, "coincidence.csv", csv.str())}};
}

CommandOutput cmd_delay_histogram(const ExperimentConfig& cfg, const RunOptions& opts) {
  if (std::holds_alternative<SingleCavityParams>(cfg.params)) {
    throw ConfigError("delays needs a two-source model; use 'independent' for single sources");
  }
  const JumpEngine engine(build_model(cfg.params));
  const auto spec = ensemble(cfg, opts);
  const auto records =
      run_ensemble(engine, {spec.n_trajectories, spec.t_max, spec.base_seed, spec.threads, nullptr});
  const auto h = delay_histogram(records, cfg.bin_width, cfg.t_max);

  CsvBuilder csv{"bin_left", "bin_right", "coincidence_count", "anticoincidence_count"};
  write_histogram_rows(csv, h);
  return {{emit(opts, "delays.csv", csv.str())}};
}

CommandOutput cmd_independent(const ExperimentConfig& cfg, const RunOptions& opts) {
  SingleCavityParams single;
  if (const auto* s = std::get_if<SingleCavityParams>(&cfg.params)) {
    single = *s;
  } else if (const auto* jc = std::get_if<CavityQEDParams>(&cfg.params)) {
    single = {jc->g_1, jc->kappa_1, jc->gamma_1, jc->fock_cutoff};
  } else {
    throw ConfigError("independent needs a single_cavity_qed or cavity_qed source");
  }
  const JumpEngine engine(build_single_cavity_model(single));
  const auto spec = ensemble(cfg, opts);
  const std::size_t n = spec.n_trajectories;
  // seed ranges [base, base + N) and [base + N, base + 2N)
  const auto a = run_ensemble(engine, {n, spec.t_max, spec.base_seed, spec.threads, nullptr});
  const auto b = run_ensemble(engine, {n, spec.t_max, spec.base_seed + n, spec.threads, nullptr});
  const auto h = independent_union(a, b, cfg.bin_width, cfg.t_max);

  CsvBuilder csv{"bin_left", "bin_right", "coincidence_count", "anticoincidence_count"};
  write_histogram_rows(csv, h);
  return {{emit(opts, "delays.csv", csv.str())}};
}

CommandOutput cmd_scaling(const ExperimentConfig& cfg, const RunOptions& opts) {
  const auto times = require_grid(cfg).times();
  std::vector<std::size_t> n_list = cfg.n_list;
  if (n_list.empty()) {
    for (std::size_t n = 1000; n <= 10000; n += 1000) n_list.push_back(n);
  }
  const JumpEngine engine(build_model(cfg.params));
  auto spec = ensemble(cfg, opts);

  // Repeats run round-robin over the sizes so that a slow spell on the host
  // does not land on every repeat of one size.
  std::vector<double> best(n_list.size(), std::numeric_limits<double>::infinity());
  for (std::size_t rep = 0; rep < cfg.repeats; ++rep) {
    for (std::size_t k = 0; k < n_list.size(); ++k) {
      spec.n_trajectories = n_list[k];
      const auto start = std::chrono::steady_clock::now();
      const auto series = expectation_series(engine, spec, times);
      const std::chrono::duration<double> wall = std::chrono::steady_clock::now() - start;
      if (series.n_trajectories != n_list[k]) {
        throw std::logic_error("scaling: ensemble size mismatch");
      }
      best[k] = std::min(best[k], wall.count());
    }
  }
  CsvBuilder csv{"n_traj", "wall_seconds"};
  for (std::size_t k = 0; k < n_list.size(); ++k) {
    csv.cell(static_cast<std::uint64_t>(n_list[k])).cell(best[k]).end_row();
  }
  return {{emit(opts, "scaling.csv", csv.str())}};
}

CommandOutput run_command(std::string_view name, const ExperimentConfig& cfg,
                          const RunOptions& opts) {
  std::error_code ec;
  std::filesystem::create_directories(opts.out_dir, ec);
  if (ec) throw std::runtime_error("cannot create " + opts.out_dir.string() + ": " + ec.message());

  const auto start = std::chrono::steady_clock::now();
  CommandOutput out;
  if (name == "evolve") {
    out = cmd_evolve(cfg, opts);
  } else if (name == "coincidence") {
    out = cmd_coincidence_sweep(cfg, opts);
  } else if (name == "delays") {
    out = cmd_delay_histogram(cfg, opts);
  } else if (name == "independent") {
    out = cmd_independent(cfg, opts);
  } else if (name == "scaling") {
    out = cmd_scaling(cfg, opts);
  } else {
    throw std::invalid_argument("unknown command '" + std::string(name) + "'");
  }
  const std::chrono::duration<double> runtime = std::chrono::steady_clock::now() - start;

  json files = json::object();
  for (const auto& f : out.files) {
    std::ifstream in(f, std::ios::binary);
    const std::string content((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    files[f.filename().string()] = {{"sha256", sha256_hex(content)}, {"bytes", content.size()}};
  }
  json manifest = {{"command", std::string(name)},
                   {"version", artifact_version()},
                   {"config", cfg.raw},
                   {"effective_seed", opts.seed.value_or(cfg.base_seed)},
                   {"runtime_seconds", runtime.count()},
                   {"files", files}};
  const auto manifest_path = opts.out_dir / "manifest.json";
  write_file_atomic(manifest_path, manifest.dump(2) + "\n");
  out.files.push_back(manifest_path);
  return out;
}

unsigned threads_from_environment(std::optional<unsigned> flag) {
  if (flag) return *flag;
  if (const char* env = std::getenv("HOMJUMP_THREADS")) {
    char* end = nullptr;
    const unsigned long v = std::strtoul(env, &end, 10);
    if (end != env && *end == '\0') return static_cast<unsigned>(v);
    throw ConfigError("HOMJUMP_THREADS must be a non-negative integer");
  }
  return 0;
}

std::string artifact_version() { return HOMJUMP_VERSION; }

}  // namespace homjump::cli
