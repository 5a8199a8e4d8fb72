#include "homjump/statistics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <optional>
#include <string>

namespace homjump {

std::vector<OperatorMatrix> standard_observables(const BasisLayout& layout) {
  auto local_number = [&](SiteKind kind, std::size_t n) {
    const auto site = layout.find_site(kind, n);
    if (!site) return OperatorMatrix::zero(layout);
    return embed(number_operator(layout.sites()[*site].dim), *site, layout);
  };
  return {local_number(SiteKind::Cavity, 0), local_number(SiteKind::Cavity, 1),
          local_number(SiteKind::Atom, 0), local_number(SiteKind::Atom, 1),
          total_excitation(layout)};
}

ExpectationSeries expectation_series(const JumpEngine& engine, const EnsembleSpec& spec,
                                     std::span<const double> t_grid) {
  if (spec.n_trajectories == 0) {
    throw std::invalid_argument("expectation_series: empty ensemble");
  }
  SamplingPlan plan{std::vector<double>(t_grid.begin(), t_grid.end()),
                    standard_observables(engine.model().layout())};
  const auto records = run_ensemble(
      engine, {spec.n_trajectories, spec.t_max, spec.base_seed, spec.threads, &plan});

  const std::size_t n_grid = t_grid.size();
  const auto n = static_cast<double>(records.size());
  ExpectationSeries out;
  out.t_grid = plan.times;
  out.n_trajectories = records.size();
  out.mean.assign(kObservableCount, std::vector<double>(n_grid, 0.0));
  out.standard_error.assign(kObservableCount, std::vector<double>(n_grid, 0.0));

  std::vector<double> sum(n_grid * kObservableCount, 0.0);
  std::vector<double> sum_sq(n_grid * kObservableCount, 0.0);
  for (const auto& rec : records) {
    for (std::size_t k = 0; k < sum.size(); ++k) {
      sum[k] += rec.samples[k];
      sum_sq[k] += rec.samples[k] * rec.samples[k];
    }
  }
  for (std::size_t i = 0; i < n_grid; ++i) {
    for (std::size_t o = 0; o < kObservableCount; ++o) {
      const std::size_t k = i * kObservableCount + o;
      const double mean = sum[k] / n;
      out.mean[o][i] = mean;
      if (records.size() > 1) {
        const double var = std::max(0.0, (sum_sq[k] - n * mean * mean) / (n - 1.0));
        out.standard_error[o][i] = std::sqrt(var / n);
      }
    }
  }
  return out;
}

namespace {

struct ClickPair {
  JumpEvent first;
  JumpEvent second;
};

std::optional<ClickPair> first_two_clicks(const TrajectoryRecord& rec) {
  const JumpEvent* found[2] = {nullptr, nullptr};
  std::size_t count = 0;
  for (const auto& e : rec.events) {
    if (!is_detector_label(e.label)) continue;
    found[count++] = &e;
    if (count == 2) return ClickPair{*found[0], *found[1]};
  }
  return std::nullopt;
}

std::optional<JumpEvent> first_click(const TrajectoryRecord& rec) {
  for (const auto& e : rec.events) {
    if (is_detector_label(e.label)) return e;
  }
  return std::nullopt;
}

void add_delay(DelayHistogram& h, double delay, bool coincidence) {
  const double max_delay = h.edges.back();
  if (!(delay >= 0.0) || delay > max_delay) return;
  auto bin = static_cast<std::size_t>(delay / h.bin_width);
  bin = std::min(bin, h.bin_count() - 1);
  if (coincidence) {
    ++h.coincidence[bin];
  } else {
    ++h.anticoincidence[bin];
  }
}

}  // namespace

CoincidenceResult coincidence_counts(std::span<const TrajectoryRecord> records) {
  CoincidenceResult r;
  r.n_trajectories = records.size();
  for (const auto& rec : records) {
    const auto pair = first_two_clicks(rec);
    if (!pair) {
      ++r.n_discarded;
      continue;
    }
    ++r.n_two_click;
    if (pair->first.label == pair->second.label) {
      ++r.n_same_detector;
    } else {
      ++r.n_diff_detector;
    }
  }
  if (r.n_two_click > 0) {
    const auto n = static_cast<double>(r.n_two_click);
    r.coincidence_fraction = static_cast<double>(r.n_same_detector) / n;
    r.standard_error = std::sqrt(r.coincidence_fraction * (1.0 - r.coincidence_fraction) / n);
  }
  return r;
}

CoincidenceResult coincidence_stats(std::span<const TrajectoryRecord> records) {
  auto r = coincidence_counts(records);
  if (r.n_two_click == 0) {
    throw UndefinedFraction("coincidence fraction undefined: no record has two detector clicks");
  }
  return r;
}

namespace {

template <typename Params, typename Build>
std::vector<SweepPoint> run_sweep(const Params& base, std::span<const double> ratios,
                                  const EnsembleSpec& spec, Build&& build_with_ratio) {
  if (spec.n_trajectories < 100) {
    throw std::invalid_argument("coincidence_sweep: n_trajectories must be >= 100");
  }
  std::vector<SweepPoint> out;
  out.reserve(ratios.size());
  for (const double ratio : ratios) {
    if (!(ratio >= 1.0)) {
      throw std::invalid_argument("coincidence_sweep: ratios must be >= 1");
    }
    try {
      const JumpEngine engine(build_with_ratio(base, ratio));
      const auto records = run_ensemble(
          engine, {spec.n_trajectories, spec.t_max, spec.base_seed, spec.threads, nullptr});
      out.push_back({ratio, coincidence_counts(records)});
    } catch (const std::exception& e) {
      throw std::runtime_error("coincidence sweep at ratio " + std::to_string(ratio) + ": " +
                               e.what());
    }
  }
  return out;
}

}  // namespace

std::vector<SweepPoint> coincidence_sweep(const CavityQEDParams& base, SweepVariable variable,
                                          std::span<const double> ratios,
                                          const EnsembleSpec& spec) {
  return run_sweep(base, ratios, spec, [variable](CavityQEDParams p, double ratio) {
    if (variable == SweepVariable::Kappa2Ratio) {
      p.kappa_2 = ratio * p.kappa_1;
    } else {
      p.gamma_2 = ratio * p.gamma_1;
    }
    return build_cavity_qed_model(p);
  });
}

std::vector<SweepPoint> coincidence_sweep(const TwoAtomParams& base, SweepVariable variable,
                                          std::span<const double> ratios,
                                          const EnsembleSpec& spec) {
  if (variable != SweepVariable::Gamma2Ratio) {
    throw std::invalid_argument("two-atom sweeps vary gamma_2 only");
  }
  return run_sweep(base, ratios, spec, [](TwoAtomParams p, double ratio) {
    p.gamma_2 = ratio * p.gamma_1;
    return build_two_atom_model(p);
  });
}

std::size_t DelayHistogram::total_coincidence() const {
  return std::accumulate(coincidence.begin(), coincidence.end(), std::size_t{0});
}

std::size_t DelayHistogram::total_anticoincidence() const {
  return std::accumulate(anticoincidence.begin(), anticoincidence.end(), std::size_t{0});
}

DelayHistogram make_delay_histogram(double bin_width, double max_delay) {
  if (!(bin_width > 0.0) || !std::isfinite(bin_width)) {
    throw std::invalid_argument("delay histogram: bin_width must be > 0");
  }
  if (!(max_delay > 0.0) || !std::isfinite(max_delay)) {
    throw std::invalid_argument("delay histogram: max_delay must be > 0");
  }
  DelayHistogram h;
  h.bin_width = bin_width;
  const auto n_bins =
      std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(max_delay / bin_width - 1e-9)));
  h.edges.resize(n_bins + 1);
  for (std::size_t i = 0; i <= n_bins; ++i) h.edges[i] = static_cast<double>(i) * bin_width;
  h.coincidence.assign(n_bins, 0);
  h.anticoincidence.assign(n_bins, 0);
  return h;
}

DelayHistogram delay_histogram(std::span<const TrajectoryRecord> records, double bin_width,
                               double max_delay) {
  auto h = make_delay_histogram(bin_width, max_delay);
  for (const auto& rec : records) {
    const auto pair = first_two_clicks(rec);
    if (!pair) continue;
    add_delay(h, pair->second.time - pair->first.time, pair->first.label == pair->second.label);
  }
  return h;
}

DelayHistogram independent_union(std::span<const TrajectoryRecord> a,
                                 std::span<const TrajectoryRecord> b, double bin_width,
                                 double max_delay) {
  if (a.size() != b.size()) {
    throw std::invalid_argument("independent_union: ensembles differ in length");
  }
  auto h = make_delay_histogram(bin_width, max_delay);
  for (std::size_t i = 0; i < a.size(); ++i) {
    const auto ca = first_click(a[i]);
    const auto cb = first_click(b[i]);
    if (!ca || !cb) continue;
    add_delay(h, std::abs(cb->time - ca->time), ca->label == cb->label);
  }
  return h;
}

double half_max_delay(const DelayHistogram& h) {
  const auto& c = h.coincidence;
  if (c.empty()) return 0.0;
  const auto peak_it = std::max_element(c.begin(), c.end());
  const double half = 0.5 * static_cast<double>(*peak_it);
  auto center = [&](std::size_t i) { return (static_cast<double>(i) + 0.5) * h.bin_width; };
  for (auto i = static_cast<std::size_t>(peak_it - c.begin()) + 1; i < c.size(); ++i) {
    const auto v = static_cast<double>(c[i]);
    if (v <= half) {
      const auto prev = static_cast<double>(c[i - 1]);
      const double frac = prev > v ? (prev - half) / (prev - v) : 0.0;
      return center(i - 1) + frac * h.bin_width;
    }
  }
  return center(c.size() - 1);
}

}  // namespace homjump
