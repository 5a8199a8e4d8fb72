#include "homjump/jump_engine.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <limits>
#include <stdexcept>
#include <string>
#include <thread>

namespace homjump {

namespace {

constexpr int kMaxRootIterations = 200;
constexpr double kGroundTolerance = 1e-12;

double max_row_sum(const CMatrix& m) { return m.cwiseAbs().rowwise().sum().maxCoeff(); }

}  // namespace

std::size_t TrajectoryRecord::detector_event_count() const {
  return static_cast<std::size_t>(std::count_if(
      events.begin(), events.end(), [](const JumpEvent& e) { return is_detector_label(e.label); }));
}

std::optional<double> sample_jump_time(const Propagator::Segment& segment, double r, double t_max,
                                       double tol, double initial_step) {
  if (!(r > 0.0 && r < 1.0)) {
    throw std::invalid_argument("sample_jump_time: r must lie in (0, 1)");
  }
  if (!(t_max > 0.0)) {
    throw std::invalid_argument("sample_jump_time: t_max must be > 0");
  }
  auto f = [&](double t) { return segment.squared_norm(t) - r; };

  double f_hi = f(t_max);
  if (f_hi > 0.0) return std::nullopt;

  double lo = 0.0;
  double f_lo = 1.0 - r;
  double hi = std::min(initial_step > 0.0 ? initial_step : t_max, t_max);
  while (hi < t_max) {
    const double v = f(hi);
    if (v <= 0.0) {
      f_hi = v;
      break;
    }
    lo = hi;
    f_lo = v;
    hi = std::min(2.0 * hi, t_max);
  }

  int side = 0;  // Illinois: which end was retained last
  for (int it = 0; it < kMaxRootIterations; ++it) {
    double t = (lo * f_hi - hi * f_lo) / (f_hi - f_lo);
    if (!(t > lo && t < hi)) t = 0.5 * (lo + hi);
    if (it % 8 == 7) t = 0.5 * (lo + hi);  // guaranteed bracket shrink
    const double v = f(t);
    if (std::abs(v) <= tol) return t;
    if (v > 0.0) {
      lo = t;
      f_lo = v;
      if (side == -1) f_hi *= 0.5;
      side = -1;
    } else {
      hi = t;
      f_hi = v;
      if (side == 1) f_lo *= 0.5;
      side = 1;
    }
    if (hi - lo <= 4.0 * std::numeric_limits<double>::epsilon() * hi) return 0.5 * (lo + hi);
  }
  throw NumericalFailure("sample_jump_time: root finder did not converge");
}

std::optional<double> sample_jump_time(const Propagator& propagator, const StateVector& psi,
                                       double r, double t_max, double tol) {
  if (std::abs(psi.squared_norm() - 1.0) > 1e-9) {
    throw std::invalid_argument("sample_jump_time: psi must be normalized");
  }
  return sample_jump_time(propagator.segment(psi.amplitudes()), r, t_max, tol, t_max);
}

ChannelLabel select_channel(const StateVector& psi, const std::vector<JumpChannel>& channels,
                            double u) {
  if (!(u >= 0.0 && u < 1.0)) {
    throw std::invalid_argument("select_channel: u must lie in [0, 1)");
  }
  std::vector<double> weights;
  weights.reserve(channels.size());
  double total = 0.0;
  for (const auto& c : channels) {
    const double w = apply(c.op, psi).squared_norm();
    weights.push_back(w);
    total += w;
  }
  if (!(total > 0.0)) {
    throw std::logic_error("select_channel: all channel weights are zero");
  }
  const double target = u * total;
  double cumulative = 0.0;
  for (std::size_t i = 0; i < channels.size(); ++i) {
    cumulative += weights[i];
    if (target < cumulative) return channels[i].label;
  }
  // u*total rounded up to total: last channel with nonzero weight
  for (std::size_t i = channels.size(); i-- > 0;) {
    if (weights[i] > 0.0) return channels[i].label;
  }
  return channels.back().label;
}

JumpEngine::JumpEngine(SystemModel model, double norm_root_tolerance)
    : model_(std::move(model)),
      propagator_(model_.h_nonhermitian()),
      tolerance_(norm_root_tolerance) {
  if (!(tolerance_ > 0.0)) {
    throw std::invalid_argument("JumpEngine: norm_root_tolerance must be > 0");
  }
  const double rate = max_row_sum(model_.h_nonhermitian().entries());
  initial_step_ = rate > 0.0 ? 0.1 / rate : 0.0;
}

std::size_t JumpEngine::choose_channel(const CVector& psi, double u) const {
  const auto& rates = model_.channel_rates();
  std::vector<double> weights(rates.size());
  double total = 0.0;
  for (std::size_t i = 0; i < rates.size(); ++i) {
    weights[i] = psi.dot(rates[i] * psi).real();
    total += weights[i];
  }
  if (!(total > 0.0)) {
    throw std::logic_error("jump sampled but no channel is active");
  }
  const double target = u * total;
  double cumulative = 0.0;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    cumulative += weights[i];
    if (target < cumulative && weights[i] > 0.0) return i;
  }
  for (std::size_t i = weights.size(); i-- > 0;) {
    if (weights[i] > 0.0) return i;
  }
  return weights.size() - 1;
}

TrajectoryRecord JumpEngine::run(double t_max, std::uint64_t seed, const SamplingPlan* plan) const {
  if (!(t_max > 0.0) || !std::isfinite(t_max)) {
    throw std::invalid_argument("run_trajectory: t_max must be finite and > 0");
  }
  const auto& layout = model_.layout();
  std::vector<const CMatrix*> observables;
  if (plan != nullptr) {
    for (std::size_t i = 0; i < plan->times.size(); ++i) {
      const double t = plan->times[i];
      if (!(t >= 0.0 && t <= t_max) || (i > 0 && !(t > plan->times[i - 1]))) {
        throw std::invalid_argument("sampling grid must be increasing within [0, t_max]");
      }
    }
    for (const auto& obs : plan->observables) {
      if (!(obs.layout() == layout)) {
        throw std::invalid_argument("sampling observable layout mismatch");
      }
      observables.push_back(&obs.entries());
    }
  }

  TrajectoryRecord rec;
  rec.rng_seed = seed;
  TrajectoryRng rng(seed);

  std::size_t next_sample = 0;
  const std::size_t n_obs = observables.size();
  if (plan != nullptr) rec.samples.assign(plan->times.size() * n_obs, 0.0);

  auto record_samples = [&](const Propagator::Segment& seg, double seg_start, double until,
                            bool inclusive) {
    if (plan == nullptr) return;
    while (next_sample < plan->times.size()) {
      const double t = plan->times[next_sample];
      if (inclusive ? t > until : t >= until) break;
      CVector psi = seg.state(t - seg_start);
      psi /= psi.norm();
      for (std::size_t k = 0; k < n_obs; ++k) {
        rec.samples[next_sample * n_obs + k] = psi.dot(*observables[k] * psi).real();
      }
      ++next_sample;
    }
  };

  CVector psi = model_.initial_state().amplitudes();
  double now = 0.0;
  while (true) {
    const auto seg = propagator_.segment(psi);
    const double horizon = t_max - now;
    std::optional<double> dt;
    if (horizon > 0.0) {
      const double r = rng.open_unit();
      dt = sample_jump_time(seg, r, horizon, tolerance_, initial_step_);
    }
    if (!dt) {
      record_samples(seg, now, t_max, true);
      CVector final_psi = seg.state(std::max(horizon, 0.0));
      final_psi /= final_psi.norm();
      rec.final_state = StateVector(layout, std::move(final_psi));
      rec.terminated_at = t_max;
      return rec;
    }
    double t_jump = now + *dt;
    if (!(t_jump > now)) t_jump = std::nextafter(now, t_max);
    record_samples(seg, now, t_jump, false);

    const CVector pre = seg.state(t_jump - now);
    const double u = rng.unit();
    const std::size_t c = choose_channel(pre, u);
    rec.events.push_back({t_jump, model_.channels()[c].label});

    psi = model_.channels()[c].op.entries() * pre;
    psi /= psi.norm();
    now = t_jump;

    if (1.0 - std::norm(psi(0)) <= kGroundTolerance) {
      // global ground state: no channel can fire again
      const auto ground = propagator_.segment(psi);
      record_samples(ground, now, t_max, true);
      rec.final_state = StateVector(layout, std::move(psi));
      rec.terminated_at = now;
      return rec;
    }
  }
}

TrajectoryRecord run_trajectory(const TrajectoryConfig& cfg) {
  JumpEngine engine(cfg.model, cfg.norm_root_tolerance);
  return engine.run(cfg.t_max, cfg.rng_seed);
}

unsigned resolve_thread_count(unsigned requested) {
  if (requested > 0) return requested;
  const unsigned hw = std::thread::hardware_concurrency();
  return hw > 0 ? hw : 1;
}

std::vector<TrajectoryRecord> run_ensemble(const JumpEngine& engine, const EnsembleOptions& opts) {
  if (opts.n_trajectories == 0) {
    throw std::invalid_argument("run_ensemble: n_trajectories must be >= 1");
  }
  const std::size_t n = opts.n_trajectories;
  std::vector<TrajectoryRecord> records(n);
  std::vector<std::exception_ptr> errors(n);
  std::atomic<std::size_t> next{0};

  auto worker = [&] {
    for (std::size_t i = next.fetch_add(1); i < n; i = next.fetch_add(1)) {
      try {
        records[i] = engine.run(opts.t_max, opts.base_seed + i, opts.plan);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };

  const unsigned threads = std::min<std::size_t>(resolve_thread_count(opts.threads), n);
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(threads);
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
  }

  for (std::size_t i = 0; i < n; ++i) {
    if (!errors[i]) continue;
    const std::string where = "trajectory " + std::to_string(i) + " (seed " +
                              std::to_string(opts.base_seed + i) + "): ";
    try {
      std::rethrow_exception(errors[i]);
    } catch (const NumericalFailure& e) {
      throw NumericalFailure(where + e.what());
    } catch (const std::logic_error& e) {
      throw std::logic_error(where + e.what());
    } catch (const std::exception& e) {
      throw std::runtime_error(where + e.what());
    }
  }
  return records;
}

}  // namespace homjump
