#pragma once

// Monte-Carlo wavefunction trajectories: exact no-jump propagation, waiting
// times by norm root-finding, channel selection by cumulative weights,
// renormalized jumps.

#include <cstdint>
#include <optional>
#include <random>
#include <vector>

#include "homjump/algebra.hpp"
#include "homjump/propagator.hpp"
#include "homjump/sources.hpp"

namespace homjump {

/// Per-trajectory random stream. Seeded with base_seed + trajectory index so
/// that serial and parallel ensembles draw identical numbers. Each jump
/// consumes one draw for the waiting time and then one for the channel.
class TrajectoryRng {
 public:
  explicit TrajectoryRng(std::uint64_t seed) : engine_(seed) {}

  /// Uniform on the open interval (0, 1).
  double open_unit() { return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53; }
  /// Uniform on [0, 1).
  double unit() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

 private:
  std::mt19937_64 engine_;
};

struct JumpEvent {
  double time;
  ChannelLabel label;

  bool operator==(const JumpEvent&) const = default;
};

struct TrajectoryRecord {
  std::vector<JumpEvent> events;
  StateVector final_state;
  double terminated_at = 0.0;
  std::uint64_t rng_seed = 0;
  /// Renormalized expectation values at the sampling grid, grid-major
  /// (samples[i * n_observables + k]); empty unless sampling was requested.
  std::vector<double> samples;

  std::size_t detector_event_count() const;
};

/// Grid times and observables to record along each trajectory.
struct SamplingPlan {
  std::vector<double> times;
  std::vector<OperatorMatrix> observables;
};

struct TrajectoryConfig {
  SystemModel model;
  double t_max = 1.0;
  double norm_root_tolerance = 1e-10;
  std::uint64_t rng_seed = 0;
};

/// Time t in (0, t_max] with |psi(t)|^2 = r for the segment's normalized start
/// state, or nullopt when |psi(t_max)|^2 > r. The root is bracketed by doubling
/// from initial_step, then refined by Illinois false position with bisection
/// fallback until |norm - r| <= tol.
std::optional<double> sample_jump_time(const Propagator::Segment& segment, double r, double t_max,
                                       double tol, double initial_step);

std::optional<double> sample_jump_time(const Propagator& propagator, const StateVector& psi,
                                       double r, double t_max, double tol = 1e-10);

/// Channel c with probability w_c / sum(w), w_c = <psi|J_c^dag J_c|psi>, by
/// cumulative-sum inversion of u in channel order.
ChannelLabel select_channel(const StateVector& psi, const std::vector<JumpChannel>& channels,
                            double u);

class JumpEngine {
 public:
  explicit JumpEngine(SystemModel model, double norm_root_tolerance = 1e-10);

  const SystemModel& model() const { return model_; }
  const Propagator& propagator() const { return propagator_; }

  TrajectoryRecord run(double t_max, std::uint64_t seed, const SamplingPlan* plan = nullptr) const;

 private:
  std::size_t choose_channel(const CVector& psi, double u) const;

  SystemModel model_;
  Propagator propagator_;
  double tolerance_;
  double initial_step_;
};

TrajectoryRecord run_trajectory(const TrajectoryConfig& cfg);

struct EnsembleOptions {
  std::size_t n_trajectories = 1;
  double t_max = 1.0;
  std::uint64_t base_seed = 0;
  unsigned threads = 0;  // 0: hardware concurrency
  const SamplingPlan* plan = nullptr;
};

/// Trajectory i runs with seed base_seed + i; records are returned in index
/// order regardless of thread count.
std::vector<TrajectoryRecord> run_ensemble(const JumpEngine& engine, const EnsembleOptions& opts);

unsigned resolve_thread_count(unsigned requested);

}  // namespace homjump
