#pragma once

// Aggregation of trajectory ensembles into expectation time series,
// same-detector coincidence fractions and click-delay histograms.

#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "homjump/jump_engine.hpp"
#include "homjump/sources.hpp"

namespace homjump {

/// Raised when a coincidence fraction is requested with no two-click records.
class UndefinedFraction : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

enum class Observable { N1, N2, E1, E2, Total };
inline constexpr std::size_t kObservableCount = 5;

/// n1, n2, e1, e2 and the total excitation for the model's layout. Missing
/// sites (no cavity in the two-atom model, no second subsystem in the single
/// cavity model) yield the zero operator.
std::vector<OperatorMatrix> standard_observables(const BasisLayout& layout);

struct ExpectationSeries {
  std::vector<double> t_grid;
  // [observable][grid index]
  std::vector<std::vector<double>> mean;
  std::vector<std::vector<double>> standard_error;
  std::size_t n_trajectories = 0;

  const std::vector<double>& mean_of(Observable o) const { return mean[static_cast<std::size_t>(o)]; }
  const std::vector<double>& se_of(Observable o) const {
    return standard_error[static_cast<std::size_t>(o)];
  }
};

struct EnsembleSpec {
  std::size_t n_trajectories = 1;
  double t_max = 1.0;
  std::uint64_t base_seed = 0;
  unsigned threads = 0;
};

/// Trajectory-averaged renormalized expectations at the grid times, standard
/// error = sample stddev / sqrt(N). Summation runs in trajectory order.
ExpectationSeries expectation_series(const JumpEngine& engine, const EnsembleSpec& spec,
                                     std::span<const double> t_grid);

struct CoincidenceResult {
  std::size_t n_trajectories = 0;
  std::size_t n_two_click = 0;
  std::size_t n_same_detector = 0;
  std::size_t n_diff_detector = 0;
  std::size_t n_discarded = 0;
  double coincidence_fraction = 0.0;
  double standard_error = 0.0;
};

/// Classifies each record by its first two detector clicks. Records with fewer
/// than two clicks are counted as discarded. Throws UndefinedFraction when no
/// record has two clicks.
CoincidenceResult coincidence_stats(std::span<const TrajectoryRecord> records);

/// Counts without the fraction; never throws.
CoincidenceResult coincidence_counts(std::span<const TrajectoryRecord> records);

enum class SweepVariable { Kappa2Ratio, Gamma2Ratio };

struct SweepPoint {
  double ratio;
  CoincidenceResult result;
};

/// Coincidence statistics with kappa_2 = ratio * kappa_1 or
/// gamma_2 = ratio * gamma_1. Exactly one of the base parameter sets is used
/// depending on which overload is called.
std::vector<SweepPoint> coincidence_sweep(const CavityQEDParams& base, SweepVariable variable,
                                          std::span<const double> ratios, const EnsembleSpec& spec);
std::vector<SweepPoint> coincidence_sweep(const TwoAtomParams& base, SweepVariable variable,
                                          std::span<const double> ratios, const EnsembleSpec& spec);

struct DelayHistogram {
  double bin_width = 0.0;
  std::vector<double> edges;  // size n_bins + 1, from 0
  std::vector<std::size_t> coincidence;
  std::vector<std::size_t> anticoincidence;

  std::size_t bin_count() const { return coincidence.size(); }
  std::size_t total_coincidence() const;
  std::size_t total_anticoincidence() const;
};

/// Empty histogram with ceil(max_delay / bin_width) bins covering [0, max_delay].
DelayHistogram make_delay_histogram(double bin_width, double max_delay);

/// Delay t2 - t1 between the first two detector clicks of each two-click record.
DelayHistogram delay_histogram(std::span<const TrajectoryRecord> records, double bin_width,
                               double max_delay);

/// Pairs record i of a with record i of b (single-source runs, one click each).
/// Pairs where either side recorded no click are skipped. Delay is
/// |t_b - t_a|; same detector label counts as a coincidence.
DelayHistogram independent_union(std::span<const TrajectoryRecord> a,
                                 std::span<const TrajectoryRecord> b, double bin_width,
                                 double max_delay);

/// Delay at which the coincidence counts first fall to half of the histogram
/// maximum, linearly interpolated between bin centers.
double half_max_delay(const DelayHistogram& h);

}  // namespace homjump
